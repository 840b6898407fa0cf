/**
 * Interpolation-weight heatmap: a continuous monotone single-hue scale
 * from the base-model color (near white) to the datastore color (deep
 * teal). Intensity order always matches weight order.
 */

import type { TokenDiagnostics } from "./api.js";

const BASE_RGB: [number, number, number] = [247, 250, 250];
const MEMORY_RGB: [number, number, number] = [7, 110, 120];

export function clamp01(value: number): number {
  if (Number.isNaN(value)) return 0;
  return Math.min(1, Math.max(0, value));
}

export function lambdaColor(lambda: number): string {
  const t = clamp01(lambda);
  const channel = (i: number) =>
    Math.round(BASE_RGB[i]! + t * (MEMORY_RGB[i]! - BASE_RGB[i]!));
  return `rgb(${channel(0)}, ${channel(1)}, ${channel(2)})`;
}

/** Perceived lightness proxy; strictly decreasing in lambda. */
export function colorIntensity(lambda: number): number {
  const t = clamp01(lambda);
  const mix = (i: number) => BASE_RGB[i]! + t * (MEMORY_RGB[i]! - BASE_RGB[i]!);
  return 255 - (0.299 * mix(0) + 0.587 * mix(1) + 0.114 * mix(2));
}

/** Dark backgrounds need light text. */
export function textColor(lambda: number): string {
  return clamp01(lambda) > 0.55 ? "#ffffff" : "#1c2b2d";
}

export function formatLambda(lambda: number): string {
  return clamp01(lambda).toFixed(3);
}

export function legendStops(count = 6): { lambda: number; color: string }[] {
  const stops = [];
  for (let i = 0; i < count; i++) {
    const lambda = count === 1 ? 0 : i / (count - 1);
    stops.push({ lambda, color: lambdaColor(lambda) });
  }
  return stops;
}

function candidateLines(label: string, candidates: [string, number][]): string[] {
  if (candidates.length === 0) {
    return [`${label}: (no entries)`];
  }
  return [
    `${label}:`,
    ...candidates.map(([token, prob]) => `  ${token}  ${prob.toFixed(4)}`),
  ];
}

/** Plain-text tooltip for one token chip. */
export function tokenTooltip(diag: TokenDiagnostics): string {
  const lines = [
    `lambda = ${formatLambda(diag.lambda)}`,
    ...candidateLines("base model", diag.p_nmt_top),
    ...candidateLines("memory", diag.p_knn_top),
  ];
  if (diag.neighbor_distances.length > 0) {
    lines.push(
      `neighbor distances: ${diag.neighbor_distances
        .map((d) => d.toFixed(3))
        .join(", ")}`,
    );
  }
  return lines.join("\n");
}
