import { describe, expect, it } from "vitest";

import {
  clamp01,
  colorIntensity,
  formatLambda,
  lambdaColor,
  legendStops,
  tokenTooltip,
} from "../src/heatmap.js";

describe("lambda heatmap", () => {
  it("zero weight is the base color for every token", () => {
    const colors = [0, 0, 0].map(lambdaColor);
    expect(new Set(colors).size).toBe(1);
    expect(colors[0]).toBe(lambdaColor(0));
  });

  it("full weight is the darkest shade", () => {
    const intensities = [0, 0.25, 0.5, 0.75, 1].map(colorIntensity);
    expect(Math.max(...intensities)).toBe(colorIntensity(1));
  });

  it("shade intensity order matches weight order", () => {
    const lambdas = [0.05, 0.2, 0.33, 0.41, 0.58, 0.77, 0.9];
    const intensities = lambdas.map(colorIntensity);
    const sorted = [...intensities].sort((a, b) => a - b);
    expect(intensities).toEqual(sorted);
  });

  it("out-of-range weights clamp", () => {
    expect(lambdaColor(-0.5)).toBe(lambdaColor(0));
    expect(lambdaColor(1.5)).toBe(lambdaColor(1));
    expect(clamp01(Number.NaN)).toBe(0);
  });

  it("tooltips show lambda to three decimals", () => {
    expect(formatLambda(0.123456)).toBe("0.123");
    const tooltip = tokenTooltip({
      token: "dog",
      lambda: 0.87654,
      p_nmt_top: [["cat", 0.9]],
      p_knn_top: [["dog", 0.95]],
      neighbor_distances: [0.0, 1.2345],
    });
    expect(tooltip).toContain("lambda = 0.877");
    expect(tooltip).toContain("dog");
    expect(tooltip).toContain("1.234");
  });

  it("legend runs from base to memory color", () => {
    const stops = legendStops(5);
    expect(stops[0]!.color).toBe(lambdaColor(0));
    expect(stops[4]!.color).toBe(lambdaColor(1));
    expect(stops.map((s) => s.lambda)).toEqual([0, 0.25, 0.5, 0.75, 1]);
  });
});
