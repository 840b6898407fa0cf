/**
 * DOM builders. Thin: every function maps state to elements and attaches
 * no state of its own.
 */

import type { StatsResponse, TokenDiagnostics } from "./api.js";
import { formatLambda, lambdaColor, legendStops, textColor, tokenTooltip } from "./heatmap.js";
import type { HistoryEntry } from "./state.js";

export function renderHypothesis(diagnostics: TokenDiagnostics[]): HTMLElement {
  const container = document.createElement("div");
  container.className = "hypothesis-tokens";
  for (const diag of diagnostics) {
    const chip = document.createElement("span");
    chip.className = "token-chip";
    chip.textContent = diag.token;
    chip.style.backgroundColor = lambdaColor(diag.lambda);
    chip.style.color = textColor(diag.lambda);
    chip.title = tokenTooltip(diag);
    chip.dataset.lambda = formatLambda(diag.lambda);
    container.appendChild(chip);
  }
  if (diagnostics.length === 0) {
    const empty = document.createElement("span");
    empty.className = "muted";
    empty.textContent = "(empty hypothesis)";
    container.appendChild(empty);
  }
  return container;
}

export function renderLegend(): HTMLElement {
  const legend = document.createElement("div");
  legend.className = "legend";
  const label = document.createElement("span");
  label.textContent = "base model";
  legend.appendChild(label);
  for (const stop of legendStops(8)) {
    const cell = document.createElement("span");
    cell.className = "legend-cell";
    cell.style.backgroundColor = stop.color;
    cell.title = `lambda = ${formatLambda(stop.lambda)}`;
    legend.appendChild(cell);
  }
  const right = document.createElement("span");
  right.textContent = "memory";
  legend.appendChild(right);
  return legend;
}

export function renderStats(stats: StatsResponse | null): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "stats-grid";
  const rows: [string, string][] = [];
  if (stats === null) {
    rows.push(["status", "no data yet"]);
  } else {
    rows.push(["token entries", String(stats.datastore.token_entries)]);
    rows.push(["policy entries", String(stats.datastore.policy_entries)]);
    rows.push(["corrected sentences", String(stats.adapted_sentences)]);
    if (stats.running.bleu !== undefined) {
      rows.push(["running BLEU", stats.running.bleu.toFixed(2)]);
    }
    if (stats.running.ter_noshift !== undefined) {
      rows.push(["running ter_noshift", stats.running.ter_noshift.toFixed(3)]);
    }
    for (const bucket of stats.lambda_buckets.buckets) {
      if (bucket.count > 0 && bucket.mean_lambda !== null) {
        rows.push([
          `mean λ @ p in [${bucket.low.toFixed(1)}, ${bucket.high.toFixed(1)})`,
          `${bucket.mean_lambda.toFixed(3)} (n=${bucket.count})`,
        ]);
      }
    }
  }
  for (const [key, value] of rows) {
    const k = document.createElement("dt");
    k.textContent = key;
    const v = document.createElement("dd");
    v.textContent = value;
    panel.append(k, v);
  }
  return panel;
}

export function renderHistory(history: readonly HistoryEntry[]): HTMLElement {
  const list = document.createElement("ol");
  list.className = "history";
  for (const entry of history) {
    const item = document.createElement("li");
    const src = document.createElement("div");
    src.textContent = `src: ${entry.source}`;
    const mt = document.createElement("div");
    mt.textContent = `mt:  ${entry.hypothesis}`;
    const pe = document.createElement("div");
    pe.textContent = `pe:  ${entry.correction}`;
    item.append(src, mt, pe);
    list.appendChild(item);
  }
  return list;
}
