/**
 * Workspace wiring: one session per tab, session id kept in the URL hash
 * so a workspace can be shared or reloaded. The only configuration is the
 * service base URL (?service=... or same-origin default).
 */

import { ApiClient } from "./api.js";
import * as state from "./state.js";
import { renderHistory, renderHypothesis, renderLegend, renderStats } from "./render.js";

function serviceBaseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const override = params.get("service");
  if (override) {
    return override.replace(/\/$/, "");
  }
  return window.location.origin;
}

function sessionIdFromHash(): string | null {
  const match = window.location.hash.match(/s=([0-9a-f]+)/);
  return match ? match[1]! : null;
}

const api = new ApiClient(serviceBaseUrl());
let current = state.initialState();

const el = {
  source: document.getElementById("source") as HTMLTextAreaElement,
  translate: document.getElementById("translate") as HTMLButtonElement,
  hypothesis: document.getElementById("hypothesis") as HTMLDivElement,
  legend: document.getElementById("legend") as HTMLDivElement,
  draft: document.getElementById("draft") as HTMLTextAreaElement,
  submit: document.getElementById("submit") as HTMLButtonElement,
  clear: document.getElementById("clear") as HTMLButtonElement,
  error: document.getElementById("error") as HTMLDivElement,
  stats: document.getElementById("stats") as HTMLDivElement,
  history: document.getElementById("history") as HTMLDivElement,
  session: document.getElementById("session") as HTMLSpanElement,
};

function apply(next: state.WorkspaceState): void {
  current = next;
  el.session.textContent = current.sessionId ?? "connecting";
  el.translate.disabled = !state.canTranslate(current);
  el.submit.disabled = !state.canSubmit(current);
  el.clear.disabled = current.pending || current.sessionId === null;
  el.draft.disabled = !state.canEditDraft(current);
  if (el.draft.value !== current.draft) {
    el.draft.value = current.draft;
  }
  el.error.textContent = current.error ?? "";
  el.error.hidden = current.error === null;
  el.hypothesis.replaceChildren(
    renderHypothesis(current.hypothesis ? current.hypothesis.diagnostics : []),
  );
  el.stats.replaceChildren(renderStats(current.stats));
  el.history.replaceChildren(renderHistory(current.history));
}

async function refreshStats(): Promise<void> {
  if (current.sessionId === null) return;
  const stats = await api.stats(current.sessionId);
  apply(state.statsLoaded(current, stats));
}

async function ensureSession(): Promise<void> {
  const existing = sessionIdFromHash();
  if (existing) {
    try {
      await api.stats(existing);
      apply(state.sessionCreated(current, existing));
      await refreshStats();
      return;
    } catch {
      // stale id in the hash; fall through and create a fresh session
    }
  }
  const sessionId = await api.createSession({});
  window.location.hash = `s=${sessionId}`;
  apply(state.sessionCreated(current, sessionId));
  await refreshStats();
}

el.source.addEventListener("input", () => {
  apply(state.editSource(current, el.source.value));
});

el.draft.addEventListener("input", () => {
  apply(state.editDraft(current, el.draft.value));
});

el.translate.addEventListener("click", async () => {
  if (!state.canTranslate(current)) return;
  apply(state.requestStarted(current));
  try {
    const response = await api.translate(current.sessionId!, current.source);
    apply(state.translated(current, response));
  } catch (err) {
    apply(state.requestFailed(current, String(err)));
  }
});

el.submit.addEventListener("click", async () => {
  if (!state.canSubmit(current)) return;
  apply(state.requestStarted(current));
  try {
    await api.correct(current.sessionId!, current.source, current.draft);
    apply(state.corrected(current));
    await refreshStats();
  } catch (err) {
    apply(state.requestFailed(current, String(err)));
  }
});

el.clear.addEventListener("click", async () => {
  if (current.pending || current.sessionId === null) return;
  apply(state.requestStarted(current));
  try {
    await api.clear(current.sessionId);
    apply(state.cleared(current));
    await refreshStats();
  } catch (err) {
    apply(state.requestFailed(current, String(err)));
  }
});

el.legend.replaceChildren(renderLegend());
apply(current);
ensureSession().catch((err) => apply(state.requestFailed(current, String(err))));
