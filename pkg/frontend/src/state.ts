/**
 * Workspace state machine.
 *
 * All transitions are pure: the UI layer renders whatever state says and
 * never keeps derived data of its own, so reloading and re-fetching
 * reproduces the same panel. One request may be in flight at a time;
 * history is append-only; the correction draft only becomes editable once
 * a hypothesis exists and survives failed submissions.
 */

import type { StatsResponse, TranslateResponse } from "./api.js";

export interface HistoryEntry {
  source: string;
  hypothesis: string;
  correction: string;
}

export interface WorkspaceState {
  sessionId: string | null;
  source: string;
  hypothesis: TranslateResponse | null;
  draft: string;
  history: readonly HistoryEntry[];
  stats: StatsResponse | null;
  pending: boolean;
  error: string | null;
}

export function initialState(): WorkspaceState {
  return {
    sessionId: null,
    source: "",
    hypothesis: null,
    draft: "",
    history: [],
    stats: null,
    pending: false,
    error: null,
  };
}

export function canEditDraft(state: WorkspaceState): boolean {
  return state.hypothesis !== null && !state.pending;
}

export function canSubmit(state: WorkspaceState): boolean {
  return canEditDraft(state) && state.draft.trim().length > 0;
}

export function canTranslate(state: WorkspaceState): boolean {
  return state.sessionId !== null && !state.pending && state.source.trim().length > 0;
}

export function sessionCreated(state: WorkspaceState, sessionId: string): WorkspaceState {
  return { ...state, sessionId, error: null };
}

export function editSource(state: WorkspaceState, source: string): WorkspaceState {
  return { ...state, source };
}

export function editDraft(state: WorkspaceState, draft: string): WorkspaceState {
  if (!canEditDraft(state)) {
    return state;
  }
  return { ...state, draft };
}

export function requestStarted(state: WorkspaceState): WorkspaceState {
  return { ...state, pending: true, error: null };
}

export function requestFailed(state: WorkspaceState, message: string): WorkspaceState {
  // the draft is deliberately preserved so a failed submit loses nothing
  return { ...state, pending: false, error: message };
}

export function translated(
  state: WorkspaceState,
  response: TranslateResponse,
): WorkspaceState {
  return {
    ...state,
    pending: false,
    error: null,
    hypothesis: response,
    // post-editing starts from the machine output
    draft: response.text,
  };
}

export function corrected(state: WorkspaceState): WorkspaceState {
  if (state.hypothesis === null) {
    return { ...state, pending: false };
  }
  const entry: HistoryEntry = {
    source: state.source,
    hypothesis: state.hypothesis.text,
    correction: state.draft,
  };
  return {
    ...state,
    pending: false,
    error: null,
    history: [...state.history, entry],
    hypothesis: null,
    draft: "",
  };
}

export function statsLoaded(state: WorkspaceState, stats: StatsResponse): WorkspaceState {
  return { ...state, stats };
}

export function cleared(state: WorkspaceState): WorkspaceState {
  return { ...state, pending: false, hypothesis: null, draft: "" };
}
