import type { Draft, DraftEntry, EntityClass, EntryStatus } from "./types";

/** Review-screen state: always derived from the last fetched draft version,
 * with a dirty flag until local edits reach the server. On a version
 * conflict the local edits are retained and the fresher server draft is
 * kept alongside for the reviewer to decide. */
export interface ReviewState {
  articleId: string;
  entityClass: EntityClass;
  version: number;
  entries: DraftEntry[];
  dirty: boolean;
  conflict: Draft | null;
}

export function fromDraft(draft: Draft): ReviewState {
  return {
    articleId: draft.article_id,
    entityClass: draft.entity_class,
    version: draft.version,
    entries: draft.entries.map((e) => ({ ...e })),
    dirty: false,
    conflict: null,
  };
}

function withEntries(state: ReviewState, entries: DraftEntry[]): ReviewState {
  return { ...state, entries, dirty: true };
}

export function setStatus(state: ReviewState, index: number, status: EntryStatus): ReviewState {
  const entries = state.entries.map((e, i) => (i === index ? { ...e, status } : e));
  return withEntries(state, entries);
}

export function acceptAll(state: ReviewState): ReviewState {
  const entries = state.entries.map((e) =>
    e.status === "proposed" ? { ...e, status: "accepted" as EntryStatus } : e,
  );
  return withEntries(state, entries);
}

export function editText(state: ReviewState, index: number, text: string): ReviewState {
  const entries = state.entries.map((e, i) => (i === index ? { ...e, text } : e));
  return withEntries(state, entries);
}

export function addEntry(state: ReviewState, text: string): ReviewState {
  const trimmed = text.trim();
  if (!trimmed) {
    return state;
  }
  const entry: DraftEntry = { text: trimmed, status: "added", source: "human", note: "" };
  return withEntries(state, [...state.entries, entry]);
}

export function removeEntry(state: ReviewState, index: number): ReviewState {
  return withEntries(
    state,
    state.entries.filter((_, i) => i !== index),
  );
}

export function markSaved(state: ReviewState, version: number): ReviewState {
  return { ...state, version, dirty: false, conflict: null };
}

/** A concurrent edit won the race: keep the local entries untouched and
 * surface the server's draft; nothing is overwritten silently. */
export function markConflict(state: ReviewState, serverDraft: Draft): ReviewState {
  return { ...state, conflict: serverDraft };
}

/** Reviewer chose to re-apply local edits on top of the server version. */
export function keepLocalEdits(state: ReviewState): ReviewState {
  if (!state.conflict) {
    return state;
  }
  return { ...state, version: state.conflict.version, conflict: null, dirty: true };
}

/** Reviewer chose to discard local edits and adopt the server draft. */
export function adoptServerDraft(state: ReviewState): ReviewState {
  if (!state.conflict) {
    return state;
  }
  return fromDraft(state.conflict);
}

export function keptEntries(state: ReviewState): string[] {
  return state.entries
    .filter((e) => e.status === "accepted" || e.status === "added")
    .map((e) => e.text);
}
