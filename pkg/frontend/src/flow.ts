import { ApiClient, ConflictError } from "./api";
import type { ReviewState } from "./state";
import { fromDraft, markConflict, markSaved } from "./state";
import type { EntityClass } from "./types";

export type SaveOutcome =
  | { kind: "saved"; state: ReviewState }
  | { kind: "conflict"; state: ReviewState };

export async function loadReview(
  api: ApiClient,
  articleId: string,
  entityClass: EntityClass,
): Promise<ReviewState> {
  return fromDraft(await api.getDraft(articleId, entityClass));
}

/** Persist the current entries under optimistic versioning. On a version
 * conflict the latest server draft is fetched and attached to the state so
 * the UI can ask the reviewer how to proceed; local edits stay intact. */
export async function saveReview(api: ApiClient, state: ReviewState): Promise<SaveOutcome> {
  try {
    const { version } = await api.putDraft(
      state.articleId,
      state.entityClass,
      state.version,
      state.entries,
    );
    return { kind: "saved", state: markSaved(state, version) };
  } catch (error) {
    if (error instanceof ConflictError) {
      const serverDraft = await api.getDraft(state.articleId, state.entityClass);
      return { kind: "conflict", state: markConflict(state, serverDraft) };
    }
    throw error;
  }
}
