/** Pure labeling-draft state and the client-side submit gate.
 *
 * The gate mirrors the service rule (it never replaces it): the
 * evidence set must be non-empty, and expert evidence needs at least
 * `expert_minimum` checked expert criteria.  The server re-validates
 * every submission.
 */

import type { ClassName, CriteriaCatalog, LabelSubmission } from "./api.js";

export interface Draft {
  classes: Set<ClassName>;
  criteria: Set<string>;
}

export function emptyDraft(): Draft {
  return { classes: new Set(), criteria: new Set() };
}

export function toggleClass(draft: Draft, cls: ClassName): void {
  if (draft.classes.has(cls)) {
    draft.classes.delete(cls);
  } else {
    draft.classes.add(cls);
  }
}

export function toggleCriterion(draft: Draft, id: string): void {
  if (draft.criteria.has(id)) {
    draft.criteria.delete(id);
  } else {
    draft.criteria.add(id);
  }
}

export function expertCriteriaCount(draft: Draft, catalog: CriteriaCatalog): number {
  const expertIds = new Set(catalog.expert.map((c) => c.id));
  let count = 0;
  for (const id of draft.criteria) {
    if (expertIds.has(id)) count += 1;
  }
  return count;
}

/** null when submittable, otherwise the human-readable blocker. */
export function submitBlockReason(
  draft: Draft,
  catalog: CriteriaCatalog,
): string | null {
  if (draft.classes.size === 0) {
    return "select at least one evidence class";
  }
  if (draft.classes.has("expert")) {
    const have = expertCriteriaCount(draft, catalog);
    if (have < catalog.expert_minimum) {
      return `expert evidence needs at least ${catalog.expert_minimum} expert criteria (${have} checked)`;
    }
  }
  return null;
}

export function draftToSubmission(
  draft: Draft,
  coder: string,
  commentId: string,
): LabelSubmission {
  return {
    coder,
    comment_id: commentId,
    classes: [...draft.classes].sort() as ClassName[],
    criteria: [...draft.criteria].sort(),
  };
}

/** Labels captured while the service was unreachable, retried in order. */
export interface QueuedLabel {
  submission: LabelSubmission;
}
