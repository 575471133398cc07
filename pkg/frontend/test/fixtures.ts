import type { CriteriaCatalog } from "../src/api.js";

/** Checklist shaped like the served asset: 12 expert, 5 non-expert,
 * 9 out-of-scope items, expert gate at 3. */
export const catalog: CriteriaCatalog = {
  version: 1,
  expert_minimum: 3,
  expert: Array.from({ length: 12 }, (_, i) => ({
    id: `e${i + 1}`,
    text: `expert criterion ${i + 1}`,
  })),
  non_expert: Array.from({ length: 5 }, (_, i) => ({
    id: `n${i + 1}`,
    text: `non-expert criterion ${i + 1}`,
  })),
  out_of_scope: Array.from({ length: 9 }, (_, i) => ({
    id: `o${i + 1}`,
    text: `out-of-scope criterion ${i + 1}`,
  })),
};
