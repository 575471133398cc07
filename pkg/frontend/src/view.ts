/** DOM builders for the labeling page.  No state lives in the DOM:
 * every render rebuilds from the app model, the server stays the
 * source of truth. */

import type {
  AgreementReport,
  ClassName,
  CriteriaCatalog,
  Criterion,
  NextItem,
} from "./api.js";
import type { Draft } from "./state.js";
import { submitBlockReason } from "./state.js";

export interface ViewHandlers {
  onToggleClass(cls: ClassName): void;
  onToggleCriterion(id: string): void;
  onSubmit(): void;
  onCloseRound(): void;
  onContinue(): void;
  onAdjudicate(commentId: string, finalClass: ClassName): void;
  onRetryQueue(): void;
}

export interface ViewModel {
  coder: string;
  sessionId: string;
  phase: "loading" | "labeling" | "round_done" | "adjudication" | "done";
  item: NextItem | null;
  draft: Draft;
  catalog: CriteriaCatalog | null;
  agreement: AgreementReport | null;
  error: string | null;
  offlineQueued: number;
  activeGroup: ClassName;
}

const CLASS_LABELS: Record<ClassName, string> = {
  expert: "Expert",
  non_expert: "Non-expert",
  out_of_scope: "Out of scope",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function header(model: ViewModel): HTMLElement {
  const state = model.agreement?.state ?? model.item?.state ?? "";
  return el(
    "header",
    { class: "topbar" },
    el("strong", {}, "annotation"),
    el("span", { "data-testid": "coder" }, `coder: ${model.coder}`),
    el("span", { "data-testid": "session-state" }, state ? `state: ${state}` : ""),
  );
}

function banner(model: ViewModel): HTMLElement[] {
  const nodes: HTMLElement[] = [];
  if (model.error) {
    nodes.push(
      el("div", { class: "banner error", "data-testid": "error" }, model.error),
    );
  }
  if (model.offlineQueued > 0) {
    const retry = el(
      "button",
      { "data-testid": "retry-queue", type: "button" },
      "retry now",
    );
    nodes.push(
      el(
        "div",
        { class: "banner offline", "data-testid": "offline" },
        `offline — ${model.offlineQueued} label(s) queued `,
        retry,
      ),
    );
  }
  return nodes;
}

function criteriaGroup(
  title: string,
  cls: ClassName,
  items: Criterion[],
  model: ViewModel,
  handlers: ViewHandlers,
): HTMLElement {
  const list = el("ol", { class: "criteria" });
  items.forEach((criterion, i) => {
    const checkbox = el("input", {
      type: "checkbox",
      "data-criterion": criterion.id,
      id: `crit-${criterion.id}`,
    }) as HTMLInputElement;
    checkbox.checked = model.draft.criteria.has(criterion.id);
    checkbox.addEventListener("change", () => handlers.onToggleCriterion(criterion.id));
    const hotkey = model.activeGroup === cls && i < 9 ? ` [${i + 1}]` : "";
    list.append(
      el(
        "li",
        {},
        checkbox,
        el("label", { for: `crit-${criterion.id}` }, `${criterion.text}${hotkey}`),
      ),
    );
  });
  const classButton = el(
    "button",
    {
      type: "button",
      class: "class-toggle",
      "data-class": cls,
      "aria-pressed": model.draft.classes.has(cls) ? "true" : "false",
    },
    `${title}${model.draft.classes.has(cls) ? " ✓" : ""}`,
  );
  classButton.addEventListener("click", () => handlers.onToggleClass(cls));
  return el("section", { class: `group ${cls}` }, classButton, list);
}

function labelPanel(model: ViewModel, handlers: ViewHandlers): HTMLElement {
  const item = model.item!;
  const catalog = model.catalog!;
  const reason = submitBlockReason(model.draft, catalog);
  const submit = el(
    "button",
    { type: "button", "data-testid": "submit" },
    "submit (enter)",
  ) as HTMLButtonElement;
  submit.disabled = reason !== null;
  submit.addEventListener("click", () => handlers.onSubmit());

  return el(
    "main",
    { class: "label-panel" },
    el(
      "div",
      { class: "context" },
      el("h2", { "data-testid": "post-title" }, item.post_title ?? "(no post context)"),
      el(
        "blockquote",
        { "data-testid": "comment-body" },
        item.body ?? `comment ${item.comment_id}`,
      ),
      el(
        "p",
        { "data-testid": "progress" },
        `round ${item.round_index + 1} — ${item.remaining_in_round ?? "?"} left for you`,
      ),
    ),
    criteriaGroup("Expert", "expert", catalog.expert, model, handlers),
    criteriaGroup("Non-expert", "non_expert", catalog.non_expert, model, handlers),
    criteriaGroup("Out of scope", "out_of_scope", catalog.out_of_scope, model, handlers),
    el(
      "div",
      { class: "submit-row" },
      submit,
      el("span", { "data-testid": "block-reason" }, reason ?? ""),
    ),
  );
}

function kappaBadge(agreement: AgreementReport): HTMLElement {
  const lastClosed = [...agreement.rounds].reverse().find((r) => r.kappa !== null);
  const kappa = lastClosed?.kappa ?? null;
  const passed = kappa !== null && kappa >= agreement.gate_threshold;
  return el(
    "div",
    {
      class: `badge ${passed ? "passed" : "failed"}`,
      "data-testid": "kappa-badge",
      "data-kappa": kappa === null ? "" : String(kappa),
    },
    kappa === null
      ? "kappa pending"
      : `kappa ${kappa.toFixed(3)} — gate ${passed ? "passed" : "not reached"}`,
  );
}

function agreementPanel(model: ViewModel, handlers: ViewHandlers): HTMLElement {
  const agreement = model.agreement!;
  const rows = agreement.rounds.map((round) =>
    el(
      "tr",
      {},
      el("td", {}, String(round.index + 1)),
      el("td", {}, String(round.n_items)),
      el("td", {}, round.kappa === null ? "—" : round.kappa.toFixed(3)),
    ),
  );
  const closeButton = el(
    "button",
    { type: "button", "data-testid": "close-round" },
    "close round",
  );
  closeButton.addEventListener("click", () => handlers.onCloseRound());
  const continueButton = el(
    "button",
    { type: "button", "data-testid": "continue" },
    "continue labeling",
  );
  continueButton.addEventListener("click", () => handlers.onContinue());
  return el(
    "main",
    { class: "agreement-panel" },
    el("h2", {}, "round agreement"),
    kappaBadge(agreement),
    el(
      "table",
      {},
      el(
        "thead",
        {},
        el("tr", {}, el("th", {}, "round"), el("th", {}, "items"), el("th", {}, "kappa")),
      ),
      el("tbody", {}, ...rows),
    ),
    el("div", {}, closeButton, continueButton),
  );
}

function adjudicationPanel(model: ViewModel, handlers: ViewHandlers): HTMLElement {
  const agreement = model.agreement!;
  const items = agreement.pending_adjudications.map((cid) => {
    const buttons = (Object.keys(CLASS_LABELS) as ClassName[]).map((cls) => {
      const button = el(
        "button",
        { type: "button", "data-adjudicate": `${cid}:${cls}` },
        CLASS_LABELS[cls],
      );
      button.addEventListener("click", () => handlers.onAdjudicate(cid, cls));
      return button;
    });
    return el("li", { "data-testid": "adjudication-item" }, el("code", {}, cid), ...buttons);
  });
  return el(
    "main",
    { class: "adjudication-panel" },
    el("h2", {}, "adjudication queue"),
    kappaBadge(agreement),
    items.length
      ? el("ul", { "data-testid": "adjudication-queue" }, ...items)
      : el("p", {}, "queue empty"),
  );
}

function donePanel(model: ViewModel): HTMLElement {
  return el(
    "main",
    { class: "done-panel" },
    el("h2", { "data-testid": "done" }, "session closed"),
    model.agreement ? kappaBadge(model.agreement) : "",
    el(
      "p",
      {},
      el(
        "a",
        { href: `/sessions/${model.sessionId}/export`, "data-testid": "export-link" },
        "download label export",
      ),
    ),
  ) as HTMLElement;
}

export function render(root: HTMLElement, model: ViewModel, handlers: ViewHandlers): void {
  root.replaceChildren();
  root.append(header(model));
  for (const node of banner(model)) {
    if (model.offlineQueued > 0) {
      const retry = node.querySelector('[data-testid="retry-queue"]');
      retry?.addEventListener("click", () => handlers.onRetryQueue());
    }
    root.append(node);
  }
  switch (model.phase) {
    case "loading":
      root.append(el("main", {}, "loading…"));
      break;
    case "labeling":
      if (model.item && model.catalog) root.append(labelPanel(model, handlers));
      break;
    case "round_done":
      if (model.agreement) root.append(agreementPanel(model, handlers));
      break;
    case "adjudication":
      if (model.agreement) root.append(adjudicationPanel(model, handlers));
      break;
    case "done":
      root.append(donePanel(model));
      break;
  }
}
