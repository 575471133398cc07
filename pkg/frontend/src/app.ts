/** Orchestrates one coder's labeling flow against the service.
 *
 * Optimistic about nothing: every submitted label round-trips through
 * the API before the next item loads.  Service rejections surface as
 * an inline error and leave the draft untouched; transport failures
 * queue the label for retry and raise the offline indicator.
 */

import { ApiError } from "./api.js";
import type { AnnotateClient, ClassName, NextItem } from "./api.js";
import {
  draftToSubmission,
  emptyDraft,
  submitBlockReason,
  toggleClass,
  toggleCriterion,
} from "./state.js";
import type { Draft, QueuedLabel } from "./state.js";
import { render } from "./view.js";
import type { ViewHandlers, ViewModel } from "./view.js";

export class LabelingApp implements ViewHandlers {
  private model: ViewModel;
  private queue: QueuedLabel[] = [];

  constructor(
    private readonly root: HTMLElement,
    private readonly api: AnnotateClient,
    readonly sessionId: string,
    readonly coder: string,
  ) {
    this.model = {
      coder,
      sessionId,
      phase: "loading",
      item: null,
      draft: emptyDraft(),
      catalog: null,
      agreement: null,
      error: null,
      offlineQueued: 0,
      activeGroup: "expert",
    };
  }

  get draft(): Draft {
    return this.model.draft;
  }

  get phase(): string {
    return this.model.phase;
  }

  get currentItem(): NextItem | null {
    return this.model.item;
  }

  async start(): Promise<void> {
    this.model.catalog = await this.api.criteria();
    await this.loadNext();
  }

  private paint(): void {
    render(this.root, this.model, this);
  }

  private async loadNext(): Promise<void> {
    try {
      const item = await this.api.next(this.sessionId, this.coder);
      if (item.comment_id === null) {
        await this.refreshAgreement(item.state);
      } else {
        this.model.item = item;
        this.model.phase = "labeling";
        this.model.draft = emptyDraft();
      }
      this.paint();
    } catch (error) {
      this.fail(error);
    }
  }

  private async refreshAgreement(stateHint?: string): Promise<void> {
    this.model.agreement = await this.api.agreement(this.sessionId);
    const state = this.model.agreement.state;
    if (state === "closed") {
      this.model.phase = "done";
    } else if (state === "adjudication") {
      this.model.phase = "adjudication";
    } else {
      // round finished for this coder (or gate screen after closing)
      this.model.phase = "round_done";
    }
    void stateHint;
  }

  private fail(error: unknown): void {
    if (error instanceof ApiError) {
      this.model.error = `${error.code}: ${error.message}`;
    } else {
      this.model.error = "service unreachable";
    }
    this.paint();
  }

  // -- ViewHandlers -----------------------------------------------------

  onToggleClass(cls: ClassName): void {
    toggleClass(this.model.draft, cls);
    this.model.activeGroup = cls;
    this.model.error = null;
    this.paint();
  }

  onToggleCriterion(id: string): void {
    toggleCriterion(this.model.draft, id);
    this.model.error = null;
    this.paint();
  }

  onSubmit(): void {
    void this.submit();
  }

  async submit(): Promise<void> {
    if (this.model.phase !== "labeling" || !this.model.item || !this.model.catalog) {
      return;
    }
    const reason = submitBlockReason(this.model.draft, this.model.catalog);
    if (reason !== null) {
      this.model.error = reason;
      this.paint();
      return;
    }
    const submission = draftToSubmission(
      this.model.draft,
      this.coder,
      this.model.item.comment_id!,
    );
    try {
      await this.api.submitLabel(this.sessionId, submission);
      this.model.error = null;
      await this.loadNext();
    } catch (error) {
      if (error instanceof ApiError) {
        // rejection: keep the draft so nothing is silently lost
        this.fail(error);
      } else {
        this.queue.push({ submission });
        this.model.offlineQueued = this.queue.length;
        this.model.error = null;
        this.paint();
      }
    }
  }

  onRetryQueue(): void {
    void this.flushQueue();
  }

  async flushQueue(): Promise<void> {
    while (this.queue.length > 0) {
      const queued = this.queue[0]!;
      try {
        await this.api.submitLabel(this.sessionId, queued.submission);
      } catch (error) {
        if (error instanceof ApiError && error.code === "double_submission") {
          // already landed server-side before the connection dropped
        } else if (error instanceof ApiError) {
          this.queue.shift();
          this.model.offlineQueued = this.queue.length;
          this.fail(error);
          continue;
        } else {
          this.model.offlineQueued = this.queue.length;
          this.paint();
          return; // still offline
        }
      }
      this.queue.shift();
    }
    this.model.offlineQueued = 0;
    await this.loadNext();
  }

  onCloseRound(): void {
    void (async () => {
      try {
        await this.api.closeRound(this.sessionId);
        this.model.error = null;
        await this.refreshAgreement();
        this.paint();
      } catch (error) {
        this.fail(error);
      }
    })();
  }

  onContinue(): void {
    void this.loadNext();
  }

  onAdjudicate(commentId: string, finalClass: ClassName): void {
    void (async () => {
      try {
        await this.api.adjudicate(this.sessionId, {
          comment_id: commentId,
          final_class: finalClass,
        });
        this.model.error = null;
        await this.refreshAgreement();
        this.paint();
      } catch (error) {
        this.fail(error);
      }
    })();
  }

  /** Keyboard-first labeling: digits toggle the active group's
   * criteria, e/n/o toggle evidence classes, Enter submits. */
  onKey(event: KeyboardEvent): void {
    if (this.model.phase !== "labeling" || !this.model.catalog) return;
    const key = event.key;
    if (key === "Enter") {
      event.preventDefault();
      this.onSubmit();
      return;
    }
    const classKeys: Record<string, ClassName> = {
      e: "expert",
      n: "non_expert",
      o: "out_of_scope",
    };
    if (key in classKeys) {
      this.onToggleClass(classKeys[key]!);
      return;
    }
    if (/^[1-9]$/.test(key)) {
      const group = this.model.catalog[this.model.activeGroup];
      const criterion = group[Number(key) - 1];
      if (criterion) this.onToggleCriterion(criterion.id);
    }
  }
}
