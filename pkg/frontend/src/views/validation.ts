// Review page, two tabs: the contributor's own QA-passed takes awaiting
// submit/redo, and the peer-validation queue. Every change re-fetches from
// the server; the queue also refreshes on a 15 s poll.

import { ApiError, type ApiClient } from "../api/client";
import type { SubmissionView } from "../api/types";
import { mountPlayer } from "../audio/playback";
import { clear, h } from "../dom";
import { bi, errorToast, L } from "../i18n";
import { startPolling } from "../poll";

export type Tab = "mine" | "others";

export class ValidationPage {
  tab: Tab = "mine";
  mine: SubmissionView[] = [];
  queue: SubmissionView[] = [];
  notice = "";
  needsAnnotatorRole = false;
  onChange: () => void = () => {};

  constructor(
    private readonly api: ApiClient,
    private readonly ownUserId: string,
  ) {}

  async refreshMine(): Promise<void> {
    this.mine = (await this.api.myRecordings("qa_passed")).recordings;
    this.onChange();
  }

  async refreshQueue(): Promise<void> {
    try {
      const body = await this.api.validationQueue();
      // the server already excludes own takes; enforce the invariant locally
      this.queue = body.queue.filter((item) => item.user_id !== this.ownUserId);
      this.needsAnnotatorRole = false;
    } catch (error) {
      if (error instanceof ApiError && error.status === 403) {
        this.needsAnnotatorRole = true;
      } else {
        throw error;
      }
    }
    this.onChange();
  }

  async becomeAnnotator(): Promise<string[]> {
    const user = await this.api.activateAnnotator();
    await this.refreshQueue();
    return user.roles;
  }

  switchTab(tab: Tab): void {
    this.tab = tab;
    this.notice = "";
    this.onChange();
  }

  async submitOwn(submissionId: string): Promise<void> {
    await this.api.selfReview(submissionId, "submit");
    await this.refreshMine();
  }

  async redoOwn(submissionId: string): Promise<void> {
    await this.api.selfReview(submissionId, "redo");
    await this.refreshMine();
  }

  async decide(
    submissionId: string,
    verdict: "approve" | "reject" | "flag",
    fields: { annotation?: string; feedback?: string },
  ): Promise<void> {
    try {
      await this.api.postReview(submissionId, verdict, fields);
      this.notice = "";
    } catch (error) {
      if (error instanceof ApiError && error.code === "duplicate_review") {
        this.notice = bi(L.reviewedElsewhere);
      } else if (error instanceof ApiError) {
        this.notice = errorToast(error.code);
      } else {
        throw error;
      }
    }
    await this.refreshQueue();
  }
}

function recordingRow(page: ValidationPage, api: ApiClient, item: SubmissionView): HTMLElement {
  const playerSlot = h("span", { class: "player-slot" });
  return h(
    "div",
    { class: "card", dataset: { submissionId: item.submission_id } },
    h("p", { class: "prompt", lang: "ar" }, item.prompt?.text ?? item.prompt_id),
    playerSlot,
    h("button", { onClick: () => void mountPlayer(playerSlot, api, item.audio_ref) }, bi(L.play)),
    h(
      "button",
      { class: "primary", onClick: () => void page.submitOwn(item.submission_id) },
      bi(L.submit),
    ),
    h("button", { onClick: () => void page.redoOwn(item.submission_id) }, bi(L.redo)),
  );
}

function queueRow(page: ValidationPage, api: ApiClient, item: SubmissionView): HTMLElement {
  const playerSlot = h("span", { class: "player-slot" });
  const annotation = h("input", {
    placeholder: bi(L.annotation),
    class: "annotation",
  }) as HTMLInputElement;
  const feedback = h("input", {
    placeholder: bi(L.feedback),
    class: "feedback",
  }) as HTMLInputElement;
  const fields = () => ({
    annotation: annotation.value || undefined,
    feedback: feedback.value || undefined,
  });
  return h(
    "div",
    { class: "card", dataset: { submissionId: item.submission_id } },
    h("p", { class: "prompt", lang: "ar" }, item.prompt?.text ?? item.prompt_id),
    h("p", { class: "muted" }, item.prompt?.dialect ?? ""),
    playerSlot,
    h("button", { onClick: () => void mountPlayer(playerSlot, api, item.audio_ref) }, bi(L.play)),
    annotation,
    feedback,
    h(
      "button",
      {
        class: "primary approve",
        onClick: () => void page.decide(item.submission_id, "approve", fields()),
      },
      bi(L.approve),
    ),
    h(
      "button",
      { class: "reject", onClick: () => void page.decide(item.submission_id, "reject", fields()) },
      bi(L.reject),
    ),
    h(
      "button",
      { class: "flag", onClick: () => void page.decide(item.submission_id, "flag", fields()) },
      bi(L.flag),
    ),
  );
}

export function renderValidation(el: HTMLElement, page: ValidationPage, api: ApiClient): void {
  clear(el);
  el.append(
    h("h2", {}, bi(L.review)),
    h(
      "nav",
      { class: "tabs" },
      h(
        "button",
        {
          class: page.tab === "mine" ? "tab active" : "tab",
          onClick: () => page.switchTab("mine"),
        },
        bi(L.myRecordings),
      ),
      h(
        "button",
        {
          class: page.tab === "others" ? "tab active" : "tab",
          onClick: () => page.switchTab("others"),
        },
        bi(L.validateOthers),
      ),
    ),
  );
  if (page.notice) el.append(h("p", { class: "notice" }, page.notice));

  if (page.tab === "mine") {
    if (page.mine.length === 0) {
      el.append(h("p", { class: "muted" }, "لا تسجيلات بانتظار قرارك · nothing awaiting your decision"));
    }
    for (const item of page.mine) el.append(recordingRow(page, api, item));
    return;
  }

  if (page.needsAnnotatorRole) {
    el.append(
      h(
        "button",
        { class: "primary", onClick: () => void page.becomeAnnotator() },
        bi(L.becomeAnnotator),
      ),
    );
    return;
  }
  if (page.queue.length === 0) {
    el.append(h("p", { class: "muted" }, "لا تسجيلات للمراجعة حاليا · queue is empty"));
  }
  for (const item of page.queue) el.append(queueRow(page, api, item));
}

export function mountValidation(
  el: HTMLElement,
  api: ApiClient,
  ownUserId: string,
): { page: ValidationPage; stop: () => void } {
  const page = new ValidationPage(api, ownUserId);
  page.onChange = () => renderValidation(el, page, api);
  void page.refreshMine().catch(() => {});
  const stop = startPolling(() => page.refreshQueue());
  renderValidation(el, page, api);
  return { page, stop };
}
