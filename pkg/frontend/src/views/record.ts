// Recording page: pick a task and dialect, read the prompt, record, upload.
// The QA verdict renders after every upload; a pass advances to the next
// prompt automatically, a fail offers re-recording the same prompt.

import { ApiError, type ApiClient } from "../api/client";
import type { PromptView, QaReportView, TaskView } from "../api/types";
import type { CaptureHandle, CaptureSource } from "../audio/capture";
import { MicPermissionDenied } from "../audio/capture";
import { captureToWav } from "../audio/wav";
import { clear, h } from "../dom";
import { bi, errorToast, failReasonText, L } from "../i18n";
import { SingleFlight, UploadBusy } from "../singleflight";

export type RecordPhase =
  | "tasks"
  | "loading"
  | "ready"
  | "recording"
  | "uploading"
  | "failed"
  | "exhausted"
  | "live_take"
  | "mic_denied"
  | "error";

export class RecordFlow {
  phase: RecordPhase = "tasks";
  tasks: TaskView[] = [];
  taskId: string | null = null;
  dialect: string | null = null;
  prompt: PromptView | null = null;
  /** Verdict of the most recent upload; survives the auto-advance so a pass
   * stays visible above the next prompt. */
  verdict: QaReportView | null = null;
  errorMessage = "";
  onChange: () => void = () => {};

  private handle: CaptureHandle | null = null;
  private readonly uploads = new SingleFlight();

  constructor(
    private readonly api: ApiClient,
    private readonly capture: CaptureSource,
  ) {}

  private changed(): void {
    this.onChange();
  }

  async loadTasks(): Promise<void> {
    this.tasks = (await this.api.listTasks()).tasks;
    this.phase = "tasks";
    this.changed();
  }

  async choose(taskId: string, dialect: string): Promise<void> {
    this.taskId = taskId;
    this.dialect = dialect;
    this.verdict = null;
    await this.advance();
  }

  async advance(): Promise<void> {
    if (!this.taskId || !this.dialect) return;
    this.phase = "loading";
    this.changed();
    try {
      const prompt = await this.api.nextPrompt(this.taskId, this.dialect);
      if (prompt === null) {
        this.prompt = null;
        this.phase = "exhausted";
      } else {
        this.prompt = prompt;
        this.phase = "ready";
      }
    } catch (error) {
      this.fail(error);
    }
    this.changed();
  }

  async startTake(): Promise<void> {
    if (!this.prompt) return;
    try {
      this.handle = await this.capture.start();
      this.phase = "recording";
    } catch (error) {
      if (error instanceof MicPermissionDenied) {
        this.phase = "mic_denied";
      } else {
        this.fail(error);
      }
    }
    this.changed();
  }

  async stopAndUpload(): Promise<void> {
    const prompt = this.prompt;
    const handle = this.handle;
    if (!prompt || !handle) return;
    this.handle = null;
    const pcm = await handle.stop();
    this.phase = "uploading";
    this.changed();
    try {
      const submission = await this.uploads.run(() =>
        this.api.uploadTake(prompt.prompt_id, captureToWav(pcm)),
      );
      this.verdict = submission.qa;
      if (submission.state === "qa_passed") {
        await this.advance();
      } else {
        this.phase = "failed";
        this.changed();
      }
    } catch (error) {
      if (error instanceof UploadBusy) {
        this.errorMessage = errorToast("upload_in_flight");
        this.phase = "error";
      } else if (error instanceof ApiError && error.code === "duplicate_live_submission") {
        this.phase = "live_take";
      } else {
        this.fail(error);
      }
      this.changed();
    }
  }

  private fail(error: unknown): void {
    this.errorMessage =
      error instanceof ApiError ? errorToast(error.code) : String(error);
    this.phase = "error";
  }
}

function verdictBanner(flow: RecordFlow): HTMLElement | null {
  const verdict = flow.verdict;
  if (!verdict) return null;
  if (verdict.verdict === "pass") {
    const confidence =
      verdict.confidence === null ? "" : ` (${(verdict.confidence * 100).toFixed(0)}%)`;
    return h("div", { class: "banner banner-pass" }, `${bi(L.qaPassed)}${confidence}`);
  }
  return h(
    "div",
    { class: "banner banner-fail" },
    h("p", {}, bi(L.qaFailed)),
    h(
      "ul",
      {},
      ...verdict.fail_reasons.map((reason) => h("li", {}, failReasonText(reason))),
    ),
  );
}

export function renderRecord(
  el: HTMLElement,
  flow: RecordFlow,
  navigate: (hash: string) => void,
): void {
  clear(el);
  el.append(h("h2", {}, bi(L.record)));
  const banner = verdictBanner(flow);
  if (banner) el.append(banner);

  switch (flow.phase) {
    case "tasks": {
      if (flow.tasks.length === 0) {
        el.append(h("p", { class: "notice" }, "لا مهام مفتوحة · No open tasks"));
        return;
      }
      for (const task of flow.tasks) {
        const card = h("div", { class: "card" }, h("h3", {}, task.title));
        for (const dialect of task.dialects) {
          card.append(
            h(
              "button",
              {
                class: "dialect",
                onClick: () => void flow.choose(task.task_id, dialect),
              },
              dialect,
            ),
          );
        }
        el.append(card);
      }
      return;
    }
    case "loading":
      el.append(h("p", {}, "..."));
      return;
    case "ready":
      el.append(
        h("p", { class: "prompt", lang: "ar" }, flow.prompt?.text ?? ""),
        h("p", { class: "muted" }, flow.prompt?.dialect ?? ""),
        h("button", { class: "primary", onClick: () => void flow.startTake() }, bi(L.startRecording)),
      );
      return;
    case "recording":
      el.append(
        h("p", { class: "prompt", lang: "ar" }, flow.prompt?.text ?? ""),
        h("p", { class: "recording-dot" }, "● تسجيل جارٍ · recording"),
        h("button", { class: "primary", onClick: () => void flow.stopAndUpload() }, bi(L.stopAndUpload)),
      );
      return;
    case "uploading":
      el.append(h("p", {}, `${bi(L.uploading)}...`));
      return;
    case "failed":
      el.append(
        h("p", { class: "prompt", lang: "ar" }, flow.prompt?.text ?? ""),
        h("button", { class: "primary", onClick: () => void flow.startTake() }, bi(L.reRecord)),
      );
      return;
    case "exhausted":
      el.append(h("p", { class: "notice" }, bi(L.promptsDone)));
      el.append(h("button", { onClick: () => void flow.loadTasks() }, bi(L.record)));
      return;
    case "live_take":
      el.append(
        h("p", { class: "notice" }, bi(L.liveTakeExists)),
        h("button", { onClick: () => navigate("#/review") }, bi(L.myRecordings)),
      );
      return;
    case "mic_denied":
      el.append(h("p", { class: "notice error" }, bi(L.micDenied)));
      el.append(h("button", { onClick: () => void flow.startTake() }, bi(L.startRecording)));
      return;
    case "error":
      el.append(h("p", { class: "notice error" }, flow.errorMessage));
      el.append(h("button", { onClick: () => void flow.loadTasks() }, bi(L.record)));
      return;
  }
}

export function mountRecord(
  el: HTMLElement,
  api: ApiClient,
  capture: CaptureSource,
  navigate: (hash: string) => void,
): RecordFlow {
  const flow = new RecordFlow(api, capture);
  flow.onChange = () => renderRecord(el, flow, navigate);
  void flow.loadTasks().catch(() => {
    flow.errorMessage = "تعذر تحميل المهام · Failed to load tasks";
    flow.phase = "error";
    flow.onChange();
  });
  renderRecord(el, flow, navigate);
  return flow;
}
