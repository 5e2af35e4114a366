// Admin submissions inspection: time window plus state/confidence filters,
// cursor pagination, inline playback, and tombstone deletion behind a typed
// confirmation.

import { ApiError, type ApiClient } from "../api/client";
import type { SubmissionState, SubmissionView } from "../api/types";
import { SUBMISSION_STATES } from "../api/types";
import { mountPlayer } from "../audio/playback";
import { clear, h } from "../dom";
import { bi, errorToast, L } from "../i18n";
import { typedConfirm } from "./confirm";

export interface SubmissionFilters {
  from: string;
  to: string;
  state?: SubmissionState;
  min_confidence?: number;
  max_confidence?: number;
}

const WIDE_FROM = "1970-01-01T00:00:00Z";
const WIDE_TO = "9999-01-01T00:00:00Z";

export class SubmissionsPage {
  filters: SubmissionFilters = { from: WIDE_FROM, to: WIDE_TO };
  items: SubmissionView[] = [];
  nextCursor: string | null = null;
  notice = "";
  onChange: () => void = () => {};

  constructor(private readonly api: ApiClient) {}

  async search(): Promise<void> {
    this.notice = "";
    try {
      const page = await this.api.adminSubmissions({ ...this.filters });
      this.items = page.items;
      this.nextCursor = page.next_cursor;
    } catch (error) {
      if (error instanceof ApiError) {
        this.notice = errorToast(error.code);
      } else {
        throw error;
      }
    }
    this.onChange();
  }

  async loadMore(): Promise<void> {
    if (!this.nextCursor) return;
    const page = await this.api.adminSubmissions({
      ...this.filters,
      cursor: this.nextCursor,
    });
    this.items = [...this.items, ...page.items];
    this.nextCursor = page.next_cursor;
    this.onChange();
  }

  async remove(submissionId: string): Promise<void> {
    try {
      await this.api.deleteSubmission(submissionId);
    } catch (error) {
      if (error instanceof ApiError) {
        this.notice = errorToast(error.code);
        this.onChange();
        return;
      }
      throw error;
    }
    await this.search();
  }
}

function submissionRow(page: SubmissionsPage, api: ApiClient, item: SubmissionView): HTMLElement {
  const playerSlot = h("span", { class: "player-slot" });
  const confidence = item.qa?.confidence;
  return h(
    "tr",
    { dataset: { submissionId: item.submission_id } },
    h("td", { class: "mono" }, item.submission_id.slice(0, 10)),
    h("td", { lang: "ar" }, item.prompt?.text ?? item.prompt_id),
    h("td", {}, item.state + (item.flagged_for_admin ? " ⚑" : "")),
    h("td", {}, confidence === null || confidence === undefined ? "-" : confidence.toFixed(2)),
    h("td", {}, item.created_at),
    h(
      "td",
      {},
      playerSlot,
      h("button", { onClick: () => void mountPlayer(playerSlot, api, item.audio_ref) }, bi(L.play)),
    ),
    h(
      "td",
      {},
      item.state === "deleted"
        ? null
        : typedConfirm("delete", bi(L.delete), () => void page.remove(item.submission_id)),
    ),
  );
}

export function renderSubmissions(el: HTMLElement, page: SubmissionsPage, api: ApiClient): void {
  clear(el);
  el.append(h("h2", {}, bi(L.submissions)));

  const from = h("input", { type: "datetime-local" }) as HTMLInputElement;
  const to = h("input", { type: "datetime-local" }) as HTMLInputElement;
  const state = h("select", {}, h("option", { value: "" }, "any state")) as HTMLSelectElement;
  for (const s of SUBMISSION_STATES) state.append(h("option", { value: s }, s));
  const minConf = h("input", { type: "number", step: "0.05", min: "0", max: "1", placeholder: "min conf" }) as HTMLInputElement;
  const maxConf = h("input", { type: "number", step: "0.05", min: "0", max: "1", placeholder: "max conf" }) as HTMLInputElement;
  el.append(
    h(
      "div",
      { class: "filters" },
      from,
      to,
      state,
      minConf,
      maxConf,
      h(
        "button",
        {
          class: "primary search",
          onClick: () => {
            page.filters = {
              from: from.value ? new Date(from.value).toISOString() : WIDE_FROM,
              to: to.value ? new Date(to.value).toISOString() : WIDE_TO,
            };
            if (state.value) page.filters.state = state.value as SubmissionState;
            if (minConf.value) page.filters.min_confidence = Number(minConf.value);
            if (maxConf.value) page.filters.max_confidence = Number(maxConf.value);
            void page.search();
          },
        },
        "بحث · search",
      ),
    ),
  );

  if (page.notice) el.append(h("p", { class: "notice error" }, page.notice));

  const table = h(
    "table",
    { class: "submissions" },
    h(
      "tr",
      {},
      h("th", {}, "id"),
      h("th", {}, "prompt"),
      h("th", {}, "state"),
      h("th", {}, "confidence"),
      h("th", {}, "created"),
      h("th", {}, ""),
      h("th", {}, ""),
    ),
  );
  for (const item of page.items) table.append(submissionRow(page, api, item));
  el.append(table);

  if (page.nextCursor) {
    el.append(h("button", { class: "load-more", onClick: () => void page.loadMore() }, bi(L.loadMore)));
  }
}

export function mountSubmissions(el: HTMLElement, api: ApiClient): SubmissionsPage {
  const page = new SubmissionsPage(api);
  page.onChange = () => renderSubmissions(el, page, api);
  void page.search();
  renderSubmissions(el, page, api);
  return page;
}
