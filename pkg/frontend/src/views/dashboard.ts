// Admin dashboard: date-range picker driving the stats aggregates, task
// creation, and bulk prompt upload with per-row error display.

import { ApiError, type ApiClient } from "../api/client";
import type { StatsResponse, TaskView } from "../api/types";
import { SUBMISSION_STATES } from "../api/types";
import { clear, h } from "../dom";
import { bi, errorToast, L } from "../i18n";

export class AdminDashboard {
  stats: StatsResponse | null = null;
  tasks: TaskView[] = [];
  from = "";
  to = "";
  uploadNotice = "";
  uploadError = "";
  onChange: () => void = () => {};

  constructor(private readonly api: ApiClient) {}

  async refresh(): Promise<void> {
    const range: { from?: string; to?: string } = {};
    if (this.from) range.from = new Date(this.from).toISOString();
    if (this.to) range.to = new Date(this.to).toISOString();
    this.stats = await this.api.stats(range);
    this.tasks = (await this.api.listTasks()).tasks;
    this.onChange();
  }

  async createTask(title: string, dialectsCsv: string): Promise<void> {
    const dialects = dialectsCsv
      .split(",")
      .map((d) => d.trim())
      .filter(Boolean);
    await this.api.createTask(title, dialects);
    await this.refresh();
  }

  /** The upload is all-or-nothing; a malformed/duplicate row error names the
   * offending row and nothing is inserted. */
  async uploadTsv(taskId: string, tsv: string): Promise<void> {
    this.uploadNotice = "";
    this.uploadError = "";
    try {
      const result = await this.api.uploadPrompts(taskId, tsv);
      this.uploadNotice = `أضيفت ${result.inserted} جملة · inserted ${result.inserted} prompts`;
    } catch (error) {
      if (error instanceof ApiError) {
        this.uploadError = `${errorToast(error.code)}: ${error.message}`;
      } else {
        throw error;
      }
    }
    this.onChange();
  }
}

function barRow(label: string, value: number, max: number, detail = ""): HTMLElement {
  const width = max > 0 ? Math.round((value / max) * 100) : 0;
  return h(
    "div",
    { class: "bar-row" },
    h("span", { class: "bar-label" }, label),
    h("span", { class: "bar", style: `width: ${width}%` }),
    h("span", { class: "bar-value" }, `${value}${detail}`),
  );
}

function statsSection(stats: StatsResponse): HTMLElement {
  const section = h("section", { class: "stats" });
  const totalsMax = Math.max(...Object.values(stats.totals), 1);
  const totals = h("div", { class: "chart totals" }, h("h4", {}, "حسب الحالة · by state"));
  for (const state of SUBMISSION_STATES) {
    totals.append(barRow(state, stats.totals[state] ?? 0, totalsMax));
  }
  const dialectEntries = Object.entries(stats.per_dialect);
  const dialectMax = Math.max(...dialectEntries.map(([, d]) => d.submissions), 1);
  const dialects = h("div", { class: "chart dialects" }, h("h4", {}, "حسب اللهجة · by dialect"));
  for (const [label, d] of dialectEntries) {
    dialects.append(
      barRow(label, d.submissions, dialectMax, ` (${d.hours_accepted.toFixed(2)} ${bi(L.hoursAccepted)})`),
    );
  }
  const rate =
    stats.acceptance_rate === null ? "n/a" : `${(stats.acceptance_rate * 100).toFixed(1)}%`;
  section.append(
    h("p", { class: "rate" }, `${bi(L.acceptanceRate)}: ${rate}`),
    totals,
    dialects,
  );
  if (stats.per_user) {
    const table = h(
      "table",
      { class: "per-user" },
      h(
        "tr",
        {},
        h("th", {}, "user"),
        h("th", {}, "submissions"),
        h("th", {}, "accepted"),
        h("th", {}, "rejected"),
      ),
    );
    for (const [userId, u] of Object.entries(stats.per_user)) {
      table.append(
        h(
          "tr",
          {},
          h("td", {}, userId),
          h("td", {}, String(u.submissions)),
          h("td", {}, String(u.accepted)),
          h("td", {}, String(u.rejected)),
        ),
      );
    }
    section.append(table);
  }
  return section;
}

export function renderDashboard(el: HTMLElement, page: AdminDashboard): void {
  clear(el);
  el.append(h("h2", {}, bi(L.statsTitle)));

  const from = h("input", { type: "datetime-local", value: page.from }) as HTMLInputElement;
  const to = h("input", { type: "datetime-local", value: page.to }) as HTMLInputElement;
  el.append(
    h(
      "div",
      { class: "range-picker" },
      from,
      to,
      h(
        "button",
        {
          onClick: () => {
            page.from = from.value;
            page.to = to.value;
            void page.refresh();
          },
        },
        "تحديث · refresh",
      ),
    ),
  );

  if (page.stats) el.append(statsSection(page.stats));

  const title = h("input", { placeholder: "task title" }) as HTMLInputElement;
  const dialects = h("input", { placeholder: "dialects: EG, EG:Cairo" }) as HTMLInputElement;
  el.append(
    h(
      "div",
      { class: "card" },
      h("h3", {}, bi(L.createTask)),
      title,
      dialects,
      h(
        "button",
        { class: "primary", onClick: () => void page.createTask(title.value, dialects.value) },
        bi(L.createTask),
      ),
    ),
  );

  const taskSelect = h("select", { class: "task-select" }) as HTMLSelectElement;
  for (const task of page.tasks) {
    taskSelect.append(h("option", { value: task.task_id }, task.title));
  }
  const tsv = h("textarea", {
    class: "tsv",
    placeholder: "text\\tcountry\\tcity\\ttarget",
    rows: 6,
  }) as HTMLTextAreaElement;
  const uploadCard = h(
    "div",
    { class: "card" },
    h("h3", {}, bi(L.uploadPrompts)),
    taskSelect,
    tsv,
    h(
      "button",
      {
        class: "primary upload-prompts",
        onClick: () => void page.uploadTsv(taskSelect.value, tsv.value),
      },
      bi(L.uploadPrompts),
    ),
  );
  if (page.uploadNotice) uploadCard.append(h("p", { class: "notice" }, page.uploadNotice));
  if (page.uploadError) uploadCard.append(h("p", { class: "notice error" }, page.uploadError));
  el.append(uploadCard);
}

export function mountDashboard(el: HTMLElement, api: ApiClient): AdminDashboard {
  const page = new AdminDashboard(api);
  page.onChange = () => renderDashboard(el, page);
  void page.refresh().catch(() => {});
  renderDashboard(el, page);
  return page;
}
