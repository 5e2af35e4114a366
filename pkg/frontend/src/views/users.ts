// Admin user management: account list with roles and blocked badges, a
// detail pane with per-state submission counts, block (optional cascade
// delete) behind typed confirmation, and admin promotion.

import { ApiError, type ApiClient } from "../api/client";
import type { UserDetailResponse, UserPrivate } from "../api/types";
import { clear, h } from "../dom";
import { bi, errorToast, L } from "../i18n";
import { typedConfirm } from "./confirm";

export class UsersPage {
  users: UserPrivate[] = [];
  detail: UserDetailResponse | null = null;
  notice = "";
  onChange: () => void = () => {};

  constructor(private readonly api: ApiClient) {}

  async refresh(): Promise<void> {
    this.users = (await this.api.listUsers()).users;
    this.onChange();
  }

  async open(userId: string): Promise<void> {
    this.detail = await this.api.userDetail(userId);
    this.onChange();
  }

  async block(userId: string, cascade: boolean): Promise<void> {
    this.notice = "";
    try {
      const result = await this.api.blockUser(userId, cascade);
      this.notice = `حُظر الحساب · blocked (deleted ${result.deleted_submissions} submissions)`;
    } catch (error) {
      if (error instanceof ApiError) {
        this.notice = errorToast(error.code);
      } else {
        throw error;
      }
    }
    await this.refresh();
    await this.open(userId).catch(() => {});
  }

  async grant(userId: string): Promise<void> {
    await this.api.grantAdmin(userId);
    await this.refresh();
    await this.open(userId);
  }
}

function detailPane(page: UsersPage, detail: UserDetailResponse): HTMLElement {
  const user = detail.user;
  const counts = h("ul", { class: "state-counts" });
  for (const [state, count] of Object.entries(detail.submissions_by_state)) {
    if (count > 0) counts.append(h("li", {}, `${state}: ${count}`));
  }
  const cascade = h("input", { type: "checkbox", class: "cascade" }) as HTMLInputElement;
  const pane = h(
    "div",
    { class: "card detail", dataset: { userId: user.user_id } },
    h("h3", {}, `${user.handle} <${user.email}>`),
    h("p", {}, `roles: ${user.roles.join(", ")}${user.blocked ? ` · ${bi(L.blocked)}` : ""}`),
    h("p", {}, `total: ${detail.total_submissions}`),
    counts,
  );
  if (!user.blocked) {
    pane.append(
      h("label", {}, cascade, ` ${bi(L.cascadeDelete)}`),
      typedConfirm("block", bi(L.block), () => void page.block(user.user_id, cascade.checked)),
    );
  }
  if (!user.roles.includes("admin")) {
    pane.append(
      h(
        "button",
        { class: "grant-admin", onClick: () => void page.grant(user.user_id) },
        bi(L.grantAdmin),
      ),
    );
  }
  return pane;
}

export function renderUsers(el: HTMLElement, page: UsersPage): void {
  clear(el);
  el.append(h("h2", {}, bi(L.users)));
  if (page.notice) el.append(h("p", { class: "notice" }, page.notice));

  const table = h(
    "table",
    { class: "users" },
    h(
      "tr",
      {},
      h("th", {}, "handle"),
      h("th", {}, "email"),
      h("th", {}, "roles"),
      h("th", {}, ""),
    ),
  );
  for (const user of page.users) {
    table.append(
      h(
        "tr",
        { dataset: { userId: user.user_id } },
        h("td", {}, user.handle + (user.blocked ? ` [${bi(L.blocked)}]` : "")),
        h("td", {}, user.email),
        h("td", {}, user.roles.join(", ")),
        h("td", {}, h("button", { onClick: () => void page.open(user.user_id) }, "…")),
      ),
    );
  }
  el.append(table);
  if (page.detail) el.append(detailPane(page, page.detail));
}

export function mountUsers(el: HTMLElement, api: ApiClient): UsersPage {
  const page = new UsersPage(api);
  page.onChange = () => renderUsers(el, page);
  void page.refresh();
  renderUsers(el, page);
  return page;
}
