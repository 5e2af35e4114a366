// Application assembly: session-aware API client, route table, and nav
// chrome. Injectable storage/fetch/capture keep the whole app testable
// without a browser.

import { ApiClient } from "./api/client";
import type { CaptureSource } from "./audio/capture";
import { clear, h } from "./dom";
import { bi, L } from "./i18n";
import { Router, type RouteDef } from "./router";
import { SessionStore } from "./session";
import { Toasts } from "./toast";
import { renderLogin } from "./views/login";
import { mountDashboard } from "./views/dashboard";
import { mountRecord } from "./views/record";
import { mountSubmissions } from "./views/submissions";
import { mountUsers } from "./views/users";
import { mountValidation } from "./views/validation";

export interface AppOptions {
  root: HTMLElement;
  baseUrl?: string;
  storage?: Pick<Storage, "getItem" | "setItem" | "removeItem">;
  fetchFn?: typeof fetch;
  capture: CaptureSource;
}

export interface App {
  api: ApiClient;
  session: SessionStore;
  router: Router;
  toasts: Toasts;
}

export function createApp(options: AppOptions): App {
  const storage = options.storage ?? window.localStorage;
  const session = new SessionStore(storage);

  const header = h("header", { id: "chrome" });
  const outlet = h("main", { id: "app" });
  const toastsEl = h("div", { id: "toasts" });
  clear(options.root);
  options.root.append(header, outlet, toastsEl);
  const toasts = new Toasts(toastsEl);

  const api = new ApiClient({
    baseUrl: options.baseUrl ?? "",
    getToken: () => session.token,
    onAuthLost: () => {
      // any 401 invalidates the stored session
      if (session.current) session.clear();
    },
    fetchFn: options.fetchFn,
  });

  const routes: RouteDef[] = [
    {
      path: "/record",
      render: (el, ctx) => {
        mountRecord(el, api, options.capture, (hash) => ctx.navigate(hash));
      },
    },
    {
      path: "/review",
      render: (el) => {
        const { stop } = mountValidation(el, api, session.current?.user_id ?? "");
        return stop;
      },
    },
    {
      path: "/admin",
      role: "admin",
      render: (el) => {
        mountDashboard(el, api);
      },
    },
    {
      path: "/admin/submissions",
      role: "admin",
      render: (el) => {
        mountSubmissions(el, api);
      },
    },
    {
      path: "/admin/users",
      role: "admin",
      render: (el) => {
        mountUsers(el, api);
      },
    },
    {
      path: "/login",
      public: true,
      render: (el, ctx) => {
        renderLogin(el, api, (grant) => {
          session.accept(grant);
          ctx.navigate("#/record");
        });
      },
    },
  ];

  const renderChrome = () => {
    clear(header);
    const nav = h("nav", {});
    const link = (hash: string, label: string) =>
      nav.append(h("a", { href: hash, class: "nav-link" }, label));
    header.append(h("span", { class: "brand" }, bi(L.appName)), nav);
    const current = session.current;
    if (!current) {
      link("#/login", bi(L.login));
      return;
    }
    link("#/record", bi(L.record));
    link("#/review", bi(L.review));
    if (session.hasRole("admin")) {
      link("#/admin", bi(L.admin));
      link("#/admin/submissions", bi(L.submissions));
      link("#/admin/users", bi(L.users));
    }
    header.append(
      h("span", { class: "whoami" }, current.handle),
      h(
        "button",
        {
          class: "logout",
          onClick: () => {
            void api.logout().catch(() => {});
            session.clear();
            router.navigate("#/login");
          },
        },
        bi(L.logout),
      ),
    );
  };

  const router = new Router(routes, session, outlet, renderChrome);
  session.onChange(renderChrome);
  renderChrome();
  return { api, session, router, toasts };
}
