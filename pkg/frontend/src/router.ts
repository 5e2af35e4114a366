// Hash router with role guards. Guards only choose what to render: a user
// who bypasses them still hits the server's own authorization.

import type { Role } from "./api/types";
import { clear, h } from "./dom";
import { bi, L } from "./i18n";
import type { SessionStore } from "./session";

export type Cleanup = (() => void) | void;

export interface RouteContext {
  navigate(hash: string): void;
}

export interface RouteDef {
  path: string;
  public?: boolean;
  role?: Role;
  render(outlet: HTMLElement, ctx: RouteContext): Cleanup;
}

export class Router implements RouteContext {
  private readonly routes: RouteDef[];
  private readonly session: SessionStore;
  private readonly outlet: HTMLElement;
  private cleanup: Cleanup = undefined;
  private readonly onAfterRender: () => void;

  constructor(
    routes: RouteDef[],
    session: SessionStore,
    outlet: HTMLElement,
    onAfterRender: () => void = () => {},
  ) {
    this.routes = routes;
    this.session = session;
    this.outlet = outlet;
    this.onAfterRender = onAfterRender;
  }

  private readonly onHashChange = (): void => this.renderCurrent();

  start(): void {
    window.addEventListener("hashchange", this.onHashChange);
    this.renderCurrent();
  }

  stop(): void {
    window.removeEventListener("hashchange", this.onHashChange);
    if (this.cleanup) this.cleanup();
    this.cleanup = undefined;
  }

  navigate(hash: string): void {
    if (window.location.hash === hash) {
      this.renderCurrent();
    } else {
      window.location.hash = hash;
    }
  }

  currentPath(): string {
    const hash = window.location.hash || "#/record";
    return hash.replace(/^#/, "");
  }

  renderCurrent(): void {
    if (this.cleanup) this.cleanup();
    this.cleanup = undefined;
    clear(this.outlet);

    const path = this.currentPath();
    const route = this.routes.find((r) => r.path === path) ?? this.routes[0]!;

    if (!route.public && !this.session.current) {
      const login = this.routes.find((r) => r.path === "/login");
      if (login) {
        window.location.hash = "#/login";
        this.cleanup = login.render(this.outlet, this);
        this.onAfterRender();
        return;
      }
    }
    if (route.role && !this.session.hasRole(route.role)) {
      this.outlet.append(h("p", { class: "notice" }, bi(L.forbiddenPage)));
      this.onAfterRender();
      return;
    }
    this.cleanup = route.render(this.outlet, this);
    this.onAfterRender();
  }
}
