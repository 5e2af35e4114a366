// Client session: token + roles persisted across reloads. Cleared whenever
// any API call answers 401; role checks here only steer rendering, the
// server remains the authority.

import type { Role, SessionGrant } from "./api/types";

export interface StoredSession {
  token: string;
  expires_at: string;
  user_id: string;
  handle: string;
  roles: Role[];
}

type StorageLike = Pick<Storage, "getItem" | "setItem" | "removeItem">;

const STORAGE_KEY = "speechcrowd.session";

export class SessionStore {
  private readonly storage: StorageLike;
  private session: StoredSession | null;
  private readonly listeners: Array<() => void> = [];

  constructor(storage: StorageLike) {
    this.storage = storage;
    this.session = this.read();
  }

  private read(): StoredSession | null {
    const raw = this.storage.getItem(STORAGE_KEY);
    if (!raw) return null;
    try {
      const parsed = JSON.parse(raw) as StoredSession;
      if (typeof parsed.token !== "string" || !Array.isArray(parsed.roles)) return null;
      return parsed;
    } catch {
      return null;
    }
  }

  get current(): StoredSession | null {
    return this.session;
  }

  get token(): string | null {
    return this.session?.token ?? null;
  }

  hasRole(role: Role): boolean {
    return this.session?.roles.includes(role) ?? false;
  }

  accept(grant: SessionGrant): void {
    this.session = {
      token: grant.token,
      expires_at: grant.expires_at,
      user_id: grant.user.user_id,
      handle: grant.user.handle,
      roles: grant.user.roles,
    };
    this.storage.setItem(STORAGE_KEY, JSON.stringify(this.session));
    this.notify();
  }

  /** Roles can grow mid-session (annotator self-activation, admin grant). */
  updateRoles(roles: Role[]): void {
    if (!this.session) return;
    this.session = { ...this.session, roles };
    this.storage.setItem(STORAGE_KEY, JSON.stringify(this.session));
    this.notify();
  }

  clear(): void {
    if (this.session === null) return;
    this.session = null;
    this.storage.removeItem(STORAGE_KEY);
    this.notify();
  }

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }
}
