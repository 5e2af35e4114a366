// Transient notices rendered into a fixed #toasts container.

export type ToastLevel = "info" | "error";

export class Toasts {
  private readonly container: HTMLElement;
  private readonly ttlMs: number;

  constructor(container: HTMLElement, ttlMs = 6_000) {
    this.container = container;
    this.ttlMs = ttlMs;
  }

  show(message: string, level: ToastLevel = "info"): void {
    const el = document.createElement("div");
    el.className = `toast toast-${level}`;
    el.setAttribute("role", "status");
    el.textContent = message;
    this.container.appendChild(el);
    setTimeout(() => el.remove(), this.ttlMs);
  }

  error(message: string): void {
    this.show(message, "error");
  }
}
