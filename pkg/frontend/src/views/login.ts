// Login and registration forms side by side; a granted session routes to
// the recording page.

import { ApiError, type ApiClient } from "../api/client";
import type { SessionGrant } from "../api/types";
import { clear, h } from "../dom";
import { bi, errorToast, L } from "../i18n";

export function renderLogin(
  el: HTMLElement,
  api: ApiClient,
  onSession: (grant: SessionGrant) => void,
): void {
  clear(el);
  const error = h("p", { class: "notice error", hidden: true });
  const showError = (e: unknown) => {
    error.hidden = false;
    error.textContent = e instanceof ApiError ? errorToast(e.code) : String(e);
  };

  const loginEmail = h("input", { type: "email", placeholder: "email" }) as HTMLInputElement;
  const loginPassword = h("input", { type: "password", placeholder: "password" }) as HTMLInputElement;
  const loginForm = h(
    "form",
    {
      class: "card",
      onSubmit: (event: Event) => {
        event.preventDefault();
        api
          .login(loginEmail.value, loginPassword.value)
          .then(onSession)
          .catch(showError);
      },
    },
    h("h3", {}, bi(L.login)),
    loginEmail,
    loginPassword,
    h("button", { class: "primary", type: "submit" }, bi(L.login)),
  );

  const regHandle = h("input", { placeholder: "handle" }) as HTMLInputElement;
  const regEmail = h("input", { type: "email", placeholder: "email" }) as HTMLInputElement;
  const regPassword = h("input", { type: "password", placeholder: "password" }) as HTMLInputElement;
  const registerForm = h(
    "form",
    {
      class: "card",
      onSubmit: (event: Event) => {
        event.preventDefault();
        api
          .register(regHandle.value, regEmail.value, regPassword.value)
          .then(onSession)
          .catch(showError);
      },
    },
    h("h3", {}, bi(L.register)),
    regHandle,
    regEmail,
    regPassword,
    h("button", { class: "primary", type: "submit" }, bi(L.register)),
  );

  el.append(h("h2", {}, bi(L.appName)), error, loginForm, registerForm);
}
