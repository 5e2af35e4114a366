// Typed confirmation for destructive actions: the button stays disabled
// until the confirmation word is typed exactly.

import { h } from "../dom";
import { bi, L } from "../i18n";

export function typedConfirm(
  word: string,
  label: string,
  onConfirm: () => void,
): HTMLElement {
  const input = h("input", {
    class: "confirm-word",
    placeholder: `${bi(L.confirmTyping)}: ${word}`,
  }) as HTMLInputElement;
  const button = h(
    "button",
    {
      class: "danger",
      disabled: true,
      onClick: () => onConfirm(),
    },
    label,
  ) as HTMLButtonElement;
  input.addEventListener("input", () => {
    button.disabled = input.value !== word;
  });
  return h("span", { class: "typed-confirm" }, input, button);
}
