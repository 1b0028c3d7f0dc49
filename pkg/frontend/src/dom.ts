/** DOM rendering: re-renders the whole thread on every state change. */

import { ChatThread } from "./thread";
import { UiMessage } from "./types";

function renderMessage(
  thread: ChatThread,
  message: UiMessage,
): HTMLElement {
  const item = document.createElement("div");
  item.className = `message ${message.author}`;

  const text = document.createElement("p");
  text.className = "text";
  text.textContent = message.text;
  item.appendChild(text);

  if (message.attribution && message.attribution.url) {
    const link = document.createElement("a");
    link.className = "attribution";
    link.href = message.attribution.url;
    link.target = "_blank";
    link.rel = "noopener";
    link.textContent = `source: ${message.attribution.source_id}`;
    item.appendChild(link);
  }

  if (message.author === "agent" && message.turnId) {
    const controls = document.createElement("span");
    controls.className = "feedback";
    for (const [label, polarity] of [
      ["\u{1F44D}", "positive"],
      ["\u{1F44E}", "negative"],
    ] as const) {
      const button = document.createElement("button");
      button.textContent = label;
      button.disabled = message.feedback !== "none";
      button.classList.toggle(
        "chosen",
        (polarity === "positive" && message.feedback === "up") ||
          (polarity === "negative" && message.feedback === "down"),
      );
      button.addEventListener("click", () => {
        void thread.sendFeedback(message.turnId as string, polarity);
      });
      controls.appendChild(button);
    }
    item.appendChild(controls);
  }
  return item;
}

export function render(thread: ChatThread, root: HTMLElement): void {
  root.textContent = "";

  const list = document.createElement("div");
  list.className = "thread";
  for (const message of thread.messages) {
    list.appendChild(renderMessage(thread, message));
  }
  root.appendChild(list);

  if (thread.failure) {
    const notice = document.createElement("div");
    notice.className = "failure";
    const label = document.createElement("span");
    label.textContent =
      thread.failure.status === 503
        ? "The service is not ready yet."
        : `Message failed: ${thread.failure.detail}`;
    const retry = document.createElement("button");
    retry.className = "retry";
    retry.textContent = "Retry";
    retry.addEventListener("click", () => void thread.retry());
    notice.append(label, retry);
    root.appendChild(notice);
  }

  const form = document.createElement("form");
  form.className = "composer";
  const input = document.createElement("input");
  input.type = "text";
  input.placeholder = "Ask a question…";
  // a failed utterance stays visible and editable
  input.value = thread.failure ? thread.failure.utterance : "";
  const send = document.createElement("button");
  send.type = "submit";
  send.textContent = "Send";
  send.disabled = thread.busy;
  form.append(input, send);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    void thread.sendMessage(input.value);
  });
  root.appendChild(form);
  input.focus();
}

export function mount(thread: ChatThread, root: HTMLElement): void {
  thread.onChange(() => render(thread, root));
  render(thread, root);
}
