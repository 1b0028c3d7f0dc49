// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import { ChatClient } from "../src/api";
import { mount } from "../src/dom";
import { ChatThread } from "../src/thread";
import { Handler, makeFetch, qaTurn, scriptedTurn } from "./support";

function mounted(handler: Handler) {
  const { fetchImpl, calls } = makeFetch(handler);
  const thread = new ChatThread(new ChatClient("", fetchImpl), "s1");
  const root = document.getElementById("app") as HTMLElement;
  mount(thread, root);
  return { thread, root, calls };
}

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

beforeEach(() => {
  document.body.innerHTML = '<div id="app"></div>';
});

describe("rendered thread", () => {
  it("scripted reply renders without an attribution link", async () => {
    const { thread, root } = mounted(() => ({
      status: 200,
      body: scriptedTurn("s1:0", "Hello!"),
    }));
    await thread.sendMessage("hi");
    expect(root.querySelectorAll(".message")).toHaveLength(2);
    expect(root.querySelector(".message.agent .text")?.textContent).toBe(
      "Hello!",
    );
    expect(root.querySelector(".attribution")).toBeNull();
  });

  it("qa reply renders a source link pointing at the payload url", async () => {
    const { thread, root } = mounted(() => ({
      status: 200,
      body: qaTurn("s1:0", "more than 3000"),
    }));
    await thread.sendMessage("how many employees?");
    const link = root.querySelector<HTMLAnchorElement>(".attribution");
    expect(link?.href).toBe("http://sources.example/handbook");
    expect(link?.textContent).toContain("handbook");
  });

  it("thumbs-down click renders a visible follow-up message", async () => {
    const { thread, root } = mounted((url) =>
      url === "/chat"
        ? { status: 200, body: scriptedTurn("s1:0", "Hello!") }
        : {
            status: 200,
            body: {
              recorded: true,
              follow_up: qaTurn("s1:1", "a real answer"),
            },
          },
    );
    await thread.sendMessage("contract question");
    const thumbsDown = root.querySelectorAll<HTMLButtonElement>(
      ".feedback button",
    )[1];
    thumbsDown?.click();
    await flush();
    const texts = [...root.querySelectorAll(".message .text")].map(
      (node) => node.textContent,
    );
    expect(texts).toEqual(["contract question", "Hello!", "a real answer"]);
  });

  it("feedback buttons disable after one use", async () => {
    const { thread, root } = mounted((url) =>
      url === "/chat"
        ? { status: 200, body: scriptedTurn("s1:0", "Hello!") }
        : { status: 200, body: { recorded: true, follow_up: null } },
    );
    await thread.sendMessage("hi");
    root.querySelectorAll<HTMLButtonElement>(".feedback button")[0]?.click();
    await flush();
    const buttons = root.querySelectorAll<HTMLButtonElement>(
      ".feedback button",
    );
    expect([...buttons].every((b) => b.disabled)).toBe(true);
  });

  it("503 shows a retry affordance and keeps the input text", async () => {
    const { thread, root } = mounted(() => ({
      status: 503,
      body: { detail: "no sources ingested yet" },
    }));
    await thread.sendMessage("anyone there?");
    expect(root.querySelector(".failure .retry")).not.toBeNull();
    expect(root.querySelector<HTMLInputElement>(".composer input")?.value).toBe(
      "anyone there?",
    );
  });
});
