import { ChatClient } from "./api";
import { mount } from "./dom";
import { ChatThread } from "./thread";

function newSessionId(): string {
  return `web-${Date.now().toString(36)}-${Math.random()
    .toString(36)
    .slice(2, 8)}`;
}

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

const thread = new ChatThread(new ChatClient(""), newSessionId());
mount(thread, root);
