/**
 * End-to-end checks against a live backend (not mocks).
 *
 * Skipped unless CHAT_SERVICE_URL points at a running service that has
 * ingested the fixture sources, e.g.:
 *
 *   polyqa serve --config service.json   # then
 *   CHAT_SERVICE_URL=http://127.0.0.1:8080 npx vitest run tests/e2e.test.ts
 */
import { describe, expect, it } from "vitest";

import { ChatClient } from "../src/api";
import { ChatThread } from "../src/thread";

const BASE_URL = process.env.CHAT_SERVICE_URL;

describe.skipIf(!BASE_URL)("against a live fixture service", () => {
  const session = `e2e-${Date.now()}`;

  it("answers an unexpected question with a working attribution", async () => {
    const thread = new ChatThread(new ChatClient(BASE_URL!), session);
    await thread.sendMessage("Where is the main office?");
    const reply = thread.messages[1];
    expect(reply?.resolution).toBe("qa");
    const url = reply?.attribution?.url;
    expect(url).toBeTruthy();
    if (url!.startsWith("file:")) {
      const { readFile } = await import("node:fs/promises");
      const content = await readFile(new URL(url!), "utf-8");
      expect(content.length).toBeGreaterThan(0);
    } else {
      const page = await fetch(url!);
      expect(page.ok).toBe(true);
    }
  });

  it("thumbs-down on a scripted reply yields a visible follow-up turn", async () => {
    const thread = new ChatThread(new ChatClient(BASE_URL!), session);
    await thread.sendMessage("How does a work contract start?");
    const reply = thread.messages[1];
    expect(reply?.resolution).toBe("scripted");
    expect(reply?.attribution).toBeUndefined();
    await thread.sendFeedback(reply!.turnId!, "negative");
    expect(thread.messages).toHaveLength(3);
    expect(thread.messages[2]?.author).toBe("agent");
  });
});
