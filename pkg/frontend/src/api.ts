/** Thin fetch wrapper for the chat backend's HTTP contract. */

import { ChatTurn, FeedbackResponse } from "./types";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function post<T>(
  fetchImpl: FetchLike,
  url: string,
  body: unknown,
): Promise<T> {
  const response = await fetchImpl(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const doc = await response.json();
      if (doc && typeof doc.detail === "string") detail = doc.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ChatClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (input, init) =>
      fetch(input, init),
  ) {}

  sendChat(sessionId: string, utterance: string): Promise<ChatTurn> {
    return post<ChatTurn>(this.fetchImpl, `${this.baseUrl}/chat`, {
      session_id: sessionId,
      utterance,
    });
  }

  sendFeedback(
    sessionId: string,
    turnId: string,
    polarity: "positive" | "negative",
  ): Promise<FeedbackResponse> {
    return post<FeedbackResponse>(this.fetchImpl, `${this.baseUrl}/feedback`, {
      session_id: sessionId,
      turn_id: turnId,
      polarity,
    });
  }
}
