/** In-memory stand-in for the chat backend, driving the real ChatClient. */

import { FetchLike } from "../src/api";
import { ChatTurn } from "../src/types";

export interface RecordedCall {
  url: string;
  body: Record<string, unknown>;
}

export type Handler = (
  url: string,
  body: Record<string, unknown>,
) => { status: number; body: unknown };

export function makeFetch(handler: Handler): {
  fetchImpl: FetchLike;
  calls: RecordedCall[];
} {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    const body = JSON.parse((init?.body as string) ?? "{}");
    calls.push({ url, body });
    const result = handler(url, body);
    return new Response(JSON.stringify(result.body), {
      status: result.status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchImpl, calls };
}

export function scriptedTurn(turnId: string, text: string): ChatTurn {
  return { turn_id: turnId, response_text: text, resolution: "scripted" };
}

export function qaTurn(
  turnId: string,
  text: string,
  url: string | null = "http://sources.example/handbook",
): ChatTurn {
  return {
    turn_id: turnId,
    response_text: text,
    resolution: "qa",
    attribution: {
      source_id: "handbook",
      url,
      start_char: 100,
      end_char: 100 + text.length,
    },
  };
}
