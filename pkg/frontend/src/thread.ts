/**
 * Client-side thread state machine.
 *
 * Owns the ordered message list, the single-active-request rule, the
 * retry state after a failed send, and the one-feedback-per-turn rule.
 * Rendering subscribes via onChange and re-reads the message list, so
 * all behavior is testable without a DOM.
 */

import { ApiError, ChatClient } from "./api";
import { Attribution, ChatTurn, UiMessage } from "./types";

/** A qa attribution is rendered only when the cited span is consistent
 * with the displayed answer text (same length as what we show). */
export function attributionConsistent(turn: ChatTurn): boolean {
  if (!turn.attribution) return false;
  const { start_char, end_char } = turn.attribution;
  return end_char - start_char === turn.response_text.length;
}

function agentMessage(turn: ChatTurn): UiMessage {
  const message: UiMessage = {
    author: "agent",
    text: turn.response_text,
    turnId: turn.turn_id,
    resolution: turn.resolution,
    feedback: "none",
  };
  if (turn.resolution === "qa" && attributionConsistent(turn)) {
    message.attribution = turn.attribution as Attribution;
  }
  return message;
}

export interface SendFailure {
  utterance: string;
  status: number | null;
  detail: string;
}

export class ChatThread {
  readonly messages: UiMessage[] = [];
  /** Set after a failed send; cleared on retry or new input. */
  failure: SendFailure | null = null;
  private inFlight = false;
  private listeners: Array<() => void> = [];

  constructor(
    private readonly client: ChatClient,
    private readonly sessionId: string,
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  get busy(): boolean {
    return this.inFlight;
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Send an utterance; on failure keep it for retry, losing nothing. */
  async sendMessage(utterance: string): Promise<void> {
    if (this.inFlight || !utterance.trim()) return;
    this.inFlight = true;
    this.failure = null;
    this.messages.push({ author: "user", text: utterance });
    this.notify();
    try {
      const turn = await this.client.sendChat(this.sessionId, utterance);
      this.messages.push(agentMessage(turn));
    } catch (error) {
      // Drop the optimistic user message; retry re-appends it so the
      // thread order always matches the server's turn order.
      this.messages.pop();
      this.failure = {
        utterance,
        status: error instanceof ApiError ? error.status : null,
        detail: error instanceof Error ? error.message : String(error),
      };
    } finally {
      this.inFlight = false;
      this.notify();
    }
  }

  /** Re-send the utterance preserved by the last failure. */
  async retry(): Promise<void> {
    if (!this.failure) return;
    const { utterance } = this.failure;
    this.failure = null;
    await this.sendMessage(utterance);
  }

  /**
   * Record feedback on an agent turn. At most one feedback per turn:
   * the guard flips state to "sending" synchronously, so a double
   * click produces exactly one request. A negative verdict may return
   * a follow-up turn, which is appended to the thread. On 404 the
   * controls are re-enabled (the turn was unknown server-side).
   */
  async sendFeedback(
    turnId: string,
    polarity: "positive" | "negative",
  ): Promise<void> {
    const message = this.messages.find((m) => m.turnId === turnId);
    if (!message || message.feedback !== "none") return;
    message.feedback = "sending";
    this.notify();
    try {
      const result = await this.client.sendFeedback(
        this.sessionId,
        turnId,
        polarity,
      );
      message.feedback = polarity === "positive" ? "up" : "down";
      if (result.follow_up) {
        this.messages.push(agentMessage(result.follow_up));
      }
    } catch (error) {
      // transient: allow another attempt
      message.feedback = "none";
      if (!(error instanceof ApiError && error.status === 404)) {
        throw error;
      }
    } finally {
      this.notify();
    }
  }
}
