/** Wire shapes of the chat backend and the client-side thread model. */

export interface Attribution {
  source_id: string;
  url: string | null;
  start_char: number;
  end_char: number;
}

export type Resolution = "scripted" | "qa" | "no_answer";

export interface ChatTurn {
  turn_id: string;
  response_text: string;
  resolution: Resolution;
  attribution?: Attribution;
}

export interface FeedbackResponse {
  recorded: boolean;
  follow_up: ChatTurn | null;
}

export type FeedbackState = "none" | "up" | "down" | "sending";

export interface UiMessage {
  author: "user" | "agent";
  text: string;
  /** Present on agent messages only. */
  turnId?: string;
  resolution?: Resolution;
  /**
   * Attribution to show under a qa reply. Only set when the span passed
   * the client-side consistency check (span length equals answer length).
   */
  attribution?: Attribution;
  /** Feedback controls exist only on agent messages. */
  feedback?: FeedbackState;
}
