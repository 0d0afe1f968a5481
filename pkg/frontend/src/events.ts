/** Event records as delivered by the session service (SSE or polling). */

export type EventType =
  | "robot_utterance"
  | "user_utterance"
  | "mode_changed"
  | "caption_shown"
  | "keyword_extracted"
  | "conversation_ended"
  | "system_note";

export interface EventRecord {
  seq: number;
  type: EventType | string;
  data: Record<string, unknown>;
}

export interface RobotUtteranceData {
  t: number;
  text: string;
  kind: "disclosure" | "question" | "response";
  engine?: string;
  similarity?: number;
  keyword?: string;
  conversation_id?: number;
}

export interface ModeChangedData {
  t: number;
  from: string;
  to: string;
  cause: string;
}

export interface ConversationEndedData {
  t: number;
  turns: number;
  cause: string;
  conversation_id: number;
}
