/**
 * Pure view state: the UI is a fold over the session's event log.
 *
 * No business logic lives here — end conditions, engine choice, and
 * scheduling all happen server-side and arrive as events. Events carry a
 * monotonically increasing seq; anything at or below lastSeq is dropped, so
 * replays after a reconnect never duplicate bubbles.
 */

import type {
  ConversationEndedData,
  EventRecord,
  ModeChangedData,
  RobotUtteranceData,
} from "./events.js";

export type ConnectionStatus = "connecting" | "live" | "closed" | "error";

export interface ChatBubble {
  speaker: "robot" | "user" | "system";
  text: string;
  kind: string;
  t: number;
  engine?: string;
  similarity?: number;
  conversationId?: number;
  divider?: boolean;
}

export interface ViewState {
  mode: string;
  connection: ConnectionStatus;
  captions: string[];
  keywords: { surface: string; source: string }[];
  chat: ChatBubble[];
  lastSeq: number;
}

const CAPTION_BUFFER = 8;
const KEYWORD_BUFFER = 12;

export function initialState(): ViewState {
  return {
    mode: "TVWatching",
    connection: "connecting",
    captions: [],
    keywords: [],
    chat: [],
    lastSeq: 0,
  };
}

export function withConnection(state: ViewState, connection: ConnectionStatus): ViewState {
  return { ...state, connection };
}

export function reduce(state: ViewState, event: EventRecord): ViewState {
  if (event.seq <= state.lastSeq) {
    return state; // replayed duplicate after a reconnect
  }
  const next: ViewState = { ...state, lastSeq: event.seq };
  switch (event.type) {
    case "robot_utterance": {
      const data = event.data as unknown as RobotUtteranceData;
      next.chat = [...state.chat, {
        speaker: "robot",
        text: data.text,
        kind: data.kind,
        t: data.t,
        engine: data.engine,
        similarity: data.similarity,
        conversationId: data.conversation_id,
      }];
      return next;
    }
    case "user_utterance": {
      const data = event.data as { t: number; text: string; conversation_id?: number };
      next.chat = [...state.chat, {
        speaker: "user",
        text: data.text,
        kind: "user",
        t: data.t,
        conversationId: data.conversation_id ?? undefined,
      }];
      return next;
    }
    case "system_note": {
      const data = event.data as { t: number; text: string; cause?: string };
      next.chat = [...state.chat, {
        speaker: "system",
        text: data.text,
        kind: "event",
        t: data.t,
      }];
      return next;
    }
    case "conversation_ended": {
      const data = event.data as unknown as ConversationEndedData;
      next.chat = [...state.chat, {
        speaker: "system",
        text: `conversation ended (${data.cause}) — ${data.turns} turns`,
        kind: "event",
        t: data.t,
        conversationId: data.conversation_id,
        divider: true,
      }];
      return next;
    }
    case "mode_changed": {
      const data = event.data as unknown as ModeChangedData;
      next.mode = data.to;
      return next;
    }
    case "caption_shown": {
      const data = event.data as { text: string };
      next.captions = [...state.captions, data.text].slice(-CAPTION_BUFFER);
      return next;
    }
    case "keyword_extracted": {
      const data = event.data as { surface: string; source: string };
      next.keywords = [...state.keywords, { surface: data.surface, source: data.source }]
        .slice(-KEYWORD_BUFFER);
      return next;
    }
    default:
      return next; // unknown event types advance the cursor only
  }
}

export function reduceAll(state: ViewState, events: EventRecord[]): ViewState {
  return events.reduce(reduce, state);
}

/** Deterministic text rendering of the chat log, used by tests and the DOM layer. */
export function renderTranscript(state: ViewState): string[] {
  return state.chat.map((bubble) => {
    if (bubble.speaker === "system") {
      return `[system] ${bubble.text}`;
    }
    if (bubble.speaker === "user") {
      return `[user] ${bubble.text}`;
    }
    let annotation = bubble.kind;
    if (bubble.engine !== undefined) {
      annotation = `${bubble.kind} via ${bubble.engine}`;
      if (bubble.similarity !== undefined) {
        annotation += ` sim=${bubble.similarity.toFixed(3)}`;
      }
    }
    return `[robot] ${bubble.text} (${annotation})`;
  });
}
