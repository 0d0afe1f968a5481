/**
 * Server-sent-events client on top of fetch, usable in browsers and node.
 *
 * Resumes from the last seen seq on reconnect (the server replays from the
 * cursor), so paired with the view model's duplicate guard a reconnect never
 * duplicates entries.
 */

import type { EventRecord } from "./events.js";

export interface StreamHandlers {
  onEvent: (event: EventRecord) => void;
  onStatus?: (status: "connecting" | "live" | "closed" | "error") => void;
}

export interface StreamHandle {
  close: () => void;
  lastSeq: () => number;
}

interface Frame {
  id?: string;
  event?: string;
  data?: string;
}

function parseFrame(block: string): Frame {
  const frame: Frame = {};
  for (const line of block.split("\n")) {
    if (line.startsWith("id: ")) frame.id = line.slice(4);
    else if (line.startsWith("event: ")) frame.event = line.slice(7);
    else if (line.startsWith("data: ")) frame.data = line.slice(6);
  }
  return frame;
}

export function subscribeEvents(
  baseUrl: string,
  sessionId: string,
  handlers: StreamHandlers,
  fromSeq = 0,
): StreamHandle {
  let cursor = fromSeq;
  let closed = false;
  let controller: AbortController | null = null;

  const connect = async (): Promise<void> => {
    let backoff = 500;
    while (!closed) {
      controller = new AbortController();
      handlers.onStatus?.("connecting");
      try {
        const response = await fetch(
          `${baseUrl}/sessions/${sessionId}/events?cursor=${cursor}`,
          { signal: controller.signal },
        );
        if (!response.ok || response.body === null) {
          throw new Error(`stream request failed: ${response.status}`);
        }
        handlers.onStatus?.("live");
        backoff = 500;
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        let buffer = "";
        for (;;) {
          const { done, value } = await reader.read();
          if (done) break;
          buffer += decoder.decode(value, { stream: true });
          let boundary = buffer.indexOf("\n\n");
          while (boundary >= 0) {
            const frame = parseFrame(buffer.slice(0, boundary));
            buffer = buffer.slice(boundary + 2);
            boundary = buffer.indexOf("\n\n");
            if (frame.event === undefined || frame.data === undefined) continue;
            const seq = Number(frame.id ?? 0);
            if (seq > cursor) cursor = seq;
            handlers.onEvent({
              seq,
              type: frame.event,
              data: JSON.parse(frame.data) as Record<string, unknown>,
            });
          }
        }
        // clean end of stream: the session ended
        handlers.onStatus?.("closed");
        return;
      } catch (error) {
        if (closed) return;
        handlers.onStatus?.("error");
        await new Promise((resolve) => setTimeout(resolve, backoff));
        backoff = Math.min(backoff * 2, 10_000);
      }
    }
  };

  void connect();
  return {
    close: () => {
      closed = true;
      controller?.abort();
    },
    lastSeq: () => cursor,
  };
}
