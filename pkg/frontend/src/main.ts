/**
 * Browser entry: wires the event stream into the pure view model and renders.
 *
 * Rendering is a full redraw from ViewState after every event — the state is
 * small (bounded caption/keyword buffers plus the chat log), and it keeps the
 * invariant visible: the page shows exactly what the event log says.
 */

import { createSession, endSession, listSessions, pressCancel, sendReply } from "./api.js";
import type { EventRecord } from "./events.js";
import { subscribeEvents } from "./sse.js";
import {
  initialState,
  reduce,
  withConnection,
  type ConnectionStatus,
  type ViewState,
} from "./viewModel.js";

const baseUrl = window.location.origin;

let state: ViewState = initialState();
let sessionId: string | null = null;

const el = (id: string): HTMLElement => {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node;
};

function esc(text: string): string {
  const div = document.createElement("div");
  div.textContent = text;
  return div.innerHTML;
}

function bubbleHtml(index: number): string {
  const bubble = state.chat[index];
  if (bubble.speaker === "system") {
    const cls = bubble.divider === true ? "bubble system divider" : "bubble system";
    return `<div class="${cls}">${esc(bubble.text)}</div>`;
  }
  let meta = bubble.kind;
  if (bubble.engine !== undefined) {
    meta = `${bubble.kind} · ${bubble.engine}`;
    if (bubble.similarity !== undefined) {
      meta += ` · sim ${bubble.similarity.toFixed(3)}`;
    }
  }
  return `<div class="bubble ${bubble.speaker}">` +
    `<div class="text">${esc(bubble.text)}</div>` +
    `<details class="inspector"><summary>${esc(meta)}</summary>` +
    `<div>t=${bubble.t.toFixed(1)}s` +
    (bubble.conversationId !== undefined ? ` · conversation ${bubble.conversationId}` : "") +
    `</div></details></div>`;
}

function render(): void {
  const badge = el("mode-badge");
  badge.textContent = state.mode;
  badge.className = `badge ${state.mode === "Conversing" ? "conversing" : "watching"}`;

  const connection = el("connection");
  connection.textContent = state.connection;
  connection.className = `connection ${state.connection}`;

  el("captions").innerHTML = state.captions.map((c) => `<span>${esc(c)}</span>`).join(" · ");
  el("keywords").innerHTML = state.keywords
    .map((k) => `<span class="kw ${k.source}">${esc(k.surface)}</span>`).join(" ");

  const log = el("chat-log");
  log.innerHTML = state.chat.map((_, i) => bubbleHtml(i)).join("");
  log.scrollTop = log.scrollHeight;

  const input = el("reply-input") as HTMLInputElement;
  const send = el("send-button") as HTMLButtonElement;
  const disabled = state.connection !== "live" || sessionId === null;
  input.disabled = disabled;
  send.disabled = disabled;
  send.title = disabled ? "not connected" : "";
}

function onEvent(event: EventRecord): void {
  state = reduce(state, event);
  render();
}

function onStatus(status: ConnectionStatus): void {
  state = withConnection(state, status);
  render();
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  let sid = params.get("session");
  if (sid === null) {
    const running = (await listSessions(baseUrl)).filter((s) => s.status === "running");
    if (running.length > 0) {
      sid = running[0].session_id;
    } else {
      const info = await createSession(baseUrl, {
        config: { mean_interval_s: 15, disclosure_ratio: 0.5 },
        feed: [
          { t: 1, kind: "detection", text: "elephant", confidence: 0.95 },
          { t: 5, kind: "caption", text: "The elephants at the zoo love bath time" },
          { t: 30, kind: "detection", text: "panda", confidence: 0.9 },
          { t: 60, kind: "caption", text: "A new panda enclosure opened this week" },
        ],
        speedup: 4,
      });
      sid = info.session_id;
    }
  }
  sessionId = sid;
  el("session-label").textContent = sid;

  subscribeEvents(baseUrl, sid, { onEvent, onStatus }, 0);

  (el("send-form") as HTMLFormElement).addEventListener("submit", (raw) => {
    raw.preventDefault();
    const input = el("reply-input") as HTMLInputElement;
    const text = input.value.trim();
    if (text === "" || sessionId === null) return;
    input.value = "";
    void sendReply(baseUrl, sessionId, text).catch((error) => {
      el("error-line").textContent = String(error);
    });
  });

  el("cancel-button").addEventListener("click", () => {
    if (sessionId === null) return;
    void pressCancel(baseUrl, sessionId).catch((error) => {
      el("error-line").textContent = String(error);
    });
  });

  el("end-button").addEventListener("click", () => {
    if (sessionId === null) return;
    void endSession(baseUrl, sessionId).catch((error) => {
      el("error-line").textContent = String(error);
    });
  });
}

start().catch((error) => {
  el("error-line").textContent = `failed to start: ${String(error)}`;
});
