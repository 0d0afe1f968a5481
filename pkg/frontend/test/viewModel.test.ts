import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import type { EventRecord } from "../src/events.js";
import { initialState, reduce, reduceAll, renderTranscript } from "../src/viewModel.js";

const here = dirname(fileURLToPath(import.meta.url));
const recorded: EventRecord[] = JSON.parse(
  readFileSync(join(here, "fixtures", "recorded-events.json"), "utf-8"),
);

describe("view model replay", () => {
  it("renders a recorded event log deterministically", () => {
    const first = renderTranscript(reduceAll(initialState(), recorded));
    const second = renderTranscript(reduceAll(initialState(), recorded));
    expect(first).toEqual(second);
    expect(first.length).toBeGreaterThan(10);
  });

  it("renders identically when the log is replayed in chunks", () => {
    const whole = reduceAll(initialState(), recorded);
    let chunked = initialState();
    for (let start = 0; start < recorded.length; start += 7) {
      chunked = reduceAll(chunked, recorded.slice(start, start + 7));
    }
    expect(renderTranscript(chunked)).toEqual(renderTranscript(whole));
    expect(chunked.mode).toEqual(whole.mode);
    expect(chunked.captions).toEqual(whole.captions);
  });

  it("drops duplicates on reconnect-style overlap", () => {
    const clean = reduceAll(initialState(), recorded);
    // replay with a large overlapping window, as a resumed stream would
    const overlapped = [...recorded.slice(0, 60), ...recorded.slice(20)];
    const resumed = reduceAll(initialState(), overlapped);
    expect(renderTranscript(resumed)).toEqual(renderTranscript(clean));
  });

  it("shows the scripted conversation with engine annotations", () => {
    const lines = renderTranscript(reduceAll(initialState(), recorded));
    const joined = lines.join("\n");
    expect(joined).toContain("(response via tv_program");
    expect(joined).toContain("(response via daily_life");
    expect(joined).toContain("(response via news_sns");
    expect(joined).toContain("(response via generative)");
    expect(joined).toContain("[system] conversation ended (end_intent)");
    const userLine = lines.find((l) => l.startsWith("[user] yes i love elephants"));
    expect(userLine).toBeDefined();
  });

  it("keeps the mode badge equal to the latest mode_changed event", () => {
    let state = initialState();
    let expected = "TVWatching";
    for (const event of recorded) {
      state = reduce(state, event);
      if (event.type === "mode_changed") {
        expected = event.data.to as string;
      }
      expect(state.mode).toBe(expected);
    }
  });

  it("buffers captions and keywords with caps", () => {
    const state = reduceAll(initialState(), recorded);
    expect(state.captions.length).toBeLessThanOrEqual(8);
    expect(state.keywords.length).toBeLessThanOrEqual(12);
    expect(state.captions.length).toBeGreaterThan(0);
  });

  it("chat log mirrors event-stream order for spoken events", () => {
    const state = reduceAll(initialState(), recorded);
    const spoken = recorded
      .filter((e) => e.type === "robot_utterance" || e.type === "user_utterance")
      .map((e) => e.data.text as string);
    const bubbles = state.chat
      .filter((b) => b.speaker !== "system")
      .map((b) => b.text);
    expect(bubbles).toEqual(spoken);
  });
});
