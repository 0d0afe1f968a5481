/** Thin typed wrappers over the session service endpoints. */

import type { EventRecord } from "./events.js";

export interface SessionInfo {
  session_id: string;
  status: "running" | "ended";
  mode: string;
  clock: number;
}

export interface CreateSessionOptions {
  config?: Record<string, unknown>;
  feed?: Array<{ t: number; kind: string; text: string; confidence?: number }>;
  feed_path?: string;
  speedup?: number;
}

async function expectOk(response: Response): Promise<Response> {
  if (!response.ok) {
    const body = await response.text();
    throw new Error(`${response.status}: ${body}`);
  }
  return response;
}

export async function createSession(
  baseUrl: string,
  options: CreateSessionOptions = {},
): Promise<SessionInfo> {
  const response = await expectOk(await fetch(`${baseUrl}/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(options),
  }));
  return (await response.json()) as SessionInfo;
}

export async function listSessions(baseUrl: string): Promise<SessionInfo[]> {
  const response = await expectOk(await fetch(`${baseUrl}/sessions`));
  return (await response.json()) as SessionInfo[];
}

export async function sendReply(
  baseUrl: string, sessionId: string, text: string,
): Promise<void> {
  await expectOk(await fetch(`${baseUrl}/sessions/${sessionId}/message`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify({ text }),
  }));
}

export async function pressCancel(baseUrl: string, sessionId: string): Promise<void> {
  await expectOk(await fetch(`${baseUrl}/sessions/${sessionId}/cancel`, {
    method: "POST",
  }));
}

export async function endSession(baseUrl: string, sessionId: string): Promise<void> {
  await expectOk(await fetch(`${baseUrl}/sessions/${sessionId}/end`, {
    method: "POST",
  }));
}

export async function fetchEventRecords(
  baseUrl: string, sessionId: string, cursor = 0,
): Promise<EventRecord[]> {
  const response = await expectOk(await fetch(
    `${baseUrl}/sessions/${sessionId}/events/records?cursor=${cursor}`,
  ));
  return (await response.json()) as EventRecord[];
}
