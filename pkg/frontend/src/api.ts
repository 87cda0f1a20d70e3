// Thin client for the session HTTP API. The fetch implementation is
// injectable so tests can drive it without a server.

import type { SessionInfo } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function errorDetail(resp: Response): Promise<string> {
  try {
    const doc = (await resp.json()) as { detail?: unknown };
    if (typeof doc.detail === "string") return doc.detail;
    return JSON.stringify(doc.detail ?? doc);
  } catch {
    return resp.statusText || "request failed";
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      throw new ApiError(resp.status, await errorDetail(resp));
    }
    return resp;
  }

  async createSession(problem: string, guide: string = "pros_cons"): Promise<string> {
    const resp = await this.request("/v1/sessions", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ problem, guide }),
    });
    const doc = (await resp.json()) as { session_id: string };
    return doc.session_id;
  }

  async getSession(sessionId: string): Promise<SessionInfo> {
    const resp = await this.request(`/v1/sessions/${sessionId}`);
    return (await resp.json()) as SessionInfo;
  }

  async getProtocol(sessionId: string): Promise<string> {
    const resp = await this.request(`/v1/sessions/${sessionId}/protocol`);
    return await resp.text();
  }

  async getMapSvg(sessionId: string): Promise<string> {
    const resp = await this.request(`/v1/sessions/${sessionId}/map.svg`);
    return await resp.text();
  }

  async followup(sessionId: string, question: string): Promise<string> {
    const resp = await this.request(`/v1/sessions/${sessionId}/followup`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ question }),
    });
    const doc = (await resp.json()) as { answer: string };
    return doc.answer;
  }

  eventsUrl(sessionId: string): string {
    return `${this.baseUrl}/v1/sessions/${sessionId}/events`;
  }
}
