import type { CompareResponse, DraftText, HealthResponse, ScoreResponse } from "./types.js";

export class ServiceError extends Error {
  status: number;

  constructor(message: string, status: number) {
    super(message);
    this.status = status;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function joinText(draft: DraftText): string {
  return `${draft.title}\n${draft.abstract}`;
}

// Thin client over the scoring service. At most one score request is in
// flight: a new call aborts the previous one (cancel-and-replace).
export class ScoringClient {
  private baseUrl: string;
  private fetchImpl: FetchLike;
  private inflight: AbortController | null = null;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
        signal,
      });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ServiceError(`service unreachable: ${String(err)}`, 0);
    }
    if (!resp.ok) {
      const text = await resp.text().catch(() => "");
      throw new ServiceError(`${path} failed (${resp.status}): ${text}`, resp.status);
    }
    return resp.json() as Promise<T>;
  }

  async health(): Promise<HealthResponse> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(`${this.baseUrl}/health`);
    } catch (err) {
      throw new ServiceError(`service unreachable: ${String(err)}`, 0);
    }
    if (!resp.ok) throw new ServiceError(`/health failed (${resp.status})`, resp.status);
    return resp.json() as Promise<HealthResponse>;
  }

  // Cancels any in-flight score before issuing the new one.
  async score(draft: DraftText, vintage?: number): Promise<ScoreResponse> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const body: Record<string, unknown> = { title: draft.title, abstract: draft.abstract };
    if (vintage !== undefined) body.vintage = vintage;
    try {
      return await this.post<ScoreResponse>("/score", body, controller.signal);
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }

  async compare(a: DraftText, b: DraftText): Promise<CompareResponse> {
    return this.post<CompareResponse>("/compare", {
      text_a: joinText(a),
      text_b: joinText(b),
    });
  }
}
