import { describe, expect, it } from "vitest";

import { ScoringClient, ServiceError } from "../src/api.js";
import type { ScoreResponse } from "../src/types.js";
import scoreWeak from "./fixtures/score_weak.json";
import compareIdentical from "./fixtures/compare_identical.json";
import health from "./fixtures/health.json";

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ScoringClient", () => {
  it("posts /score with the draft body and returns the payload verbatim", async () => {
    const seen: { url?: string; body?: unknown } = {};
    const client = new ScoringClient("http://svc.test/", async (url, init) => {
      seen.url = url;
      seen.body = JSON.parse(String(init?.body));
      return jsonResponse(scoreWeak);
    });
    const resp = await client.score({ title: "t", abstract: "a" });
    expect(seen.url).toBe("http://svc.test/score");
    expect(seen.body).toEqual({ title: "t", abstract: "a" });
    expect(resp).toEqual(scoreWeak as ScoreResponse);
  });

  it("joins title and abstract with a newline for /compare", async () => {
    const seen: { body?: { text_a: string; text_b: string } } = {};
    const client = new ScoringClient("http://svc.test", async (_url, init) => {
      seen.body = JSON.parse(String(init?.body));
      return jsonResponse(compareIdentical);
    });
    await client.compare({ title: "t1", abstract: "a1" }, { title: "t2", abstract: "a2" });
    expect(seen.body).toEqual({ text_a: "t1\na1", text_b: "t2\na2" });
  });

  it("wraps network failure in ServiceError with status 0", async () => {
    const client = new ScoringClient("http://svc.test", async () => {
      throw new TypeError("fetch failed");
    });
    await expect(client.score({ title: "t", abstract: "a" })).rejects.toMatchObject({
      name: "Error",
      status: 0,
    });
  });

  it("surfaces HTTP errors with their status", async () => {
    const client = new ScoringClient("http://svc.test", async () =>
      jsonResponse({ error: "validation" }, 400),
    );
    const err = await client.score({ title: "t", abstract: "a" }).catch((e) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect(err.status).toBe(400);
  });

  it("cancels the in-flight score when a new one is issued", async () => {
    const aborted: boolean[] = [];
    const client = new ScoringClient("http://svc.test", (_url, init) => {
      const signal = init?.signal ?? null;
      return new Promise((resolve, reject) => {
        const timer = setTimeout(() => resolve(jsonResponse(scoreWeak)), 20);
        signal?.addEventListener("abort", () => {
          clearTimeout(timer);
          aborted.push(true);
          reject(new DOMException("aborted", "AbortError"));
        });
      });
    });
    const first = client.score({ title: "v1", abstract: "a" });
    const second = client.score({ title: "v2", abstract: "a" });
    await expect(first).rejects.toThrow("aborted");
    await expect(second).resolves.toEqual(scoreWeak);
    expect(aborted).toEqual([true]);
  });

  it("passes an optional vintage through", async () => {
    const seen: { body?: Record<string, unknown> } = {};
    const client = new ScoringClient("http://svc.test", async (_url, init) => {
      seen.body = JSON.parse(String(init?.body));
      return jsonResponse(scoreWeak);
    });
    await client.score({ title: "t", abstract: "a" }, 2004);
    expect(seen.body?.vintage).toBe(2004);
  });

  it("fetches health", async () => {
    const client = new ScoringClient("http://svc.test", async (url) => {
      expect(url).toBe("http://svc.test/health");
      return jsonResponse(health);
    });
    await expect(client.health()).resolves.toEqual(health);
  });
});
