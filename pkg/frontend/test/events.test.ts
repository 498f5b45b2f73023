import { describe, expect, it } from "vitest";

import { applyArrangementDom } from "../src/arrange.js";
import { buildClickEvent, postEventWithRetry } from "../src/events.js";
import type { ClickEventJson } from "../src/schema.js";
import { validateEventJson } from "../src/schema.js";
import { loadAndClassify } from "./helpers.js";

const CONTEXT = {
  userId: "user-abc",
  group: "a1" as const,
  eventId: "evt-001",
  timestamp: 1_700_000_000_000,
};

describe("buildClickEvent", () => {
  it("records original and displayed rank for a swapped-up result", () => {
    const classified = loadAndClassify("g01");
    applyArrangementDom(classified, "a1");
    // After swap 1-2, the original rank-2 result is displayed first.
    const target = classified.nodes.get("g2")!.querySelector("h3")!;
    const event = buildClickEvent(classified, target, CONTEXT);
    expect(event).toMatchObject({
      elementKind: "GenericResult",
      originalRank: 2,
      displayedRank: 1,
      group: "a1",
      engine: "google",
      numResults: 10,
      adsPresent: true,
      boxPresent: false,
      candidateCount: 323_000_000,
    });
    expect(validateEventJson(event)).toEqual([]);
  });

  it("records an ad click without ranks", () => {
    const classified = loadAndClassify("g01");
    applyArrangementDom(classified, "a0");
    const event = buildClickEvent(classified, classified.nodes.get("ad1")!, {
      ...CONTEXT,
      group: "a0",
    });
    expect(event).toMatchObject({ elementKind: "Ad" });
    expect(event).not.toHaveProperty("originalRank");
    expect(event).not.toHaveProperty("displayedRank");
    expect(validateEventJson(event)).toEqual([]);
  });

  it("carries untreated-page metadata under a hiding arrangement", () => {
    const classified = loadAndClassify("g03");
    applyArrangementDom(classified, "a4");
    const event = buildClickEvent(classified, classified.nodes.get("g1")!, {
      ...CONTEXT,
      group: "a4",
    });
    expect(event).toMatchObject({
      adsPresent: true,
      boxPresent: true,
      boxColumn: "Main",
      ssrPositions: [1],
    });
    expect(validateEventJson(event)).toEqual([]);
  });

  it("ignores clicks on untagged page furniture", () => {
    const classified = loadAndClassify("g01");
    const stats = document.querySelector("#result-stats")!;
    expect(buildClickEvent(classified, stats, CONTEXT)).toBeNull();
  });

  it("every fixture/arrangement click validates against the schema", () => {
    for (const name of ["g01", "g02", "g03"]) {
      const classified = loadAndClassify(name);
      applyArrangementDom(classified, "a5");
      for (const el of classified.snapshot.elements) {
        const event = buildClickEvent(classified, classified.nodes.get(el.elementId)!, {
          ...CONTEXT,
          group: "a5",
        });
        expect(event).not.toBeNull();
        expect(validateEventJson(event!)).toEqual([]);
      }
    }
  });
});

function fakeFetch(outcomes: Array<number | "network-error">) {
  const calls: Array<{ url: string; body: string }> = [];
  const fetchFn = (async (url: string | URL | Request, init?: RequestInit) => {
    calls.push({ url: String(url), body: String(init?.body) });
    const outcome = outcomes[Math.min(calls.length - 1, outcomes.length - 1)]!;
    if (outcome === "network-error") throw new TypeError("fetch failed");
    return new Response("{}", { status: outcome });
  }) as typeof fetch;
  return { calls, fetchFn };
}

const EVENT: ClickEventJson = {
  eventId: "evt-retry",
  userId: "u",
  timestamp: 1,
  engine: "google",
  group: "a0",
  elementKind: "Ad",
  pageIndex: 0,
  numResults: 3,
  adsPresent: true,
  boxPresent: false,
  ssrPositions: [],
};

const noSleep = async () => {};

describe("postEventWithRetry", () => {
  it("delivers on first success", async () => {
    const { calls, fetchFn } = fakeFetch([202]);
    const outcome = await postEventWithRetry("http://svc", EVENT, { fetchFn, sleepFn: noSleep });
    expect(outcome).toEqual({ delivered: true, attempts: 1, status: 202 });
    expect(calls[0]!.url).toBe("http://svc/v1/events");
  });

  it("retries network failures with the same eventId", async () => {
    const { calls, fetchFn } = fakeFetch(["network-error", "network-error", 202]);
    const outcome = await postEventWithRetry("http://svc/", EVENT, { fetchFn, sleepFn: noSleep });
    expect(outcome.delivered).toBe(true);
    expect(outcome.attempts).toBe(3);
    const ids = calls.map((c) => (JSON.parse(c.body) as ClickEventJson).eventId);
    expect(new Set(ids)).toEqual(new Set(["evt-retry"]));
  });

  it("retries 5xx", async () => {
    const { fetchFn } = fakeFetch([503, 202]);
    const outcome = await postEventWithRetry("http://svc", EVENT, { fetchFn, sleepFn: noSleep });
    expect(outcome).toMatchObject({ delivered: true, attempts: 2 });
  });

  it("does not retry schema rejections", async () => {
    const { calls, fetchFn } = fakeFetch([400]);
    const outcome = await postEventWithRetry("http://svc", EVENT, { fetchFn, sleepFn: noSleep });
    expect(outcome).toEqual({ delivered: false, attempts: 1, status: 400 });
    expect(calls).toHaveLength(1);
  });

  it("gives up after bounded retries", async () => {
    const { calls, fetchFn } = fakeFetch(["network-error"]);
    const outcome = await postEventWithRetry("http://svc", EVENT, {
      fetchFn,
      sleepFn: noSleep,
      retries: 3,
    });
    expect(outcome.delivered).toBe(false);
    expect(calls).toHaveLength(4);
  });

  it("backs off exponentially", async () => {
    const sleeps: number[] = [];
    const { fetchFn } = fakeFetch(["network-error", "network-error", "network-error", 202]);
    await postEventWithRetry("http://svc", EVENT, {
      fetchFn,
      backoffMs: 100,
      sleepFn: async (ms) => {
        sleeps.push(ms);
      },
    });
    expect(sleeps).toEqual([100, 200, 400]);
  });
});
