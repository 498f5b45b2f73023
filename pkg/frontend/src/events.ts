/**
 * Click-event construction and delivery.
 *
 * Events carry the clicked element's identity tags plus untreated-page
 * metadata from classification. Delivery retries transient failures
 * with the same eventId - the service deduplicates, so a retry can
 * never double-count a click.
 */

import type { ClassifiedPage } from "./classify.js";
import { DISP_RANK_ATTR, ID_ATTR, KIND_ATTR, ORIG_RANK_ATTR } from "./classify.js";
import type { ArrangementId, ElementKind } from "./model.js";
import { genericResults } from "./model.js";
import type { ClickEventJson } from "./schema.js";
import { validateEventJson } from "./schema.js";

export interface EventContext {
  userId: string;
  group: ArrangementId;
  eventId: string;
  timestamp: number;
}

/**
 * Build the canonical event for a click on a tagged element. Returns
 * null for untagged targets - clicks on page furniture the classifier
 * did not recognize are not recorded.
 */
export function buildClickEvent(
  classified: ClassifiedPage,
  target: Element,
  context: EventContext,
): ClickEventJson | null {
  const tagged = target.closest(`[${KIND_ATTR}]`);
  if (!tagged) return null;
  const kind = tagged.getAttribute(KIND_ATTR) as ElementKind;
  const { snapshot } = classified;

  const box = snapshot.elements.find((el) => el.kind === "ShoppingBox");
  const event: ClickEventJson = {
    eventId: context.eventId,
    userId: context.userId,
    timestamp: context.timestamp,
    engine: snapshot.engine,
    group: context.group,
    elementKind: kind,
    pageIndex: snapshot.pageIndex,
    numResults: genericResults(snapshot).length,
    adsPresent: snapshot.elements.some((el) => el.kind === "Ad"),
    boxPresent: box !== undefined,
    ssrPositions: [...classified.ssrPositions],
  };
  if (box) event.boxColumn = box.column;
  if (snapshot.candidateCount !== undefined) event.candidateCount = snapshot.candidateCount;
  if (kind === "GenericResult") {
    event.originalRank = Number(tagged.getAttribute(ORIG_RANK_ATTR));
    event.displayedRank = Number(tagged.getAttribute(DISP_RANK_ATTR));
  }

  const violations = validateEventJson(event as unknown as Record<string, unknown>);
  if (violations.length > 0) {
    throw new Error(`built an invalid event: ${violations.join("; ")}`);
  }
  return event;
}

export interface PostOptions {
  retries?: number;
  backoffMs?: number;
  fetchFn?: typeof fetch;
  sleepFn?: (ms: number) => Promise<void>;
}

export interface PostOutcome {
  delivered: boolean;
  attempts: number;
  status?: number;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

/**
 * POST an event to the ingestion service, retrying network failures and
 * 5xx responses with exponential backoff. 4xx responses are final (the
 * event is malformed or rate limited; retrying the same payload cannot
 * help a schema rejection, and a 429 retry happens on the next click).
 */
export async function postEventWithRetry(
  baseUrl: string,
  event: ClickEventJson,
  options: PostOptions = {},
): Promise<PostOutcome> {
  const { retries = 4, backoffMs = 200, fetchFn = fetch, sleepFn = defaultSleep } = options;
  const url = `${baseUrl.replace(/\/$/, "")}/v1/events`;
  const body = JSON.stringify(event);

  let attempts = 0;
  for (let attempt = 0; attempt <= retries; attempt += 1) {
    attempts += 1;
    try {
      const response = await fetchFn(url, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body,
      });
      if (response.status === 202) return { delivered: true, attempts, status: 202 };
      if (response.status < 500) return { delivered: false, attempts, status: response.status };
    } catch {
      // network failure: retry below
    }
    if (attempt < retries) await sleepFn(backoffMs * 2 ** attempt);
  }
  return { delivered: false, attempts };
}
