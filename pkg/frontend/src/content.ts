/**
 * Content-script orchestration.
 *
 * Flow on a results page: hide the body immediately, classify the DOM,
 * derive the treatment group from the shared hash of (user id, query,
 * salt), apply the arrangement, reveal the page, and attach a capturing
 * click listener that posts events in the background. If classification
 * fails the page is revealed untouched and nothing is recorded.
 *
 * The query string is read from the URL only to compute the assignment
 * hash; it is never stored and never leaves the browser.
 */

import { classifyPage } from "./classify.js";
import type { ClassifiedPage } from "./classify.js";
import { applyArrangementDom } from "./arrange.js";
import { buildClickEvent, postEventWithRetry } from "./events.js";
import { assign, makeKey } from "./hash.js";
import type { ArrangementId, Engine } from "./model.js";
import { DEFAULT_SELECTORS } from "./selectors.js";
import type { SelectorConfig } from "./selectors.js";
import type { Settings } from "./settings.js";

export function detectEngine(url: string): Engine | null {
  let parsed: URL;
  try {
    parsed = new URL(url);
  } catch {
    return null;
  }
  const host = parsed.hostname;
  if (/(^|\.)google\.[a-z.]+$/.test(host) && parsed.pathname.startsWith("/search")) {
    return "google";
  }
  if (/(^|\.)bing\.com$/.test(host) && parsed.pathname.startsWith("/search")) {
    return "bing";
  }
  return null;
}

export function queryFromUrl(url: string): string | null {
  try {
    return new URL(url).searchParams.get("q");
  } catch {
    return null;
  }
}

export function pageIndexFromUrl(url: string, engine: Engine): number {
  try {
    const params = new URL(url).searchParams;
    if (engine === "google") {
      const start = Number(params.get("start") ?? "0");
      return Number.isFinite(start) && start > 0 ? Math.floor(start / 10) : 0;
    }
    const first = Number(params.get("first") ?? "1");
    return Number.isFinite(first) && first > 1 ? Math.floor((first - 1) / 10) : 0;
  } catch {
    return 0;
  }
}

const HIDE_STYLE_ID = "sl-prereveal-hide";

export function hidePage(document: Document): void {
  if (document.getElementById(HIDE_STYLE_ID)) return;
  const style = document.createElement("style");
  style.id = HIDE_STYLE_ID;
  style.textContent = "body { visibility: hidden !important; }";
  (document.head ?? document.documentElement)?.appendChild(style);
}

export function revealPage(document: Document): void {
  document.getElementById(HIDE_STYLE_ID)?.remove();
}

export interface ExperimentOutcome {
  group: ArrangementId | null;
  classified: ClassifiedPage | null;
  applied: boolean;
}

export interface ExperimentDeps {
  settings: Settings;
  selectors?: SelectorConfig;
  now?: () => number;
  newEventId?: () => string;
  post?: typeof postEventWithRetry;
}

function defaultEventId(): string {
  const bytes = new Uint8Array(12);
  crypto.getRandomValues(bytes);
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

/**
 * Run the experiment on an already-hidden page. Always reveals the page
 * before returning, whatever happened.
 */
export function runExperiment(
  document: Document,
  url: string,
  deps: ExperimentDeps,
): ExperimentOutcome {
  const { settings, selectors = DEFAULT_SELECTORS } = deps;
  const engine = detectEngine(url);
  const query = queryFromUrl(url);
  if (!engine || query === null) {
    revealPage(document);
    return { group: null, classified: null, applied: false };
  }

  const group = assign(makeKey(settings.userId, query, settings.salt), engine);
  const classified = classifyPage(
    document,
    engine,
    selectors,
    pageIndexFromUrl(url, engine),
  );
  if (!classified) {
    revealPage(document);
    return { group, classified: null, applied: false };
  }

  const { applied } = applyArrangementDom(classified, group);
  revealPage(document);

  const now = deps.now ?? Date.now;
  const newEventId = deps.newEventId ?? defaultEventId;
  const post = deps.post ?? postEventWithRetry;
  document.addEventListener(
    "click",
    (raw) => {
      const target = raw.target;
      if (!(target instanceof Element)) return;
      const event = buildClickEvent(classified, target, {
        userId: settings.userId,
        group,
        eventId: newEventId(),
        timestamp: now(),
      });
      if (event) {
        // Fire and forget; delivery must never block navigation.
        void post(settings.serviceUrl, event);
      }
    },
    { capture: true },
  );

  return { group, classified, applied };
}
