/**
 * Page classification: turn a live results page into the canonical
 * snapshot model, tagging each matched DOM node for later arrangement
 * and click attribution.
 *
 * Element ids are assigned per kind in document order (g1, g2, ..., ad1,
 * box1, ssr1), the same convention the fixture ground truth uses, so a
 * classified page can be compared against hand-labeled snapshots and
 * fed to the backend's arrangement oracle.
 */

import type { Column, ElementKind, Engine, Snapshot, SnapshotElement } from "./model.js";
import { genericResults, parseCandidateCount } from "./model.js";
import type { EngineSelectors, SelectorConfig } from "./selectors.js";
import { selectorsFor } from "./selectors.js";

export const KIND_ATTR = "data-sl-kind";
export const ID_ATTR = "data-sl-id";
export const ORIG_RANK_ATTR = "data-sl-orig-rank";
export const DISP_RANK_ATTR = "data-sl-disp-rank";

const ID_PREFIX: Record<ElementKind, string> = {
  GenericResult: "g",
  Ad: "ad",
  ShoppingBox: "box",
  SpecializedResult: "ssr",
  Other: "other",
};

export interface ClassifiedPage {
  snapshot: Snapshot;
  nodes: Map<string, Element>;
  /** Generic results above each Main-column specialized result. */
  ssrPositions: number[];
}

function matchKind(node: Element, selectors: EngineSelectors): ElementKind | null {
  for (const [kind, patterns] of Object.entries(selectors.kinds)) {
    if (patterns && patterns.some((pattern) => node.matches(pattern))) {
      return kind as ElementKind;
    }
  }
  return null;
}

function classifyColumn(
  container: Element,
  column: Column,
  selectors: EngineSelectors,
  counters: Map<string, number>,
  elements: SnapshotElement[],
  nodes: Map<string, Element>,
): void {
  const allPatterns = Object.values(selectors.kinds)
    .flat()
    .filter((p): p is string => Boolean(p))
    .join(",");
  if (!allPatterns) return;
  let index = 0;
  for (const node of container.querySelectorAll(allPatterns)) {
    const kind = matchKind(node, selectors);
    if (kind === null) continue;
    const prefix = ID_PREFIX[kind];
    const serial = (counters.get(prefix) ?? 0) + 1;
    counters.set(prefix, serial);
    const elementId = `${prefix}${serial}`;
    elements.push({ elementId, kind, column, index });
    nodes.set(elementId, node);
    node.setAttribute(KIND_ATTR, kind);
    node.setAttribute(ID_ATTR, elementId);
    index += 1;
  }
}

/**
 * Classify a results page. Returns null (unclassifiable) when the main
 * container or any generic result is missing - the page is then shown
 * unmodified and no events are recorded for it.
 */
export function classifyPage(
  document: Document,
  engine: Engine,
  config: SelectorConfig,
  pageIndex = 0,
): ClassifiedPage | null {
  const selectors = selectorsFor(config, engine);
  if (!selectors) return null;
  const main = document.querySelector(selectors.main);
  if (!main) return null;

  const counters = new Map<string, number>();
  const elements: SnapshotElement[] = [];
  const nodes = new Map<string, Element>();
  classifyColumn(main, "Main", selectors, counters, elements, nodes);

  if (selectors.sidebar) {
    const sidebar = document.querySelector(selectors.sidebar);
    if (sidebar) {
      classifyColumn(sidebar, "Sidebar", selectors, counters, elements, nodes);
    }
  }

  const snapshot: Snapshot = { engine, pageIndex, elements };
  if (genericResults(snapshot).length === 0) return null;

  if (selectors.resultsStats) {
    const stats = document.querySelector(selectors.resultsStats);
    const count = parseCandidateCount(stats?.textContent);
    if (count !== null) snapshot.candidateCount = count;
  }

  const ssrPositions: number[] = [];
  let genericsAbove = 0;
  for (const el of elements.filter((e) => e.column === "Main")) {
    if (el.kind === "GenericResult") genericsAbove += 1;
    else if (el.kind === "SpecializedResult") ssrPositions.push(genericsAbove);
  }

  for (const [rank, el] of genericResults(snapshot).entries()) {
    const node = nodes.get(el.elementId);
    node?.setAttribute(ORIG_RANK_ATTR, String(rank + 1));
    node?.setAttribute(DISP_RANK_ATTR, String(rank + 1));
  }

  return { snapshot, nodes, ssrPositions };
}
