/**
 * Counterfactual arrangements, applied both to the snapshot model and to
 * the live DOM. Semantics mirror the analysis backend's arrangement
 * engine exactly (the test suite checks DOM outcomes against oracle
 * output generated by it): a0 identity, a1/a2/a3 rank swaps, a4 hide top
 * ads + shopping boxes, a5 hide then swap 1-2, a6 hide boxes.
 *
 * The DOM is only ever reordered or hidden - nodes are never created,
 * removed, or rewritten. Hiding uses display:none, and the model-side
 * slot re-compaction matches what a user then sees.
 */

import type { ClassifiedPage } from "./classify.js";
import { DISP_RANK_ATTR } from "./classify.js";
import type { ArrangementId, ElementKind, Snapshot, SnapshotElement } from "./model.js";
import { genericRank, genericResults } from "./model.js";

export interface ArrangeResult {
  snapshot: Snapshot;
  applied: boolean;
}

function swapGeneric(snapshot: Snapshot, i: number, j: number): ArrangeResult {
  const generics = genericResults(snapshot);
  if (Math.max(i, j) > generics.length) return { snapshot, applied: false };
  const first = generics[i - 1]!;
  const second = generics[j - 1]!;
  const elements = snapshot.elements.map((el) => {
    if (el.elementId === first.elementId) return { ...el, column: second.column, index: second.index };
    if (el.elementId === second.elementId) return { ...el, column: first.column, index: first.index };
    return el;
  });
  return { snapshot: { ...snapshot, elements }, applied: true };
}

function hideKinds(
  snapshot: Snapshot,
  kinds: readonly ElementKind[],
  topOnly: boolean,
): ArrangeResult & { hidden: string[] } {
  const generics = genericResults(snapshot);
  const firstGenericIndex = generics.length > 0 ? generics[0]!.index : null;
  const doomed = (el: SnapshotElement): boolean => {
    if (el.kind === "ShoppingBox") return kinds.includes("ShoppingBox");
    if (el.kind === "Ad" && kinds.includes("Ad")) {
      if (!topOnly) return true;
      return el.column === "Main" && (firstGenericIndex === null || el.index < firstGenericIndex);
    }
    return false;
  };
  const hidden = snapshot.elements.filter(doomed).map((el) => el.elementId);
  if (hidden.length === 0) return { snapshot, applied: false, hidden };

  const survivors = snapshot.elements.filter((el) => !doomed(el));
  const newIndex = new Map<string, number>();
  for (const column of ["Main", "Sidebar"] as const) {
    const kept = survivors
      .filter((el) => el.column === column)
      .map((el) => el.index)
      .sort((a, b) => a - b);
    kept.forEach((old, compacted) => newIndex.set(`${column}:${old}`, compacted));
  }
  const elements = survivors.map((el) => ({
    ...el,
    index: newIndex.get(`${el.column}:${el.index}`)!,
  }));
  return { snapshot: { ...snapshot, elements }, applied: true, hidden };
}

interface ArrangementPlan {
  result: ArrangeResult;
  /** Generic-rank pairs to swap in the DOM, in order. */
  swaps: Array<[number, number]>;
  /** Element ids to hide in the DOM. */
  hidden: string[];
}

function planArrangement(arrangement: ArrangementId, snapshot: Snapshot): ArrangementPlan {
  switch (arrangement) {
    case "a0":
      return { result: { snapshot, applied: true }, swaps: [], hidden: [] };
    case "a1":
    case "a2":
    case "a3": {
      const [i, j] = { a1: [1, 2], a2: [1, 3], a3: [2, 3] }[arrangement] as [number, number];
      const result = swapGeneric(snapshot, i, j);
      return { result, swaps: result.applied ? [[i, j]] : [], hidden: [] };
    }
    case "a4": {
      const { hidden, ...result } = hideKinds(snapshot, ["Ad", "ShoppingBox"], true);
      return { result, swaps: [], hidden };
    }
    case "a5": {
      const hide = hideKinds(snapshot, ["Ad", "ShoppingBox"], true);
      const swap = swapGeneric(hide.snapshot, 1, 2);
      return {
        result: { snapshot: swap.snapshot, applied: hide.applied || swap.applied },
        swaps: swap.applied ? [[1, 2]] : [],
        hidden: hide.hidden,
      };
    }
    case "a6": {
      const { hidden, ...result } = hideKinds(snapshot, ["ShoppingBox"], false);
      return { result, swaps: [], hidden };
    }
  }
}

/** Model-only arrangement, for callers that do not touch the DOM. */
export function applyArrangement(arrangement: ArrangementId, snapshot: Snapshot): ArrangeResult {
  return planArrangement(arrangement, snapshot).result;
}

function swapNodes(a: Element, b: Element): void {
  const aParent = a.parentNode;
  const bParent = b.parentNode;
  if (!aParent || !bParent) return;
  if (a.nextSibling === b) {
    bParent.insertBefore(b, a);
    return;
  }
  if (b.nextSibling === a) {
    aParent.insertBefore(a, b);
    return;
  }
  const aNext = a.nextSibling;
  bParent.insertBefore(a, b.nextSibling);
  aParent.insertBefore(b, aNext);
}

/**
 * Apply an arrangement to the classified page's DOM. Returns the
 * arranged snapshot and whether anything changed; displayed-rank tags
 * are refreshed on every generic result either way.
 */
export function applyArrangementDom(
  classified: ClassifiedPage,
  arrangement: ArrangementId,
): ArrangeResult {
  const plan = planArrangement(arrangement, classified.snapshot);

  for (const elementId of plan.hidden) {
    const node = classified.nodes.get(elementId);
    if (node instanceof HTMLElement) node.style.display = "none";
  }
  for (const [i, j] of plan.swaps) {
    const generics = genericResults(classified.snapshot);
    const a = classified.nodes.get(generics[i - 1]!.elementId);
    const b = classified.nodes.get(generics[j - 1]!.elementId);
    if (a && b) swapNodes(a, b);
  }

  for (const el of genericResults(classified.snapshot)) {
    const displayed = genericRank(plan.result.snapshot, el.elementId);
    const node = classified.nodes.get(el.elementId);
    if (node && displayed !== null) node.setAttribute(DISP_RANK_ATTR, String(displayed));
  }
  return plan.result;
}

function isHidden(node: Element): boolean {
  return node instanceof HTMLElement && node.style.display === "none";
}

/**
 * Read the visible arrangement back out of the DOM: tagged, unhidden
 * element ids per column, in document order. Used to compare the real
 * DOM outcome against the backend oracle's arranged snapshot.
 */
export function visibleArrangement(classified: ClassifiedPage): {
  main: string[];
  sidebar: string[];
} {
  const byColumn = { Main: [] as Array<[string, Element]>, Sidebar: [] as Array<[string, Element]> };
  for (const el of classified.snapshot.elements) {
    const node = classified.nodes.get(el.elementId);
    if (node && !isHidden(node)) byColumn[el.column].push([el.elementId, node]);
  }
  const inDocumentOrder = (entries: Array<[string, Element]>): string[] =>
    entries
      .sort(([, a], [, b]) =>
        a === b ? 0 : a.compareDocumentPosition(b) & Node.DOCUMENT_POSITION_FOLLOWING ? -1 : 1,
      )
      .map(([id]) => id);
  return { main: inDocumentOrder(byColumn.Main), sidebar: inDocumentOrder(byColumn.Sidebar) };
}
