/**
 * Shared page-model types, mirroring the analysis backend's canonical
 * snapshot JSON so classified pages and arrangement results can be
 * compared across components byte for byte.
 */

export type Engine = "google" | "bing";

export type ElementKind =
  | "GenericResult"
  | "Ad"
  | "ShoppingBox"
  | "SpecializedResult"
  | "Other";

export type Column = "Main" | "Sidebar";

export type ArrangementId = "a0" | "a1" | "a2" | "a3" | "a4" | "a5" | "a6";

export const GOOGLE_ARRANGEMENTS: readonly ArrangementId[] = [
  "a0",
  "a1",
  "a2",
  "a3",
  "a4",
  "a5",
  "a6",
];
export const BING_ARRANGEMENTS: readonly ArrangementId[] = ["a0", "a1"];

export function arrangementsFor(engine: Engine): readonly ArrangementId[] {
  return engine === "bing" ? BING_ARRANGEMENTS : GOOGLE_ARRANGEMENTS;
}

export interface SnapshotElement {
  elementId: string;
  kind: ElementKind;
  column: Column;
  index: number;
}

/** Canonical snapshot JSON: identical shape to the backend's format. */
export interface Snapshot {
  engine: Engine;
  pageIndex: number;
  elements: SnapshotElement[];
  candidateCount?: number;
}

export function genericResults(snapshot: Snapshot): SnapshotElement[] {
  return snapshot.elements
    .filter((el) => el.column === "Main" && el.kind === "GenericResult")
    .sort((a, b) => a.index - b.index);
}

export function genericRank(snapshot: Snapshot, elementId: string): number | null {
  const generics = genericResults(snapshot);
  const at = generics.findIndex((el) => el.elementId === elementId);
  return at === -1 ? null : at + 1;
}

const RESULTS_COUNT_RE = /([0-9][0-9'’.,   ]*)\s*results?\b/i;

/**
 * Extract the candidate-result count from the page's results string,
 * e.g. "About 323'000'000 results (0.65 seconds)". Unparseable input
 * yields null, never an error.
 */
export function parseCandidateCount(text: string | null | undefined): number | null {
  if (!text) return null;
  const match = RESULTS_COUNT_RE.exec(text);
  if (!match || match[1] === undefined) return null;
  const digits = match[1].replace(/[^0-9]/g, "");
  return digits ? Number.parseInt(digits, 10) : null;
}
