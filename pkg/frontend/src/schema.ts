/**
 * Canonical click-event wire format and its validator.
 *
 * The schema is closed: only the fields below may appear, so a payload
 * can never carry query text or URLs. This mirrors the ingestion
 * service's validation - an event that passes here is accepted there.
 */

import type { ArrangementId, Column, ElementKind, Engine } from "./model.js";
import { arrangementsFor } from "./model.js";

export interface ClickEventJson {
  eventId: string;
  userId: string;
  timestamp: number; // UTC milliseconds
  engine: Engine;
  group: ArrangementId;
  originalRank?: number;
  displayedRank?: number;
  elementKind: ElementKind;
  pageIndex: number;
  numResults: number;
  adsPresent: boolean;
  boxPresent: boolean;
  boxColumn?: Column;
  ssrPositions: number[];
  candidateCount?: number;
}

const WIRE_FIELDS = new Set([
  "eventId",
  "userId",
  "timestamp",
  "engine",
  "group",
  "originalRank",
  "displayedRank",
  "elementKind",
  "pageIndex",
  "numResults",
  "adsPresent",
  "boxPresent",
  "boxColumn",
  "ssrPositions",
  "candidateCount",
]);

const REQUIRED_FIELDS = [
  "eventId",
  "userId",
  "timestamp",
  "engine",
  "group",
  "elementKind",
  "pageIndex",
  "numResults",
  "adsPresent",
  "boxPresent",
  "ssrPositions",
];

const ENGINES = new Set(["google", "bing"]);
const KINDS = new Set(["GenericResult", "Ad", "ShoppingBox", "SpecializedResult", "Other"]);
const COLUMNS = new Set(["Main", "Sidebar"]);

function isInt(value: unknown): value is number {
  return typeof value === "number" && Number.isInteger(value);
}

/** Validate a decoded JSON object; an empty list means it is a valid event. */
export function validateEventJson(obj: unknown): string[] {
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    return ["event must be a JSON object"];
  }
  const record = obj as Record<string, unknown>;
  const violations: string[] = [];
  for (const key of Object.keys(record)) {
    if (!WIRE_FIELDS.has(key)) violations.push(`forbidden field: ${key}`);
  }
  for (const name of REQUIRED_FIELDS) {
    if (!(name in record)) violations.push(`missing field: ${name}`);
  }
  if (violations.length > 0) return violations;

  for (const name of ["eventId", "userId"]) {
    if (typeof record[name] !== "string" || record[name] === "") {
      violations.push(`${name} must be a non-empty string`);
    }
  }
  if (!isInt(record.timestamp) || (record.timestamp as number) < 0) {
    violations.push("timestamp must be a non-negative integer (UTC ms)");
  }
  for (const name of ["pageIndex", "numResults"]) {
    if (!isInt(record[name]) || (record[name] as number) < 0) {
      violations.push(`${name} must be a non-negative integer`);
    }
  }
  for (const name of ["adsPresent", "boxPresent"]) {
    if (typeof record[name] !== "boolean") violations.push(`${name} must be a boolean`);
  }
  if (!ENGINES.has(record.engine as string)) violations.push("engine must be google or bing");
  if (!KINDS.has(record.elementKind as string)) violations.push("unknown elementKind");
  if (
    !Array.isArray(record.ssrPositions) ||
    record.ssrPositions.some((v) => !isInt(v) || v < 0)
  ) {
    violations.push("ssrPositions must be a list of non-negative integers");
  }
  if (violations.length > 0) return violations;

  const engine = record.engine as Engine;
  if (!arrangementsFor(engine).includes(record.group as ArrangementId)) {
    violations.push(`group ${String(record.group)} not valid for engine ${engine}`);
  }
  for (const name of ["originalRank", "displayedRank"]) {
    if (name in record && (!isInt(record[name]) || (record[name] as number) < 1)) {
      violations.push(`${name} must be a positive integer`);
    }
  }
  if ("boxColumn" in record && !COLUMNS.has(record.boxColumn as string)) {
    violations.push("boxColumn must be Main or Sidebar");
  }
  if ("candidateCount" in record && (!isInt(record.candidateCount) || (record.candidateCount as number) < 0)) {
    violations.push("candidateCount must be a non-negative integer");
  }
  if (violations.length > 0) return violations;

  const isGeneric = record.elementKind === "GenericResult";
  for (const name of ["originalRank", "displayedRank"]) {
    if (isGeneric) {
      if (!(name in record)) {
        violations.push(`${name} required for a generic-result click`);
      } else if ((record[name] as number) > (record.numResults as number)) {
        violations.push(`${name} exceeds numResults`);
      }
    } else if (name in record) {
      violations.push(`${name} not allowed for ${String(record.elementKind)} clicks`);
    }
  }
  return violations;
}
