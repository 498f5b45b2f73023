import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { classifyPage } from "../src/classify.js";
import type { ClassifiedPage } from "../src/classify.js";
import type { Engine, Snapshot } from "../src/model.js";
import { DEFAULT_SELECTORS } from "../src/selectors.js";

export const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function readFixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf-8");
}

export function readJson<T>(name: string): T {
  return JSON.parse(readFixture(name)) as T;
}

export const FIXTURE_ENGINES: Record<string, Engine> = {
  g01: "google",
  g02: "google",
  g03: "google",
  b01: "bing",
};

/** Load a recorded page into the test DOM and classify it. */
export function loadAndClassify(name: string): ClassifiedPage {
  document.documentElement.innerHTML = readFixture(`${name}.html`);
  const engine = FIXTURE_ENGINES[name];
  if (!engine) throw new Error(`unknown fixture ${name}`);
  const classified = classifyPage(document, engine, DEFAULT_SELECTORS);
  if (!classified) throw new Error(`fixture ${name} should classify`);
  return classified;
}

export function groundTruth(name: string): Snapshot {
  return readJson<Snapshot>(`${name}.snapshot.json`);
}

export interface OracleEntry {
  applied: boolean;
  main: string[];
  sidebar: string[];
  displayedRanks: Record<string, number>;
}

export function oracle(): Record<string, Record<string, OracleEntry>> {
  return readJson("arrangement-oracle.json");
}
