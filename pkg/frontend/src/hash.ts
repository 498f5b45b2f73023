/**
 * Treatment assignment, bit-for-bit compatible with the analysis backend.
 *
 * The contract: FNV-1a 64 over the UTF-8 bytes of
 * "userId|normalizedQuery|salt", scrambled with the splitmix64 finalizer,
 * scaled to [0, 1) and bucketed by cumulative weights in configuration
 * order. Every step must match the backend exactly so analyses can
 * recompute any client's assignment.
 */

import type { ArrangementId, Engine } from "./model.js";
import { arrangementsFor } from "./model.js";

const FNV_OFFSET_BASIS = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK64 = (1n << 64n) - 1n;

export function fnv1a64(data: Uint8Array): bigint {
  let h = FNV_OFFSET_BASIS;
  for (const byte of data) {
    h = ((h ^ BigInt(byte)) * FNV_PRIME) & MASK64;
  }
  return h;
}

/** splitmix64 finalizer: full-avalanche scrambling before bucketing. */
export function mix64(value: bigint): bigint {
  let z = value & MASK64;
  z ^= z >> 30n;
  z = (z * 0xbf58476d1ce4e5b9n) & MASK64;
  z ^= z >> 27n;
  z = (z * 0x94d049bb133111ebn) & MASK64;
  z ^= z >> 31n;
  return z;
}

/** Lowercase, trim, and collapse internal whitespace runs to one space. */
export function normalizeQuery(raw: string): string {
  return raw.toLowerCase().trim().replace(/\s+/g, " ");
}

export interface AssignmentKey {
  userId: string;
  normalizedQuery: string;
  salt: string;
}

export function makeKey(userId: string, rawQuery: string, salt: string): AssignmentKey {
  return { userId, normalizedQuery: normalizeQuery(rawQuery), salt };
}

export function stableHash(key: AssignmentKey): bigint {
  const payload = `${key.userId}|${key.normalizedQuery}|${key.salt}`;
  return fnv1a64(new TextEncoder().encode(payload));
}

export type WeightTable = ReadonlyArray<readonly [ArrangementId, number]>;

export function uniformWeights(engine: Engine): WeightTable {
  const groups = arrangementsFor(engine);
  return groups.map((group) => [group, 1 / groups.length] as const);
}

/**
 * Deterministic group assignment. Number(bigint) and the power-of-two
 * division both round the same way as the backend's integer-to-double
 * conversion, so buckets agree across languages.
 */
export function assign(key: AssignmentKey, engine: Engine, weights?: WeightTable): ArrangementId {
  const table = weights ?? uniformWeights(engine);
  if (table.length === 0) throw new Error(`no weights for engine ${engine}`);
  const allowed = new Set(arrangementsFor(engine));
  let total = 0;
  for (const [group, weight] of table) {
    if (!allowed.has(group)) throw new Error(`group ${group} not allowed on ${engine}`);
    if (weight < 0) throw new Error(`negative weight for ${group}`);
    total += weight;
  }
  if (Math.abs(total - 1) > 1e-9) throw new Error(`weights sum to ${total}, expected 1`);

  const u = Number(mix64(stableHash(key))) / 2 ** 64;
  let cumulative = 0;
  for (const [group, weight] of table) {
    cumulative += weight;
    if (u < cumulative) return group;
  }
  return table[table.length - 1]![0];
}
