/**
 * Versioned selector configuration: how to find page containers and
 * classify result-page elements per engine. Shipped as a JSON asset so
 * selector drift is a data update, not a code change. Correctness is
 * defined against the recorded fixture pages in test/fixtures.
 */

import type { ElementKind, Engine } from "./model.js";

export interface EngineSelectors {
  /** Container of the main results column; missing node = unclassifiable. */
  main: string;
  /** Container of the right-hand side panel, if the engine has one. */
  sidebar?: string;
  /** Node whose text carries the "About N results" string. */
  resultsStats?: string;
  /** Per element kind, selector patterns matched against candidate nodes. */
  kinds: Partial<Record<ElementKind, string[]>>;
}

export interface SelectorConfig {
  version: string;
  engines: Partial<Record<Engine, EngineSelectors>>;
}

export const DEFAULT_SELECTORS: SelectorConfig = {
  version: "fixtures-1",
  engines: {
    google: {
      main: "#center_col",
      sidebar: "#rhs",
      resultsStats: "#result-stats",
      kinds: {
        GenericResult: ["div.g"],
        Ad: ["div[data-text-ad]", "div.ad-unit"],
        ShoppingBox: ["div.shopping-box", "div[data-shopping-unit]"],
        SpecializedResult: ["div.ulike", "div.special-block"],
      },
    },
    bing: {
      main: "#b_results",
      sidebar: "#b_context",
      resultsStats: ".sb_count",
      kinds: {
        GenericResult: ["li.b_algo"],
        Ad: ["li.b_ad"],
        ShoppingBox: ["li.b_shopping"],
        SpecializedResult: ["li.b_ans"],
      },
    },
  },
};

export function selectorsFor(config: SelectorConfig, engine: Engine): EngineSelectors | null {
  const entry = config.engines[engine];
  if (!entry || !entry.main) return null;
  for (const patterns of Object.values(entry.kinds)) {
    if (!patterns || patterns.length === 0) return null;
  }
  return entry;
}
