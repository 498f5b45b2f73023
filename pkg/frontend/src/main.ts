/**
 * Content-script entry point (manifest `content_scripts`, run_at
 * document_start). Hides the page before anything renders, then runs
 * the experiment once the DOM is ready.
 */

import { hidePage, revealPage, runExperiment } from "./content.js";
import type { KeyValueStorage } from "./settings.js";
import { loadSettings } from "./settings.js";

const DEFAULTS = {
  serviceUrl: "http://127.0.0.1:8787",
  salt: "epoch-1",
};

class ChromeStorage implements KeyValueStorage {
  async get(key: string): Promise<string | undefined> {
    const record = await chrome.storage.local.get(key);
    const value = record[key];
    return typeof value === "string" ? value : undefined;
  }

  async set(key: string, value: string): Promise<void> {
    await chrome.storage.local.set({ [key]: value });
  }
}

async function start(): Promise<void> {
  hidePage(document);
  try {
    const settings = await loadSettings(new ChromeStorage(), DEFAULTS);
    const run = () => runExperiment(document, location.href, { settings });
    if (document.readyState === "loading") {
      document.addEventListener("DOMContentLoaded", run, { once: true });
    } else {
      run();
    }
  } catch {
    // Whatever went wrong, never leave the page hidden.
    revealPage(document);
  }
}

if (typeof chrome !== "undefined" && chrome.storage) {
  void start();
}
