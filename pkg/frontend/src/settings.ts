/**
 * Extension settings: service URL, experiment salt, and the anonymous
 * user id generated once at install time. Storage is abstracted so the
 * same code runs against chrome.storage in the extension and an
 * in-memory map in tests.
 */

export interface KeyValueStorage {
  get(key: string): Promise<string | undefined>;
  set(key: string, value: string): Promise<void>;
}

export interface Settings {
  serviceUrl: string;
  salt: string;
  userId: string;
}

const USER_ID_KEY = "sl.userId";
const SERVICE_URL_KEY = "sl.serviceUrl";
const SALT_KEY = "sl.salt";

export function generateUserId(): string {
  const bytes = new Uint8Array(16);
  crypto.getRandomValues(bytes);
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

/** Load settings, creating and persisting the user id on first run. */
export async function loadSettings(
  storage: KeyValueStorage,
  defaults: { serviceUrl: string; salt: string },
): Promise<Settings> {
  let userId = await storage.get(USER_ID_KEY);
  if (!userId) {
    userId = generateUserId();
    await storage.set(USER_ID_KEY, userId);
  }
  const serviceUrl = (await storage.get(SERVICE_URL_KEY)) ?? defaults.serviceUrl;
  const salt = (await storage.get(SALT_KEY)) ?? defaults.salt;
  return { serviceUrl, salt, userId };
}

export class MemoryStorage implements KeyValueStorage {
  private values = new Map<string, string>();

  async get(key: string): Promise<string | undefined> {
    return this.values.get(key);
  }

  async set(key: string, value: string): Promise<void> {
    this.values.set(key, value);
  }
}
