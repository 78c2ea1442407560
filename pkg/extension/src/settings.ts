/** Extension options, persisted in extension storage when available.
 *
 * Falls back to an in-memory store outside a browser (unit tests). The
 * service origin is the ONLY network destination the extension ever
 * talks to.
 */

export interface Settings {
  serviceOrigin: string;
  enabled: boolean;
  debounceMs: number;
}

export const DEFAULT_SETTINGS: Settings = {
  serviceOrigin: "http://127.0.0.1:8765",
  enabled: true,
  debounceMs: 500,
};

type ChromeishStorage = {
  get(defaults: Record<string, unknown>, cb: (items: Record<string, unknown>) => void): void;
  set(items: Record<string, unknown>, cb?: () => void): void;
};

function storageArea(): ChromeishStorage | null {
  const globalChrome = (globalThis as { chrome?: { storage?: { sync?: unknown; local?: unknown } } }).chrome;
  const area = globalChrome?.storage?.sync ?? globalChrome?.storage?.local;
  return (area as ChromeishStorage | undefined) ?? null;
}

let memoryStore: Settings = { ...DEFAULT_SETTINGS };

export function loadSettings(): Promise<Settings> {
  const area = storageArea();
  if (!area) {
    return Promise.resolve({ ...memoryStore });
  }
  return new Promise((resolve) => {
    area.get({ ...DEFAULT_SETTINGS }, (items) => {
      resolve({ ...DEFAULT_SETTINGS, ...(items as Partial<Settings>) });
    });
  });
}

export function saveSettings(settings: Settings): Promise<void> {
  const area = storageArea();
  if (!area) {
    memoryStore = { ...settings };
    return Promise.resolve();
  }
  return new Promise((resolve) => {
    area.set({ ...settings }, () => resolve());
  });
}

/** Normalize a user-entered origin: strip trailing slashes, require http(s). */
export function normalizeOrigin(raw: string): string {
  const trimmed = raw.trim().replace(/\/+$/, "");
  if (!/^https?:\/\//.test(trimmed)) {
    throw new Error(`service origin must be http(s), got: ${raw}`);
  }
  return trimmed;
}
