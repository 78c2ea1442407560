/** Options page: service URL, enable toggle, plus a live readout of the
 * service's backend, threshold, and prompt stage from /v1/health. */
import { ServiceClient } from "./client";
import { DEFAULT_SETTINGS, loadSettings, normalizeOrigin, saveSettings } from "./settings";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`options page is missing #${id}`);
  return node as T;
}

export async function initOptionsPage(): Promise<void> {
  const originInput = el<HTMLInputElement>("service-origin");
  const enabledInput = el<HTMLInputElement>("enabled");
  const statusLine = el<HTMLElement>("status");
  const readout = el<HTMLElement>("service-readout");
  const saveButton = el<HTMLButtonElement>("save");

  const settings = await loadSettings();
  originInput.value = settings.serviceOrigin;
  enabledInput.checked = settings.enabled;

  async function refreshReadout(origin: string): Promise<void> {
    try {
      const health = await new ServiceClient(origin).health();
      const stage = health.prompt_stage ?? "?";
      const threshold = health.threshold !== undefined ? health.threshold.toFixed(2) : "?";
      readout.textContent =
        `service ok — backend: ${health.backend}, model: ${health.model_id}, ` +
        `threshold: ${threshold}, prompt stage: ${stage}`;
    } catch {
      readout.textContent = "service unreachable at this origin";
    }
  }

  saveButton.addEventListener("click", () => {
    void (async () => {
      let origin: string;
      try {
        origin = normalizeOrigin(originInput.value || DEFAULT_SETTINGS.serviceOrigin);
      } catch (error) {
        statusLine.textContent = String(error);
        return;
      }
      await saveSettings({
        serviceOrigin: origin,
        enabled: enabledInput.checked,
        debounceMs: settings.debounceMs,
      });
      statusLine.textContent = "saved";
      await refreshReadout(origin);
    })();
  });

  await refreshReadout(settings.serviceOrigin);
}

if (typeof document !== "undefined" && document.getElementById("save")) {
  void initOptionsPage();
}
