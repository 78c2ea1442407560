/** Shared test doubles: a scriptable mock service behind fetch. */
import type { AnalyzeVerdict } from "../src/types";

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export function verdictFor(text: string): AnalyzeVerdict {
  const toxic = text.includes("damn");
  return {
    id: "v1",
    score: toxic ? 0.9 : 0.0,
    label: toxic ? "toxic" : "non_toxic",
    classification: toxic
      ? { labels: ["Profanity"], rationale: `swears in: ${text}` }
      : null,
    detox: toxic
      ? { detoxified: `neutral version of [${text}]`, rationale: "removed swearing" }
      : null,
    timings_ms: { filter: 0.1, downstream: 1.0, total: 1.1 },
    degraded: { coach: false, reframer: false, reasons: [] },
  };
}

export interface MockService {
  fetchFn: typeof fetch;
  requests: RecordedRequest[];
  /** override the verdict factory per-test */
  respond: (text: string) => AnalyzeVerdict;
  failNext: { count: number };
}

function jsonResponse(body: unknown): Response {
  return {
    ok: true,
    status: 200,
    json: async () => body,
  } as unknown as Response;
}

export function mockService(): MockService {
  const service: MockService = {
    requests: [],
    respond: verdictFor,
    failNext: { count: 0 },
    fetchFn: (async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      const body = init?.body ? JSON.parse(String(init.body)) : null;
      service.requests.push({ url, method: init?.method ?? "GET", body });
      if (service.failNext.count > 0) {
        service.failNext.count -= 1;
        throw new TypeError("network down");
      }
      if (url.endsWith("/v1/analyze")) {
        return jsonResponse(service.respond((body as { text: string }).text));
      }
      if (url.endsWith("/v1/health")) {
        return jsonResponse({
          status: "ok",
          backend: "lexicon",
          model_id: "lexicon-surrogate",
          threshold: 0.5,
          prompt_stage: "S4",
        });
      }
      return { ok: false, status: 404, json: async () => ({}) } as unknown as Response;
    }) as typeof fetch,
  };
  return service;
}

export function makeTextarea(doc: Document = document): HTMLTextAreaElement {
  const textarea = doc.createElement("textarea");
  doc.body.appendChild(textarea);
  return textarea;
}

export function typeText(textarea: HTMLTextAreaElement, chunk: string): void {
  textarea.value += chunk;
  textarea.dispatchEvent(new Event("input", { bubbles: true }));
}

export async function flushMicrotasks(rounds = 10): Promise<void> {
  for (let i = 0; i < rounds; i++) {
    await Promise.resolve();
  }
}
