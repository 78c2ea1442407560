/** Thin client for the local moderation service.
 *
 * Every request URL is derived from the configured origin and nothing
 * else; draft text never travels anywhere except that origin.
 */
import type { AnalyzeVerdict, HealthInfo } from "./types";

export class ServiceUnreachable extends Error {
  constructor(detail: string) {
    super(`moderation service unreachable: ${detail}`);
    this.name = "ServiceUnreachable";
  }
}

export class ServiceClient {
  readonly origin: string;
  private readonly fetchFn: typeof fetch;

  constructor(origin: string, fetchFn?: typeof fetch) {
    this.origin = origin.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((...args) => fetch(...args));
  }

  async analyze(text: string, id: string): Promise<AnalyzeVerdict> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.origin}/v1/analyze`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ text, id }),
      });
    } catch (error) {
      throw new ServiceUnreachable(String(error));
    }
    if (!response.ok) {
      throw new ServiceUnreachable(`HTTP ${response.status}`);
    }
    return (await response.json()) as AnalyzeVerdict;
  }

  async health(): Promise<HealthInfo> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.origin}/v1/health`);
    } catch (error) {
      throw new ServiceUnreachable(String(error));
    }
    if (!response.ok) {
      throw new ServiceUnreachable(`HTTP ${response.status}`);
    }
    return (await response.json()) as HealthInfo;
  }
}
