/** JSON shapes returned by the local moderation service (/v1/*). */

export interface ClassificationJson {
  labels: string[];
  rationale: string;
  raw_response?: string;
  retries_used?: number;
}

export interface DetoxJson {
  detoxified: string;
  rationale: string;
  raw_response?: string;
  retries_used?: number;
}

export interface DegradedJson {
  coach: boolean;
  reframer: boolean;
  reasons: string[];
}

export interface AnalyzeVerdict {
  id: string;
  score: number;
  label: "toxic" | "non_toxic";
  classification: ClassificationJson | null;
  detox: DetoxJson | null;
  timings_ms: Record<string, number>;
  degraded: DegradedJson;
}

export interface HealthInfo {
  status: string;
  backend: string;
  model_id: string;
  threshold?: number;
  prompt_stage?: string;
}

/** Per-textarea UI state. */
export type UiState = "idle" | "scanning" | "clean" | "flagged" | "offline";
