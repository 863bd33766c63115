// Wire types mirror the scoring service responses exactly; the workbench
// never recomputes model outputs on the client.

export interface ScoreResponse {
  acceptance_prob: number;
  quality_score: number;
  value_transformed: number;
  value_percentile: number;
  model_vintage: number;
  embedding_cache_hit: boolean;
  assumed_defaults: Record<string, number>;
}

export interface CompareResponse {
  cosine_distance: number;
}

export interface HealthResponse {
  status: string;
  vintages: number[];
}

export interface DraftText {
  title: string;
  abstract: string;
}

// One scored snapshot of the draft. Metric fields are verbatim copies of
// the service response; distance_from_previous comes from /compare.
export interface RevisionEntry {
  version: number;
  title: string;
  abstract: string;
  acceptance_prob: number;
  quality_score: number;
  value_percentile: number;
  model_vintage: number;
  distance_from_previous: number | null;
  timestamp: string;
}

export const MAJOR_CHANGE_THRESHOLD = 0.05;
export const DEFAULT_ACCEPTANCE_THRESHOLD = 0.5;
