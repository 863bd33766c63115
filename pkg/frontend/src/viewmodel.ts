import type { RevisionEntry } from "./types.js";
import { MAJOR_CHANGE_THRESHOLD } from "./types.js";

// Pure presentation logic. Rendered metric values are the exact service
// response fields (String() of the number, no rounding); formatted
// percentages are auxiliary display only.

export interface MetricView {
  acceptanceProb: string;
  acceptancePct: string;
  qualityScore: string;
  valuePercentile: string;
  modelVintage: string;
  distanceFromPrevious: string | null;
}

export function renderMetrics(entry: RevisionEntry): MetricView {
  return {
    acceptanceProb: String(entry.acceptance_prob),
    acceptancePct: formatPct(entry.acceptance_prob),
    qualityScore: String(entry.quality_score),
    valuePercentile: String(entry.value_percentile),
    modelVintage: String(entry.model_vintage),
    distanceFromPrevious:
      entry.distance_from_previous === null ? null : String(entry.distance_from_previous),
  };
}

export function formatPct(x: number): string {
  return `${(100 * x).toFixed(1)}%`;
}

export function thresholdSatisfied(acceptanceProb: number, threshold: number): boolean {
  return acceptanceProb >= threshold;
}

export function isMajorChange(cosineDistance: number): boolean {
  return cosineDistance >= MAJOR_CHANGE_THRESHOLD;
}

export interface DeltaView {
  value: number;
  label: string;
  direction: "up" | "down" | "flat";
}

export function acceptanceDelta(current: RevisionEntry, previous: RevisionEntry): DeltaView {
  const value = current.acceptance_prob - previous.acceptance_prob;
  const direction = value > 0 ? "up" : value < 0 ? "down" : "flat";
  const sign = value > 0 ? "+" : "";
  return { value, label: `${sign}${formatPct(value)}`, direction };
}

export interface CompareView {
  cosineDistance: string;
  majorChange: boolean;
  probabilityDelta: DeltaView;
}

export function renderComparison(
  a: RevisionEntry,
  b: RevisionEntry,
  cosineDistance: number,
): CompareView {
  return {
    cosineDistance: String(cosineDistance),
    majorChange: isMajorChange(cosineDistance),
    probabilityDelta: acceptanceDelta(b, a),
  };
}

export function canCompare(i: number, j: number, historyLength: number): boolean {
  return (
    Number.isInteger(i) && Number.isInteger(j) &&
    i >= 0 && j >= 0 && i < historyLength && j < historyLength
  );
}
