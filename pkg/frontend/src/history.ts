import type { RevisionEntry, ScoreResponse } from "./types.js";

const EXPORT_FORMAT = 1;

// Append-only revision history for one drafting session. Entries copy the
// service response fields verbatim; export/import is canonical JSON so a
// round trip reproduces the file byte for byte.
export class RevisionHistory {
  private entries: RevisionEntry[] = [];

  get length(): number {
    return this.entries.length;
  }

  all(): readonly RevisionEntry[] {
    return this.entries;
  }

  at(index: number): RevisionEntry | undefined {
    return this.entries[index];
  }

  last(): RevisionEntry | undefined {
    return this.entries[this.entries.length - 1];
  }

  append(
    draft: { title: string; abstract: string },
    score: ScoreResponse,
    distanceFromPrevious: number | null,
    timestamp?: string,
  ): RevisionEntry {
    const entry: RevisionEntry = {
      version: this.entries.length,
      title: draft.title,
      abstract: draft.abstract,
      acceptance_prob: score.acceptance_prob,
      quality_score: score.quality_score,
      value_percentile: score.value_percentile,
      model_vintage: score.model_vintage,
      distance_from_previous: distanceFromPrevious,
      timestamp: timestamp ?? new Date().toISOString(),
    };
    this.entries.push(entry);
    return entry;
  }

  // Canonical serialization: fixed key order, two-space indent, trailing
  // newline. Import followed by export is byte-identical.
  exportJson(): string {
    const payload = {
      format: EXPORT_FORMAT,
      entries: this.entries.map((e) => ({
        version: e.version,
        title: e.title,
        abstract: e.abstract,
        acceptance_prob: e.acceptance_prob,
        quality_score: e.quality_score,
        value_percentile: e.value_percentile,
        model_vintage: e.model_vintage,
        distance_from_previous: e.distance_from_previous,
        timestamp: e.timestamp,
      })),
    };
    return JSON.stringify(payload, null, 2) + "\n";
  }

  static importJson(text: string): RevisionHistory {
    const payload = JSON.parse(text) as { format?: number; entries?: unknown[] };
    if (payload.format !== EXPORT_FORMAT || !Array.isArray(payload.entries)) {
      throw new Error("unrecognized history export format");
    }
    const history = new RevisionHistory();
    payload.entries.forEach((raw, i) => {
      const e = raw as RevisionEntry;
      if (e.version !== i) {
        throw new Error(`history entries out of order at index ${i}`);
      }
      history.entries.push({
        version: e.version,
        title: e.title,
        abstract: e.abstract,
        acceptance_prob: e.acceptance_prob,
        quality_score: e.quality_score,
        value_percentile: e.value_percentile,
        model_vintage: e.model_vintage,
        distance_from_previous: e.distance_from_previous,
        timestamp: e.timestamp,
      });
    });
    return history;
  }
}
