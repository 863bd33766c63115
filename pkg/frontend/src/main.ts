import { ScoringClient, ServiceError } from "./api.js";
import { RevisionHistory } from "./history.js";
import { isEmptyDiff, wordDiff } from "./diff.js";
import {
  acceptanceDelta,
  canCompare,
  formatPct,
  renderComparison,
  renderMetrics,
  thresholdSatisfied,
} from "./viewmodel.js";
import { DEFAULT_ACCEPTANCE_THRESHOLD } from "./types.js";

const API_BASE =
  new URLSearchParams(window.location.search).get("api") ?? "http://127.0.0.1:8000";

const client = new ScoringClient(API_BASE);
let history = new RevisionHistory();
let threshold = DEFAULT_ACCEPTANCE_THRESHOLD;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const titleInput = $<HTMLInputElement>("title");
const abstractInput = $<HTMLTextAreaElement>("abstract");
const scoreButton = $<HTMLButtonElement>("score-btn");
const errorBox = $<HTMLDivElement>("error");
const historyList = $<HTMLOListElement>("history");
const thresholdSlider = $<HTMLInputElement>("threshold");
const thresholdLabel = $<HTMLSpanElement>("threshold-label");
const statusBadge = $<HTMLSpanElement>("threshold-status");
const compareA = $<HTMLSelectElement>("compare-a");
const compareB = $<HTMLSelectElement>("compare-b");
const compareButton = $<HTMLButtonElement>("compare-btn");
const compareOut = $<HTMLDivElement>("compare-out");
const exportButton = $<HTMLButtonElement>("export-btn");
const importInput = $<HTMLInputElement>("import-file");

function showError(message: string): void {
  errorBox.textContent = message;
  errorBox.hidden = false;
}

function clearError(): void {
  errorBox.hidden = true;
  errorBox.textContent = "";
}

function refreshThresholdBadge(): void {
  const last = history.last();
  if (!last) {
    statusBadge.textContent = "no score yet";
    statusBadge.className = "badge";
    return;
  }
  const ok = thresholdSatisfied(last.acceptance_prob, threshold);
  statusBadge.textContent = ok
    ? `satisfied at ${formatPct(threshold)}`
    : `below ${formatPct(threshold)}`;
  statusBadge.className = ok ? "badge badge-ok" : "badge badge-warn";
}

function refreshHistory(): void {
  historyList.replaceChildren();
  const entries = history.all();
  for (const entry of entries) {
    const view = renderMetrics(entry);
    const li = document.createElement("li");
    const head = document.createElement("div");
    head.className = "entry-head";
    head.textContent = `v${entry.version}  acceptance ${view.acceptancePct}  (vintage ${view.modelVintage})`;
    const detail = document.createElement("div");
    detail.className = "entry-detail";
    detail.textContent =
      `p=${view.acceptanceProb}  quality=${view.qualityScore}` +
      `  value pctile=${view.valuePercentile}` +
      (view.distanceFromPrevious === null ? "" : `  Δprev=${view.distanceFromPrevious}`);
    li.append(head, detail);
    if (entry.version > 0) {
      const prev = entries[entry.version - 1]!;
      const delta = acceptanceDelta(entry, prev);
      const badge = document.createElement("span");
      badge.className = `badge badge-${delta.direction}`;
      badge.textContent = delta.label;
      head.appendChild(badge);
    }
    historyList.appendChild(li);
  }
  const options = entries.map((e) => {
    const opt = document.createElement("option");
    opt.value = String(e.version);
    opt.textContent = `v${e.version}`;
    return opt;
  });
  compareA.replaceChildren(...options.map((o) => o.cloneNode(true) as HTMLOptionElement));
  compareB.replaceChildren(...options);
  compareButton.disabled = entries.length < 1;
  refreshThresholdBadge();
}

async function scoreCurrent(): Promise<void> {
  clearError();
  const draft = { title: titleInput.value, abstract: abstractInput.value };
  if (!draft.title.trim() && !draft.abstract.trim()) {
    showError("enter a title or abstract first");
    return;
  }
  scoreButton.disabled = true;
  try {
    const score = await client.score(draft);
    const prev = history.last();
    let distance: number | null = null;
    if (prev) {
      const cmp = await client.compare({ title: prev.title, abstract: prev.abstract }, draft);
      distance = cmp.cosine_distance;
    }
    history.append(draft, score, distance);
    refreshHistory();
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") return; // replaced
    showError(err instanceof ServiceError ? err.message : String(err));
  } finally {
    scoreButton.disabled = false;
  }
}

async function compareVersions(): Promise<void> {
  clearError();
  const i = Number(compareA.value);
  const j = Number(compareB.value);
  if (!canCompare(i, j, history.length)) return;
  const a = history.at(i)!;
  const b = history.at(j)!;
  try {
    const cmp = await client.compare(
      { title: a.title, abstract: a.abstract },
      { title: b.title, abstract: b.abstract },
    );
    const view = renderComparison(a, b, cmp.cosine_distance);
    compareOut.replaceChildren();
    const summary = document.createElement("div");
    summary.textContent =
      `cosine distance ${view.cosineDistance}  Δacceptance ${view.probabilityDelta.label}`;
    if (view.majorChange) {
      const badge = document.createElement("span");
      badge.className = "badge badge-major";
      badge.textContent = "major change";
      summary.appendChild(badge);
    }
    const diffBox = document.createElement("p");
    diffBox.className = "diff";
    const spans = wordDiff(`${a.title} ${a.abstract}`, `${b.title} ${b.abstract}`);
    if (isEmptyDiff(spans) && i === j) {
      diffBox.textContent = "(identical versions)";
    } else {
      for (const span of spans) {
        const el = document.createElement("span");
        el.className = `diff-${span.op}`;
        el.textContent = span.text + " ";
        diffBox.appendChild(el);
      }
    }
    compareOut.append(summary, diffBox);
  } catch (err) {
    showError(err instanceof ServiceError ? err.message : String(err));
  }
}

function exportHistory(): void {
  const blob = new Blob([history.exportJson()], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = "revision-history.json";
  a.click();
  URL.revokeObjectURL(url);
}

async function importHistory(file: File): Promise<void> {
  clearError();
  try {
    history = RevisionHistory.importJson(await file.text());
    refreshHistory();
  } catch (err) {
    showError(`import failed: ${String(err)}`);
  }
}

scoreButton.addEventListener("click", () => void scoreCurrent());
compareButton.addEventListener("click", () => void compareVersions());
exportButton.addEventListener("click", exportHistory);
importInput.addEventListener("change", () => {
  const file = importInput.files?.[0];
  if (file) void importHistory(file);
});
thresholdSlider.addEventListener("input", () => {
  threshold = Number(thresholdSlider.value);
  thresholdLabel.textContent = formatPct(threshold);
  refreshThresholdBadge();
});

thresholdSlider.value = String(threshold);
thresholdLabel.textContent = formatPct(threshold);
refreshHistory();

void client
  .health()
  .then((h) => {
    $<HTMLSpanElement>("service-status").textContent =
      `service ok, vintages ${h.vintages.join(", ")}`;
  })
  .catch((err: unknown) => {
    showError(err instanceof ServiceError ? err.message : String(err));
    $<HTMLSpanElement>("service-status").textContent = "service unreachable";
  });
