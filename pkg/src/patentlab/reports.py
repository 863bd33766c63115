"""Deterministic aligned-column report rendering.

Layouts mirror the evaluation tables: yearly classification stats, model
comparisons, best/worst buckets, yearly value stats, screening improvement
panels, valuation deviations, and portfolio alphas. All numbers are
formatted with fixed precision so regenerated reports are byte-identical.
"""

from __future__ import annotations

import numpy as np

from .pipeline import BucketReport, RollingResult
from .portfolio import FactorAlpha
from .screening import IMPROVEMENT_COLUMNS, IMPROVEMENT_ROWS, ImprovementPanel
from .valuation import SUMMARY_COLUMNS, SUMMARY_ROWS, ValuationSummary


def render_table(headers: list[str], rows: list[list[str]], min_width: int = 6) -> str:
    widths = [max(min_width, len(h), *(len(r[i]) for r in rows)) if rows else max(min_width, len(h))
              for i, h in enumerate(headers)]
    lines = []
    lines.append("  ".join(h.ljust(w) if i == 0 else h.rjust(w)
                           for i, (h, w) in enumerate(zip(headers, widths))))
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(c.ljust(w) if i == 0 else c.rjust(w)
                               for i, (c, w) in enumerate(zip(row, widths))))
    return "\n".join(lines) + "\n"


def pct(x: float) -> str:
    return "nan" if not np.isfinite(x) else f"{100.0 * x:.1f}%"


def num(x: float, digits: int = 2) -> str:
    return "nan" if not np.isfinite(x) else f"{x:.{digits}f}"


CLASSIFICATION_COLUMNS = ("AUC", "F1 Score", "Accuracy", "Precision", "Recall")
REGRESSION_COLUMNS = ("MSE", "R^2", "Adj. R^2")


def _classification_cells(row: dict) -> list[str]:
    return [pct(row["auc"]), pct(row["f1"]), pct(row["accuracy"]),
            pct(row["precision"]), pct(row["recall"])]


def _regression_cells(row: dict) -> list[str]:
    return [num(row["mse"]), pct(row["r2"]), pct(row["adj_r2"])]


def _manifest_rows(payload: dict) -> list[dict]:
    rows = []
    for year in sorted(payload["years"], key=int):
        rows.append({"year": int(year), **payload["years"][year]["metrics"]})
    return rows


def yearly_table_from_manifest(payload: dict) -> str:
    """Table 1 / Table 5 shape: one row per test year plus Mean/Median."""
    classification = payload["config"]["task"] == "acceptance"
    headers = ["Year", *(CLASSIFICATION_COLUMNS if classification else REGRESSION_COLUMNS)]
    cells = _classification_cells if classification else _regression_cells
    rows = [[str(r["year"]), *cells(r)] for r in _manifest_rows(payload)]
    summary = payload["summary"]
    for label in ("mean", "median"):
        if summary:
            rows.append([label.capitalize(), *cells(summary[label])])
    return render_table(headers, rows)


def yearly_table(result: RollingResult) -> str:
    from .pipeline import manifest_payload

    return yearly_table_from_manifest(manifest_payload(result))


def comparison_table_from_manifests(payloads: dict[str, dict]) -> str:
    """Table 2 / Table 6 shape: Mean and Median rows per model."""
    first = next(iter(payloads.values()))
    classification = first["config"]["task"] == "acceptance"
    headers = ["Model", "Row", *(CLASSIFICATION_COLUMNS if classification else REGRESSION_COLUMNS)]
    cells = _classification_cells if classification else _regression_cells
    rows = []
    for label, payload in payloads.items():
        summary = payload["summary"]
        for stat in ("mean", "median"):
            rows.append([label, stat.capitalize(), *cells(summary[stat])])
    return render_table(headers, rows)


def comparison_table(results: dict[str, RollingResult]) -> str:
    from .pipeline import manifest_payload

    return comparison_table_from_manifests(
        {label: manifest_payload(r) for label, r in results.items()})


def bucket_table(full: list[BucketReport], benchmark: list[BucketReport] | None = None) -> str:
    """Table 3 shape: top/bottom realized acceptance by yearly cutoff."""
    headers = ["Yearly Cutoff", "Best Full", "Worst Full"]
    if benchmark is not None:
        headers += ["Best No-Embedding", "Worst No-Embedding", "Best Diff", "Worst Diff"]
    rows = []
    bench_by_cutoff = {b.cutoff: b for b in benchmark} if benchmark else {}
    for rep in full:
        row = [str(rep.cutoff), pct(rep.top_acceptance_rate), pct(rep.bottom_acceptance_rate)]
        if benchmark is not None:
            b = bench_by_cutoff.get(rep.cutoff)
            if b is None:
                row += ["nan", "nan", "nan", "nan"]
            else:
                row += [pct(b.top_acceptance_rate), pct(b.bottom_acceptance_rate),
                        pct(rep.top_acceptance_rate - b.top_acceptance_rate),
                        pct(rep.bottom_acceptance_rate - b.bottom_acceptance_rate)]
        rows.append(row)
    return render_table(headers, rows)


def _stars_from_p(p: float) -> str:
    if not np.isfinite(p):
        return ""
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.10:
        return "*"
    return ""


def improvement_table(panel_a: ImprovementPanel, panel_b: ImprovementPanel) -> str:
    """Table 7 shape: two panels (major / observable change) of 8 columns."""
    out = []
    for name, panel in (("Panel A", panel_a), ("Panel B", panel_b)):
        out.append(f"{name}: Cosine distance between patent and application at least "
                   f"{panel.threshold:g}\n")
        if panel.empty:
            out.append("(no qualifying applications)\n")
            continue
        headers = ["", *IMPROVEMENT_COLUMNS]
        rows = []
        for label in IMPROVEMENT_ROWS:
            stats = panel.rows[label]
            cells = [label]
            for col in IMPROVEMENT_COLUMNS:
                if col == "N":
                    cells.append(str(int(stats[col])))
                elif col == "Mean" and label == "Improvement" and not panel.degenerate:
                    cells.append(f"{pct(stats[col])}{_stars_from_p(panel.mean_p)} ({panel.mean_t:.3f})")
                elif col == "Median" and label == "Improvement" and not panel.degenerate:
                    cells.append(f"{pct(stats[col])}{_stars_from_p(panel.median_p)} ({panel.median_z:.3f})")
                else:
                    cells.append(pct(stats[col]))
            rows.append(cells)
        out.append(render_table(headers, rows, min_width=4))
    return "\n".join(out)


def valuation_table(summary: ValuationSummary) -> str:
    """Table 8 shape: deviation statistics of the AI measure vs baselines."""
    if summary.empty:
        return "(no valuation records)\n"
    headers = ["", *SUMMARY_COLUMNS]
    rows = []
    for label in SUMMARY_ROWS:
        stats = summary.rows[label]
        cells = [label]
        for col in SUMMARY_COLUMNS:
            cells.append(str(int(stats[col])) if col == "N" else num(stats[col]))
        rows.append(cells)
    return render_table(headers, rows, min_width=4)


def alpha_table(alphas: dict[str, dict[str, FactorAlpha]]) -> str:
    """Table 9 shape: legs by factor model, with one-tailed stars."""
    models = ("FF3", "FF4", "FF5")
    headers = ["", *(f"{m}-adjusted Return" for m in models)]
    leg_labels = (
        ("short", "Low Application Strength"),
        ("long", "High Application Strength"),
        ("long_short", "Difference (High - Low)"),
    )
    rows = []
    for leg, label in leg_labels:
        cells = [label]
        for m in models:
            a = alphas[m][leg]
            cells.append(f"{100.0 * a.alpha_monthly:.3f}%{a.stars} ({a.t_stat:.2f})")
        rows.append(cells)
    return render_table(headers, rows, min_width=4)
