"""Acceptance-probability valuation rescaling.

The grant-day market reaction prices only the resolution of rejection
risk, so total patent value is reaction * 1/(1-p). The engine replaces the
constant-p factor with the model's per-patent probability and reports the
deviation against the constant-factor baselines (0.55 and the sample
acceptance rate 0.724).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stats import winsorize

KPSS_BASELINE_P = 0.55
ADJUSTED_BASELINE_P = 0.724
P_CLAMP = (0.001, 0.99)


class ValuationError(Exception):
    pass


def scaling_factor(p: float) -> float:
    """1/(1-p): the multiplier turning the reaction into total value."""
    if p >= 1.0:
        raise ValuationError(f"acceptance probability {p} >= 1")
    return 1.0 / (1.0 - p)


@dataclass(frozen=True)
class ValuationRecord:
    app_id: str
    p_hat: float
    p_used: float  # after clamping to P_CLAMP
    clamped: bool
    raw_reaction_musd: float
    scale_factor: float  # AI factor, winsorized when a pct is given
    scale_ratio: float  # AI factor / constant KPSS factor
    scale_ratio_adj: float
    ai_value_musd: float
    kpss_value_musd: float
    adj_kpss_value_musd: float


SUMMARY_ROWS = (
    "AI Scale/KPSS",
    "AI Scale/Adj. KPSS",
    "AI Value",
    "KPSS Value",
    "Adj. KPSS Value",
    "AI Value - KPSS",
    "AI Value - Adj. KPSS",
)

SUMMARY_COLUMNS = ("Mean", "SD", "10 Pct.", "25 Pct.", "Median", "75 Pct.", "90 Pct.", "N")


def _row_stats(values: np.ndarray) -> dict[str, float]:
    pct = np.percentile(values, [10, 25, 50, 75, 90])
    return {
        "Mean": float(np.mean(values)),
        "SD": float(np.std(values, ddof=1)) if values.size > 1 else 0.0,
        "10 Pct.": float(pct[0]),
        "25 Pct.": float(pct[1]),
        "Median": float(pct[2]),
        "75 Pct.": float(pct[3]),
        "90 Pct.": float(pct[4]),
        "N": float(values.size),
    }


@dataclass
class ValuationSummary:
    rows: dict[str, dict[str, float]]
    n_clamped: int
    empty: bool = False


def revalue(records, baseline_p: float = KPSS_BASELINE_P,
            adjusted_p: float = ADJUSTED_BASELINE_P,
            winsor_pct: float | None = 0.01) -> tuple[list[ValuationRecord], ValuationSummary]:
    """Per-record AI valuations plus Table-8-shaped deviation summary.

    `records` is an iterable of (app_id, p_hat, raw_reaction_musd). p_hat is
    clamped to P_CLAMP before the factor (reported per record); the AI
    scale factor and the AI valuation are winsorized at winsor_pct, pooled
    over the whole sample (pass None to skip, e.g. for identity checks).
    Constant-factor baselines are left unwinsorized.
    """
    entries = [(str(a), float(p), float(v)) for a, p, v in records]
    if not entries:
        return [], ValuationSummary(rows={}, n_clamped=0, empty=True)
    for app_id, p, v in entries:
        if v < 0:
            raise ValuationError(f"{app_id}: negative raw reaction {v}")

    p_hat = np.array([p for _, p, _ in entries])
    raw = np.array([v for _, _, v in entries])
    p_used = np.clip(p_hat, P_CLAMP[0], P_CLAMP[1])
    clamped = p_used != p_hat

    f_kpss = scaling_factor(baseline_p)
    f_adj = scaling_factor(adjusted_p)
    f_ai = 1.0 / (1.0 - p_used)
    if winsor_pct is not None:
        f_ai = winsorize(f_ai, winsor_pct)
    ai_value = raw * f_ai
    kpss_value = raw * f_kpss
    adj_value = raw * f_adj
    if winsor_pct is not None:
        # all valuation columns get the same tail treatment so the
        # deviation rows compare like with like
        ai_value = winsorize(ai_value, winsor_pct)
        kpss_value = winsorize(kpss_value, winsor_pct)
        adj_value = winsorize(adj_value, winsor_pct)
    ratio = f_ai / f_kpss
    ratio_adj = f_ai / f_adj

    out = [
        ValuationRecord(
            app_id=entries[i][0], p_hat=float(p_hat[i]), p_used=float(p_used[i]),
            clamped=bool(clamped[i]), raw_reaction_musd=float(raw[i]),
            scale_factor=float(f_ai[i]), scale_ratio=float(ratio[i]),
            scale_ratio_adj=float(ratio_adj[i]), ai_value_musd=float(ai_value[i]),
            kpss_value_musd=float(kpss_value[i]), adj_kpss_value_musd=float(adj_value[i]),
        )
        for i in range(len(entries))
    ]
    rows = {
        "AI Scale/KPSS": _row_stats(ratio),
        "AI Scale/Adj. KPSS": _row_stats(ratio_adj),
        "AI Value": _row_stats(ai_value),
        "KPSS Value": _row_stats(kpss_value),
        "Adj. KPSS Value": _row_stats(adj_value),
        "AI Value - KPSS": _row_stats(ai_value - kpss_value),
        "AI Value - Adj. KPSS": _row_stats(ai_value - adj_value),
    }
    return out, ValuationSummary(rows=rows, n_clamped=int(np.sum(clamped)))


def raw_reaction_from_kpss(kpss_value_musd: float, baseline_p: float = KPSS_BASELINE_P) -> float:
    """Invert the constant factor when only final KPSS values are supplied."""
    return kpss_value_musd * (1.0 - baseline_p)
