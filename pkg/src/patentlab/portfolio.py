"""Application-strength long-short portfolio and factor-model alphas.

Each month firms are split at the median of application strength
(mean predicted acceptance probability times sqrt of the month's
application count) and held equal-weighted for the following month. The
long-short spread is regressed raw on the factor returns (self-financing);
single legs are regressed in excess of the risk-free rate. Significance
stars follow the one-tailed t convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .corpus import Corpus, FactorSeries, month_add
from .stats import normal_cdf, ols

FACTOR_MODELS = {
    "FF3": ("mkt_rf", "smb", "hml"),
    "FF4": ("mkt_rf", "smb", "hml", "mom"),
    "FF5": ("mkt_rf", "smb", "hml", "rmw", "cma"),
}

MIN_FIRMS_PER_MONTH = 4
MIN_OVERLAP_MONTHS = 36


class PortfolioError(Exception):
    pass


class CoverageError(PortfolioError):
    pass


def application_strength(probabilities) -> float:
    """Mean predicted acceptance probability times sqrt(application count)."""
    ps = np.asarray(list(probabilities), dtype=np.float64)
    if ps.size == 0:
        raise PortfolioError("no applications in month")
    return float(np.mean(ps)) * math.sqrt(ps.size)


@dataclass(frozen=True)
class FirmMonth:
    firm_id: str
    month: str  # formation month (publication month of the applications)
    n_apps: int
    mean_p: float
    application_strength: float
    next_month_return: float


def build_panel(predictions: dict[str, float], corpus: Corpus) -> tuple[list[FirmMonth], int]:
    """Firm-month rows from per-application predictions.

    Months without applications produce no row; rows lacking a next-month
    return are dropped and counted.
    """
    buckets: dict[tuple[str, str], list[float]] = {}
    records = corpus.by_id()
    for app_id, p in predictions.items():
        rec = records[app_id]
        if not rec.firm_id:
            continue
        buckets.setdefault((rec.firm_id, rec.publication_month), []).append(p)
    panel: list[FirmMonth] = []
    dropped = 0
    for (firm_id, month), ps in sorted(buckets.items()):
        firm = corpus.firms.get(firm_id)
        nxt = month_add(month, 1)
        if firm is None or nxt not in firm.monthly_returns:
            dropped += 1
            continue
        panel.append(FirmMonth(
            firm_id=firm_id, month=month, n_apps=len(ps),
            mean_p=float(np.mean(ps)),
            application_strength=application_strength(ps),
            next_month_return=firm.monthly_returns[nxt],
        ))
    return panel, dropped


@dataclass
class PortfolioSeries:
    formation_months: list[str] = field(default_factory=list)
    return_months: list[str] = field(default_factory=list)
    long_returns: list[float] = field(default_factory=list)
    short_returns: list[float] = field(default_factory=list)
    long_short_returns: list[float] = field(default_factory=list)
    n_long: list[int] = field(default_factory=list)
    n_short: list[int] = field(default_factory=list)
    skipped_months: list[tuple[str, str]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.return_months)


def build_portfolio(panel: list[FirmMonth], min_firms: int = MIN_FIRMS_PER_MONTH) -> PortfolioSeries:
    """Monthly median split on application strength, one-month horizon.

    Firms at or above the median go long (ties and the odd middle firm
    break toward the long side); groups are equal-weighted. Months with
    fewer than min_firms firms are skipped with a note.
    """
    by_month: dict[str, list[FirmMonth]] = {}
    for row in panel:
        by_month.setdefault(row.month, []).append(row)
    series = PortfolioSeries()
    for month in sorted(by_month):
        rows = by_month[month]
        if len(rows) < min_firms:
            series.skipped_months.append((month, f"only {len(rows)} firms"))
            continue
        strengths = np.array([r.application_strength for r in rows])
        median = float(np.median(strengths))
        long_rows = [r for r in rows if r.application_strength >= median]
        short_rows = [r for r in rows if r.application_strength < median]
        if not short_rows:  # all strengths equal: no spread this month
            series.skipped_months.append((month, "degenerate median split"))
            continue
        long_ret = float(np.mean([r.next_month_return for r in long_rows]))
        short_ret = float(np.mean([r.next_month_return for r in short_rows]))
        series.formation_months.append(month)
        series.return_months.append(month_add(month, 1))
        series.long_returns.append(long_ret)
        series.short_returns.append(short_ret)
        series.long_short_returns.append(long_ret - short_ret)
        series.n_long.append(len(long_rows))
        series.n_short.append(len(short_rows))
    return series


@dataclass(frozen=True)
class FactorAlpha:
    model: str
    leg: str
    alpha_monthly: float
    t_stat: float
    betas: dict[str, float]
    n_months: int
    stars: str


def one_tailed_stars(t: float) -> str:
    p = 1.0 - normal_cdf(abs(t))
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.10:
        return "*"
    return ""


def factor_alpha(series: PortfolioSeries, factors: FactorSeries, model: str = "FF4",
                 leg: str = "long_short") -> FactorAlpha:
    """Intercept of the portfolio-return regression on factor returns."""
    if model not in FACTOR_MODELS:
        raise ValueError(f"unknown factor model {model!r}")
    names = FACTOR_MODELS[model]
    returns = {"long": series.long_returns, "short": series.short_returns,
               "long_short": series.long_short_returns}[leg]
    y, X = [], []
    for month, ret in zip(series.return_months, returns):
        row = factors.row(month)
        if row is None:
            raise CoverageError(f"factor series does not cover {month}")
        if leg in ("long", "short"):
            ret = ret - row["rf"]
        y.append(ret)
        X.append([row[name] for name in names])
    if len(y) < MIN_OVERLAP_MONTHS:
        raise PortfolioError(f"only {len(y)} overlapping months; need {MIN_OVERLAP_MONTHS}")
    res = ols(np.array(X), np.array(y), add_intercept=True)
    alpha = float(res.coefficients[0])
    t = float(res.t_stats[0])
    betas = {name: float(b) for name, b in zip(names, res.coefficients[1:])}
    return FactorAlpha(model=model, leg=leg, alpha_monthly=alpha, t_stat=t,
                       betas=betas, n_months=len(y), stars=one_tailed_stars(t))


def annualize_monthly(alpha_monthly: float) -> float:
    return 12.0 * alpha_monthly
