"""Shared econometric kernel: OLS, firm fixed-effects panels with clustered
standard errors, location tests, and winsorization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class StatsError(Exception):
    pass


class SingularDesignError(StatsError):
    def __init__(self, column: int):
        self.column = column
        super().__init__(f"design matrix is rank deficient; column {column} is linearly dependent")


class AbsorbedRegressorError(StatsError):
    pass


class DegenerateSampleError(StatsError):
    pass


@dataclass(frozen=True)
class RegressionResult:
    coefficients: np.ndarray
    standard_errors: np.ndarray
    t_stats: np.ndarray
    r2: float
    adj_r2: float
    n: int
    n_clusters: int = 0


def _find_dependent_column(X: np.ndarray) -> int:
    rank = 0
    for j in range(X.shape[1]):
        r = np.linalg.matrix_rank(X[:, : j + 1])
        if r == rank:
            return j
        rank = r
    return X.shape[1] - 1


def ols(X, y, add_intercept: bool = True) -> RegressionResult:
    """Least squares via QR with classical standard errors."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    if add_intercept:
        X = np.column_stack([np.ones(X.shape[0]), X])
    n, k = X.shape
    if n <= k:
        raise StatsError(f"n={n} observations for k={k} columns")
    if np.linalg.matrix_rank(X) < k:
        raise SingularDesignError(_find_dependent_column(X))
    q, r = np.linalg.qr(X)
    beta = np.linalg.solve(r, q.T @ y)
    resid = y - X @ beta
    ssr = float(resid @ resid)
    sst = float(np.sum((y - y.mean()) ** 2))
    sigma2 = ssr / (n - k)
    xtx_inv = np.linalg.inv(r.T @ r)
    se = np.sqrt(np.diag(sigma2 * xtx_inv))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta / se, np.inf)
    r2 = 1.0 - ssr / sst if sst > 0 else float("nan")
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - k) if sst > 0 else float("nan")
    return RegressionResult(coefficients=beta, standard_errors=se, t_stats=t,
                            r2=r2, adj_r2=adj, n=n)


def fe_panel(X, y, firm_ids, cluster: str = "firm") -> RegressionResult:
    """Firm fixed effects via the within transformation, SEs clustered by firm.

    Coefficients equal dummy-variable OLS; the sandwich uses cluster score
    sums with the G/(G-1) * (n-1)/(n-k) small-sample factor, k counting the
    slopes plus the absorbed firm intercepts.
    """
    if cluster != "firm":
        raise ValueError("only firm clustering is supported")
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    firm_ids = np.asarray(firm_ids)
    groups, inverse = np.unique(firm_ids, return_inverse=True)
    G = groups.size
    n, p = X.shape

    counts = np.bincount(inverse).astype(np.float64)
    x_means = np.zeros((G, p))
    for j in range(p):
        x_means[:, j] = np.bincount(inverse, weights=X[:, j]) / counts
    y_means = np.bincount(inverse, weights=y) / counts
    Xd = X - x_means[inverse]
    yd = y - y_means[inverse]

    within_var = (Xd * Xd).sum(axis=0)
    total_var = ((X - X.mean(axis=0)) ** 2).sum(axis=0)
    dead = np.where(within_var <= 1e-12 * np.maximum(total_var, 1.0))[0]
    if dead.size:
        raise AbsorbedRegressorError(
            f"regressor(s) {dead.tolist()} constant within every firm; absorbed by fixed effects"
        )

    k = p + G
    if n <= k:
        raise StatsError(f"n={n} too small for p={p} slopes and {G} firm effects")
    xtx = Xd.T @ Xd
    if np.linalg.matrix_rank(xtx) < p:
        raise SingularDesignError(_find_dependent_column(Xd))
    xtx_inv = np.linalg.inv(xtx)
    beta = xtx_inv @ (Xd.T @ yd)
    resid = yd - Xd @ beta

    meat = np.zeros((p, p))
    for g in range(G):
        sel = inverse == g
        score = Xd[sel].T @ resid[sel]
        meat += np.outer(score, score)
    factor = (G / (G - 1)) * ((n - 1) / (n - k)) if G > 1 else float("nan")
    cov = factor * xtx_inv @ meat @ xtx_inv
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta / se, np.inf)

    ssr = float(resid @ resid)
    sst = float(yd @ yd)
    r2 = 1.0 - ssr / sst if sst > 0 else float("nan")
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - k) if sst > 0 else float("nan")
    return RegressionResult(coefficients=beta, standard_errors=se, t_stats=t,
                            r2=r2, adj_r2=adj, n=n, n_clusters=G)


def t_test_mean(values) -> tuple[float, float]:
    """One-sample t against zero; degenerate (zero-variance) samples are rejected."""
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    if n < 2:
        raise DegenerateSampleError("need at least 2 values")
    mean = float(np.mean(v))
    sd = float(np.std(v, ddof=1))
    if sd == 0.0:
        raise DegenerateSampleError("zero variance: t-test degenerate")
    return mean, mean / (sd / math.sqrt(n))


def signed_rank_median(values, normal_approx_above: int = 25) -> tuple[float, float, float]:
    """Wilcoxon signed-rank test of median zero: (median, z, two-sided p).

    Zeros are dropped; ties share midranks with the usual variance
    correction. The normal approximation is used throughout (the documented
    regime is n > 25; smaller samples reuse it, flagged by the caller).
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size < 2:
        raise DegenerateSampleError("need at least 2 values")
    median = float(np.median(v))
    nz = v[v != 0.0]
    n = nz.size
    if n == 0:
        raise DegenerateSampleError("all values zero: signed-rank test degenerate")
    absv = np.abs(nz)
    order = np.sort(absv)
    left = np.searchsorted(order, absv, side="left")
    right = np.searchsorted(order, absv, side="right")
    ranks = 0.5 * (left + right + 1)
    w_plus = float(np.sum(ranks[nz > 0.0]))
    mu = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(absv, return_counts=True)
    var -= float(np.sum(tie_counts**3 - tie_counts)) / 48.0
    if var <= 0.0:
        raise DegenerateSampleError("zero variance in signed ranks")
    z = (w_plus - mu) / math.sqrt(var)
    p = 2.0 * (1.0 - normal_cdf(abs(z)))
    return median, z, p


def normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def t_test_p_value(t: float, two_sided: bool = True) -> float:
    """Normal-approximation p-value for a t statistic."""
    tail = 1.0 - normal_cdf(abs(t))
    return 2.0 * tail if two_sided else tail


def significance_stars(p: float) -> str:
    if p < 0.01:
        return "***"
    if p < 0.05:
        return "**"
    if p < 0.10:
        return "*"
    return ""


def winsorize(values, pct: float, tails: str = "both") -> np.ndarray:
    """Clip below the pct quantile and above the (1-pct) quantile.

    Quantiles use linear interpolation between order statistics, so the
    operation is exactly idempotent.
    """
    if not 0.0 < pct < 0.5:
        raise ValueError("pct must be in (0, 0.5)")
    if tails != "both":
        raise ValueError("only two-tailed winsorization is supported")
    v = np.asarray(values, dtype=np.float64)
    lo, hi = np.quantile(v, [pct, 1.0 - pct])
    return np.clip(v, lo, hi)
