"""Monotone target transformations for the value regression.

Box-Cox with train-set lambda fitting is the primary strategy; log1p and
z-score standardization sit behind the same interface. All transforms have
exact algebraic inverses, so test-set ranks are never disturbed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LAMBDA_BOUNDS = (-5.0, 5.0)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class TransformError(Exception):
    pass


class DomainError(TransformError):
    pass


class DegenerateDataError(TransformError):
    pass


def _resolve_shift(values: np.ndarray) -> float:
    """Shift rule: 0 when all values positive, else 1e-6 - min(values)."""
    lo = float(np.min(values))
    return 0.0 if lo > 0.0 else 1e-6 - lo


def boxcox_log_likelihood(values: np.ndarray, lam: float) -> float:
    """Profile log-likelihood of the power transform at a given lambda.

    -n/2 * ln(sigma^2 of the transformed values) + (lambda - 1) * sum(ln y).
    """
    y = np.asarray(values, dtype=np.float64)
    n = y.size
    z = _power(y, lam)
    var = float(np.var(z))
    if var <= 0.0:
        return -np.inf
    return -0.5 * n * math.log(var) + (lam - 1.0) * float(np.sum(np.log(y)))


def _power(y: np.ndarray, lam: float) -> np.ndarray:
    if lam == 0.0:
        return np.log(y)
    # expm1 keeps precision where y^lam saturates toward 0
    return np.expm1(lam * np.log(y)) / lam


@dataclass(frozen=True)
class BoxCoxTransform:
    lambda_: float
    shift: float = 0.0
    fitted_on: int = 0

    kind = "boxcox"

    def apply(self, y):
        y = np.asarray(y, dtype=np.float64)
        shifted = y + self.shift
        if np.any(shifted <= 0.0):
            bad = float(np.min(y))
            raise DomainError(f"value {bad} nonpositive after shift {self.shift}")
        out = _power(shifted, self.lambda_)
        return float(out) if out.ndim == 0 else out

    def inverse(self, z):
        z = np.asarray(z, dtype=np.float64)
        if self.lambda_ == 0.0:
            y = np.exp(z)
        else:
            lz = self.lambda_ * z
            if np.any(lz <= -1.0):
                raise DomainError(f"1 + lambda*z <= 0 for lambda={self.lambda_}; z outside image")
            y = np.exp(np.log1p(lz) / self.lambda_)
        out = y - self.shift
        return float(out) if out.ndim == 0 else out

    def to_json(self) -> dict:
        return {"kind": self.kind, "lambda": self.lambda_, "shift": self.shift}


def fit_lambda(train_values, bounds: tuple[float, float] = LAMBDA_BOUNDS, tol: float = 1e-4) -> BoxCoxTransform:
    """Maximum-likelihood lambda via coarse grid then golden-section refinement.

    Requires at least 10 finite values with nonzero variance; all values
    must be strictly positive after the shift rule.
    """
    y = np.asarray(train_values, dtype=np.float64)
    if y.size < 10:
        raise TransformError(f"need at least 10 values to fit lambda, got {y.size}")
    if not np.all(np.isfinite(y)):
        raise DomainError("non-finite training value")
    if float(np.var(y)) == 0.0:
        raise DegenerateDataError("constant-value input: variance is zero")
    shift = _resolve_shift(y)
    shifted = y + shift
    if np.any(shifted <= 0.0):
        raise DomainError(f"value {float(np.min(y))} nonpositive after shift {shift}")

    lo, hi = bounds
    grid = np.linspace(lo, hi, 201)
    ll = np.array([boxcox_log_likelihood(shifted, float(l)) for l in grid])
    best = int(np.argmax(ll))
    a = grid[max(best - 1, 0)]
    b = grid[min(best + 1, grid.size - 1)]

    # golden-section on [a, b] (unimodal near the optimum)
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = boxcox_log_likelihood(shifted, x1)
    f2 = boxcox_log_likelihood(shifted, x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = boxcox_log_likelihood(shifted, x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = boxcox_log_likelihood(shifted, x1)
    lam = 0.5 * (a + b)
    return BoxCoxTransform(lambda_=float(lam), shift=shift, fitted_on=int(y.size))


@dataclass(frozen=True)
class Log1pTransform:
    shift: float = 0.0
    fitted_on: int = 0

    kind = "log1p"

    def apply(self, y):
        y = np.asarray(y, dtype=np.float64) + self.shift
        if np.any(y <= -1.0):
            raise DomainError("value <= -1 after shift")
        out = np.log1p(y)
        return float(out) if out.ndim == 0 else out

    def inverse(self, z):
        out = np.expm1(np.asarray(z, dtype=np.float64)) - self.shift
        return float(out) if out.ndim == 0 else out

    def to_json(self) -> dict:
        return {"kind": self.kind, "shift": self.shift}


@dataclass(frozen=True)
class ZScoreTransform:
    mean: float
    std: float
    fitted_on: int = 0

    kind = "zscore"

    def apply(self, y):
        out = (np.asarray(y, dtype=np.float64) - self.mean) / self.std
        return float(out) if out.ndim == 0 else out

    def inverse(self, z):
        out = np.asarray(z, dtype=np.float64) * self.std + self.mean
        return float(out) if out.ndim == 0 else out

    def to_json(self) -> dict:
        return {"kind": self.kind, "mean": self.mean, "std": self.std}


def fit_transform(kind: str, train_values) -> BoxCoxTransform | Log1pTransform | ZScoreTransform:
    y = np.asarray(train_values, dtype=np.float64)
    if kind == "boxcox":
        return fit_lambda(y)
    if kind == "log1p":
        lo = float(np.min(y))
        shift = 0.0 if lo > -1.0 else 1e-6 - (1.0 + lo)
        return Log1pTransform(shift=shift, fitted_on=int(y.size))
    if kind == "zscore":
        std = float(np.std(y))
        if std == 0.0:
            raise DegenerateDataError("constant-value input: variance is zero")
        return ZScoreTransform(mean=float(np.mean(y)), std=std, fitted_on=int(y.size))
    raise ValueError(f"unknown transform kind {kind!r}")


def transform_from_json(payload: dict):
    kind = payload["kind"]
    if kind == "boxcox":
        return BoxCoxTransform(lambda_=payload["lambda"], shift=payload["shift"])
    if kind == "log1p":
        return Log1pTransform(shift=payload["shift"])
    if kind == "zscore":
        return ZScoreTransform(mean=payload["mean"], std=payload["std"])
    raise ValueError(f"unknown transform kind {kind!r}")
