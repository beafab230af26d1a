"""Test statistics: ANOVA, Max, higher criticism, and a noise-level estimate."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.special import ndtr

from .boundaries import rho_star
from .designs import DesignMatrix

__all__ = [
    "EmptyGridError",
    "TestOutcome",
    "VarianceEstimate",
    "anova_stat",
    "estimate_sigma",
    "exceedance_counts",
    "gaussian_survival",
    "hc_continuous",
    "hc_discretized",
    "hc_grid",
    "hc_grid_start",
    "hc_objective",
    "max_abs",
    "max_stat",
]

HC_GRID_POINTS = 512
HC_NUDGE = 1e-9
_DENOM_FLOOR = 1e-300


class EmptyGridError(ValueError):
    """The integer threshold grid of the discretized HC statistic is empty."""


@dataclass(frozen=True)
class TestOutcome:
    kind: str
    value: float
    detail: dict = field(default_factory=dict)

    __test__ = False  # keep pytest from collecting this class


@dataclass(frozen=True)
class VarianceEstimate:
    sigma_hat: float
    t_n: float
    n: int
    a_n: float
    degenerate: bool = False


def gaussian_survival(t):
    """Standard normal upper tail ``P(Z > t)``, accurate deep into the tail."""
    out = ndtr(-np.asarray(t, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def anova_stat(X: DesignMatrix, y) -> TestOutcome:
    """Squared norm of the projection of ``y`` onto the column space of ``X``.

    Orthonormal-column designs use ``||X^T y||^2``; designs spanning R^n by
    construction use ``||y||^2``; anything else goes through a least-squares
    solve, which handles rank deficiency.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (X.n,):
        raise ValueError(f"observation has shape {y.shape}, expected ({X.n},)")
    space = X.column_space
    if space == "orthonormal":
        v = X.rmatvec(y)
        return TestOutcome("ANOVA", float(v @ v), {"method": "orthonormal"})
    if space == "full_row":
        return TestOutcome("ANOVA", float(y @ y), {"method": "full_row"})
    coef, _, rank, _ = linalg.lstsq(X.values, y, lapack_driver="gelsd")
    fitted = X.values @ coef
    detail = {"method": "lstsq", "rank": int(rank)}
    if rank < min(X.n, X.p):
        detail["warning"] = f"rank-deficient design (rank {rank} < {min(X.n, X.p)})"
        warnings.warn(detail["warning"], RuntimeWarning, stacklevel=2)
    return TestOutcome("ANOVA", float(fitted @ fitted), detail)


def max_abs(v) -> TestOutcome:
    """``max_j |v_j|``; ``detail['index']`` is the lowest 0-based argmax."""
    a = np.abs(np.asarray(v, dtype=float))
    if a.size == 0:
        raise ValueError("max_abs of an empty vector")
    j = int(np.argmax(a))
    return TestOutcome("MAX", float(a[j]), {"index": j})


def max_stat(X: DesignMatrix, y) -> TestOutcome:
    """Max test: ``max_j |x_j^T y|``."""
    return max_abs(X.rmatvec(y))


def exceedance_counts(v, t) -> np.ndarray:
    """``#{i : |v_i| > t}`` for each threshold in ``t``."""
    a = np.sort(np.abs(np.asarray(v, dtype=float)))
    t = np.asarray(t, dtype=float)
    return a.size - np.searchsorted(a, t, side="right")


def hc_objective(counts, t, p: int) -> np.ndarray:
    """H(t) = (count - 2p Sbar(t)) / sqrt(2p Sbar(t) (1 - 2 Sbar(t))).

    Entries with a non-positive or underflowing denominator come back as NaN.
    """
    tail = np.asarray(gaussian_survival(np.asarray(t, dtype=float)), dtype=float)
    expected = 2.0 * p * tail
    var = expected * (1.0 - 2.0 * tail)
    with np.errstate(invalid="ignore", divide="ignore"):
        h = (np.asarray(counts, dtype=float) - expected) / np.sqrt(var)
    return np.where(var >= _DENOM_FLOOR, h, np.nan)


def _check_p(v, p):
    v = np.asarray(v, dtype=float).ravel()
    if p is None:
        p = v.size
    if p < 1 or v.size != p:
        raise ValueError(f"expected a length-{p} statistic vector, got length {v.size}")
    return v, int(p)


def hc_continuous(v, p: int | None = None) -> TestOutcome:
    """Higher criticism ``sup_{t > 0} H(t)`` over exceedances of ``|v|``.

    The supremum is approached just below each |v_i|; those points are
    evaluated at ``|v_i| (1 - 1e-9)`` together with a uniform grid of 512
    points on (0, max|v|]. For an all-zero input the grid spans
    (0, max(1, sqrt(2 log p))].
    """
    v, p = _check_p(v, p)
    a = np.abs(v)
    top = float(a.max())
    grid_top = top if top > 0 else max(1.0, math.sqrt(2.0 * math.log(p)))
    grid = grid_top * np.arange(1, HC_GRID_POINTS + 1) / HC_GRID_POINTS
    candidates = np.concatenate([a[a > 0] * (1.0 - HC_NUDGE), grid])
    tail = gaussian_survival(candidates)
    candidates = candidates[(candidates > 0) & (tail < 0.5 - 1e-9)]
    h = hc_objective(exceedance_counts(a, candidates), candidates, p)
    if np.all(np.isnan(h)):
        raise ValueError("no usable HC threshold")
    j = int(np.nanargmax(h))
    return TestOutcome("HC_CONT", float(h[j]), {"t": float(candidates[j])})


def hc_grid(p: int, s: float) -> np.ndarray:
    """Positive integers in ``[s, sqrt(5 log p)]``, endpoints included."""
    upper = math.floor(math.sqrt(5.0 * math.log(p))) if p > 1 else 0
    lower = max(1, math.ceil(s))
    return np.arange(lower, upper + 1, dtype=float)


def hc_discretized(v, p: int | None = None, s: float = 1.0) -> TestOutcome:
    """``H*(s)``: the maximum of H(t) over the integer grid from :func:`hc_grid`."""
    v, p = _check_p(v, p)
    if s < 0:
        raise ValueError(f"grid start must be nonnegative, got {s}")
    grid = hc_grid(p, s)
    if grid.size == 0:
        raise EmptyGridError(f"no integer threshold in [{s:.6g}, sqrt(5 log {p})]")
    h = hc_objective(exceedance_counts(v, grid), grid, p)
    if np.all(np.isnan(h)):
        raise ValueError("no usable HC threshold on the grid")
    j = int(np.nanargmax(h))
    return TestOutcome("HC_DISC", float(h[j]), {"t": float(grid[j]), "s": float(s)})


def hc_grid_start(alpha: float, p: int) -> float:
    """Grid start ``sqrt(2 r_alpha log p)`` with ``r_alpha = min(1, 4 rho*(alpha))``."""
    r_alpha = min(1.0, 4.0 * rho_star(alpha))
    return math.sqrt(2.0 * r_alpha * math.log(p))


def estimate_sigma(y, n: int | None = None) -> VarianceEstimate:
    """Upward-biased noise level ``||y|| (1/sqrt(n) + log(n)/n)``."""
    y = np.asarray(y, dtype=float)
    if n is None:
        n = y.size
    if n != y.size:
        raise ValueError(f"n={n} does not match len(y)={y.size}")
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    t_n = math.log(n)
    sigma_hat = float(np.linalg.norm(y)) * (1.0 / math.sqrt(n) + t_n / n)
    return VarianceEstimate(sigma_hat, t_n, n, t_n / math.sqrt(n), degenerate=sigma_hat == 0.0)
