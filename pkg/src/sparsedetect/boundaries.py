"""Closed-form detection boundaries in the strongly sparse regime."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BoundaryPoint",
    "anova_power_scaling",
    "boundary_point",
    "boundary_table",
    "rho_max",
    "rho_rand",
    "rand_edge_flag",
    "rho_star",
    "zeta_rescale",
]


def _check_sparse(alpha, upper_open=False):
    ok = 0.5 < alpha < 1.0 if upper_open else 0.5 < alpha <= 1.0
    if not ok:
        hi = ")" if upper_open else "]"
        raise ValueError(f"alpha must lie in (1/2, 1{hi}, got {alpha}")


def rho_star(alpha: float) -> float:
    """Sharp SFEM threshold: ``alpha - 1/2`` below 3/4, ``(1 - sqrt(1 - alpha))^2`` from 3/4 on."""
    _check_sparse(alpha)
    if alpha < 0.75:
        return alpha - 0.5
    return (1.0 - math.sqrt(1.0 - alpha)) ** 2


def rho_max(alpha: float) -> float:
    """Boundary of the Max test, ``(1 - sqrt(1 - alpha))^2``."""
    _check_sparse(alpha)
    return (1.0 - math.sqrt(1.0 - alpha)) ** 2


def rho_rand(alpha: float) -> float:
    """SREM threshold ``sqrt(alpha / (1 - alpha))`` on the standard deviation tau.

    Accepts the edge values: ``alpha = 1/2`` gives 1 and ``alpha = 1`` gives
    ``math.inf``; :func:`rand_edge_flag` names both cases.
    """
    if alpha == 1.0:
        return math.inf
    if not 0.5 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [1/2, 1], got {alpha}")
    return math.sqrt(alpha / (1.0 - alpha))


def rand_edge_flag(alpha: float) -> str | None:
    """``"domain-edge"`` at alpha = 1/2, ``"infinite"`` at alpha = 1, else None."""
    if alpha == 0.5:
        return "domain-edge"
    if alpha == 1.0:
        return "infinite"
    return None


@dataclass(frozen=True)
class BoundaryPoint:
    alpha: float
    rho_star: float
    rho_max: float
    rho_rand: float
    rand_flag: str | None = None


def boundary_point(alpha: float) -> BoundaryPoint:
    return BoundaryPoint(
        alpha=alpha,
        rho_star=rho_star(alpha),
        rho_max=rho_max(alpha),
        rho_rand=rho_rand(alpha),
        rand_flag=rand_edge_flag(alpha),
    )


def boundary_table(alpha_min: float, alpha_max: float, step: float | None = None) -> list[BoundaryPoint]:
    """Boundary curves on ``alpha_min, alpha_min + step, ..., alpha_max``.

    The grid is built by integer multiples of ``step`` so the endpoint is hit
    exactly when ``(alpha_max - alpha_min) / step`` is whole up to 1e-9.
    """
    if alpha_max < alpha_min:
        raise ValueError(f"alpha_max {alpha_max} is below alpha_min {alpha_min}")
    if alpha_max == alpha_min:
        return [boundary_point(alpha_min)]
    if step is None or not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    count = math.floor((alpha_max - alpha_min) / step + 1e-9)
    alphas = [round(alpha_min + i * step, 12) for i in range(count + 1)]
    return [boundary_point(a) for a in alphas]


def anova_power_scaling(X, beta, n: int | None = None, p: int | None = None) -> float:
    """``||X beta||^2 / sqrt(min(n, p))``; ANOVA is powerless when this tends to 0."""
    beta = getattr(beta, "beta", beta)
    n = X.n if n is None else n
    p = X.p if p is None else p
    mean = X.matvec(np.asarray(beta, dtype=float))
    return float(mean @ mean) / math.sqrt(min(n, p))


def zeta_rescale(signal: float, gamma: float) -> float:
    """Place a constant-correlation signal level on the orthogonal scale: ``signal / sqrt(1 - gamma)``."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    return signal / math.sqrt(1.0 - gamma)
