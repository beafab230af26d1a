"""Monte Carlo estimation of the best achievable detection risk.

Every trial draws its randomness from a :class:`numpy.random.SeedSequence`
keyed by ``(master_seed, cell key, trial index)``, where the cell key hashes
the cell's ``(alpha, signal)`` pair. Results therefore do not depend on how
trials are scheduled across threads, and all tests in a cell see the same
designs, signals and noise.
"""

from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .alternatives import AlternativeSpec, sample_signal
from .boundaries import zeta_rescale
from .designs import DesignMatrix, DesignSpec, build_design
from .stats import (
    anova_stat,
    estimate_sigma,
    hc_continuous,
    hc_discretized,
    hc_grid,
    hc_grid_start,
    max_abs,
)

__all__ = [
    "CSV_COLUMNS",
    "CellError",
    "ExperimentConfig",
    "RiskEstimate",
    "TestSpec",
    "best_empirical_risk",
    "monotone_violations",
    "results_to_csv",
    "run_cell",
    "run_grid",
    "simulate_cell",
    "zeta_rescale",
]

log = logging.getLogger(__name__)

TEST_KINDS = ("ANOVA", "MAX", "HC_CONT", "HC_DISC")
S_POLICIES = ("adaptive-one", "theorem", "sqrt2")
QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)

CSV_COLUMNS = (
    "design",
    "variant-params",
    "model",
    "alpha",
    "S",
    "signal",
    "test",
    "s_policy",
    "trials",
    "best_risk",
    "best_threshold",
    "std_err",
    "master_seed",
)

_FIXED_DESIGN_TAG = 0xD0E5


class CellError(RuntimeError):
    """A statistic failed inside a grid cell; the message names the cell and trial."""


@dataclass(frozen=True)
class TestSpec:
    """One test to run. ``s_policy`` applies to ``HC_DISC`` only."""

    kind: str
    s_policy: str | None = None

    __test__ = False

    def __post_init__(self):
        if self.kind not in TEST_KINDS:
            raise ValueError(f"unknown test {self.kind!r}; expected one of {TEST_KINDS}")
        if self.kind == "HC_DISC":
            if self.s_policy is None:
                object.__setattr__(self, "s_policy", "adaptive-one")
            if self.s_policy not in S_POLICIES:
                raise ValueError(f"unknown s-policy {self.s_policy!r}; expected one of {S_POLICIES}")
        elif self.s_policy is not None:
            raise ValueError(f"{self.kind} does not take an s-policy")

    @classmethod
    def parse(cls, text: str) -> TestSpec:
        """``"MAX"``, ``"HC_DISC"`` or ``"HC_DISC:theorem"``."""
        kind, _, policy = text.partition(":")
        return cls(kind.strip().upper(), policy.strip() or None)

    @property
    def name(self) -> str:
        return f"{self.kind}:{self.s_policy}" if self.s_policy else self.kind

    def grid_start(self, alpha: float, p: int) -> float:
        if self.s_policy == "theorem":
            return hc_grid_start(alpha, p)
        if self.s_policy == "sqrt2":
            return math.sqrt(2.0 * math.log(p))
        return 1.0


@dataclass(frozen=True)
class ExperimentConfig:
    """A grid of Monte Carlo cells.

    ``signal_grid`` holds r values for SFEM (amplitude ``sigma sqrt(2 r log p)``)
    or tau values for SREM (in units of sigma). With ``zeta_rescale`` the
    amplitude (or tau) is divided by ``sqrt(1 - gamma)`` on constant-correlation
    designs. With ``sigma_known=False`` every statistic is computed on
    ``y / sigma_hat`` instead of ``y / sigma``.
    """

    design: DesignSpec
    alpha_grid: tuple[float, ...]
    signal_grid: tuple[float, ...]
    trials: int
    model: str = "SFEM"
    master_seed: int = 0
    sigma: float = 1.0
    sigma_known: bool = True
    tests: tuple[TestSpec, ...] = (TestSpec("ANOVA"), TestSpec("MAX"), TestSpec("HC_DISC"))
    fresh_design_per_trial: bool = True
    zeta_rescale: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha_grid", tuple(float(a) for a in self.alpha_grid))
        object.__setattr__(self, "signal_grid", tuple(float(s) for s in self.signal_grid))
        object.__setattr__(
            self, "tests", tuple(t if isinstance(t, TestSpec) else TestSpec.parse(t) for t in self.tests)
        )
        if self.model not in ("SFEM", "SREM"):
            raise ValueError(f"model must be SFEM or SREM, got {self.model!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials}")
        if not self.alpha_grid or not self.signal_grid or not self.tests:
            raise ValueError("alpha_grid, signal_grid and tests must be nonempty")
        if self.sigma < 0 or (not self.sigma_known and self.sigma == 0):
            raise ValueError(f"sigma must be positive (or zero with known sigma), got {self.sigma}")
        if any(s < 0 for s in self.signal_grid):
            raise ValueError("signal values must be nonnegative")
        if self.zeta_rescale and self.design.kind != "constant_correlation":
            raise ValueError("zeta_rescale only applies to constant_correlation designs")
        p = self.p
        if p < 2:
            raise ValueError("experiments need p >= 2")
        for alpha in self.alpha_grid:
            AlternativeSpec.srem(p, alpha, tau=0.0)  # validates alpha in [0, 1]
            for test in self.tests:
                if test.s_policy == "theorem" and not 0.5 < alpha <= 1.0:
                    raise ValueError(f"HC_DISC:theorem needs alpha in (1/2, 1], got {alpha}")
                if test.kind == "HC_DISC" and hc_grid(p, test.grid_start(alpha, p)).size == 0:
                    raise ValueError(f"{test.name} has an empty threshold grid at alpha={alpha}, p={p}")

    @property
    def p(self) -> int:
        return self.design.shape[1]

    def to_dict(self) -> dict:
        return {
            "design": self.design.to_dict(),
            "model": self.model,
            "alpha_grid": list(self.alpha_grid),
            "signal_grid": list(self.signal_grid),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "sigma": self.sigma,
            "sigma_known": self.sigma_known,
            "tests": [t.name for t in self.tests],
            "fresh_design_per_trial": self.fresh_design_per_trial,
            "zeta_rescale": self.zeta_rescale,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        data = dict(data)
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        if "design" not in data:
            raise ValueError("config needs a 'design' entry")
        data["design"] = DesignSpec.from_dict(data["design"])
        return cls(**data)

    def alternative(self, alpha: float, signal: float) -> AlternativeSpec:
        scale = self.sigma if self.sigma > 0 else 1.0
        if self.zeta_rescale:
            scale = zeta_rescale(scale, self.design.gamma)
        if self.model == "SFEM":
            amplitude = scale * math.sqrt(2.0 * signal * math.log(self.p))
            return AlternativeSpec.sfem(self.p, alpha, amplitude=amplitude, sigma=self.sigma)
        return AlternativeSpec.srem(self.p, alpha, tau=scale * signal, sigma=self.sigma)


@dataclass(frozen=True)
class RiskEstimate:
    best_risk: float
    best_threshold: float
    n_trials: int
    standard_error: float
    null_quantiles: tuple[float, ...] = ()
    alt_quantiles: tuple[float, ...] = ()
    test: str | None = None
    alpha: float | None = None
    signal: float | None = None
    S: int | None = None
    extra: dict = field(default_factory=dict)


def _risk_counts(null_sorted, alt_sorted, thresholds):
    false_alarms = null_sorted.size - np.searchsorted(null_sorted, thresholds, side="left")
    misses = np.searchsorted(alt_sorted, thresholds, side="left")
    return false_alarms, misses


def best_empirical_risk(null_stats, alt_stats) -> RiskEstimate:
    """Minimum over thresholds of (type I + type II) for the rule "reject if stat >= threshold".

    Thresholds swept: -inf, +inf and midpoints between consecutive distinct
    pooled values. Ties go to the largest threshold.
    """
    null = np.sort(np.asarray(null_stats, dtype=float))
    alt = np.sort(np.asarray(alt_stats, dtype=float))
    if null.size == 0 or alt.size == 0:
        raise ValueError("both samples must be nonempty")
    if not (np.all(np.isfinite(null)) and np.all(np.isfinite(alt))):
        raise ValueError("statistics must be finite")
    pooled = np.unique(np.concatenate([null, alt]))
    lo, hi = pooled[:-1], pooled[1:]
    mids = lo + 0.5 * (hi - lo)
    mids = np.where(mids > lo, mids, hi)
    thresholds = np.concatenate([[-np.inf], mids, [np.inf]])
    false_alarms, misses = _risk_counts(null, alt, thresholds)
    n0, n1 = null.size, alt.size
    # integer numerators keep ties exact
    scaled = false_alarms.astype(np.int64) * n1 + misses.astype(np.int64) * n0
    best = scaled.min()
    j = int(np.flatnonzero(scaled == best)[-1])
    risk = float(best) / (n0 * n1)
    trials = min(n0, n1)
    return RiskEstimate(
        best_risk=risk,
        best_threshold=float(thresholds[j]),
        n_trials=trials,
        standard_error=math.sqrt(max(risk * (2.0 - risk), 0.0) / trials),
        null_quantiles=tuple(float(q) for q in np.quantile(null, QUANTILES)),
        alt_quantiles=tuple(float(q) for q in np.quantile(alt, QUANTILES)),
    )


def _cell_key(alpha: float, signal: float) -> list[int]:
    digest = hashlib.blake2b(f"{alpha!r}|{signal!r}".encode(), digest_size=8).digest()
    word = int.from_bytes(digest, "little")
    return [word & 0xFFFFFFFF, word >> 32]


def _trial_seed(config: ExperimentConfig, alpha: float, signal: float, trial: int):
    return np.random.SeedSequence([config.master_seed, *_cell_key(alpha, signal), trial])


def _fixed_design(config: ExperimentConfig) -> DesignMatrix:
    return build_design(config.design, np.random.SeedSequence([config.master_seed, _FIXED_DESIGN_TAG]))


def _statistics(X, y, tests, alpha, scale):
    y = y / scale
    v = X.rmatvec(y)
    out = []
    for test in tests:
        if test.kind == "ANOVA":
            out.append(anova_stat(X, y).value)
        elif test.kind == "MAX":
            out.append(max_abs(v).value)
        elif test.kind == "HC_CONT":
            out.append(hc_continuous(v, X.p).value)
        else:
            out.append(hc_discretized(v, X.p, test.grid_start(alpha, X.p)).value)
    return out


def _one_trial(config, alpha, signal, tests, trial, shared_design):
    design_ss, signal_ss, null_ss, alt_ss = _trial_seed(config, alpha, signal, trial).spawn(4)
    X = shared_design if shared_design is not None else build_design(config.design, design_ss)
    beta = sample_signal(config.alternative(alpha, signal), signal_ss).beta
    sigma = config.sigma
    rows = []
    for mean, noise_ss in ((None, null_ss), (beta, alt_ss)):
        y = X.matvec(mean) if mean is not None else np.zeros(X.n)
        if sigma > 0:
            y += sigma * np.random.default_rng(noise_ss).standard_normal(X.n)
        if config.sigma_known:
            scale = sigma if sigma > 0 else 1.0
        else:
            scale = estimate_sigma(y).sigma_hat
            if scale == 0:
                raise ValueError("sigma estimate is zero")
        rows.append(_statistics(X, y, tests, alpha, scale))
    return rows


def simulate_cell(config: ExperimentConfig, alpha: float, signal: float, tests=None, threads: int = 1):
    """Null and alternative statistics for every test in one cell.

    Returns ``{test name: (null_stats, alt_stats)}`` with arrays of length
    ``config.trials``.
    """
    tests = config.tests if tests is None else tuple(tests)
    shared = None
    if not config.fresh_design_per_trial:
        shared = _fixed_design(config)
    elif not config.design.is_random:
        shared = build_design(config.design)

    def work(trial):
        try:
            return _one_trial(config, alpha, signal, tests, trial, shared)
        except Exception as exc:
            raise CellError(f"cell alpha={alpha!r} signal={signal!r}, trial {trial}: {exc}") from exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, range(config.trials)))
    else:
        rows = [work(trial) for trial in range(config.trials)]
    stats = np.asarray(rows, dtype=float)  # trials x 2 x tests
    return {test.name: (stats[:, 0, i].copy(), stats[:, 1, i].copy()) for i, test in enumerate(tests)}


def run_cell(config: ExperimentConfig, alpha: float, signal: float, test, threads: int = 1):
    """``(null_stats, alt_stats)`` for a single test in one cell."""
    test = test if isinstance(test, TestSpec) else TestSpec.parse(test)
    return simulate_cell(config, alpha, signal, (test,), threads)[test.name]


def run_grid(config: ExperimentConfig, threads: int = 1) -> list[RiskEstimate]:
    """Best empirical risk for every (alpha, signal, test) cell, in grid order."""
    results = []
    for alpha in config.alpha_grid:
        S = config.alternative(alpha, 0.0).S
        for signal in config.signal_grid:
            cell = simulate_cell(config, alpha, signal, threads=threads)
            for test in config.tests:
                null, alt = cell[test.name]
                est = best_empirical_risk(null, alt)
                results.append(replace(est, test=test.name, alpha=alpha, signal=signal, S=S))
    for message in monotone_violations(results):
        log.warning("risk not monotone in signal: %s", message)
    return results


def monotone_violations(estimates, slack: float = 2.0) -> list[str]:
    """Cells where risk rises with the signal by more than ``slack`` standard errors."""
    by_curve = {}
    for est in estimates:
        by_curve.setdefault((est.test, est.alpha), []).append(est)
    problems = []
    for (test, alpha), curve in by_curve.items():
        curve = sorted(curve, key=lambda e: e.signal)
        for weak, strong in zip(curve, curve[1:]):
            allowed = slack * max(weak.standard_error, strong.standard_error)
            if strong.best_risk > weak.best_risk + allowed:
                problems.append(
                    f"{test} alpha={alpha}: risk {weak.best_risk:.3f} at {weak.signal} "
                    f"-> {strong.best_risk:.3f} at {strong.signal}"
                )
    return problems


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".10g")


def results_to_csv(estimates, config: ExperimentConfig) -> str:
    """One row per cell with the columns in :data:`CSV_COLUMNS`."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    params = config.design.label.split(" ", 1)[1] if " " in config.design.label else ""
    for est in estimates:
        kind, _, policy = est.test.partition(":")
        writer.writerow(
            [
                config.design.kind,
                params,
                config.model,
                _fmt(est.alpha),
                est.S,
                _fmt(est.signal),
                kind,
                policy,
                est.n_trials,
                _fmt(est.best_risk),
                _fmt(est.best_threshold),
                _fmt(est.standard_error),
                config.master_seed,
            ]
        )
    return buf.getvalue()
