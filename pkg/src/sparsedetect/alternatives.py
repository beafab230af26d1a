"""Sparse fixed-effects (SFEM) and random-effects (SREM) alternatives."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .designs import DesignMatrix

__all__ = [
    "AlternativeSpec",
    "SignalInstance",
    "amplitude_from_r",
    "read_signal_csv",
    "sample_sfem",
    "sample_signal",
    "sample_srem",
    "sparsity_from_alpha",
    "synthesize_observation",
    "write_signal_csv",
]


def sparsity_from_alpha(p: int, alpha: float) -> int:
    """Number of nonzeros ``S = p ** (1 - alpha)``, rounded to nearest, at least 1."""
    if p < 1:
        raise ValueError(f"p must be positive, got {p}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return min(p, max(1, round(p ** (1.0 - alpha))))


def amplitude_from_r(p: int, r: float) -> float:
    """Amplitude ``A = sqrt(2 r log p)``."""
    if p < 2:
        raise ValueError(f"amplitude needs p >= 2 so that log p > 0, got {p}")
    if r < 0:
        raise ValueError(f"r must be nonnegative, got {r}")
    return math.sqrt(2.0 * r * math.log(p))


@dataclass(frozen=True)
class AlternativeSpec:
    """Parameters of a sparse alternative.

    For SFEM exactly one of ``amplitude``/``r`` is given and the other is
    derived. For SREM ``tau`` is the standard deviation of the nonzeros.
    """

    model: str
    p: int
    alpha: float
    amplitude: float | None = None
    r: float | None = None
    tau: float | None = None
    sigma: float = 1.0

    def __post_init__(self):
        if self.model not in ("SFEM", "SREM"):
            raise ValueError(f"model must be 'SFEM' or 'SREM', got {self.model!r}")
        sparsity_from_alpha(self.p, self.alpha)
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.model == "SFEM":
            if (self.amplitude is None) == (self.r is None):
                raise ValueError("SFEM takes exactly one of amplitude or r")
            if self.tau is not None:
                raise ValueError("SFEM does not take tau")
            if self.r is not None:
                object.__setattr__(self, "amplitude", amplitude_from_r(self.p, self.r))
            elif self.p >= 2:
                if self.amplitude < 0:
                    raise ValueError(f"amplitude must be nonnegative, got {self.amplitude}")
                object.__setattr__(self, "r", self.amplitude**2 / (2.0 * math.log(self.p)))
        else:
            if self.tau is None or self.tau < 0:
                raise ValueError(f"SREM needs tau >= 0, got {self.tau}")
            if self.amplitude is not None or self.r is not None:
                raise ValueError("SREM does not take amplitude or r")

    @classmethod
    def sfem(cls, p, alpha, *, r=None, amplitude=None, sigma=1.0):
        return cls("SFEM", p, alpha, amplitude=amplitude, r=r, sigma=sigma)

    @classmethod
    def srem(cls, p, alpha, tau, sigma=1.0):
        return cls("SREM", p, alpha, tau=tau, sigma=sigma)

    @property
    def S(self) -> int:
        return sparsity_from_alpha(self.p, self.alpha)


@dataclass(frozen=True)
class SignalInstance:
    beta: np.ndarray
    support: np.ndarray

    @property
    def p(self) -> int:
        return self.beta.shape[0]


def _support(rng, p, S):
    return np.sort(rng.choice(p, size=S, replace=False))


def sample_sfem(spec: AlternativeSpec, seed=None) -> SignalInstance:
    """Uniformly random support of size S with independent random signs ``±A``."""
    if spec.model != "SFEM":
        raise ValueError(f"sample_sfem needs an SFEM spec, got {spec.model}")
    rng = np.random.default_rng(seed)
    support = _support(rng, spec.p, spec.S)
    signs = np.where(rng.random(spec.S) < 0.5, -1.0, 1.0)
    beta = np.zeros(spec.p)
    beta[support] = signs * spec.amplitude
    return SignalInstance(beta, support)


def sample_srem(spec: AlternativeSpec, seed=None) -> SignalInstance:
    """Uniformly random support of size S with i.i.d. N(0, tau^2) nonzeros."""
    if spec.model != "SREM":
        raise ValueError(f"sample_srem needs an SREM spec, got {spec.model}")
    rng = np.random.default_rng(seed)
    support = _support(rng, spec.p, spec.S)
    beta = np.zeros(spec.p)
    beta[support] = spec.tau * rng.standard_normal(spec.S)
    return SignalInstance(beta, support)


def sample_signal(spec: AlternativeSpec, seed=None) -> SignalInstance:
    if spec.model == "SFEM":
        return sample_sfem(spec, seed)
    return sample_srem(spec, seed)


def synthesize_observation(X: DesignMatrix, beta, sigma: float = 1.0, seed=None) -> np.ndarray:
    """Draw ``y = X beta + sigma z`` with z standard normal.

    ``beta`` may be a :class:`SignalInstance` or a plain length-p vector.
    """
    if isinstance(beta, SignalInstance):
        beta = beta.beta
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (X.p,):
        raise ValueError(f"beta has shape {beta.shape}, design has p={X.p}")
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    y = X.matvec(beta)
    if sigma > 0:
        rng = np.random.default_rng(seed)
        y += sigma * rng.standard_normal(X.n)
    return y


def write_signal_csv(signal: SignalInstance, spec: AlternativeSpec, path) -> None:
    """Comment header with the alternative's parameters, then ``index,value`` rows for nonzeros."""
    params = {"p": spec.p, "S": len(signal.support), "model": spec.model, "alpha": spec.alpha}
    if spec.model == "SFEM":
        params.update(amplitude=spec.amplitude, r=spec.r)
    else:
        params["tau"] = spec.tau
    params["sigma"] = spec.sigma
    with open(path, "w", newline="") as fh:
        fh.write("# " + " ".join(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}" for k, v in params.items()) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["index", "value"])
        for j in signal.support:
            writer.writerow([int(j), format(signal.beta[j], ".17g")])


def read_signal_csv(path) -> tuple[SignalInstance, dict]:
    """Inverse of :func:`write_signal_csv`; returns the instance and the header fields."""
    with open(path, newline="") as fh:
        header = fh.readline()
        if not header.startswith("#"):
            raise ValueError(f"{path}: missing parameter header line")
        meta = {}
        for item in header[1:].split():
            key, _, text = item.partition("=")
            meta[key] = text if key == "model" else (int(text) if key in ("p", "S") else float(text))
        reader = csv.DictReader(fh)
        rows = [(int(r["index"]), float(r["value"])) for r in reader]
    beta = np.zeros(meta["p"])
    support = np.array(sorted(j for j, _ in rows), dtype=int)
    for j, v in rows:
        beta[j] = v
    if len(support) != meta["S"]:
        raise ValueError(f"{path}: header says S={meta['S']}, found {len(support)} rows")
    return SignalInstance(beta, support), meta
