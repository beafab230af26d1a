"""Design-matrix families with unit-norm columns and coherence diagnostics."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np
from scipy.linalg import hadamard

__all__ = [
    "DESIGN_KINDS",
    "CoherenceProfile",
    "DesignMatrix",
    "DesignSpec",
    "build_design",
    "coherence_lower_bound",
    "coherence_profile",
    "gram",
    "read_design_csv",
    "write_design_csv",
]

DESIGN_KINDS = (
    "identity",
    "random_orthonormal",
    "balanced_one_way",
    "balanced_one_way_constrained",
    "constant_correlation",
    "gaussian",
    "rademacher",
    "basis_concatenation",
)

# Designs whose columns are orthonormal by construction.
_ORTHONORMAL = {"identity", "random_orthonormal", "balanced_one_way"}
_RANDOM = {"random_orthonormal", "constant_correlation", "gaussian", "rademacher"}


@dataclass(frozen=True)
class DesignSpec:
    """Recipe for a design matrix.

    Only the parameters relevant to ``kind`` are set; the rest stay ``None``.
    Prefer the named constructors (``DesignSpec.gaussian(n, p)`` etc.).
    """

    kind: str
    p: int | None = None
    n: int | None = None
    k: int | None = None
    gamma: float | None = None

    def __post_init__(self):
        self.validate()

    @classmethod
    def identity(cls, p):
        return cls("identity", p=p)

    @classmethod
    def random_orthonormal(cls, n, p):
        return cls("random_orthonormal", p=p, n=n)

    @classmethod
    def balanced_one_way(cls, p, k):
        return cls("balanced_one_way", p=p, k=k)

    @classmethod
    def balanced_one_way_constrained(cls, p, k):
        return cls("balanced_one_way_constrained", p=p, k=k)

    @classmethod
    def constant_correlation(cls, p, gamma, n=None):
        return cls("constant_correlation", p=p, n=p + 1 if n is None else n, gamma=gamma)

    @classmethod
    def gaussian(cls, n, p):
        return cls("gaussian", p=p, n=n)

    @classmethod
    def rademacher(cls, n, p):
        return cls("rademacher", p=p, n=n)

    @classmethod
    def basis_concatenation(cls, n):
        return cls("basis_concatenation", n=n)

    def validate(self):
        kind = self.kind
        if kind not in DESIGN_KINDS:
            raise ValueError(f"unknown design kind {kind!r}; expected one of {DESIGN_KINDS}")
        needs = {
            "identity": ("p",),
            "random_orthonormal": ("n", "p"),
            "balanced_one_way": ("p", "k"),
            "balanced_one_way_constrained": ("p", "k"),
            "constant_correlation": ("n", "p", "gamma"),
            "gaussian": ("n", "p"),
            "rademacher": ("n", "p"),
            "basis_concatenation": ("n",),
        }[kind]
        for name in ("n", "p", "k", "gamma"):
            value = getattr(self, name)
            if name in needs:
                if value is None:
                    raise ValueError(f"{kind} design requires parameter {name!r}")
            elif value is not None:
                raise ValueError(f"{kind} design does not take parameter {name!r}")
        for name in ("n", "p", "k"):
            value = getattr(self, name)
            if value is not None and (int(value) != value or value < 1):
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if kind == "random_orthonormal" and self.p > self.n:
            raise ValueError(f"random_orthonormal needs p <= n, got n={self.n}, p={self.p}")
        if kind == "constant_correlation":
            if not 0.0 < self.gamma < 1.0:
                raise ValueError(f"constant_correlation needs 0 < gamma < 1, got {self.gamma}")
            if self.n < self.p + 1:
                raise ValueError(f"constant_correlation needs n >= p + 1, got n={self.n}, p={self.p}")
        if kind == "basis_concatenation" and self.n & (self.n - 1):
            raise ValueError(f"basis_concatenation needs n a power of two, got {self.n}")

    @property
    def shape(self) -> tuple[int, int]:
        kind = self.kind
        if kind == "identity":
            return self.p, self.p
        if kind == "balanced_one_way":
            return self.p * self.k, self.p
        if kind == "balanced_one_way_constrained":
            return (self.p + 1) * self.k, self.p
        if kind == "basis_concatenation":
            return self.n, 2 * self.n
        return self.n, self.p

    @property
    def is_random(self) -> bool:
        return self.kind in _RANDOM

    def to_dict(self) -> dict:
        return {"variant": self.kind, **{k: v for k, v in asdict(self).items() if k != "kind" and v is not None}}

    @classmethod
    def from_dict(cls, data: dict) -> DesignSpec:
        data = dict(data)
        kind = data.pop("variant", data.pop("kind", None))
        if kind is None:
            raise ValueError("design entry needs a 'variant' field")
        allowed = {f.name for f in fields(cls)} - {"kind"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown design parameters: {sorted(unknown)}")
        if kind == "constant_correlation" and "n" not in data and "p" in data:
            data["n"] = data["p"] + 1
        return cls(kind, **data)

    @property
    def label(self) -> str:
        """Compact comma-free text form, e.g. ``gaussian n=500 p=2000``."""
        parts = [self.kind]
        for name in ("n", "p", "k", "gamma"):
            value = getattr(self, name)
            if value is not None:
                parts.append(f"{name}={value!r}")
        return " ".join(parts)

    @classmethod
    def from_label(cls, label: str) -> DesignSpec:
        kind, *rest = label.split()
        params = {}
        for item in rest:
            name, _, text = item.partition("=")
            params[name] = float(text) if name == "gamma" else int(text)
        return cls(kind, **params)


class DesignMatrix:
    """An n x p design with unit-norm columns.

    The identity design is stored implicitly; ``values`` materializes it on
    first access. Use :meth:`matvec` and :meth:`rmatvec` in hot loops.
    """

    def __init__(self, values, spec: DesignSpec, seed=None):
        self.spec = spec
        self.seed = seed
        self.n, self.p = spec.shape
        if values is not None:
            values = np.asarray(values, dtype=float)
            if values.shape != (self.n, self.p):
                raise ValueError(f"values have shape {values.shape}, spec implies {(self.n, self.p)}")
        self._values = values

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            self._values = np.eye(self.p)
        return self._values

    @property
    def is_identity(self) -> bool:
        return self.spec.kind == "identity"

    @property
    def column_space(self) -> str | None:
        """What is known about span(X) by construction.

        ``"orthonormal"``: columns are orthonormal. ``"full_row"``: span(X) is
        all of R^n (exactly, or with probability one for Gaussian designs).
        ``None``: nothing is assumed.
        """
        kind = self.spec.kind
        if kind in _ORTHONORMAL:
            return "orthonormal"
        if kind == "basis_concatenation":
            return "full_row"
        if kind == "gaussian" and self.n <= self.p:
            return "full_row"
        return None

    def matvec(self, beta) -> np.ndarray:
        beta = np.asarray(beta, dtype=float)
        if beta.shape != (self.p,):
            raise ValueError(f"coefficient vector has shape {beta.shape}, expected ({self.p},)")
        if self.is_identity:
            return beta.copy()
        return self.values @ beta

    def rmatvec(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape[0] != self.n:
            raise ValueError(f"observation has length {y.shape[0]}, expected {self.n}")
        if self.is_identity:
            return y.copy()
        return self.values.T @ y

    def __repr__(self):
        return f"DesignMatrix({self.spec.label}, seed={self.seed!r})"


def _normalize_columns(values):
    norms = np.linalg.norm(values, axis=0)
    if np.any(norms == 0):
        raise ValueError("design has an all-zero column; resample with another seed")
    values /= norms
    return values


def _orthonormal_columns(rng, n, m):
    q, r = np.linalg.qr(rng.standard_normal((n, m)))
    # sign fix makes Q a deterministic function of the Gaussian draw
    q *= np.where(np.diag(r) < 0, -1.0, 1.0)
    return _normalize_columns(q)


def build_design(spec: DesignSpec, seed=0) -> DesignMatrix:
    """Build the design described by ``spec``.

    ``seed`` may be anything accepted by :func:`numpy.random.default_rng`; it
    is ignored by the deterministic families.
    """
    kind = spec.kind
    n, p = spec.shape
    if kind == "identity":
        return DesignMatrix(None, spec, seed)
    if kind == "balanced_one_way":
        values = np.kron(np.eye(p), np.ones((spec.k, 1))) / math.sqrt(spec.k)
        return DesignMatrix(values, spec, seed)
    if kind == "balanced_one_way_constrained":
        k = spec.k
        blocks = np.kron(np.eye(p), np.ones((k, 1)))
        values = np.vstack([blocks, -np.ones((k, p))]) / math.sqrt(2 * k)
        return DesignMatrix(values, spec, seed)
    if kind == "basis_concatenation":
        values = np.hstack([np.eye(n), hadamard(n).astype(float) / math.sqrt(n)])
        return DesignMatrix(values, spec, seed)

    rng = np.random.default_rng(seed)
    if kind == "random_orthonormal":
        values = _orthonormal_columns(rng, n, p)
    elif kind == "constant_correlation":
        basis = _orthonormal_columns(rng, n, p + 1)
        common, own = basis[:, :1], basis[:, 1:]
        values = math.sqrt(spec.gamma) * common + math.sqrt(1.0 - spec.gamma) * own
        values = _normalize_columns(values)
    elif kind == "gaussian":
        values = _normalize_columns(rng.standard_normal((n, p)))
    else:  # rademacher
        values = rng.integers(0, 2, size=(n, p), dtype=np.int8).astype(float)
        values = _normalize_columns(2.0 * values - 1.0)
    return DesignMatrix(values, spec, seed)


def gram(X: DesignMatrix) -> np.ndarray:
    """Gram matrix ``X^T X``, symmetrized."""
    if X.is_identity:
        return np.eye(X.p)
    c = X.values.T @ X.values
    return 0.5 * (c + c.T)


@dataclass(frozen=True)
class CoherenceProfile:
    gamma_used: float
    max_offdiag: float
    delta_observed: int
    strong_ok: bool
    exceedance_counts: np.ndarray
    strong_bound: float


def coherence_profile(C, gamma: float, delta: float | None = None) -> CoherenceProfile:
    """Summarize membership evidence for the class S_p(gamma, Delta).

    ``delta_observed`` counts, for the worst column j, the k with
    ``|c_jk| > gamma`` (k = j included). The strong-correlation check is
    ``max_offdiag <= 1 - delta`` with ``delta = 1 / log p`` unless given;
    it is reported as satisfied for p <= 2 where that bound is not usable.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"Gram matrix must be square, got shape {C.shape}")
    p = C.shape[0]
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    if p < 2:
        return CoherenceProfile(gamma, 0.0, 1, True, np.ones(p, dtype=int), math.nan)
    absc = np.abs(C)
    counts = np.count_nonzero(absc > gamma, axis=1)
    # the diagonal is 1 up to rounding; count it exactly once
    counts = counts - (np.diag(absc) > gamma) + 1
    offdiag = absc.copy()
    np.fill_diagonal(offdiag, 0.0)
    max_offdiag = float(offdiag.max())
    if delta is None:
        delta = 1.0 / math.log(p) if p > 2 else None
    if delta is None:
        strong_ok, bound = True, math.nan
    else:
        bound = 1.0 - delta
        strong_ok = max_offdiag <= bound
    return CoherenceProfile(
        gamma_used=float(gamma),
        max_offdiag=max_offdiag,
        delta_observed=int(counts.max()),
        strong_ok=bool(strong_ok),
        exceedance_counts=counts.astype(int),
        strong_bound=bound,
    )


def coherence_lower_bound(n: int, p: int) -> float:
    """Smallest achievable coherence ``sqrt((p - n) / (n p))`` for p unit vectors in R^n."""
    if n < 1 or p < n:
        raise ValueError(f"need p >= n >= 1, got n={n}, p={p}")
    return math.sqrt((p - n) / (n * p))


def write_design_csv(X: DesignMatrix, path) -> None:
    """Write ``n,p,variant`` on the first line, then one row per observation."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([X.n, X.p, X.spec.label])
        for row in X.values:
            writer.writerow([format(v, ".17g") for v in row])


def read_design_csv(path) -> DesignMatrix:
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        n_text, p_text, label = next(reader)
        spec = DesignSpec.from_label(label)
        values = np.array([[float(v) for v in row] for row in reader if row])
    n, p = int(n_text), int(p_text)
    if values.shape != (n, p):
        raise ValueError(f"{path}: header says {n}x{p}, body is {values.shape[0]}x{values.shape[1]}")
    return DesignMatrix(values, spec)
