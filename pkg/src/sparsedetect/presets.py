"""Built-in desk-scale versions of the two risk-versus-r figure grids.

``fig1-desk`` scales the p = 10,000 panels down to p = 2,000: identity design,
Gaussian design with n = p/5 and Gaussian design with n = p/20. ``fig2-desk``
scales the p = 100,000 panels down to p = 20,000 with n = p/20 and n = p/100.
Both run ANOVA, continuous higher criticism and the Max test on fixed effects,
with a fresh design per trial.
"""

from __future__ import annotations

from dataclasses import replace

from .bench import ExperimentConfig
from .designs import DesignSpec

_TESTS = ("ANOVA", "HC_CONT", "MAX")


def _panels(p, ns, alphas, signals, trials):
    designs = [DesignSpec.identity(p)] + [DesignSpec.gaussian(n, p) for n in ns]
    return [
        ExperimentConfig(design=d, alpha_grid=alphas, signal_grid=signals, trials=trials, tests=_TESTS)
        for d in designs
    ]


PRESETS = {
    "fig1-desk": lambda: _panels(2000, (400, 100), (0.4, 0.6, 0.75), (0.05, 0.1, 0.2, 0.4, 0.8, 1.6), 100),
    "fig2-desk": lambda: _panels(20000, (1000, 200), (0.6, 0.75), (0.1, 0.2, 0.4, 0.8, 1.6), 50),
}


def preset_configs(name: str, seed: int = 0, trials: int | None = None) -> list[ExperimentConfig]:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    configs = PRESETS[name]()
    return [replace(c, master_seed=seed, trials=trials or c.trials) for c in configs]


def cell_count(configs) -> int:
    return sum(len(c.alpha_grid) * len(c.signal_grid) * len(c.tests) for c in configs)
