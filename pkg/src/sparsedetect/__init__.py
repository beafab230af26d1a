"""Global testing under sparse alternatives in the linear model y = X beta + z."""

from .alternatives import (
    AlternativeSpec,
    SignalInstance,
    amplitude_from_r,
    sample_sfem,
    sample_signal,
    sample_srem,
    sparsity_from_alpha,
    synthesize_observation,
)
from .bench import ExperimentConfig, RiskEstimate, TestSpec, best_empirical_risk, run_cell, run_grid
from .boundaries import anova_power_scaling, boundary_point, boundary_table, rho_max, rho_rand, rho_star, zeta_rescale
from .designs import DesignMatrix, DesignSpec, build_design, coherence_lower_bound, coherence_profile, gram
from .stats import (
    anova_stat,
    estimate_sigma,
    gaussian_survival,
    hc_continuous,
    hc_discretized,
    hc_grid_start,
    max_stat,
)

__version__ = "0.1.0"
