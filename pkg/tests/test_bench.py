import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsedetect.alternatives import amplitude_from_r
from sparsedetect.bench import (
    CSV_COLUMNS,
    CellError,
    ExperimentConfig,
    TestSpec,
    best_empirical_risk,
    monotone_violations,
    results_to_csv,
    run_cell,
    run_grid,
    simulate_cell,
)
from sparsedetect.boundaries import zeta_rescale
from sparsedetect.designs import DesignSpec


def enumerate_risk(null, alt):
    """Exhaustive oracle: every distinct rejection set {stat >= c}, exact arithmetic."""
    candidates = sorted(set(null) | set(alt)) + [math.inf]
    best = None
    for c in candidates:
        risk = Fraction(sum(x >= c for x in null), len(null)) + Fraction(sum(x < c for x in alt), len(alt))
        best = risk if best is None else min(best, risk)
    return best


def small_samples(seed):
    rng = np.random.default_rng(seed)
    pool = rng.integers(0, 6, size=20).astype(float) / 2  # plenty of ties
    n0, n1 = rng.integers(1, 9, size=2)
    return list(rng.choice(pool, n0)), list(rng.choice(pool, n1) + rng.integers(0, 2))


def test_risk_separated():
    est = best_empirical_risk([1, 2], [3, 4])
    assert est.best_risk == 0
    assert est.best_threshold == 2.5


def test_risk_identical():
    est = best_empirical_risk([1, 2], [1, 2])
    assert est.best_risk == 1
    assert est.best_threshold == math.inf


def test_risk_interleaved():
    assert enumerate_risk([1, 3], [2, 4]) == Fraction(1, 2)
    est = best_empirical_risk([1, 3], [2, 4])
    assert est.best_risk == 0.5
    assert est.best_threshold == 3.5  # largest of the tied thresholds 1.5 and 3.5


def test_risk_reversed():
    # alternative below the null: nothing beats the trivial risk 1
    assert best_empirical_risk([5, 6], [1, 2]).best_risk == 1


def test_risk_rejects_empty_and_nan():
    with pytest.raises(ValueError):
        best_empirical_risk([], [1.0])
    with pytest.raises(ValueError):
        best_empirical_risk([np.nan], [1.0])


@settings(max_examples=300, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_risk_matches_enumeration(seed):
    null, alt = small_samples(seed)
    est = best_empirical_risk(null, alt)
    assert est.best_risk == float(enumerate_risk(null, alt))
    assert 0 <= est.best_risk <= 1


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), extra=st.lists(st.floats(-10, 10), min_size=1, max_size=5))
def test_extra_thresholds_never_help(seed, extra):
    null, alt = small_samples(seed)
    est = best_empirical_risk(null, alt)
    for c in extra:
        risk = np.mean(np.asarray(null) >= c) + np.mean(np.asarray(alt) < c)
        assert risk >= est.best_risk - 1e-12


def test_risk_estimate_fields():
    est = best_empirical_risk(np.arange(10.0), np.arange(10.0) + 5)
    assert est.best_risk == pytest.approx(0.5)
    assert est.standard_error == pytest.approx(math.sqrt(0.5 * 1.5 / 10))
    assert len(est.null_quantiles) == 5 and est.null_quantiles[2] == pytest.approx(4.5)


# -- configs and cells -----------------------------------------------------------------


def test_test_spec_parsing():
    assert TestSpec.parse("hc_disc").s_policy == "adaptive-one"
    assert TestSpec.parse("HC_DISC:theorem").name == "HC_DISC:theorem"
    assert TestSpec.parse("MAX").name == "MAX"
    with pytest.raises(ValueError):
        TestSpec("MAX", "theorem")
    with pytest.raises(ValueError):
        TestSpec.parse("HC_DISC:bogus")
    with pytest.raises(ValueError):
        TestSpec.parse("KS")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(trials=0),
        dict(alpha_grid=()),
        dict(alpha_grid=(1.5,)),
        dict(signal_grid=(-1.0,)),
        dict(model="MIXED"),
        dict(tests=("HC_DISC:theorem",), alpha_grid=(0.4,)),
        dict(zeta_rescale=True),
        dict(sigma_known=False, sigma=0.0),
    ],
)
def test_invalid_configs(kwargs):
    base = dict(design=DesignSpec.identity(100), alpha_grid=(0.7,), signal_grid=(0.5,), trials=3)
    base.update(kwargs)
    with pytest.raises(ValueError):
        ExperimentConfig(**base)


def test_config_dict_roundtrip():
    cfg = ExperimentConfig(
        DesignSpec.constant_correlation(20, 0.3), (0.6, 0.8), (0.1,), 4, tests=("MAX", "HC_DISC:sqrt2"),
        zeta_rescale=True, sigma=2.0, sigma_known=False, master_seed=9,
    )
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_noiseless_max_cell():
    cfg = ExperimentConfig(DesignSpec.identity(50), (0.8,), (0.7,), 1, sigma=0.0, tests=("MAX",))
    null, alt = run_cell(cfg, 0.8, 0.7, "MAX")
    assert null.tolist() == [0.0]
    assert alt[0] == pytest.approx(amplitude_from_r(50, 0.7), rel=1e-15)


def test_zeta_amplitude():
    cfg = ExperimentConfig(
        DesignSpec.constant_correlation(30, 0.75), (0.8,), (0.4,), 1, tests=("MAX",), zeta_rescale=True
    )
    assert cfg.alternative(0.8, 0.4).amplitude == pytest.approx(zeta_rescale(amplitude_from_r(30, 0.4), 0.75))


def test_cell_determinism_and_threads():
    cfg = ExperimentConfig(
        DesignSpec.gaussian(40, 120), (0.7,), (0.5,), 3, tests=("ANOVA", "MAX", "HC_CONT", "HC_DISC")
    )
    first = simulate_cell(cfg, 0.7, 0.5)
    again = simulate_cell(cfg, 0.7, 0.5)
    threaded = simulate_cell(cfg, 0.7, 0.5, threads=3)
    for name in first:
        for a, b, c in zip(first[name], again[name], threaded[name]):
            assert a.tobytes() == b.tobytes() == c.tobytes()


def test_run_cell_matches_simulate_cell():
    cfg = ExperimentConfig(DesignSpec.rademacher(30, 60), (0.6,), (0.3,), 4, tests=("MAX", "HC_DISC"))
    both = simulate_cell(cfg, 0.6, 0.3)
    null, alt = run_cell(cfg, 0.6, 0.3, TestSpec("HC_DISC"))
    assert null.tobytes() == both["HC_DISC:adaptive-one"][0].tobytes()
    assert alt.tobytes() == both["HC_DISC:adaptive-one"][1].tobytes()


def test_fixed_design_mode():
    cfg = ExperimentConfig(
        DesignSpec.gaussian(20, 50), (0.6,), (0.0,), 5, tests=("ANOVA",), fresh_design_per_trial=False
    )
    null, alt = run_cell(cfg, 0.6, 0.0, "ANOVA")
    assert null.shape == alt.shape == (5,)


def test_unknown_sigma_scales_out():
    base = dict(design=DesignSpec.identity(200), alpha_grid=(0.7,), signal_grid=(0.8,), trials=5, tests=("MAX",))
    a = run_cell(ExperimentConfig(**base, sigma=1.0, sigma_known=False), 0.7, 0.8, "MAX")
    b = run_cell(ExperimentConfig(**base, sigma=3.0, sigma_known=False), 0.7, 0.8, "MAX")
    np.testing.assert_allclose(a[0], b[0], rtol=1e-12)
    np.testing.assert_allclose(a[1], b[1], rtol=1e-12)


def test_cell_error_names_trial(monkeypatch):
    import sparsedetect.bench as bench

    def boom(*args, **kwargs):
        raise FloatingPointError("bad")

    monkeypatch.setattr(bench, "max_abs", boom)
    cfg = ExperimentConfig(DesignSpec.identity(10), (0.7,), (0.5,), 2, tests=("MAX",))
    with pytest.raises(CellError, match="trial 0"):
        run_cell(cfg, 0.7, 0.5, "MAX")


# -- grids ---------------------------------------------------------------------------


def test_grid_cardinality_and_order():
    cfg = ExperimentConfig(DesignSpec.identity(100), (0.6, 0.8), (0.1, 0.5, 1.0), 4, tests=("MAX", "ANOVA"))
    out = run_grid(cfg)
    assert len(out) == 12
    assert [(e.alpha, e.signal, e.test) for e in out[:3]] == [(0.6, 0.1, "MAX"), (0.6, 0.1, "ANOVA"), (0.6, 0.5, "MAX")]
    one = run_grid(ExperimentConfig(DesignSpec.identity(100), (0.6,), (0.1,), 4, tests=("MAX",)))
    assert len(one) == 1


def test_grid_csv_deterministic():
    cfg = ExperimentConfig(DesignSpec.gaussian(30, 90), (0.6,), (0.2, 0.8), 6, tests=("MAX", "HC_DISC"))
    a = results_to_csv(run_grid(cfg), cfg)
    b = results_to_csv(run_grid(cfg, threads=2), cfg)
    assert a == b
    header, first = a.splitlines()[:2]
    assert tuple(header.split(",")) == CSV_COLUMNS
    row = dict(zip(CSV_COLUMNS, first.split(",")))
    assert row["design"] == "gaussian" and row["variant-params"] == "n=30 p=90"
    assert row["test"] == "MAX" and row["s_policy"] == "" and row["trials"] == "6"
    assert row["S"] == str(round(90**0.4))


def test_null_self_consistency():
    trials = 100
    cfg = ExperimentConfig(
        DesignSpec.gaussian(50, 200), (0.7,), (0.0,), trials, tests=("ANOVA", "MAX", "HC_CONT", "HC_DISC")
    )
    for est in run_grid(cfg):
        assert est.best_risk >= 1 - 2 / math.sqrt(trials)
        assert est.best_risk <= 1


def test_monotone_power_on_grid():
    cfg = ExperimentConfig(
        DesignSpec.identity(1000), (0.6, 0.75), (0.05, 0.3, 1.0, 2.0), 60, tests=("ANOVA", "MAX", "HC_DISC")
    )
    out = run_grid(cfg)
    assert monotone_violations(out) == []
    for e in out:
        assert 0 <= e.best_risk <= 1


def test_monotone_violations_detects():
    from sparsedetect.bench import RiskEstimate

    fake = [
        RiskEstimate(0.2, 0.0, 100, 0.01, test="MAX", alpha=0.7, signal=0.1),
        RiskEstimate(0.9, 0.0, 100, 0.01, test="MAX", alpha=0.7, signal=0.5),
    ]
    assert len(monotone_violations(fake)) == 1
