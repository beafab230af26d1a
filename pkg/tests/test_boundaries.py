import math

import mpmath
import numpy as np
import pytest

from sparsedetect.alternatives import AlternativeSpec, sample_sfem
from sparsedetect.boundaries import (
    anova_power_scaling,
    boundary_point,
    boundary_table,
    rand_edge_flag,
    rho_max,
    rho_rand,
    rho_star,
    zeta_rescale,
)
from sparsedetect.designs import DesignSpec, build_design

GRID = np.round(np.arange(0.501, 1.0000001, 1e-3), 6)


def test_rho_star_values():
    assert rho_star(0.75) == pytest.approx(0.25, abs=1e-12)
    assert rho_star(0.6) == pytest.approx(0.1, abs=1e-12)
    assert rho_star(1.0) == 1.0


def test_rho_max_values():
    assert rho_max(0.75) == pytest.approx(0.25, abs=1e-12)
    assert rho_max(1.0) == 1.0
    with mpmath.workdps(40):
        oracle = (1 - mpmath.sqrt(mpmath.mpf("0.4"))) ** 2
    assert rho_max(0.6) == pytest.approx(float(oracle), rel=1e-13)
    assert rho_max(0.6) == pytest.approx(0.135089, abs=1e-6)


def test_rho_rand_values():
    assert rho_rand(0.8) == pytest.approx(2.0, abs=1e-12)
    assert rho_rand(0.9) == pytest.approx(3.0, abs=1e-12)
    assert rho_rand(0.5) == 1.0 and rand_edge_flag(0.5) == "domain-edge"
    assert math.isinf(rho_rand(1.0)) and rand_edge_flag(1.0) == "infinite"
    assert rand_edge_flag(0.7) is None
    assert boundary_point(1.0).rand_flag == "infinite"


@pytest.mark.parametrize("fn", [rho_star, rho_max])
@pytest.mark.parametrize("alpha", [0.5, 0.2, 1.01, -1])
def test_domain_errors(fn, alpha):
    with pytest.raises(ValueError):
        fn(alpha)


def test_rho_rand_domain():
    with pytest.raises(ValueError):
        rho_rand(0.4)


def test_ordering_on_grid():
    for a in GRID:
        s, m = rho_star(a), rho_max(a)
        assert s <= m + 1e-15
        if a >= 0.75:
            assert s == m
        else:
            assert s < m


def test_continuity_at_three_quarters():
    h = 1e-6
    assert abs(rho_star(0.75 - h) - rho_star(0.75 + h)) < 1e-5


def test_monotone_curves():
    for fn in (rho_star, rho_max):
        assert np.all(np.diff([fn(a) for a in GRID]) >= 0)
    assert np.all(np.diff([rho_rand(a) for a in GRID[:-1]]) >= 0)


def test_boundary_table():
    rows = boundary_table(0.6, 0.9, 0.1)
    assert [r.alpha for r in rows] == [0.6, 0.7, 0.8, 0.9]
    assert rows[0].rho_star == pytest.approx(0.1)
    assert rows[2].rho_star == pytest.approx((1 - math.sqrt(0.2)) ** 2)
    single = boundary_table(0.75, 0.75)
    assert len(single) == 1 and single[0].rho_rand == pytest.approx(math.sqrt(3))
    with pytest.raises(ValueError):
        boundary_table(0.6, 0.9, 0.0)


def test_anova_power_scaling():
    X = build_design(DesignSpec.identity(100))
    assert anova_power_scaling(X, np.zeros(100)) == 0
    beta = np.zeros(100)
    beta[:10] = 2.0
    assert anova_power_scaling(X, beta, 100, 100) == pytest.approx(4.0)
    beta[:10] = 1.0
    assert anova_power_scaling(X, beta) == pytest.approx(10 / math.sqrt(100))
    inst = sample_sfem(AlternativeSpec.sfem(100, 0.5, amplitude=2.0), 0)
    assert anova_power_scaling(X, inst) == pytest.approx(4.0)


def test_zeta_rescale():
    assert zeta_rescale(1.3, 0.0) == 1.3
    assert zeta_rescale(1.0, 0.5) == pytest.approx(math.sqrt(2))
    assert zeta_rescale(2.0, 0.75) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        zeta_rescale(1.0, 1.0)
