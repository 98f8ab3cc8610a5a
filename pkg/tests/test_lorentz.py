"""Distribution functions, rearrangements, and Lorentz quasi-norms."""

import math

import numpy as np
import pytest

from hhlab.exponents import SpaceIndex
from hhlab.fields import RadialField
from hhlab.grid import RadialGrid, ball_volume
from hhlab.lorentz import (
    DivergentNormError,
    decreasing_rearrangement,
    distribution_function,
    embedding_check,
    holder_product_check,
    lorentz_quasi_norm,
    power_law_norm,
    weighted_lebesgue_norm,
)


@pytest.fixture(scope="module")
def ball_grid1():
    # d=1 grid whose support is exactly [0, 1], with an origin cell
    edges = np.concatenate(([0.0], np.geomspace(1e-4, 1.0, 257)))
    return RadialGrid.from_edges(1, edges)


def indicator(grid):
    return RadialField(grid, np.ones(grid.n))


def test_distribution_indicator(ball_grid1):
    f = indicator(ball_grid1)
    assert distribution_function(f, 0.0, 0.5) == 2.0
    assert distribution_function(f, 0.0, 2.0) == 0.0


def test_distribution_tends_to_zero(ball_grid1):
    f = indicator(ball_grid1)
    for lam in (1e3, 1e6, 1e12):
        assert distribution_function(f, 0.0, lam) == 0.0


def test_distribution_sqrt_singularity():
    # f = r^(-1/2) on [0,1], d=1: {f > 2} = {r < 1/4}, measure 1/2;
    # dyadic edges make the level boundary exact
    edges = np.concatenate(([0.0], 2.0 ** np.arange(-20, 1, dtype=float)))
    grid = RadialGrid.from_edges(1, edges)
    f = RadialField.power(grid, 1.0, 0.5, support=1.0)
    assert distribution_function(f, 0.0, 2.0) == pytest.approx(0.5, rel=1e-14)
    # the same through the step path (no exact tag)
    f_step = RadialField(grid, np.where(grid.nodes <= 1, grid.nodes**-0.5, 0.0))
    assert distribution_function(f_step, 0.0, 2.0) == pytest.approx(0.5, rel=1e-12)


def test_rearrangement_indicator(ball_grid1):
    f = indicator(ball_grid1)
    re = decreasing_rearrangement(f)
    assert re.levels.tolist() == [1.0]
    assert re.breakpoints.tolist() == [2.0]
    assert re(1.0) == 1.0 and re(3.0) == 0.0


def test_rearrangement_two_level():
    # {2 on measure 1, 1 on measure 3} -> breakpoints (1, 4), levels (2, 1)
    grid = RadialGrid.from_edges(1, [0.0, 0.5, 2.0])
    f = RadialField(grid, np.array([2.0, 1.0]))
    re = decreasing_rearrangement(f)
    assert np.allclose(re.breakpoints, [1.0, 4.0])
    assert np.allclose(re.levels, [2.0, 1.0])


def test_rearrangement_positive_homogeneity(ball_grid1):
    rng = np.random.default_rng(3)
    f = RadialField(ball_grid1, rng.uniform(0.1, 2.0, ball_grid1.n))
    re1 = decreasing_rearrangement(f)
    re2 = decreasing_rearrangement(f.scale(2.5))
    assert np.allclose(re2.levels, 2.5 * re1.levels)
    assert np.allclose(re2.breakpoints, re1.breakpoints)


def test_rearrangement_preserves_measure(ball_grid1):
    rng = np.random.default_rng(5)
    f = RadialField(ball_grid1, rng.uniform(0.0, 3.0, ball_grid1.n))
    re = decreasing_rearrangement(f)
    gaps = np.diff(np.concatenate(([0.0], re.breakpoints)))
    for lam in (0.1, 0.7, 1.5, 2.9):
        step_measure = float(np.sum(gaps[re.levels > lam]))
        assert step_measure == pytest.approx(distribution_function(f, 0.0, lam), rel=1e-12)


def test_weak_norm_indicator(ball_grid1):
    f = indicator(ball_grid1)
    assert lorentz_quasi_norm(f, SpaceIndex(0, 2)) == pytest.approx(math.sqrt(2.0), rel=1e-14)


def test_weak_norm_sqrt_singularity_exact(ball_grid1):
    # t^(1/2) f*(t) is identically sqrt(2) for f = r^(-1/2) 1_{r<=1}
    f = RadialField.power(ball_grid1, 1.0, 0.5, support=1.0)
    assert lorentz_quasi_norm(f, SpaceIndex(0, 2)) == pytest.approx(math.sqrt(2.0), rel=1e-14)


def test_lorentz_qq_matches_lebesgue_quadrature(grid3):
    rng = np.random.default_rng(0)
    f = RadialField(grid3, rng.uniform(0.0, 1.0, grid3.n))
    for s, q in [(0.0, 2.0), (-0.5, 3.0), (1.0, 1.5), (0.25, 4.0)]:
        a = lorentz_quasi_norm(f, SpaceIndex(s, q, q))
        b = weighted_lebesgue_norm(f, s, q)
        assert a == pytest.approx(b, rel=1e-8)


def test_positive_homogeneity_of_norm(grid3):
    rng = np.random.default_rng(1)
    f = RadialField(grid3, rng.uniform(0.0, 1.0, grid3.n))
    for idx in (SpaceIndex(0, 2), SpaceIndex(0.5, 3, 2), SpaceIndex(0, math.inf)):
        assert lorentz_quasi_norm(f.scale(3.25), idx) == pytest.approx(
            3.25 * lorentz_quasi_norm(f, idx), rel=1e-12
        )


def test_critical_power_norm_closed_form(grid3):
    # || r^-1 ||_{L^{3,inf}} = v_3^(1/3) in d = 3
    phi = RadialField.power(grid3, 1.0, 1.0)
    v3 = ball_volume(3)
    assert lorentz_quasi_norm(phi, SpaceIndex(0, 3)) == pytest.approx(v3 ** (1 / 3), rel=1e-14)
    # weighted variant: s = -1/2 shifts the critical q to d/(sigma-s) = 2
    assert lorentz_quasi_norm(phi, SpaceIndex(-0.5, 2)) == pytest.approx(v3 ** (1 / 2), rel=1e-14)


def test_power_norm_divergences(grid3):
    phi = RadialField.power(grid3, 1.0, 1.0)
    with pytest.raises(DivergentNormError):
        lorentz_quasi_norm(phi, SpaceIndex(0, 6))  # too singular at the origin... tail too fat
    with pytest.raises(DivergentNormError):
        lorentz_quasi_norm(phi, SpaceIndex(0, math.inf))  # unbounded at origin
    with pytest.raises(DivergentNormError):
        lorentz_quasi_norm(phi, SpaceIndex(0, 3, 3))  # critical power only in weak space


def test_truncated_power_strong_norm_matches_quadrature():
    # closed form against direct quadrature for a supported power law
    d, a, p, R = 3, 1.3, 0.8, 2.0
    idx = SpaceIndex(0.25, 3, 2)
    val = power_law_norm(a, p, R, d, idx)
    from scipy import integrate

    s, q, r = 0.25, 3.0, 2.0

    def dfun(lam):
        # measure of {r <= R : a r^(s-p) > lam}
        rr = min(R, (a / lam) ** (1.0 / (p - s)))
        return ball_volume(d, rr)

    top = a * 1e-9 ** (s - p)
    integral, _ = integrate.quad(lambda lam: q * lam ** (r - 1) * dfun(lam) ** (r / q), 0, a * R ** (s - p), limit=400)
    integral += integrate.quad(lambda lam: q * lam ** (r - 1) * dfun(lam) ** (r / q), a * R ** (s - p), np.inf, limit=400)[0]
    assert val == pytest.approx(integral ** (1 / r), rel=1e-7)


def test_dilation_law(grid3):
    # || f_lam ||_{L^{q,r}_l} = lam^(e - l - d/q) || f ||, e the amplitude power
    sigma_c = 1.0  # (2+gamma)/(alpha-1) at gamma=0, alpha=3
    idx = SpaceIndex(0.2, 4, math.inf)
    # analytic path on a tagged truncated power law
    f = RadialField.power(grid3, 0.7, 0.5, support=50.0)
    base = lorentz_quasi_norm(f, idx)
    for lam in (2.0, 4.0):
        expected = lam ** (sigma_c - 0.2 - 3.0 / 4.0) * base
        assert lorentz_quasi_norm(f.dilate(lam, sigma_c), idx) == pytest.approx(expected, rel=1e-10)
    # interpolation path on a smooth field without tags
    g = RadialField(grid3.__class__(3, grid3.edges), RadialField.gaussian(grid3, 1.0).values)
    base_g = lorentz_quasi_norm(g, idx)
    for lam in (2.0, 4.0):
        expected = lam ** (sigma_c - 0.2 - 3.0 / 4.0) * base_g
        got = lorentz_quasi_norm(g.dilate(lam, sigma_c), idx)
        assert got == pytest.approx(expected, rel=0.01)


def test_holder_product_randomized(grid3):
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(3):
        f = RadialField(grid3, rng.uniform(0.0, 1.0, grid3.n))
        g = RadialField(grid3, rng.uniform(0.0, 1.0, grid3.n))
        rep = holder_product_check(
            f, g, SpaceIndex(0, 1, 1), SpaceIndex(0, 2, 2), SpaceIndex(0, 2, 2)
        )
        assert rep.lhs <= 4.0 * rep.rhs
        worst = max(worst, rep.constant)
    assert worst <= 4.0


def test_holder_zero_factor(grid3):
    z = RadialField.zero(grid3)
    f = RadialField(grid3, np.ones(grid3.n))
    rep = holder_product_check(z, f, SpaceIndex(0, 2), SpaceIndex(0, 4), SpaceIndex(0, 4))
    assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.trivial


def test_holder_sup_factor_reduces(grid3):
    # g = 1 with q2 = inf: ||fg|| = ||f||, so C = 1 exactly
    rng = np.random.default_rng(9)
    f = RadialField(grid3, rng.uniform(0.0, 1.0, grid3.n))
    g = RadialField(grid3, np.ones(grid3.n))
    rep = holder_product_check(f, g, SpaceIndex(0, 2, 2), SpaceIndex(0, 2, 2), SpaceIndex(0, math.inf))
    assert rep.constant == pytest.approx(1.0, rel=1e-12)


def test_holder_hypothesis_rejected(grid3):
    f = RadialField(grid3, np.ones(grid3.n))
    with pytest.raises(ValueError):
        holder_product_check(f, f, SpaceIndex(0, 2), SpaceIndex(0, 3), SpaceIndex(0, 3))


def test_embedding_single_annulus_closed_form():
    # indicator of the annulus [a, b] in d = 3: both norms in closed form
    grid = RadialGrid.log(3, 1e-2, 1e2, 400)
    a_r, b_r = grid.edges[100], grid.edges[300]
    vals = np.where((grid.nodes >= a_r) & (grid.nodes <= b_r), 1.0, 0.0)
    f = RadialField(grid, vals)
    idx1 = SpaceIndex(0, 2, 1)
    with pytest.raises(ValueError):
        # scaling sums differ: -1.5/3 + 1/4 != 1/2
        embedding_check(f, idx1, SpaceIndex(-1.5, 4, 2))
    idx2 = SpaceIndex(-0.75, 4 / 3, 2)  # -0.25 + 3/4 = 1/2 matches idx1
    rep = embedding_check(f, idx1, idx2)
    assert 0 < rep.constant < 10.0
    measure = ball_volume(3, b_r) - ball_volume(3, a_r)
    # L^{2,1} norm of an indicator: int_0^m t^(1/2) dt/t = 2 sqrt(m)
    assert rep.rhs == pytest.approx(2.0 * math.sqrt(measure), rel=1e-10)


def test_embedding_zero_field(grid3):
    z = RadialField.zero(grid3)
    rep = embedding_check(z, SpaceIndex(0, 2, 1), SpaceIndex(0, 2, 2))
    assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.trivial


def test_embedding_randomized(grid3):
    rng = np.random.default_rng(12)
    for _ in range(3):
        f = RadialField(grid3, rng.uniform(0.0, 1.0, grid3.n))
        rep = embedding_check(f, SpaceIndex(0, 2, 1), SpaceIndex(-0.75, 4 / 3, 2))
        assert 0 < rep.constant < 10.0
