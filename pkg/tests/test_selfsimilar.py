"""Homogeneous data, profiles, and the singular steady state oracle."""

import numpy as np
import pytest

from hhlab.exponents import ModelParams, SpaceIndex
from hhlab.grid import RadialGrid
from hhlab.selfsimilar import (
    critical_decay,
    distributional_pairings,
    homogeneous_data,
    invariance_deviation,
    profile_extract,
    singular_steady_state,
    steady_state_residual,
)
from hhlab.solver import SolverConfig, picard_iterate


def test_homogeneous_data_values(grid3):
    phi = homogeneous_data(1.0, 1.0, grid3)
    assert np.allclose(phi.values, grid3.nodes**-1.0)
    assert phi.exact_power is not None


def test_homogeneous_data_zero(grid3):
    phi = homogeneous_data(0.0, 1.0, grid3)
    assert np.all(phi.values == 0)


def test_homogeneous_data_rejects_sigma_geq_d(grid3):
    with pytest.raises(ValueError):
        homogeneous_data(1.0, 3.0, grid3)


def test_homogeneous_data_dilation_invariance(grid3):
    # lam^sigma Phi_sigma(lam x) = Phi_sigma(x) exactly
    phi = homogeneous_data(1.0, 1.2, grid3)
    dl = phi.dilate(2.0, 1.2)
    assert np.allclose(dl.values, phi.values, rtol=1e-12)


def test_profile_extract_linear_flow_exact_scaling(grid3, cache):
    # pure heat flow of Phi_sigma: the rescaled profile is t-independent
    sigma = 1.2
    phi = homogeneous_data(1.0, sigma, grid3)
    params = ModelParams(3, 0, 3, a=0)
    cfg = SolverConfig(T=16.0, n_time=24, kato_index=SpaceIndex(0, 6))
    traj = picard_iterate(phi, params, cfg, cache=cache)
    p1 = profile_extract(traj, float(traj.times[-1]), sigma)
    p4 = profile_extract(traj, float(traj.times[-1]) / 4.0, sigma)
    dev = invariance_deviation(p1, p4)
    assert dev < 1e-3


def test_profile_extract_requires_recorded_time(selfsimilar_traj):
    with pytest.raises(ValueError):
        profile_extract(selfsimilar_traj, 1.2345678, 1.0)


def test_invariance_deviation_identity(selfsimilar_traj):
    p = profile_extract(selfsimilar_traj, float(selfsimilar_traj.times[-1]), 1.0)
    assert invariance_deviation(p, p) == 0.0


def test_invariance_deviation_scaling(selfsimilar_traj):
    from dataclasses import replace

    p = profile_extract(selfsimilar_traj, float(selfsimilar_traj.times[-1]), 1.0)
    q = replace(p, profile_values=1.25 * p.profile_values)
    assert invariance_deviation(q, p) == pytest.approx(0.25 / 1.25, rel=1e-6)


def test_selfsimilar_invariance_certificate(selfsimilar_traj):
    sigma_c = critical_decay(selfsimilar_traj.params)
    t_hi = float(selfsimilar_traj.times[-1])
    t_lo = t_hi / 16.0
    i_lo = int(np.argmin(np.abs(selfsimilar_traj.times - t_lo)))
    p_hi = profile_extract(selfsimilar_traj, t_hi, sigma_c)
    p_lo = profile_extract(selfsimilar_traj, float(selfsimilar_traj.times[i_lo]), sigma_c)
    assert invariance_deviation(p_lo, p_hi) < 0.02


def test_selfsimilar_sign_flip(grid3, params_fujita3, cache):
    cfg = SolverConfig(T=4.0, n_time=24, kato_index=SpaceIndex(0, 6), picard_tol=1e-7)
    up = picard_iterate(homogeneous_data(+0.05, 1.0, grid3), params_fujita3, cfg, cache=cache)
    dn = picard_iterate(homogeneous_data(-0.05, 1.0, grid3), params_fujita3, cfg, cache=cache)
    assert np.allclose(up.snapshots[-1].values, -dn.snapshots[-1].values)


def test_distributional_initial_trace(selfsimilar_traj):
    # u(t) -> data against smooth bumps as t -> 0
    data = selfsimilar_traj.initial_data
    target = distributional_pairings(data)
    early = distributional_pairings(selfsimilar_traj.snapshots[0])
    for a, b in zip(early, target):
        assert a == pytest.approx(b, rel=5e-3)


# --- singular steady state ---------------------------------------------------


def test_singular_steady_state_d3_alpha4():
    st = singular_steady_state(ModelParams(3, 0, 4, a=1))
    assert st.coefficient == pytest.approx((2.0 / 9.0) ** (1.0 / 3.0), rel=1e-14)
    assert st.exponent == pytest.approx(2.0 / 3.0)


def test_singular_steady_state_d4_alpha3():
    st = singular_steady_state(ModelParams(4, 0, 3, a=1))
    assert st.coefficient == pytest.approx(1.0)
    assert st.exponent == pytest.approx(1.0)


def test_singular_steady_state_boundary_rejected():
    with pytest.raises(ValueError):
        singular_steady_state(ModelParams(3, 0, 3, a=1))  # alpha = (d+gamma)/(d-2)
    with pytest.raises(ValueError):
        singular_steady_state(ModelParams(3, 0, 4, a=-1))  # wrong sign
    with pytest.raises(ValueError):
        singular_steady_state(ModelParams(2, 0, 4, a=1))  # d < 3


def test_steady_state_residual_small(grid3):
    resid = steady_state_residual(ModelParams(3, 0, 4, a=1), grid3)
    assert resid < 1e-6


def test_steady_state_residual_wrong_coefficient(grid3):
    params = ModelParams(3, 0, 4, a=1)
    L = singular_steady_state(params).coefficient
    bad = steady_state_residual(params, grid3, coefficient=2.0 * L)
    assert bad > 0.5  # not remotely a solution


def test_steady_state_residual_fourth_order():
    # halving the grid step shrinks the residual by at least 8x
    params = ModelParams(3, 0, 4, a=1)
    # measure away from the exact-power cancellation: perturb the exponent
    # via a wrong coefficient on coarse vs fine grids of a generic profile
    coarse = RadialGrid.log(3, 1e-2, 1e2, 128)
    fine = RadialGrid.log(3, 1e-2, 1e2, 256)
    from hhlab.selfsimilar import radial_laplacian_log

    def residual_of_profile(grid):
        r = grid.nodes
        u = np.exp(-r)  # generic smooth profile
        lap = radial_laplacian_log(u, r, 3)
        exact = np.exp(-r) * (1.0 - 2.0 / r)
        keep = (r >= 1.0) & (r <= 10.0) & np.isfinite(lap)
        return np.max(np.abs(lap[keep] - exact[keep]))

    assert residual_of_profile(coarse) / residual_of_profile(fine) >= 8.0
