"""Duhamel solver: nonlinearity, history integral, Picard iteration."""

import math

import numpy as np
import pytest

from hhlab.exponents import ModelParams, SpaceIndex
from hhlab.fields import RadialField
from hhlab.grid import RadialGrid
from hhlab.lorentz import lorentz_quasi_norm
from hhlab.selfsimilar import radial_laplacian_log, singular_steady_state
from hhlab.solver import (
    SolverConfig,
    TimeMesh,
    Trajectory,
    blowup_monitor,
    duhamel_integral,
    kato_norm,
    nonlinearity,
    picard_iterate,
    regularity_upgrade_probe,
    solve_system,
)


def test_time_mesh_dyadic_shift():
    mesh = TimeMesh.build(16.0, 56, 3.0)
    k = mesh.k
    assert np.allclose(mesh.times[k:] / 2.0, mesh.times[:-k])
    assert mesh.times[-1] == 16.0
    # depth matches the graded-mesh convention T * n^(-g)
    assert mesh.times[0] == pytest.approx(16.0 * 56.0**-3.0, rel=0.3)


def test_nonlinearity_zero(grid3, params_fujita3):
    z = RadialField.zero(grid3)
    assert np.all(nonlinearity(z, params_fujita3).values == 0)


def test_nonlinearity_modulus_invariance(grid3):
    # purely imaginary u = i v with alpha = 3 maps to i a |x|^gamma v^3
    params = ModelParams(3, 0, 3, a=-1)
    v = RadialField.gaussian(grid3, 1.0)
    iu = v.scale(1j)
    out = nonlinearity(iu, params)
    expected = -1.0 * v.values**3  # a = -1
    assert np.allclose(out.values.imag, expected)
    assert np.allclose(out.values.real, 0.0)


def test_nonlinearity_matches_laplacian_on_steady_state(grid3):
    # -Lap U = |x|^gamma U^alpha for the singular steady state
    params = ModelParams(3, 0, 4, a=1)
    U = singular_steady_state(params).field(grid3)
    nl = nonlinearity(U, params)
    lap = radial_laplacian_log(U.values.real, grid3.nodes, 3)
    ann = (grid3.nodes >= 0.1) & (grid3.nodes <= 10.0) & np.isfinite(lap)
    rel = np.abs(nl.values[ann] + lap[ann]) / np.abs(nl.values[ann])
    assert np.max(rel) < 1e-4


def test_nonlinearity_homogeneity(grid3, params_fujita3):
    u = RadialField.gaussian(grid3, 0.7)
    a = nonlinearity(u.scale(2.0), params_fujita3)
    b = nonlinearity(u, params_fujita3)
    assert np.allclose(a.values, 2.0**3 * b.values)


@pytest.fixture(scope="module")
def steady_setup(cache):
    params = ModelParams(3, 0, 4, a=1)
    grid = RadialGrid.log(3, 1e-3, 1e3, 512)
    cfg = SolverConfig(T=0.25, n_time=40, kato_index=SpaceIndex(0, 8))
    mesh = TimeMesh.build(cfg.T, cfg.n_time, cfg.grading)
    U = singular_steady_state(params).field(grid)
    hist = Trajectory(
        params=params, config=cfg, times=mesh.times.copy(),
        snapshots=[U] * mesh.n, recorded_norms={}, initial_data=U,
    )
    return params, grid, cfg, mesh, U, hist


def test_duhamel_zero_history(grid3, params_fujita3, solver_config, cache):
    mesh = TimeMesh.build(solver_config.T, solver_config.n_time, solver_config.grading)
    zero = RadialField.zero(grid3)
    hist = Trajectory(
        params=params_fujita3, config=solver_config, times=mesh.times.copy(),
        snapshots=[zero] * mesh.n, recorded_norms={}, initial_data=zero,
    )
    D = duhamel_integral(hist, float(mesh.times[-1]), params_fujita3, solver_config, cache=cache)
    assert np.all(D.values == 0)


def test_duhamel_stationary_state(steady_setup, cache):
    # e^{t Lap} U + integral == U for the exact steady state
    from hhlab.semigroup import apply_semigroup

    params, grid, cfg, mesh, U, hist = steady_setup
    t = float(mesh.times[-1])
    lin = apply_semigroup(U, t, cache=cache)
    D = duhamel_integral(hist, t, params, cfg, cache=cache)
    sweep = lin + D.scale(float(params.a))
    ann = (grid.nodes >= 1.0) & (grid.nodes <= 10.0)
    rel = np.max(np.abs(sweep.values[ann] - U.values[ann]) / np.abs(U.values[ann]))
    assert rel < 1e-3


def test_duhamel_homogeneity(steady_setup, cache):
    # doubling the history multiplies the integrand by 2^alpha
    params, grid, cfg, mesh, U, hist = steady_setup
    hist2 = Trajectory(
        params=params, config=cfg, times=mesh.times.copy(),
        snapshots=[u.scale(2.0) for u in hist.snapshots], recorded_norms={},
        initial_data=U.scale(2.0),
    )
    t = float(mesh.times[-1])
    D1 = duhamel_integral(hist, t, params, cfg, cache=cache)
    D2 = duhamel_integral(hist2, t, params, cfg, cache=cache)
    assert np.allclose(D2.values, 2.0 ** float(params.alpha) * D1.values, rtol=1e-10)


def test_duhamel_requires_mesh_time(steady_setup, cache):
    params, grid, cfg, mesh, U, hist = steady_setup
    with pytest.raises(ValueError):
        duhamel_integral(hist, float(mesh.times[-1]) * 1.07, params, cfg, cache=cache)


def test_picard_zero_data(grid3, params_fujita3, solver_config, cache):
    traj = picard_iterate(RadialField.zero(grid3), params_fujita3, solver_config, cache=cache)
    assert traj.converged
    assert traj.iterations_used == 1
    assert all(np.all(u.values == 0) for u in traj.snapshots)


def test_picard_linear_consistency_a0(grid3, solver_config, cache):
    # a = 0 returns exactly the linear evolution
    from hhlab.semigroup import apply_semigroup

    params = ModelParams(3, 0, 3, a=0)
    phi = RadialField.gaussian(grid3, 0.5)
    traj = picard_iterate(phi, params, solver_config, cache=cache)
    for t, u in zip(traj.times[::12], traj.snapshots[::12]):
        lin = apply_semigroup(phi, float(t), cache=cache)
        assert np.allclose(u.values, lin.values)


def test_picard_selfsimilar_contraction(selfsimilar_traj):
    traj = selfsimilar_traj
    assert traj.converged and not traj.diverged
    ratios = traj.contraction_ratios
    assert all(r < 1 for r in ratios)
    # geometric convergence: ratios approximately constant
    assert max(ratios) / min(ratios) < 1.5
    assert math.isfinite(traj.implied_contraction_constant())
    rep = traj.smallness_report()
    assert rep["feasible"]


def test_picard_real_data_stays_real(selfsimilar_traj):
    assert not any(u.is_complex for u in selfsimilar_traj.snapshots)


def test_picard_focusing_large_data_diverges(grid3, cache):
    # large-amplitude focusing data on a short horizon: iterates blow up
    params = ModelParams(3, 0, 3, a=1)
    cfg = SolverConfig(T=1.0, n_time=24, kato_index=SpaceIndex(0, 6), max_iters=12)
    phi = RadialField.gaussian(grid3, 0.05).scale(50.0)
    traj = picard_iterate(phi, params, cfg, cache=cache)
    assert traj.diverged and not traj.converged


def test_picard_sign_flip_symmetry(grid3, params_fujita3, cache):
    cfg = SolverConfig(T=4.0, n_time=24, kato_index=SpaceIndex(0, 6), picard_tol=1e-7)
    phi = RadialField.power(grid3, 0.05, 1.0)
    a = picard_iterate(phi, params_fujita3, cfg, cache=cache)
    b = picard_iterate(phi.scale(-1.0), params_fujita3, cfg, cache=cache)
    assert np.allclose(a.snapshots[-1].values, -b.snapshots[-1].values)


def test_picard_monotone_l1_absorbing(selfsimilar_traj):
    # a = -1 with nonnegative data: the mass never increases
    masses = [float(np.real(u.integral())) for u in selfsimilar_traj.snapshots]
    assert all(b <= a * (1 + 1e-9) for a, b in zip(masses, masses[1:]))


def test_picard_time_continuity(selfsimilar_traj):
    # consecutive snapshots approach each other in the critical norm near
    # the small-time end (continuity into the data space)
    idx = SpaceIndex(0, 3)
    diffs = [
        lorentz_quasi_norm(b - a, idx)
        for a, b in zip(selfsimilar_traj.snapshots[:6], selfsimilar_traj.snapshots[1:7])
    ]
    norms = [lorentz_quasi_norm(u, idx) for u in selfsimilar_traj.snapshots[:6]]
    assert max(d / n for d, n in zip(diffs, norms)) < 0.2


def test_picard_rejects_inadmissible_kato_pair(grid3, params_fujita3):
    cfg = SolverConfig(T=1.0, kato_index=SpaceIndex(0, 3))  # p = alpha
    with pytest.raises(ValueError):
        picard_iterate(RadialField.zero(grid3), params_fujita3, cfg)


def test_scaling_equivariance(grid3, params_fujita3, cache):
    # lam-rescaled data solved on horizon T/lam^2 reproduce rescaled norms
    lam = 2.0
    idx = SpaceIndex(0, math.inf)
    cfg_a = SolverConfig(T=4.0, n_time=24, kato_index=SpaceIndex(0, 6), picard_tol=1e-7)
    cfg_b = SolverConfig(T=4.0 / lam**2, n_time=24, kato_index=SpaceIndex(0, 6), picard_tol=1e-7)
    phi = RadialField.power(grid3, 0.05, 1.0)
    phi_lam = phi.dilate(lam, 1.0)  # sigma_c = 1 here, so phi is invariant
    a = picard_iterate(phi, params_fujita3, cfg_a, cache=cache)
    b = picard_iterate(phi_lam, params_fujita3, cfg_b, cache=cache)
    # u_b(t) should equal lam * u_a(lam^2 t) evaluated at lam x:
    # compare sup norms at matched times
    for i in (10, 18, len(b.times) - 1):
        t_b = float(b.times[i])
        u_b = b.snapshots[i]
        u_a = a.snapshot_at(lam**2 * t_b)
        got = lorentz_quasi_norm(u_b, idx)
        expected = lam * lorentz_quasi_norm(u_a, idx)
        assert got == pytest.approx(expected, rel=0.01)


def test_kato_norm_single_snapshot(grid3, params_fujita3, solver_config):
    u = RadialField.gaussian(grid3, 1.0)
    traj = Trajectory(
        params=params_fujita3, config=solver_config, times=np.array([1.0]),
        snapshots=[u], recorded_norms={},
    )
    lq = SpaceIndex(0, 3)
    kp = SpaceIndex(0, 6)
    # weight t^(1/4) = 1 at t = 1
    assert kato_norm(traj, params_fujita3, lq, kp) == pytest.approx(
        lorentz_quasi_norm(u, kp)
    )


def test_kato_norm_rejects_bad_pair(selfsimilar_traj, params_fujita3):
    with pytest.raises(ValueError):
        kato_norm(selfsimilar_traj, params_fujita3, SpaceIndex(0, 3), SpaceIndex(0.5, 6))


def test_kato_norm_constant_for_selfsimilar(selfsimilar_traj, params_fujita3):
    w = 0.25
    kp = SpaceIndex(0, 6)
    track = [
        float(t) ** w * lorentz_quasi_norm(u, kp)
        for t, u in zip(selfsimilar_traj.times, selfsimilar_traj.snapshots)
    ]
    assert (max(track) - min(track)) / np.mean(track) < 0.01


def test_blowup_monitor(selfsimilar_traj, grid3, params_fujita3, cache):
    rep = blowup_monitor(selfsimilar_traj, SpaceIndex(0, 6), ceiling=1.0)
    assert not rep.crossed
    rep2 = blowup_monitor(selfsimilar_traj, SpaceIndex(0, 6), ceiling=1e-6)
    assert rep2.crossed and rep2.first_crossing_time is not None


def test_regularity_upgrade(selfsimilar_traj):
    identity = regularity_upgrade_probe(selfsimilar_traj, SpaceIndex(0, 6), SpaceIndex(0, 6))
    w = 0.25
    kp = SpaceIndex(0, 6)
    expect = max(
        float(t) ** w * lorentz_quasi_norm(u, kp)
        for t, u in zip(selfsimilar_traj.times, selfsimilar_traj.snapshots)
    )
    assert identity.sup_weighted == pytest.approx(expect)
    upgraded = regularity_upgrade_probe(selfsimilar_traj, SpaceIndex(0, 6), SpaceIndex(0, 9))
    assert math.isfinite(upgraded.sup_weighted)
    with pytest.raises(ValueError):
        regularity_upgrade_probe(selfsimilar_traj, SpaceIndex(0, 6), SpaceIndex(2.0, 6))


def test_solve_system_full_zero_imaginary(grid3, params_fujita3, cache):
    cfg = SolverConfig(T=4.0, n_time=24, kato_index=SpaceIndex(0, 6), picard_tol=1e-7)
    phi1 = RadialField.power(grid3, 0.05, 1.0)
    phi2 = RadialField.zero(grid3)
    u1, u2 = solve_system(phi1, phi2, params_fujita3, cfg, coupling="full", cache=cache)
    scalar = picard_iterate(phi1, params_fujita3, cfg, cache=cache)
    assert all(np.all(u.values == 0) for u in u2.snapshots)
    assert np.allclose(u1.snapshots[-1].values, scalar.snapshots[-1].values)


def test_solve_system_case3_driver_matches_scalar(grid3, params_fujita3, cache):
    cfg = SolverConfig(T=4.0, n_time=24, kato_index=SpaceIndex(0, 6), picard_tol=1e-7)
    phi1 = RadialField.power(grid3, 0.05, 1.0)
    phi2 = RadialField.power(grid3, 0.05, 1.2)
    z1, z2 = solve_system(phi1, phi2, params_fujita3, cfg, coupling="case3", cache=cache)
    scalar = picard_iterate(phi1, params_fujita3, cfg, cache=cache)
    # decoupled first component: bit-for-bit the scalar run
    for a, b in zip(z1.snapshots[::8], scalar.snapshots[::8]):
        assert np.array_equal(a.values, b.values)
    assert z2.converged


def test_solve_system_case4_mirrors_case3(grid3, params_fujita3, cache):
    cfg = SolverConfig(T=4.0, n_time=24, kato_index=SpaceIndex(0, 6), picard_tol=1e-7)
    phi_a = RadialField.power(grid3, 0.05, 1.0)
    phi_b = RadialField.power(grid3, 0.05, 1.2)
    z1, z2 = solve_system(phi_a, phi_b, params_fujita3, cfg, coupling="case3", cache=cache)
    w1, w2 = solve_system(phi_b, phi_a, params_fujita3, cfg, coupling="case4", cache=cache)
    assert np.allclose(z1.snapshots[-1].values, w2.snapshots[-1].values)
    assert np.allclose(z2.snapshots[-1].values, w1.snapshots[-1].values)
