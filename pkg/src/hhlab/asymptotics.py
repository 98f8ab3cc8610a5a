"""Quantitative checks of the large-time behavior of small solutions.

Each check runs the solver for the solution and for its conjectured
asymptotic reference (a self-similar solution, a linear flow, or a target
system), records norm tracks on the shared mesh, and fits log-log decay
slopes.  Predicted slopes always come from the exponent module; the
measured excess decay delta of a difference track is an output, never an
input (only the floor delta_min is configurable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import integrate

from .exponents import (
    ModelParams,
    SpaceIndex,
    classify_pair,
    exact,
    fujita_exponent,
    kato_time_weight,
    nonexistence_exponent,
    nonexistence_kappa_window,
    sigma_in_linear_range,
    sigma_time_weight,
    theta_interval_linear,
)
from .fields import RadialField
from .fitting import DecayFit, decay_slope_fit
from .grid import RadialGrid, sphere_area
from .lorentz import lorentz_quasi_norm
from .semigroup import PropagatorCache, apply_semigroup, default_cache
from .selfsimilar import critical_decay, homogeneous_data
from .solver import SolverConfig, Trajectory, picard_iterate, solve_system

__all__ = [
    "ComparisonReport",
    "decay_slope_fit",
    "nonlinear_behavior_check",
    "linear_behavior_check",
    "stability_check",
    "complex_combined_check",
    "nonexistence_certificate",
]

#: difference tracks must out-decay the base rate by at least this much
DELTA_MIN = 0.05

#: fit windows default to the last 1.5 decades of the horizon
FIT_WINDOW_DECADES = 1.5


def _fit_window(times: np.ndarray, decades: float = FIT_WINDOW_DECADES) -> tuple[float, float]:
    t_max = float(times[-1])
    return (t_max / 10.0**decades, t_max)


@dataclass
class ComparisonReport:
    times: np.ndarray
    base_track: np.ndarray
    norm_track: np.ndarray  # || u - reference || in the chosen index
    base_fit: DecayFit
    excess_fit: DecayFit
    delta_measured: float
    delta_min: float
    verdict: str  # consistent | inconsistent | inconclusive
    envelope_constant: float = math.nan  # two-sided bound calibration
    extras: dict = dc_field(default_factory=dict)

    def consistent(self) -> bool:
        return self.verdict == "consistent"


def _difference_report(
    times: np.ndarray,
    base_track: np.ndarray,
    diff_track: np.ndarray,
    predicted_base_slope: float,
    base_tol: float,
    delta_min: float,
    window: tuple[float, float] | None = None,
) -> ComparisonReport:
    window = window or _fit_window(times)
    base_fit = decay_slope_fit(times, base_track, predicted_base_slope, window, slope_tol=base_tol)
    diff_fit = decay_slope_fit(times, diff_track, None, window)
    delta = predicted_base_slope - diff_fit.slope  # positive = faster decay
    keep = (times >= window[0]) & (times <= window[1]) & (base_track > 0)
    ratio = base_track[keep] / times[keep] ** predicted_base_slope
    envelope = float(np.max(ratio) / np.min(ratio)) ** 0.5 if np.any(keep) else math.nan
    if base_fit.verdict == "inconclusive" or diff_fit.verdict == "inconclusive":
        verdict = "inconclusive"
    elif base_fit.verdict == "consistent" and delta >= delta_min and diff_fit.r_squared >= 0.99:
        verdict = "consistent"
    else:
        verdict = "inconsistent"
    return ComparisonReport(
        times=times,
        base_track=base_track,
        norm_track=diff_track,
        base_fit=base_fit,
        excess_fit=diff_fit,
        delta_measured=float(delta),
        delta_min=delta_min,
        verdict=verdict,
        envelope_constant=envelope,
    )


def _tracks(traj: Trajectory, idx: SpaceIndex) -> np.ndarray:
    return traj.norm_track(idx)


def _difference_track(a: Trajectory, b: Trajectory, idx: SpaceIndex) -> np.ndarray:
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times):
        raise ValueError("trajectories must share their time mesh")
    return np.array(
        [lorentz_quasi_norm(ua - ub, idx) for ua, ub in zip(a.snapshots, b.snapshots)]
    )


def nonlinear_behavior_check(
    params: ModelParams,
    omega: float,
    perturbation: Callable[[RadialGrid], RadialField],
    config: SolverConfig,
    grid: RadialGrid,
    tilde_kp: SpaceIndex = SpaceIndex(0, math.inf),
    cache: PropagatorCache | None = None,
    delta_min: float = DELTA_MIN,
    base_tol: float = 0.05,
) -> ComparisonReport:
    """Solutions from critically decaying data approach the self-similar one.

    Data: Phi + perturbation with Phi = omega r^(-(2+gamma)/(alpha-1)).
    Verifies the base track decays like t^(-(d/2)(1/q_c - k/d - 1/p)) and
    the difference to the self-similar solution decays strictly faster.
    """
    cache = cache or default_cache()
    sigma_c = critical_decay(params)
    phi_ss = homogeneous_data(omega, sigma_c, grid)
    pert = perturbation(grid)
    phi = phi_ss + pert
    traj = picard_iterate(phi, params, config, cache=cache)
    ref = picard_iterate(phi_ss, params, config, cache=cache)
    if traj.diverged or ref.diverged:
        raise RuntimeError("solver diverged; data too large for the smallness regime")
    base_slope = -kato_time_weight(params, tilde_kp)
    base = _tracks(traj, tilde_kp)
    if pert.abs().integral() == 0:
        diff = np.zeros_like(base)
    else:
        diff = _difference_track(traj, ref, tilde_kp)
    rep = _difference_report(traj.times, base, diff, base_slope, base_tol, delta_min)
    rep.extras["trajectory"] = traj
    rep.extras["reference"] = ref
    if np.all(diff == 0):
        rep.verdict = "consistent"
        rep.delta_measured = math.inf
    return rep


def linear_behavior_check(
    params: ModelParams,
    sigma: float,
    omega: float,
    perturbation: Callable[[RadialGrid], RadialField],
    config: SolverConfig,
    grid: RadialGrid,
    tilde_kp: SpaceIndex = SpaceIndex(0, math.inf),
    cache: PropagatorCache | None = None,
    delta_min: float = DELTA_MIN,
    base_tol: float = 0.05,
) -> ComparisonReport:
    """Solutions from faster-decaying data approach the linear flow.

    Data: Phi_sigma + perturbation with sigma in ((2+gamma)/(alpha-1), d).
    The base norm decays like t^(-(d/2)(sigma/d - k/d - 1/p)); the
    difference to e^{t Lap} Phi_sigma decays strictly faster.
    """
    cache = cache or default_cache()
    if not sigma_in_linear_range(params, sigma):
        raise ValueError(
            f"sigma={sigma} outside the linear-behavior window (d/q_c, d)"
        )
    kp = config.kato_index
    hyp = (exact(sigma) + params.gamma_x) / (params.d * params.alpha_x)
    if not hyp < kp.scaling_sum(params.d):
        raise ValueError("needs (sigma+gamma)/(d alpha) < k/d + 1/p")
    theta = theta_interval_linear(params, kp, kp, sigma)
    if not theta.nonempty:
        raise ValueError(f"empty theta interval: {theta.binding_constraints}")
    phi_s = homogeneous_data(omega, sigma, grid)
    phi = phi_s + perturbation(grid)
    traj = picard_iterate(phi, params, config, cache=cache)
    if traj.diverged:
        raise RuntimeError("solver diverged; data too large for the smallness regime")
    linear_ref = [apply_semigroup(phi_s, float(t), cache=cache) for t in traj.times]
    base_slope = -sigma_time_weight(params.d, sigma, tilde_kp)
    base = _tracks(traj, tilde_kp)
    diff = np.array(
        [lorentz_quasi_norm(u - v, tilde_kp) for u, v in zip(traj.snapshots, linear_ref)]
    )
    rep = _difference_report(traj.times, base, diff, base_slope, base_tol, delta_min)
    rep.extras["trajectory"] = traj
    rep.extras["theta_interval"] = theta
    return rep


@dataclass
class StabilityReport:
    times: np.ndarray
    weighted_difference: np.ndarray
    data_difference: np.ndarray  # || e^{t Lap}(phi - psi) || toward 0
    final_over_initial: float
    monotone_last_decade: bool
    verdict: str


def stability_check(
    params: ModelParams,
    phi: RadialField,
    psi: RadialField,
    config: SolverConfig,
    lq: SpaceIndex,
    cache: PropagatorCache | None = None,
) -> StabilityReport:
    """Two small solutions converge to each other when their linear flows do.

    Tracks t^((d/2)(1/q_c - k/d - 1/p)) || u - v ||_{L^(p,inf)_k} along the
    mesh and checks it decays to a small fraction of its initial size.
    """
    cache = cache or default_cache()
    u = picard_iterate(phi, params, config, cache=cache)
    v = picard_iterate(psi, params, config, cache=cache)
    if u.diverged or v.diverged:
        raise RuntimeError("solver diverged in the stability run")
    kp = config.kato_index
    w = kato_time_weight(params, kp)
    wdiff = np.array(
        [
            float(t) ** w * lorentz_quasi_norm(a - b, kp)
            for t, a, b in zip(u.times, u.snapshots, v.snapshots)
        ]
    )
    gap = phi - psi
    if gap.abs().integral() == 0:
        data_diff = np.zeros_like(u.times)
    else:
        data_diff = np.array(
            [
                lorentz_quasi_norm(apply_semigroup(gap, float(t), cache=cache), lq)
                for t in u.times
            ]
        )
    last = u.times >= u.times[-1] / 10.0
    seg = wdiff[last]
    monotone = bool(np.all(np.diff(seg) <= seg[:-1] * 1e-6 + 1e-300))
    denom = float(np.max(wdiff)) if np.max(wdiff) > 0 else 1.0
    ratio = float(seg[-1]) / denom
    verdict = "consistent" if (monotone and ratio < 0.1) or denom == 1.0 else "inconsistent"
    return StabilityReport(
        times=u.times,
        weighted_difference=wdiff,
        data_difference=data_diff,
        final_over_initial=ratio,
        monotone_last_decade=monotone,
        verdict=verdict,
    )


def complex_combined_check(
    params: ModelParams,
    sigma1: float,
    sigma2: float,
    omegas: tuple[float, float],
    config: SolverConfig,
    grid: RadialGrid,
    case: str = "case3",
    tilde_kp: SpaceIndex = SpaceIndex(0, math.inf),
    cache: PropagatorCache | None = None,
    delta_min: float = DELTA_MIN,
    base_tol: float = 0.05,
) -> tuple[ComparisonReport, ComparisonReport]:
    """Combined behavior of complex data with mismatched component decay.

    case3: sigma1 = (2+gamma)/(alpha-1) < sigma2 < d.  The real part
    approaches the scalar self-similar solution; the imaginary part
    approaches the passively coupled component of the target system.
    case4 mirrors the roles.
    """
    cache = cache or default_cache()
    sigma_c = critical_decay(params)
    if case == "case3":
        if not (math.isclose(sigma1, sigma_c, rel_tol=1e-12) and sigma_c < sigma2 < params.d):
            raise ValueError(f"case3 needs sigma1 = {sigma_c} < sigma2 < d")
    elif case == "case4":
        if not (math.isclose(sigma2, sigma_c, rel_tol=1e-12) and sigma_c < sigma1 < params.d):
            raise ValueError(f"case4 needs sigma2 = {sigma_c} < sigma1 < d")
    else:
        raise ValueError(f"unknown case {case!r}")
    om1, om2 = omegas
    phi1 = homogeneous_data(om1, sigma1, grid) if om1 != 0 else RadialField.zero(grid)
    phi2 = homogeneous_data(om2, sigma2, grid) if om2 != 0 else RadialField.zero(grid)

    u1, u2 = solve_system(phi1, phi2, params, config, coupling="full", cache=cache)
    sig_free = sigma2 if case == "case3" else sigma1
    passive_w = sigma_time_weight(params.d, sig_free, config.kato_index)
    z1, z2 = solve_system(
        phi1, phi2, params, config, coupling=case, cache=cache, passive_weight=passive_w
    )
    # component matched with the nonlinear self-similar rate
    critical_slope = -kato_time_weight(params, tilde_kp)
    free_slope = -sigma_time_weight(params.d, sig_free, tilde_kp)
    if case == "case3":
        nl_pair, lin_pair = (u1, z1), (u2, z2)
    else:
        nl_pair, lin_pair = (u2, z2), (u1, z1)

    base_nl = _tracks(nl_pair[0], tilde_kp)
    diff_nl = _difference_track(nl_pair[0], nl_pair[1], tilde_kp)
    rep_nl = _difference_report(u1.times, base_nl, diff_nl, critical_slope, base_tol, delta_min)
    rep_nl.extras["pair"] = nl_pair

    base_lin = _tracks(lin_pair[0], tilde_kp)
    diff_lin = _difference_track(lin_pair[0], lin_pair[1], tilde_kp)
    if float(np.max(np.abs(base_lin))) == 0.0:
        # vanishing component: degenerate reduction to the scalar theorem
        rep_lin = _difference_report(
            u1.times, base_lin, diff_lin, free_slope, base_tol, delta_min
        )
        rep_lin.verdict = "consistent"
        rep_lin.delta_measured = math.inf
    else:
        rep_lin = _difference_report(
            u1.times, base_lin, diff_lin, free_slope, base_tol, delta_min
        )
    rep_lin.extras["pair"] = lin_pair
    return rep_nl, rep_lin


# ---------------------------------------------------------------------------
# nonexistence certificate
# ---------------------------------------------------------------------------


def _smooth_step(w: np.ndarray) -> np.ndarray:
    """C^inf transition: 1 at w <= 0 decreasing to 0 at w >= 1."""
    w = np.clip(w, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = np.where(w > 0, np.exp(-1.0 / np.maximum(w, 1e-300)), 0.0)
        b = np.where(w < 1, np.exp(-1.0 / np.maximum(1.0 - w, 1e-300)), 0.0)
    return b / (a + b)


def _cutoff_constant(d: int, alpha: float, b: int, samples: int = 2001) -> float:
    """C with |d_t psi| + |Lap psi| <= C tau^{-1} psi^{1/alpha} for the
    product cutoff psi = eta(t/tau)^b phi(|x|/sqrt(tau))^b."""
    v = np.linspace(0.0, 1.0, samples)
    eta = _smooth_step(2.0 * v - 1.0)
    deta = np.gradient(eta, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        time_ratio = b * np.abs(deta) * eta ** (b - 1 - b / alpha)
    time_c = float(np.nanmax(np.where(eta > 1e-12, time_ratio, 0.0)))

    r = np.linspace(1e-6, 1.0, samples)
    phi = _smooth_step(2.0 * r - 1.0)
    dphi = np.gradient(phi, r)
    d2phi = np.gradient(dphi, r)
    lap_phib = b * phi ** (b - 1) * (d2phi + (d - 1) / r * dphi) + b * (b - 1) * phi ** (
        b - 2
    ) * dphi**2
    with np.errstate(divide="ignore", invalid="ignore"):
        space_ratio = np.abs(lap_phib) / phi ** (b / alpha)
    space_c = float(np.nanmax(np.where(phi > 1e-12, space_ratio, 0.0)))
    return time_c + space_c


@dataclass
class NonexistenceReport:
    kappa_window: tuple[float, float]
    kappa: float
    exponent: Fraction  # (d/2)(l/d + 1/q - 1/q_c) - kappa/2, exact
    tau_grid: np.ndarray
    lower_bound: np.ndarray  # data-mass integral (the quantity that wins)
    upper_bound: np.ndarray  # C * tau^(rhs exponent)
    tau_star: float  # certified crossover: lower > upper for tau <= tau_star
    comparison_constant: float
    lower_fit: DecayFit
    verdict: str
    cutoff_constant: float = math.nan


def nonexistence_certificate(
    params: ModelParams,
    lq: SpaceIndex,
    tau_grid,
    kappa: float | Fraction | None = None,
    comparison_constant: float = 1.0,
) -> NonexistenceReport:
    """Certify the supercritical data-mass contradiction numerically.

    For supercritical (l, q) and admissible kappa, the localized data mass
    of u0 = r^(-l - d/q) log(1+r)^kappa near the parabolic scale grows
    like tau^((d - l - d/q + kappa)/2), while any weak solution caps it at
    C tau^(d/2 - (2+gamma)/(2(alpha-1))).  The certificate evaluates both
    on the tau grid, reports the crossover below which the lower bound
    wins, and returns the exact positive exponent gap.

    The abstract constant C depends on the cutoff pair; it is fixed here
    as ``comparison_constant`` (1 by default) since only the exponent gap
    is certified, and the reported cutoff constant is attached for scale.
    """
    if not params.alpha_x > fujita_exponent(params):
        raise ValueError("needs alpha above the global-existence threshold")
    if classify_pair(params, lq).klass != "supercritical":
        raise ValueError("nonexistence data requires a supercritical (l, q)")
    lo, hi = nonexistence_kappa_window(params, lq)
    if not lo < hi:
        raise ValueError("empty kappa window")
    if kappa is None:
        kappa = (lo + hi) / 2
    kappa_x = exact(kappa)
    if not (lo < kappa_x < hi):
        raise ValueError(f"kappa={kappa} outside the window ({lo}, {hi})")
    expo = nonexistence_exponent(params, lq, kappa_x)

    d = params.d
    power = float(-lq.s_x - d * lq.inv_q + d - 1)
    kap = float(kappa_x)
    area = sphere_area(d)

    def lower(tau: float) -> float:
        upper_r = 0.5 * math.sqrt(tau)
        val, _ = integrate.quad(
            lambda r: r**power * math.log1p(r) ** kap, 0.0, upper_r, limit=200
        )
        return area * val

    rhs_power = float(-(2 + params.gamma_x) / (2 * (params.alpha_x - 1)) + Fraction(d, 2))
    tau_grid = np.asarray(tau_grid, dtype=float)
    lower_vals = np.array([lower(t) for t in tau_grid])
    upper_vals = comparison_constant * tau_grid**rhs_power

    wins = lower_vals > upper_vals
    tau_star = 0.0
    for t, w in sorted(zip(tau_grid, wins)):
        if w:
            tau_star = float(t)
        else:
            break
    # the lower bound's own tau-power is (d - l - d/q + kappa)/2,
    # i.e. the cap's power minus the certified gap
    lower_fit = decay_slope_fit(
        tau_grid, lower_vals, predicted_slope=rhs_power - float(expo)
    )
    verdict = "consistent" if (expo > 0 and tau_star > 0) else "inconsistent"
    b = math.floor(2 * float(params.alpha_x) / (float(params.alpha_x) - 1)) + 1
    cutoff_c = _cutoff_constant(d, float(params.alpha_x), b)
    rep = NonexistenceReport(
        kappa_window=(float(lo), float(hi)),
        kappa=float(kappa_x),
        exponent=expo,
        tau_grid=tau_grid,
        lower_bound=lower_vals,
        upper_bound=upper_vals,
        tau_star=tau_star,
        comparison_constant=comparison_constant,
        lower_fit=lower_fit,
        verdict=verdict,
    )
    rep.cutoff_constant = cutoff_c
    return rep
