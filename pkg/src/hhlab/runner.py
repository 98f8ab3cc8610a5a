"""Executes the named checks of an experiment configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .asymptotics import (
    complex_combined_check,
    linear_behavior_check,
    nonexistence_certificate,
    nonlinear_behavior_check,
    stability_check,
)
from .config import ExperimentConfig
from .exponents import (
    SpaceIndex,
    inv_critical_q,
    kato_pair_admissible,
    secondary_pair_admissible,
    theta_feasible_mask,
    theta_interval_complex,
    theta_interval_linear,
)
from .fields import RadialField
from .lorentz import lorentz_quasi_norm
from .semigroup import PropagatorCache, apply_semigroup, default_cache, smoothing_estimate_probe
from .selfsimilar import (
    critical_decay,
    construct_self_similar,
    homogeneous_data,
    invariance_deviation,
    profile_extract,
    singular_steady_state,
    steady_state_residual,
)
from .solver import TimeMesh, Trajectory, duhamel_integral, picard_iterate


@dataclass
class Track:
    times: np.ndarray
    values: np.ndarray
    predicted: np.ndarray | None = None  # reference power-law curve


@dataclass
class Profile:
    y: np.ndarray
    curves: dict[str, np.ndarray]


@dataclass
class CheckResult:
    name: str
    verdict: str
    summary: dict
    tracks: dict[str, Track] = field(default_factory=dict)
    profiles: dict[str, Profile] = field(default_factory=dict)
    diverged: bool = False

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"


def _predicted_curve(times: np.ndarray, values: np.ndarray, slope: float) -> np.ndarray:
    """Power curve with the predicted slope anchored at the track median."""
    t = np.asarray(times, float)
    v = np.asarray(values, float)
    ok = (v > 0) & np.isfinite(v)
    if not np.any(ok):
        return np.zeros_like(t)
    mid = np.argsort(t[ok])[ok.sum() // 2]
    t0, v0 = t[ok][mid], v[ok][mid]
    return v0 * (t / t0) ** slope


def _data_field(cfg: ExperimentConfig, grid) -> RadialField:
    kind = cfg.data["kind"]
    amp = float(cfg.data["amplitude"])
    if kind == "homogeneous":
        sigma = cfg.data["sigma"]
        sigma = critical_decay(cfg.model) if sigma is None else float(sigma)
        return homogeneous_data(amp, sigma, grid)
    if kind == "gaussian":
        width = float(cfg.data["perturbation_width"] or 1.0)
        return RadialField.gaussian(grid, width).scale(amp)
    if kind == "steady_state":
        return singular_steady_state(cfg.model).field(grid)
    raise ValueError(f"data kind {kind!r} is built inside its check")


def _perturbation(cfg: ExperimentConfig):
    amp = float(cfg.data["perturbation_amplitude"])
    width = float(cfg.data["perturbation_width"])

    def make(grid) -> RadialField:
        if amp == 0:
            return RadialField.zero(grid)
        return RadialField.from_profile(grid, lambda r: amp * np.exp(-((r / width) ** 2)))

    return make


def _comparison_tracks(report, base_slope: float, diff_slope_floor: float) -> dict[str, Track]:
    return {
        "base": Track(report.times, report.base_track,
                      _predicted_curve(report.times, report.base_track, base_slope)),
        "difference": Track(report.times, report.norm_track,
                            _predicted_curve(report.times, report.norm_track, diff_slope_floor)),
    }


# ---------------------------------------------------------------------------
# individual checks
# ---------------------------------------------------------------------------


def _check_wellposed(cfg: ExperimentConfig, cache: PropagatorCache) -> CheckResult:
    grid = cfg.make_grid()
    phi = _data_field(cfg, grid)
    traj = picard_iterate(phi, cfg.model, cfg.solver, cache=cache)
    from .exponents import kato_time_weight

    w = kato_time_weight(cfg.model, cfg.solver.kato_index)
    track = np.array([
        float(t) ** w * lorentz_quasi_norm(u, cfg.solver.kato_index)
        for t, u in zip(traj.times, traj.snapshots)
    ])
    ratios = traj.contraction_ratios
    ok = traj.converged and all(r < 1 for r in ratios)
    return CheckResult(
        name="wellposed-contraction",
        verdict="consistent" if ok else "inconsistent",
        summary={
            "converged": traj.converged,
            "iterations": traj.iterations_used,
            "contraction_ratios": [float(r) for r in ratios],
            "rho_measured": traj.rho_measured,
            "implied_C0": traj.implied_contraction_constant(),
            "smallness": traj.smallness_report(),
        },
        tracks={"kato_weighted": Track(traj.times, track, None)},
        diverged=traj.diverged,
    )


def _check_selfsimilar(cfg: ExperimentConfig, cache: PropagatorCache) -> CheckResult:
    opts = cfg.check_options.get("selfsimilar", {})
    tol = float(opts.get("tolerance", 0.02))
    grid = cfg.make_grid()
    omega = float(cfg.data["amplitude"])
    traj = construct_self_similar(cfg.model, omega, cfg.solver, grid, cache=cache)
    sigma_c = critical_decay(cfg.model)
    t_hi = float(traj.times[-1])
    t_lo = float(traj.times[np.argmin(np.abs(traj.times - t_hi / 16.0))])
    p_hi = profile_extract(traj, t_hi, sigma_c)
    p_lo = profile_extract(traj, t_lo, sigma_c)
    dev = invariance_deviation(p_lo, p_hi)
    final_ratio = traj.contraction_ratios[-1] if traj.contraction_ratios else math.nan
    ok = traj.converged and dev < tol and (not traj.contraction_ratios or final_ratio < 1)
    window = (p_hi.y_grid >= 0.1) & (p_hi.y_grid <= 10.0)
    prof = Profile(
        y=p_hi.y_grid[window],
        curves={
            f"t={t_lo:.4g}": np.real(p_lo.profile_values[window]),
            f"t={t_hi:.4g}": np.real(p_hi.profile_values[window]),
        },
    )
    return CheckResult(
        name="selfsimilar",
        verdict="consistent" if ok else "inconsistent",
        summary={
            "converged": traj.converged,
            "invariance_deviation": float(dev),
            "tolerance": tol,
            "final_contraction_ratio": float(final_ratio),
            "compare_times": [t_lo, t_hi],
            "rho_measured": traj.rho_measured,
        },
        profiles={"rescaled_profile": prof},
        diverged=traj.diverged,
    )


def _check_nonlinear(cfg: ExperimentConfig, cache: PropagatorCache) -> CheckResult:
    opts = cfg.check_options.get("nonlinear-asymptotics", {})
    grid = cfg.make_grid()
    rep = nonlinear_behavior_check(
        cfg.model,
        float(cfg.data["amplitude"]),
        _perturbation(cfg),
        cfg.solver,
        grid,
        cache=cache,
        delta_min=float(opts.get("delta_min", 0.05)),
        base_tol=float(opts.get("base_tol", 0.05)),
    )
    base_slope = rep.base_fit.predicted_slope
    tracks = _comparison_tracks(rep, base_slope, base_slope - rep.delta_min)
    return CheckResult(
        name="nonlinear-asymptotics",
        verdict=rep.verdict,
        summary={
            "predicted_base_slope": base_slope,
            "measured_base_slope": rep.base_fit.slope,
            "base_r2": rep.base_fit.r_squared,
            "difference_slope": rep.excess_fit.slope,
            "difference_r2": rep.excess_fit.r_squared,
            "delta_measured": rep.delta_measured,
            "delta_min": rep.delta_min,
            "envelope_constant": rep.envelope_constant,
        },
        tracks=tracks,
    )


def _check_linear(cfg: ExperimentConfig, cache: PropagatorCache) -> CheckResult:
    opts = cfg.check_options.get("linear-asymptotics", {})
    grid = cfg.make_grid()
    sigma = float(cfg.data["sigma"])
    rep = linear_behavior_check(
        cfg.model,
        sigma,
        float(cfg.data["amplitude"]),
        _perturbation(cfg),
        cfg.solver,
        grid,
        cache=cache,
        delta_min=float(opts.get("delta_min", 0.05)),
        base_tol=float(opts.get("base_tol", 0.05)),
    )
    base_slope = rep.base_fit.predicted_slope
    theta = rep.extras.get("theta_interval")
    return CheckResult(
        name="linear-asymptotics",
        verdict=rep.verdict,
        summary={
            "sigma": sigma,
            "predicted_base_slope": base_slope,
            "measured_base_slope": rep.base_fit.slope,
            "base_r2": rep.base_fit.r_squared,
            "difference_slope": rep.excess_fit.slope,
            "delta_measured": rep.delta_measured,
            "delta_min": rep.delta_min,
            "theta_interval": [theta.lower, theta.upper] if theta else None,
        },
        tracks=_comparison_tracks(rep, base_slope, base_slope - rep.delta_min),
    )


def _check_stability(cfg: ExperimentConfig, cache: PropagatorCache) -> CheckResult:
    grid = cfg.make_grid()
    phi = _data_field(cfg, grid)
    psi = phi + _perturbation(cfg)(grid)
    lq = cfg.solver.lq_index or SpaceIndex(0, 3)
    rep = stability_check(cfg.model, phi, psi, cfg.solver, lq, cache=cache)
    return CheckResult(
        name="stability",
        verdict=rep.verdict,
        summary={
            "final_over_initial": rep.final_over_initial,
            "monotone_last_decade": rep.monotone_last_decade,
        },
        tracks={
            "weighted_difference": Track(rep.times, rep.weighted_difference, None),
            "linear_data_difference": Track(rep.times, rep.data_difference, None),
        },
    )


def _check_complex(cfg: ExperimentConfig, cache: PropagatorCache, case: str) -> CheckResult:
    opts = cfg.check_options.get(f"complex-{case}", {})
    grid = cfg.make_grid()
    sigma1 = float(cfg.data["sigma"])
    sigma2 = float(cfg.data["sigma2"])
    rep_nl, rep_lin = complex_combined_check(
        cfg.model,
        sigma1,
        sigma2,
        (float(cfg.data["amplitude"]), float(cfg.data["amplitude2"])),
        cfg.solver,
        grid,
        case=case,
        cache=cache,
        delta_min=float(opts.get("delta_min", 0.05)),
    )
    ok = rep_nl.verdict == "consistent" and rep_lin.verdict == "consistent"
    tracks = {}
    for tag, rep in (("nonlinear_component", rep_nl), ("modified_linear_component", rep_lin)):
        slope = rep.base_fit.predicted_slope
        tracks[f"{tag}_base"] = Track(rep.times, rep.base_track,
                                      _predicted_curve(rep.times, rep.base_track, slope))
        tracks[f"{tag}_difference"] = Track(rep.times, rep.norm_track, None)
    return CheckResult(
        name=f"complex-{case}",
        verdict="consistent" if ok else ("inconclusive" if "inconclusive" in (rep_nl.verdict, rep_lin.verdict) else "inconsistent"),
        summary={
            "delta_nonlinear": rep_nl.delta_measured,
            "delta_modified_linear": rep_lin.delta_measured,
            "delta_min": rep_nl.delta_min,
            "nonlinear_verdict": rep_nl.verdict,
            "modified_linear_verdict": rep_lin.verdict,
        },
        tracks=tracks,
    )


def _check_nonexistence(cfg: ExperimentConfig, cache: PropagatorCache) -> CheckResult:
    opts = cfg.check_options.get("nonexistence", {})
    lq = cfg.solver.lq_index
    if lq is None:
        raise ValueError("nonexistence check needs solver.l and solver.q")
    tau_min = float(opts.get("tau_min", 1e-8))
    tau_max = float(opts.get("tau_max", 1e-4))
    n = int(opts.get("tau_points", 17))
    kappa = opts.get("kappa")
    rep = nonexistence_certificate(
        cfg.model, lq, np.geomspace(tau_min, tau_max, n), kappa=kappa
    )
    return CheckResult(
        name="nonexistence",
        verdict=rep.verdict,
        summary={
            "kappa_window": list(rep.kappa_window),
            "kappa": rep.kappa,
            "exponent": str(rep.exponent),
            "exponent_float": float(rep.exponent),
            "tau_star": rep.tau_star,
            "comparison_constant": rep.comparison_constant,
            "cutoff_constant": rep.cutoff_constant,
            "lower_slope_fit": rep.lower_fit.slope,
            "lower_slope_predicted": rep.lower_fit.predicted_slope,
        },
        tracks={
            "lower_bound": Track(rep.tau_grid, rep.lower_bound, None),
            "upper_bound": Track(rep.tau_grid, rep.upper_bound, None),
        },
    )


def _check_theta(cfg: ExperimentConfig, cache: PropagatorCache) -> CheckResult:
    opts = cfg.check_options.get("theta-feasibility", {})
    n_tuples = int(opts.get("tuples", 50))
    step = float(opts.get("scan_step", 1e-4))
    rng = np.random.default_rng(cfg.seed)
    params = cfg.model

    def scan(kp, k0p0, sigma, which):
        thetas = np.arange(0.0, 1.0 + step, step)
        ok = theta_feasible_mask(params, kp, k0p0, sigma, thetas, which)
        if not ok.any():
            return None
        lo = thetas[ok.argmax()]
        hi = thetas[len(ok) - 1 - ok[::-1].argmax()]
        return (float(lo), float(hi))

    mismatches = []
    checked = 0
    worked = theta_interval_linear(params, SpaceIndex(0, 6), SpaceIndex(0, 6), Fraction(6, 5))
    attempts = 0
    while checked < n_tuples and attempts < 50 * n_tuples:
        attempts += 1
        p = float(rng.uniform(3.2, 12.0))
        k = float(rng.uniform(-0.1, 0.3))
        p0 = float(rng.uniform(3.2, 12.0))
        k0 = float(rng.uniform(-0.1, 0.3))
        kp = SpaceIndex(k, p)
        k0p0 = SpaceIndex(k0, p0)
        if not kato_pair_admissible(params, kp).ok:
            continue
        d_over_qc = float(params.d * inv_critical_q(params))
        sigma = float(rng.uniform(d_over_qc + 0.01, params.d - 0.3))
        if not secondary_pair_admissible(params, kp, k0p0, sigma).ok:
            continue
        which = ["linear", "theta11", "theta12", "theta21"][checked % 4]
        if which == "linear":
            interval = theta_interval_linear(params, kp, k0p0, sigma)
        else:
            interval = theta_interval_complex(params, kp, k0p0, sigma, which)
        brute = scan(kp, k0p0, sigma, which)
        checked += 1
        if interval.nonempty != (brute is not None):
            mismatches.append({"which": which, "kind": "emptiness", "kp": kp.label()})
            continue
        if brute is not None:
            if abs(brute[0] - interval.lower) > 2 * step or abs(brute[1] - interval.upper) > 2 * step:
                mismatches.append({
                    "which": which, "kind": "endpoints",
                    "closed": [interval.lower, interval.upper], "scan": list(brute),
                })
    worked_ok = (
        worked.nonempty
        and worked.lower_exact == Fraction(1, 6)
        and worked.upper_exact == Fraction(2, 3)
    )
    ok = worked_ok and not mismatches and checked >= n_tuples
    return CheckResult(
        name="theta-feasibility",
        verdict="consistent" if ok else "inconsistent",
        summary={
            "worked_example": [worked.lower, worked.upper],
            "worked_example_exact": [str(worked.lower_exact), str(worked.upper_exact)],
            "tuples_checked": checked,
            "mismatches": mismatches,
        },
    )


def _check_smoothing(cfg: ExperimentConfig, cache: PropagatorCache) -> CheckResult:
    opts = cfg.check_options.get("smoothing-estimates", {})
    grid = cfg.make_grid()
    d = cfg.model.d
    G = RadialField.gaussian(grid, 1.0)
    t_grid = np.geomspace(1.0, 100.0, 13)
    fit_sup = smoothing_estimate_probe(
        G, SpaceIndex(0, 1, 1), SpaceIndex(0, math.inf), t_grid, time_origin=1.0, cache=cache
    )
    l2 = float(opts.get("weighted_l2", -0.5))
    q2 = float(opts.get("weighted_q2", 3))
    fit_w = smoothing_estimate_probe(
        G, SpaceIndex(0, 1, 1), SpaceIndex(l2, q2), t_grid, time_origin=1.0, cache=cache
    )
    ok = (
        abs(fit_sup.slope - fit_sup.predicted_slope) <= 0.02 * abs(fit_sup.predicted_slope)
        and abs(fit_w.slope - fit_w.predicted_slope) <= 0.03 * abs(fit_w.predicted_slope)
    )
    ages = t_grid + 1.0
    sup_track = np.exp(fit_sup.intercept) * ages**fit_sup.slope
    return CheckResult(
        name="smoothing-estimates",
        verdict="consistent" if ok else "inconsistent",
        summary={
            "sup_slope": fit_sup.slope,
            "sup_predicted": fit_sup.predicted_slope,
            "weighted_slope": fit_w.slope,
            "weighted_predicted": fit_w.predicted_slope,
            "weighted_index": SpaceIndex(l2, q2).label(),
        },
        tracks={
            "sup_norm": Track(ages, sup_track,
                              _predicted_curve(ages, sup_track, fit_sup.predicted_slope)),
        },
    )


def _check_steady_state(cfg: ExperimentConfig, cache: PropagatorCache) -> CheckResult:
    opts = cfg.check_options.get("steady-state", {})
    residual_tol = float(opts.get("residual_tol", 1e-6))
    sweep_tol = float(opts.get("sweep_tol", 1e-3))
    grid = cfg.make_grid()
    params = cfg.model
    resid = steady_state_residual(params, grid)
    state = singular_steady_state(params)
    U = state.field(grid)
    mesh = TimeMesh.build(cfg.solver.T, cfg.solver.n_time, cfg.solver.grading)
    hist = Trajectory(
        params=params, config=cfg.solver, times=mesh.times.copy(),
        snapshots=[U] * mesh.n, recorded_norms={}, initial_data=U,
    )
    t_end = float(mesh.times[-1])
    lin = apply_semigroup(U, t_end, cache=cache)
    D = duhamel_integral(hist, t_end, params, cfg.solver, cache=cache)
    sweep = lin + D.scale(float(params.a))
    ann = (grid.nodes >= 1.0) & (grid.nodes <= 10.0)
    sweep_err = float(
        np.max(np.abs(sweep.values[ann] - U.values[ann]) / np.abs(U.values[ann]))
    )
    ok = resid <= residual_tol and sweep_err <= sweep_tol
    return CheckResult(
        name="steady-state",
        verdict="consistent" if ok else "inconsistent",
        summary={
            "coefficient": state.coefficient,
            "exponent": state.exponent,
            "laplacian_residual": resid,
            "residual_tol": residual_tol,
            "picard_sweep_error": sweep_err,
            "sweep_tol": sweep_tol,
            "sweep_time": t_end,
        },
    )


_CHECKS = {
    "wellposed-contraction": _check_wellposed,
    "selfsimilar": _check_selfsimilar,
    "nonlinear-asymptotics": _check_nonlinear,
    "linear-asymptotics": _check_linear,
    "stability": _check_stability,
    "complex-case3": lambda c, k: _check_complex(c, k, "case3"),
    "complex-case4": lambda c, k: _check_complex(c, k, "case4"),
    "nonexistence": _check_nonexistence,
    "theta-feasibility": _check_theta,
    "smoothing-estimates": _check_smoothing,
    "steady-state": _check_steady_state,
}


def run_checks(cfg: ExperimentConfig, cache: PropagatorCache | None = None) -> list[CheckResult]:
    cache = cache or default_cache()
    results = []
    for name in cfg.checks:
        results.append(_CHECKS[name](cfg, cache))
    return results
