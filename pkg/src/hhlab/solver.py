"""Picard iteration for the Duhamel integral equation.

The mild-solution map F(u)(t) = e^{t Lap} phi + a * N(u)(t) is iterated on
a whole trajectory at once, with the fixed-point metric being the
time-weighted auxiliary (Kato) norm.  The history integral

    N(u)(t) = int_0^t e^{(t-s) Lap} [ |x|^gamma |u|^(alpha-1) u (s) ] ds

is evaluated by a dyadic cascade: the snapshot times form a geometric mesh
whose ratio is a root of 2, so the integral over [0, t/2] is the half-time
integral propagated by e^{(t/2) Lap}, and the remainder uses a geometric
ladder in t - tau.  Every propagator time then lives on one shared menu
T * chi^(-e), e integer, so a run needs only O(menu) kernel matrices.

Both integrand endpoints are singular in norm (data roughness at tau = 0,
kernel weight at tau = t); the mesh grading and in-ladder endcaps absorb
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .exponents import (
    ModelParams,
    SpaceIndex,
    aux_pair_admissible,
    aux_time_weight,
    bootstrap_pair_admissible,
    kato_pair_admissible,
    kato_time_weight,
)
from .fields import PowerTail, RadialField
from .grid import RadialGrid
from .lorentz import lorentz_quasi_norm
from .semigroup import PropagatorCache, apply_semigroup, default_cache

#: weighted norms beyond this are treated as numerical blow-up
NORM_CEILING = 1e12


@dataclass
class SolverConfig:
    T: float
    n_time: int = 56
    grading: float = 3.0
    picard_tol: float = 1e-6
    max_iters: int = 25
    kato_index: SpaceIndex = SpaceIndex(0, 6)
    lq_index: Optional[SpaceIndex] = None
    xi_min: float = 1e-4  # relative floor of the quadrature ladder
    track_indices: tuple[SpaceIndex, ...] = ()

    def __post_init__(self) -> None:
        if self.picard_tol <= 0:
            raise ValueError("picard_tol must be positive")
        if self.n_time < 16:
            raise ValueError("need n_time >= 16")


@dataclass(frozen=True)
class TimeMesh:
    """Geometric snapshot mesh t_i = T * chi^(i - n + 1), chi = 2^(1/k).

    Spans the same depth as a power-graded mesh T*(j/n)^g: the smallest
    time is T * n_time^(-grading).  The dyadic ratio makes t_i/2 a mesh
    time again (index i - k), which the cascade integrator relies on.
    """

    T: float
    times: np.ndarray
    k: int  # halving shift: t_i / 2 == t_{i-k}

    #: octave subdivisions of the mesh ratio; fixed so that runs with
    #: power-of-two horizons share one propagator menu
    OCTAVE_SPLITS = 3

    @classmethod
    def build(cls, T: float, n_time: int, grading: float) -> "TimeMesh":
        depth_decades = grading * math.log10(n_time)
        n_octaves = depth_decades * math.log2(10.0)
        k = cls.OCTAVE_SPLITS
        n = int(math.ceil(n_octaves * k)) + 1
        chi = 2.0 ** (1.0 / k)
        times = T * chi ** (np.arange(n) - (n - 1.0))
        return cls(T=T, times=times, k=k)

    @property
    def chi(self) -> float:
        return 2.0 ** (1.0 / self.k)

    @property
    def n(self) -> int:
        return self.times.size

    def menu_time(self, e: int) -> float:
        """The shared propagator time T * chi^(-e)."""
        return self.T * self.chi ** (-float(e))

    def index_of(self, t: float) -> int:
        i = int(np.argmin(np.abs(np.log(self.times) - math.log(t))))
        if not math.isclose(float(self.times[i]), float(t), rel_tol=1e-9):
            raise ValueError(f"t={t} is not a mesh time")
        return i


@dataclass
class Trajectory:
    params: ModelParams
    config: SolverConfig
    times: np.ndarray
    snapshots: list[RadialField]
    recorded_norms: dict[int, dict[SpaceIndex, float]]
    iterations_used: int = 0
    converged: bool = False
    diverged: bool = False
    contraction_ratios: list[float] = dc_field(default_factory=list)
    picard_distances: list[float] = dc_field(default_factory=list)
    rho_measured: float = math.nan  # Kato norm of the linear flow
    initial_data: Optional[RadialField] = None

    @property
    def grid(self) -> RadialGrid:
        return self.snapshots[0].grid

    def snapshot_at(self, t: float) -> RadialField:
        i = int(np.argmin(np.abs(self.times - t)))
        if not math.isclose(float(self.times[i]), float(t), rel_tol=1e-9):
            raise ValueError(f"t={t} was not recorded")
        return self.snapshots[i]

    def norm_track(self, idx: SpaceIndex) -> np.ndarray:
        return np.array([lorentz_quasi_norm(u, idx) for u in self.snapshots])

    def implied_contraction_constant(self) -> float:
        """C0 estimate from the observed ratio ~ 2 C0 M^(alpha-1)."""
        if not self.contraction_ratios:
            return math.nan
        M = max(self.rho_measured, 1e-300)
        alpha = float(self.params.alpha)
        return self.contraction_ratios[-1] / (2.0 * M ** (alpha - 1.0))

    def smallness_report(self, multiplier: float = 2.0) -> dict:
        """Feasibility of rho + 2*C0*M^alpha <= M at M = multiplier*rho."""
        rho = self.rho_measured
        c0 = self.implied_contraction_constant()
        M = multiplier * rho
        alpha = float(self.params.alpha)
        lhs = rho + 2.0 * c0 * M**alpha if math.isfinite(c0) else math.inf
        return {"rho": rho, "C0_estimate": c0, "M": M, "feasible": bool(lhs <= M)}

    def export_manifest(self) -> dict:
        return {
            "times": [float(t) for t in self.times],
            "norms": {
                str(i): {idx.label(): v for idx, v in d.items()}
                for i, d in self.recorded_norms.items()
            },
            "contraction_ratios": self.contraction_ratios,
            "converged": self.converged,
            "diverged": self.diverged,
            "iterations_used": self.iterations_used,
        }


# ---------------------------------------------------------------------------
# nonlinearity
# ---------------------------------------------------------------------------


def _power_nonlinearity(u: RadialField, params: ModelParams, sign: float) -> RadialField:
    gamma = float(params.gamma)
    alpha = float(params.alpha)
    r = u.grid.nodes
    vals = sign * r**gamma * np.abs(u.values) ** (alpha - 1.0) * u.values
    coef, power = u.inner_coef_power()
    tail = None
    if coef != 0:
        tail = PowerTail(sign * abs(coef) ** (alpha - 1.0) * coef, alpha * power - gamma)
    out_tail = None
    if u.outer_tail is not None and u.outer_tail.coef != 0:
        ot = u.outer_tail
        out_tail = PowerTail(sign * abs(ot.coef) ** (alpha - 1.0) * ot.coef, alpha * ot.power - gamma)
    return RadialField(u.grid, vals, inner_tail=tail, outer_tail=out_tail)


def nonlinearity(u: RadialField, params: ModelParams) -> RadialField:
    """a |x|^gamma |u|^(alpha-1) u, complex modulus for complex fields."""
    return _power_nonlinearity(u, params, float(params.a))


# ---------------------------------------------------------------------------
# cascade evaluation of the history integral
# ---------------------------------------------------------------------------


class CascadeIntegrator:
    """Evaluates int_0^{t_i} e^{(t_i - tau) Lap} g(tau) dtau on the mesh."""

    def __init__(self, grid: RadialGrid, mesh: TimeMesh, cache: PropagatorCache, xi_min: float = 1e-4):
        self.grid = grid
        self.mesh = mesh
        self.cache = cache
        self.xi_min = xi_min
        self.ladder_depth = int(math.ceil(math.log(1.0 / xi_min) / math.log(mesh.chi)))

    def _apply(self, field: RadialField, e: int) -> RadialField:
        return apply_semigroup(field, self.mesh.menu_time(e), cache=self.cache)

    def _ladder_weights(self, j_lo: int, j_hi: int, t: float) -> np.ndarray:
        """Weights reproducing int_0^{s_lo} H(s) ds from H at s_j = t chi^-j.

        Composite Simpson in ln s from the wide end (trapezoid for a
        leftover pair), plus the [0, s_deepest] endcap on the last node.
        """
        chi = self.mesh.chi
        h = math.log(chi)
        npts = j_hi - j_lo + 1
        coeff = np.zeros(npts)
        m = npts if npts % 2 == 1 else npts - 1
        if m >= 3:
            c = np.ones(m)
            c[1:-1:2] = 4.0
            c[2:-1:2] = 2.0
            coeff[:m] += c * (h / 3.0)
        if m != npts and npts >= 2:
            coeff[-2:] += h / 2.0
        s = t * chi ** (-np.arange(j_lo, j_hi + 1, dtype=float))
        w = coeff * s  # ds = s d(ln s)
        w[-1] += s[-1]  # endcap
        return w

    def integrate(self, g_at: Callable[[float], RadialField], upto: int | None = None) -> list[RadialField]:
        """History integrals D(t_i) for i = 0..upto (whole mesh default)."""
        mesh = self.mesh
        k = mesh.k
        n = mesh.n if upto is None else upto + 1
        J = k + self.ladder_depth
        out: list[RadialField] = []
        for i in range(n):
            t = float(mesh.times[i])
            e_base = mesh.n - 1 - i
            w = self._ladder_weights(k, J, t)
            acc: RadialField | None = None
            for idx, j in enumerate(range(k, J + 1)):
                s = t * mesh.chi ** (-j)
                node = self._apply(g_at(t - s), e_base + j)
                term = node.scale(w[idx])
                acc = term if acc is None else acc + term
            if i >= k:
                acc = acc + self._apply(out[i - k], e_base + k)
            else:
                # base case: freeze the kernel at t/2 over tau in (0, t/2];
                # the same geometric ladder serves as the tau quadrature
                vacc: RadialField | None = None
                for idx, j in enumerate(range(k, J + 1)):
                    tau = t * mesh.chi ** (-j)
                    gv = g_at(tau).scale(w[idx])
                    vacc = gv if vacc is None else vacc + gv
                acc = acc + self._apply(vacc, e_base + k)
            out.append(acc)
        return out


def _lagrange_weights(x: np.ndarray, x0: float) -> np.ndarray:
    w = np.ones(x.size)
    for i in range(x.size):
        for j in range(x.size):
            if i != j:
                w[i] *= (x0 - x[j]) / (x[i] - x[j])
    return w


def _blend_fields(fields: list[RadialField], weights: np.ndarray) -> RadialField:
    vals = sum(w * f.values for w, f in zip(weights, fields))
    tails = [f.inner_tail for f in fields]
    tail = None
    if all(t is not None for t in tails) and len({t.power for t in tails}) == 1:
        tail = PowerTail(sum(w * t.coef for w, t in zip(weights, tails)), tails[0].power)
    out_tails = [f.outer_tail for f in fields]
    otail = None
    if all(t is not None for t in out_tails) and len({t.power for t in out_tails}) == 1:
        otail = PowerTail(sum(w * t.coef for w, t in zip(weights, out_tails)), out_tails[0].power)
    return RadialField(fields[0].grid, vals, inner_tail=tail, outer_tail=otail)


class _GInterpolant:
    """Integrand g(tau) from mesh samples.

    Cubic in ln(tau) through the mesh samples; below the first mesh time
    the underlying state is blended linearly between the data and the
    first snapshot and mapped through `g_of_state`.
    """

    def __init__(self, mesh: TimeMesh, g_mesh: list[RadialField],
                 phi: RadialField, u0: RadialField,
                 g_of_state: Callable[[RadialField, float], RadialField]):
        self.mesh = mesh
        self.g_mesh = g_mesh
        self.phi = phi
        self.u0 = u0
        self.g_of_state = g_of_state
        self.ln_t = np.log(mesh.times)

    def __call__(self, tau: float) -> RadialField:
        times = self.mesh.times
        if tau >= times[0]:
            i = int(np.searchsorted(times, tau))
            lo = min(max(i - 2, 0), times.size - 4)
            wts = _lagrange_weights(self.ln_t[lo : lo + 4], math.log(tau))
            return _blend_fields(self.g_mesh[lo : lo + 4], wts)
        lam = tau / float(times[0])
        state = self.phi.scale(1.0 - lam) + self.u0.scale(lam)
        return self.g_of_state(state, tau)


def duhamel_integral(
    history: Trajectory,
    t: float,
    params: ModelParams,
    config: SolverConfig,
    cache: PropagatorCache | None = None,
) -> RadialField:
    """int_0^t e^{(t-tau) Lap} [ |x|^gamma |u|^(alpha-1) u ] dtau.

    t must be one of the trajectory's mesh times; the integrand carries no
    sign a (the solver applies it).
    """
    cache = cache or default_cache()
    k = TimeMesh.build(config.T, config.n_time, config.grading).k
    mesh = TimeMesh(T=config.T, times=history.times, k=k)
    i = mesh.index_of(t)
    integ = CascadeIntegrator(history.grid, mesh, cache, xi_min=config.xi_min)
    g_mesh = [_power_nonlinearity(u, params, 1.0) for u in history.snapshots]
    phi = history.initial_data if history.initial_data is not None else history.snapshots[0]
    g_at = _GInterpolant(
        mesh, g_mesh, phi, history.snapshots[0],
        lambda state, tau: _power_nonlinearity(state, params, 1.0),
    )
    return integ.integrate(g_at, upto=i)[i]


# ---------------------------------------------------------------------------
# fixed-point driver
# ---------------------------------------------------------------------------


def _kato_distance(fields_a, fields_b, times, weight, idx) -> float:
    out = 0.0
    for t, a, b in zip(times, fields_a, fields_b):
        out = max(out, float(t) ** weight * lorentz_quasi_norm(a - b, idx))
    return out


def _weighted_sup(fields, times, weight, idx) -> float:
    return max(
        float(t) ** weight * lorentz_quasi_norm(u, idx) for t, u in zip(times, fields)
    )


def _record_norms(traj: Trajectory) -> None:
    indices = [traj.config.kato_index, SpaceIndex(0, math.inf)]
    if traj.config.lq_index is not None:
        indices.append(traj.config.lq_index)
    indices.extend(traj.config.track_indices)
    for i, u in enumerate(traj.snapshots):
        rec = {}
        for idx in indices:
            try:
                rec[idx] = lorentz_quasi_norm(u, idx)
            except Exception:
                rec[idx] = math.inf
        traj.recorded_norms[i] = rec


def _fixed_point(
    phi: RadialField,
    params: ModelParams,
    config: SolverConfig,
    cache: PropagatorCache,
    g_on_mesh: Callable[[list[RadialField]], list[RadialField]],
    g_of_state: Callable[[RadialField, float], RadialField],
    coupling_sign: float,
    weight: float,
) -> Trajectory:
    mesh = TimeMesh.build(config.T, config.n_time, config.grading)
    integ = CascadeIntegrator(phi.grid, mesh, cache, xi_min=config.xi_min)
    kp = config.kato_index

    linear = [apply_semigroup(phi, float(t), cache=cache) for t in mesh.times]
    rho = _weighted_sup(linear, mesh.times, weight, kp)

    current = list(linear)
    ratios: list[float] = []
    distances: list[float] = []
    converged = diverged = False
    iterations = 0
    for it in range(config.max_iters):
        iterations = it + 1
        g_mesh = g_on_mesh(current)
        g_at = _GInterpolant(mesh, g_mesh, phi, current[0], g_of_state)
        D = integ.integrate(g_at)
        new = [lin + d.scale(coupling_sign) for lin, d in zip(linear, D)]
        dist = _kato_distance(new, current, mesh.times, weight, kp)
        distances.append(dist)
        if len(distances) >= 2 and distances[-2] > 0:
            ratios.append(dist / distances[-2])
        size = _weighted_sup(new, mesh.times, weight, kp)
        current = new
        if size > NORM_CEILING or not math.isfinite(size):
            diverged = True
            break
        if dist <= config.picard_tol * max(size, 1e-300):
            converged = True
            break
        if len(ratios) >= 3 and all(r > 1.0 for r in ratios[-3:]):
            diverged = True
            break

    traj = Trajectory(
        params=params,
        config=config,
        times=mesh.times.copy(),
        snapshots=current,
        recorded_norms={},
        iterations_used=iterations,
        converged=converged,
        diverged=diverged,
        contraction_ratios=ratios,
        picard_distances=distances,
        rho_measured=rho,
        initial_data=phi,
    )
    _record_norms(traj)
    return traj


def picard_iterate(
    phi: RadialField,
    params: ModelParams,
    config: SolverConfig,
    cache: PropagatorCache | None = None,
) -> Trajectory:
    """Iterate u -> e^{t Lap} phi + a N(u) from the linear flow.

    Stops when the Kato-norm distance of consecutive iterates is below
    picard_tol relative to the iterate size.  Three consecutive
    contraction ratios above 1 mark the trajectory as diverged (the
    smallness needed by the fixed-point argument is not available); the
    partial trajectory is still returned for inspection.
    """
    params.require_wellposed_range()
    rep = kato_pair_admissible(params, config.kato_index)
    if not rep.ok:
        raise ValueError(f"inadmissible Kato pair: {rep.violated + rep.boundary}")
    cache = cache or default_cache()
    weight = kato_time_weight(params, config.kato_index)
    if float(params.a) == 0.0:
        # linear equation: the Duhamel term vanishes identically
        mesh = TimeMesh.build(config.T, config.n_time, config.grading)
        linear = [apply_semigroup(phi, float(t), cache=cache) for t in mesh.times]
        traj = Trajectory(
            params=params, config=config, times=mesh.times.copy(), snapshots=linear,
            recorded_norms={}, iterations_used=1, converged=True,
            picard_distances=[0.0],
            rho_measured=_weighted_sup(linear, mesh.times, weight, config.kato_index),
            initial_data=phi,
        )
        _record_norms(traj)
        return traj
    return _fixed_point(
        phi,
        params,
        config,
        cache,
        g_on_mesh=lambda current: [_power_nonlinearity(u, params, 1.0) for u in current],
        g_of_state=lambda state, tau: _power_nonlinearity(state, params, 1.0),
        coupling_sign=float(params.a),
        weight=weight,
    )


# ---------------------------------------------------------------------------
# two-component systems
# ---------------------------------------------------------------------------


def _modulus_power_tail(t1, t2, side: str):
    """Leading tail of sqrt(f1^2 + f2^2) given the component tails."""
    if t1 is None and t2 is None:
        return None
    if t1 is None:
        return PowerTail(abs(t2.coef), t2.power)
    if t2 is None:
        return PowerTail(abs(t1.coef), t1.power)
    if abs(t1.power - t2.power) < 1e-12:
        return PowerTail(math.hypot(abs(t1.coef), abs(t2.coef)), t1.power)
    if side == "inner":
        lead = t1 if t1.power > t2.power else t2
    else:
        lead = t1 if t1.power < t2.power else t2
    return PowerTail(abs(lead.coef), lead.power)


def _system_nonlinearity(
    u1: RadialField, u2: RadialField, params: ModelParams
) -> tuple[RadialField, RadialField]:
    """(u1^2 + u2^2)^((alpha-1)/2) * (u1, u2) with the |x|^gamma weight,
    unsigned; each component keeps its own power-law continuations."""
    gamma = float(params.gamma)
    alpha = float(params.alpha)
    r = u1.grid.nodes
    mod = np.hypot(np.abs(u1.values), np.abs(u2.values)) ** (alpha - 1.0)
    base = r**gamma * mod

    def tails(uj: RadialField):
        out = {}
        for side in ("inner", "outer"):
            tm = _modulus_power_tail(
                u1.inner_tail if side == "inner" else u1.outer_tail,
                u2.inner_tail if side == "inner" else u2.outer_tail,
                side,
            )
            tj = uj.inner_tail if side == "inner" else uj.outer_tail
            if side == "inner" and tj is None:
                cj, pj = uj.inner_coef_power()
                tj = PowerTail(cj, pj)
            if tm is None or tj is None or tm.coef == 0 or tj.coef == 0:
                out[side] = None
            else:
                out[side] = PowerTail(
                    tm.coef ** (alpha - 1.0) * tj.coef,
                    (alpha - 1.0) * tm.power + tj.power - gamma,
                )
        return out

    t1 = tails(u1)
    t2 = tails(u2)
    g1 = RadialField(u1.grid, base * u1.values, inner_tail=t1["inner"], outer_tail=t1["outer"])
    g2 = RadialField(u2.grid, base * u2.values, inner_tail=t2["inner"], outer_tail=t2["outer"])
    return g1, g2


def _pair_fixed_point(
    phi1: RadialField,
    phi2: RadialField,
    params: ModelParams,
    config: SolverConfig,
    cache: PropagatorCache,
) -> tuple[Trajectory, Trajectory]:
    """Picard iteration of the fully coupled two-component system.

    Keeping the components as separate real fields preserves each one's
    power-law continuation (a single complex field can only carry the
    leading tail, which starves the faster-decaying component's boundary).
    """
    mesh = TimeMesh.build(config.T, config.n_time, config.grading)
    integ = CascadeIntegrator(phi1.grid, mesh, cache, xi_min=config.xi_min)
    kp = config.kato_index
    weight = kato_time_weight(params, kp)
    a = float(params.a)

    lin1 = [apply_semigroup(phi1, float(t), cache=cache) for t in mesh.times]
    lin2 = [apply_semigroup(phi2, float(t), cache=cache) for t in mesh.times]
    rho = max(
        _weighted_sup(lin1, mesh.times, weight, kp),
        _weighted_sup(lin2, mesh.times, weight, kp),
    )
    cur1, cur2 = list(lin1), list(lin2)
    ratios: list[float] = []
    distances: list[float] = []
    converged = diverged = False
    iterations = 0
    for it in range(config.max_iters):
        iterations = it + 1
        pairs = [_system_nonlinearity(x, y, params) for x, y in zip(cur1, cur2)]
        g1_mesh = [p[0] for p in pairs]
        g2_mesh = [p[1] for p in pairs]

        def early_state(component: int):
            phi_c, u0_c = (phi1, cur1[0]) if component == 1 else (phi2, cur2[0])
            phi_o, u0_o = (phi2, cur2[0]) if component == 1 else (phi1, cur1[0])

            def g_of_state(state: RadialField, tau: float) -> RadialField:
                lam = tau / float(mesh.times[0])
                other = phi_o.scale(1.0 - lam) + u0_o.scale(lam)
                g_self, _ = _system_nonlinearity(state, other, params)
                return g_self

            return g_of_state

        g1_at = _GInterpolant(mesh, g1_mesh, phi1, cur1[0], early_state(1))
        g2_at = _GInterpolant(mesh, g2_mesh, phi2, cur2[0], early_state(2))
        D1 = integ.integrate(g1_at)
        D2 = integ.integrate(g2_at)
        new1 = [lin + d.scale(a) for lin, d in zip(lin1, D1)]
        new2 = [lin + d.scale(a) for lin, d in zip(lin2, D2)]
        dist = max(
            _kato_distance(new1, cur1, mesh.times, weight, kp),
            _kato_distance(new2, cur2, mesh.times, weight, kp),
        )
        distances.append(dist)
        if len(distances) >= 2 and distances[-2] > 0:
            ratios.append(dist / distances[-2])
        size = max(
            _weighted_sup(new1, mesh.times, weight, kp),
            _weighted_sup(new2, mesh.times, weight, kp),
        )
        cur1, cur2 = new1, new2
        if size > NORM_CEILING or not math.isfinite(size):
            diverged = True
            break
        if dist <= config.picard_tol * max(size, 1e-300):
            converged = True
            break
        if len(ratios) >= 3 and all(r > 1.0 for r in ratios[-3:]):
            diverged = True
            break

    def pack(snaps, phi) -> Trajectory:
        traj = Trajectory(
            params=params, config=config, times=mesh.times.copy(), snapshots=snaps,
            recorded_norms={}, iterations_used=iterations, converged=converged,
            diverged=diverged, contraction_ratios=list(ratios),
            picard_distances=list(distances), rho_measured=rho, initial_data=phi,
        )
        _record_norms(traj)
        return traj

    return pack(cur1, phi1), pack(cur2, phi2)


def solve_system(
    phi1: RadialField,
    phi2: RadialField,
    params: ModelParams,
    config: SolverConfig,
    coupling: str = "full",
    cache: PropagatorCache | None = None,
    passive_weight: float | None = None,
) -> tuple[Trajectory, Trajectory]:
    """Solve the two-component systems.

    full:  both components driven by (u1^2 + u2^2)^((alpha-1)/2) --
           the real form of the complex scalar equation;
    case3: z1 self-coupled, z2 driven linearly by |z1|^(alpha-1);
    case4: the mirror image (second component drives the first).

    ``passive_weight`` overrides the time weight used as the fixed-point
    metric for the passively coupled component (defaults to the critical
    Kato weight).
    """
    cache = cache or default_cache()
    if coupling == "full":
        if phi2.abs().integral() == 0:
            # consistency reduction: zero imaginary part stays zero
            traj = picard_iterate(phi1, params, config, cache=cache)
            zero = Trajectory(
                params=params, config=config, times=traj.times.copy(),
                snapshots=[RadialField.zero(phi1.grid) for _ in traj.snapshots],
                recorded_norms={}, iterations_used=traj.iterations_used,
                converged=traj.converged, diverged=traj.diverged,
                rho_measured=0.0, initial_data=phi2,
            )
            _record_norms(zero)
            return traj, zero
        return _pair_fixed_point(phi1, phi2, params, config, cache)
    if coupling not in ("case3", "case4"):
        raise ValueError(f"unknown coupling {coupling!r}")

    driver_phi, passive_phi = (phi1, phi2) if coupling == "case3" else (phi2, phi1)
    driver = picard_iterate(driver_phi, params, config, cache=cache)
    alpha = float(params.alpha)
    gamma = float(params.gamma)
    r_gamma = driver.grid.nodes**gamma
    coeffs = [np.abs(u.values) ** (alpha - 1.0) for u in driver.snapshots]
    coeff_tails = []
    for u in driver.snapshots:
        c, p = u.inner_coef_power()
        ot = u.outer_tail
        coeff_tails.append(
            (
                (abs(c) ** (alpha - 1.0), (alpha - 1.0) * p),
                None if ot is None else (abs(ot.coef) ** (alpha - 1.0), (alpha - 1.0) * ot.power),
            )
        )
    driver_interp = _GInterpolant(
        TimeMesh(T=config.T, times=driver.times,
                 k=TimeMesh.build(config.T, config.n_time, config.grading).k),
        driver.snapshots, driver.initial_data, driver.snapshots[0],
        lambda state, tau: state,
    )

    def _coupled_tails(z: RadialField, ct_in, ct_out):
        cz, pz = z.inner_coef_power()
        tail = None
        if cz != 0 and ct_in[0] != 0:
            tail = PowerTail(ct_in[0] * cz, ct_in[1] + pz - gamma)
        otail = None
        if z.outer_tail is not None and ct_out is not None and ct_out[0] != 0:
            otail = PowerTail(
                ct_out[0] * z.outer_tail.coef, ct_out[1] + z.outer_tail.power - gamma
            )
        return tail, otail

    def coupled(z: RadialField, i: int) -> RadialField:
        vals = r_gamma * coeffs[i] * z.values
        tail, otail = _coupled_tails(z, *coeff_tails[i])
        return RadialField(z.grid, vals, inner_tail=tail, outer_tail=otail)

    def coupled_state(z_state: RadialField, tau: float) -> RadialField:
        zdrv = driver_interp(tau)
        vals = r_gamma * np.abs(zdrv.values) ** (alpha - 1.0) * z_state.values
        cd, pd = zdrv.inner_coef_power()
        ot = zdrv.outer_tail
        ct_in = (abs(cd) ** (alpha - 1.0), (alpha - 1.0) * pd)
        ct_out = None if ot is None else (abs(ot.coef) ** (alpha - 1.0), (alpha - 1.0) * ot.power)
        tail, otail = _coupled_tails(z_state, ct_in, ct_out)
        return RadialField(z_state.grid, vals, inner_tail=tail, outer_tail=otail)

    weight = passive_weight if passive_weight is not None else kato_time_weight(params, config.kato_index)
    passive = _fixed_point(
        passive_phi,
        params,
        config,
        cache,
        g_on_mesh=lambda current: [coupled(z, i) for i, z in enumerate(current)],
        g_of_state=coupled_state,
        coupling_sign=float(params.a),
        weight=weight,
    )
    return (driver, passive) if coupling == "case3" else (passive, driver)


# ---------------------------------------------------------------------------
# monitors and probes
# ---------------------------------------------------------------------------


def kato_norm(traj: Trajectory, params: ModelParams, lq: SpaceIndex, kp: SpaceIndex) -> float:
    """sup_t t^((d/2)(l/d + 1/q - k/d - 1/p)) ||u(t)||_{L^(p,inf)_k}."""
    rep = aux_pair_admissible(params, lq, kp)
    if not rep.ok:
        raise ValueError(f"(k,p) not admissible for the auxiliary norm: {rep.violated}")
    w = aux_time_weight(params, lq, kp)
    return _weighted_sup(traj.snapshots, traj.times, w, kp)


@dataclass
class BlowupReport:
    crossed: bool
    ceiling: float
    first_crossing_time: float | None
    track: np.ndarray


def blowup_monitor(traj: Trajectory, kp: SpaceIndex, ceiling: float = 1e6) -> BlowupReport:
    """Check whether the weighted Kato track escapes a ceiling before T."""
    w = kato_time_weight(traj.params, kp)
    track = np.array(
        [float(t) ** w * lorentz_quasi_norm(u, kp) for t, u in zip(traj.times, traj.snapshots)]
    )
    above = np.where(track > ceiling)[0]
    first = float(traj.times[above[0]]) if above.size else None
    return BlowupReport(crossed=bool(above.size), ceiling=ceiling, first_crossing_time=first, track=track)


@dataclass
class UpgradeReport:
    sup_weighted: float
    track: np.ndarray
    weight: float


def regularity_upgrade_probe(traj: Trajectory, from_kp: SpaceIndex, to_kp: SpaceIndex) -> UpgradeReport:
    """Verify the solution stays bounded in a second auxiliary norm."""
    rep = bootstrap_pair_admissible(traj.params, from_kp, to_kp)
    if not rep.ok:
        raise ValueError(f"upgrade pair not admissible: {rep.violated + rep.boundary}")
    w = kato_time_weight(traj.params, to_kp)
    track = np.array(
        [float(t) ** w * lorentz_quasi_norm(u, to_kp) for t, u in zip(traj.times, traj.snapshots)]
    )
    return UpgradeReport(sup_weighted=float(np.max(track)), track=track, weight=w)
