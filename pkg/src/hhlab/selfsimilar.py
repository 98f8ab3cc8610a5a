"""Homogeneous data, forward self-similar solutions, and the exact
singular steady state used as a numerical oracle.

A forward self-similar solution arises from data omega * r^(-sigma_c)
with sigma_c = (2+gamma)/(alpha-1); its rescaled profile
t^(sigma_c/2) u(t, sqrt(t) y) is independent of t, which is what
``invariance_deviation`` certifies on a solved trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exponents import ModelParams, SpaceIndex
from .fields import RadialField
from .grid import RadialGrid
from .lorentz import lorentz_quasi_norm
from .semigroup import PropagatorCache
from .solver import SolverConfig, Trajectory, picard_iterate

#: window in the self-similar variable y where profiles are compared;
#: grid-edge truncation pollutes the extremes first
PROFILE_WINDOW = (0.1, 10.0)


def critical_decay(params: ModelParams) -> float:
    """(2+gamma)/(alpha-1), the homogeneity of self-similar data."""
    return float((2 + float(params.gamma)) / (float(params.alpha) - 1.0))


def homogeneous_data(omega: complex, sigma: float, grid: RadialGrid) -> RadialField:
    """omega * r^(-sigma), tagged with its exact power-law structure."""
    if not 0 < sigma < grid.dim:
        raise ValueError(f"need 0 < sigma < d for local integrability, got {sigma}")
    if omega == 0:
        return RadialField.zero(grid)
    return RadialField.power(grid, omega, sigma)


def construct_self_similar(
    params: ModelParams,
    omega_small: float,
    config: SolverConfig,
    grid: RadialGrid,
    cache: PropagatorCache | None = None,
) -> Trajectory:
    """Solve from the critically homogeneous data omega * r^(-sigma_c)."""
    sigma_c = critical_decay(params)
    phi = homogeneous_data(omega_small, sigma_c, grid)
    return picard_iterate(phi, params, config, cache=cache)


@dataclass
class ProfileSnapshot:
    y_grid: np.ndarray
    profile_values: np.ndarray
    source_time: float
    dim: int
    extrapolated: np.ndarray  # mask: nodes needing data beyond the grid


def profile_extract(traj: Trajectory, t: float, sigma: float) -> ProfileSnapshot:
    """t^(sigma/2) u(t, sqrt(t) y) resampled onto the grid's node set."""
    u = traj.snapshot_at(t)
    y = traj.grid.nodes
    r = math.sqrt(t) * y
    vals = t ** (sigma / 2.0) * u.at(r)
    extrap = (r < traj.grid.nodes[0]) | (r > traj.grid.nodes[-1])
    return ProfileSnapshot(
        y_grid=y, profile_values=vals, source_time=float(t),
        dim=traj.grid.dim, extrapolated=extrap,
    )


def invariance_deviation(
    p1: ProfileSnapshot,
    p2: ProfileSnapshot,
    idx: SpaceIndex = SpaceIndex(0, math.inf),
    window: tuple[float, float] = PROFILE_WINDOW,
    floor: float = 1e-300,
) -> float:
    """|| p1 - p2 ||_idx / max(||p1||_idx, floor) on the y-window."""
    if p1.y_grid.shape != p2.y_grid.shape or not np.allclose(p1.y_grid, p2.y_grid):
        raise ValueError("profiles live on different y-grids")
    keep = (p1.y_grid >= window[0]) & (p1.y_grid <= window[1])
    mid = np.sqrt(p1.y_grid[keep][1:] * p1.y_grid[keep][:-1])
    edges = np.concatenate(([window[0]], mid, [window[1]]))
    # small fields over the window reuse the norm machinery
    sub = RadialGrid(p1.dim, edges)
    a = RadialField(sub, p1.profile_values[keep])
    b = RadialField(sub, p2.profile_values[keep])
    num = lorentz_quasi_norm(a - b, idx)
    den = max(lorentz_quasi_norm(a, idx), floor)
    return num / den


@dataclass
class SingularSteadyState:
    coefficient: float
    exponent: float

    def field(self, grid: RadialGrid) -> RadialField:
        return RadialField.power(grid, self.coefficient, self.exponent)


def profile_to_csv(p: ProfileSnapshot) -> str:
    """Profile export with columns y,re,im,source_time."""
    import csv as _csv
    import io as _io

    buf = _io.StringIO()
    w = _csv.writer(buf, lineterminator="\n")
    w.writerow(["y", "re", "im", "source_time"])
    for y, v in zip(p.y_grid, p.profile_values):
        c = complex(v)
        w.writerow([repr(float(y)), repr(c.real), repr(c.imag), repr(p.source_time)])
    return buf.getvalue()


def singular_steady_state(params: ModelParams) -> SingularSteadyState:
    """L * r^(-(2+gamma)/(alpha-1)) solving -Lap(U) = |x|^gamma U^alpha.

    Exists for d >= 3, a = +1 and alpha > (d+gamma)/(d-2).
    """
    d = params.d
    gamma = float(params.gamma)
    alpha = float(params.alpha)
    if d < 3:
        raise ValueError("singular steady state needs d >= 3")
    if params.a != 1:
        raise ValueError("singular steady state needs the focusing sign a = +1")
    threshold = (d + gamma) / (d - 2.0)
    if not alpha > threshold:
        raise ValueError(
            f"needs alpha > (d+gamma)/(d-2) = {threshold}; got alpha = {alpha}"
        )
    factor = (2.0 + gamma) * (d - 2.0) / (alpha - 1.0) ** 2 * (alpha - threshold)
    L = factor ** (1.0 / (alpha - 1.0))
    return SingularSteadyState(coefficient=L, exponent=(2.0 + gamma) / (alpha - 1.0))


def radial_laplacian_log(values: np.ndarray, nodes: np.ndarray, dim: int) -> np.ndarray:
    """4th-order radial Laplacian using the uniform log-radius substitution.

    With v(x) = u(e^x), Lap u = (v'' + (d-2) v') / r^2; central 5-point
    stencils in x are 4th order.  Returns NaN on the two cells nearest
    each boundary.
    """
    x = np.log(nodes)
    h = x[1] - x[0]
    if not np.allclose(np.diff(x), h, rtol=1e-8):
        raise ValueError("needs a uniform logarithmic grid")
    v = values
    out = np.full_like(v, np.nan, dtype=float)
    vp = (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)
    vpp = (-v[4:] + 16 * v[3:-1] - 30 * v[2:-2] + 16 * v[1:-3] - v[:-4]) / (12 * h**2)
    out[2:-2] = (vpp + (dim - 2) * vp) / nodes[2:-2] ** 2
    return out


def steady_state_residual(
    params: ModelParams,
    grid: RadialGrid,
    annulus: tuple[float, float] = (1.0, 10.0),
    coefficient: float | None = None,
) -> float:
    """max over the annulus of |Lap U + |x|^gamma U^alpha| / (|x|^gamma U^alpha).

    `coefficient` overrides the exact constant (used to verify that scaled
    coefficients are NOT solutions).
    """
    state = singular_steady_state(params)
    L = state.coefficient if coefficient is None else coefficient
    gamma = float(params.gamma)
    alpha = float(params.alpha)
    r = grid.nodes
    U = L * r ** (-state.exponent)
    lap = radial_laplacian_log(U, r, grid.dim)
    rhs = r**gamma * U**alpha
    keep = (r >= annulus[0]) & (r <= annulus[1]) & np.isfinite(lap)
    return float(np.max(np.abs(lap[keep] + rhs[keep]) / rhs[keep]))


def distributional_pairings(
    field: RadialField, widths: tuple[float, ...] = (0.5, 1.0, 2.0)
) -> list[float]:
    """Pair the field against fixed Gaussian bumps (initial-trace checks).

    <f, G_w> with G_w the heat kernel of width parameter w; used to verify
    u(t) -> data in the distributional sense as t -> 0.
    """
    out = []
    for w in widths:
        bump = RadialField.gaussian(field.grid, w)
        out.append(float(np.real(np.sum(field.values * bump.values * field.grid.cell_measures))))
    return out
