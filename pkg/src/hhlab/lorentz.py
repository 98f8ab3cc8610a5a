"""Weighted Lorentz quasi-norms of sampled radial fields.

The norm of a field is the norm of its piecewise-constant representative:
the weighted function |x|^s f is flattened to the level r_node^s * |f_i|
per annulus, so rearrangements and the (q, r) integrals have closed forms
per step and carry no quadrature error beyond the field discretization.

Fields tagged as exact power laws (`RadialField.exact_power`) bypass the
steps entirely: their distribution function is known analytically and the
norms are evaluated in closed form.  Power-law continuations beyond the
grid (`inner_tail` / `outer_tail`) enter the distribution function as
analytic corrections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .exponents import SpaceIndex, beta_function
from .fields import RadialField
from .grid import ball_volume


class DivergentNormError(ValueError):
    """The field's tails are too heavy for the requested (s, q, r)."""


def _inv(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / float(x)


# ---------------------------------------------------------------------------
# step-level bookkeeping
# ---------------------------------------------------------------------------


def _weighted_steps(field: RadialField, s: float):
    """Sorted (descending) positive levels of |x|^s |f| with cell measures."""
    levels = field.grid.nodes**s * np.abs(field.values)
    meas = field.grid.cell_measures
    keep = levels > 0
    levels, meas = levels[keep], meas[keep]
    order = np.argsort(levels)[::-1]
    return levels[order], meas[order]


@dataclass(frozen=True)
class Rearrangement:
    """Right-continuous step rearrangement: value levels[j] on
    [breakpoints[j-1], breakpoints[j]) with breakpoints[-1] the total
    measure of the support."""

    breakpoints: np.ndarray  # increasing positive cumulative measures
    levels: np.ndarray  # decreasing positive levels

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        padded = np.append(self.levels, 0.0)
        return padded[idx]

    def total_measure(self) -> float:
        return float(self.breakpoints[-1]) if self.breakpoints.size else 0.0


def decreasing_rearrangement(field: RadialField, weight_s: float = 0.0) -> Rearrangement:
    """Exact rearrangement of the piecewise-constant representative."""
    levels, meas = _weighted_steps(field, weight_s)
    if levels.size == 0:
        return Rearrangement(np.array([]), np.array([]))
    # merge equal levels
    uniq, start = np.unique(-levels, return_index=True)
    out_levels = -uniq
    out_meas = np.add.reduceat(meas, start)
    return Rearrangement(np.cumsum(out_meas), out_levels)


# ---------------------------------------------------------------------------
# tail descriptions: each tail contributes an analytic piece of d_f
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _InnerPiece:
    """Weighted inner continuation a * r^(-beta) on (0, r0)."""

    a: float
    beta: float
    r0: float
    d: int

    @property
    def ball(self) -> float:
        return ball_volume(self.d, self.r0)

    @property
    def edge_level(self) -> float:
        return self.a * self.r0 ** (-self.beta)

    def measure_above(self, lam: float) -> float:
        if self.a == 0 or lam < 0:
            return 0.0
        if self.beta > 0:
            if lam <= self.edge_level:
                # level set reaches the edge: whole inner ball
                return self.ball
            r = (self.a / lam) ** (1.0 / self.beta)  # < r0 here
            return ball_volume(self.d, r)
        if self.beta == 0:
            return self.ball if self.a > lam else 0.0
        # increasing toward the edge
        if lam >= self.edge_level:
            return 0.0
        r_in = (lam / self.a) ** (1.0 / -self.beta) if lam > 0 else 0.0
        return max(0.0, self.ball - ball_volume(self.d, min(self.r0, r_in)))


@dataclass(frozen=True)
class _OuterPiece:
    """Weighted outer continuation a * r^(-beta) on (R, inf)."""

    a: float
    beta: float
    R: float
    d: int

    @property
    def edge_level(self) -> float:
        return self.a * self.R ** (-self.beta)

    def measure_above(self, lam: float) -> float:
        if self.a == 0:
            return 0.0
        if self.beta <= 0:
            return math.inf
        if lam >= self.edge_level:
            return 0.0
        if lam <= 0:
            return math.inf
        try:
            r = (float(self.a) / float(lam)) ** (1.0 / self.beta)
        except OverflowError:
            return math.inf
        if math.isinf(r):
            return math.inf
        return max(0.0, ball_volume(self.d, r) - ball_volume(self.d, self.R))


def _tail_pieces(field: RadialField, s: float):
    d = field.grid.dim
    inner = outer = None
    e0 = field.grid.edges[0]
    if e0 > 0:
        coef, power = field.inner_coef_power()
        a = abs(coef)
        if a > 0:
            inner = _InnerPiece(a=a, beta=power - s, r0=float(e0), d=d)
    if field.outer_tail is not None and abs(field.outer_tail.coef) > 0:
        outer = _OuterPiece(
            a=abs(field.outer_tail.coef),
            beta=field.outer_tail.power - s,
            R=float(field.grid.edges[-1]),
            d=d,
        )
    return inner, outer


def distribution_function(field: RadialField, weight_s: float, lam: float) -> float:
    """Lebesgue measure of {x : | |x|^s f(x) | > lam}."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if field.exact_power is not None:
        return _power_distribution(field, weight_s, lam)
    levels, meas = _weighted_steps(field, weight_s)
    total = float(np.sum(meas[levels > lam]))
    inner, outer = _tail_pieces(field, weight_s)
    if inner is not None:
        total += inner.measure_above(lam)
    if outer is not None:
        total += outer.measure_above(lam)
    return total


def _power_distribution(field: RadialField, s: float, lam: float) -> float:
    ep = field.exact_power
    d = field.grid.dim
    a = abs(ep.coef)
    beta = ep.power - s
    R = ep.support
    if a == 0:
        return 0.0
    if beta > 0:
        if lam <= 0:
            return math.inf if math.isinf(R) else ball_volume(d, R)
        r = (a / lam) ** (1.0 / beta)
        r = min(r, R)
        return ball_volume(d, r)
    if beta == 0:
        if a > lam:
            return math.inf if math.isinf(R) else ball_volume(d, R)
        return 0.0
    if math.isinf(R):
        return math.inf
    if lam >= a * R ** (-beta):
        return 0.0
    r_in = (lam / a) ** (1.0 / -beta) if lam > 0 else 0.0
    return max(0.0, ball_volume(d, R) - ball_volume(d, min(R, r_in)))


# ---------------------------------------------------------------------------
# quasi-norms
# ---------------------------------------------------------------------------


def lorentz_quasi_norm(field: RadialField, idx: SpaceIndex) -> float:
    """Quasi-norm of |x|^s f in L^(q,r) of the step representative.

    Raises DivergentNormError when the analytic tails make the norm
    infinite for the requested indices.
    """
    s = float(idx.s)
    q = float(idx.q)
    r = float(idx.r)
    if field.exact_power is not None:
        return power_law_norm(
            abs(field.exact_power.coef), field.exact_power.power, field.exact_power.support,
            field.grid.dim, idx,
        )
    levels, meas = _weighted_steps(field, s)
    inner, outer = _tail_pieces(field, s)
    if math.isinf(q):
        return _sup_norm(levels, inner, outer)
    if math.isinf(r):
        return _weak_norm(levels, meas, q, inner, outer, field.grid.dim)
    return _strong_norm(levels, meas, q, r, inner, outer)


def _sup_norm(levels, inner, outer) -> float:
    best = float(levels[0]) if levels.size else 0.0
    if inner is not None:
        if inner.beta > 0:
            raise DivergentNormError("inner tail is unbounded, L^inf norm diverges")
        best = max(best, inner.edge_level if inner.beta < 0 else inner.a)
    if outer is not None:
        if outer.beta < 0:
            raise DivergentNormError("outer tail grows, L^inf norm diverges")
        best = max(best, outer.edge_level if outer.beta > 0 else outer.a)
    return best


def _distribution_at(levels, meas, cum, lam, inner, outer) -> float:
    """d(lam) from presorted steps plus tails."""
    j = np.searchsorted(-levels, -lam, side="left")  # count of levels > lam
    total = float(cum[j - 1]) if j > 0 else 0.0
    if inner is not None:
        total += inner.measure_above(lam)
    if outer is not None:
        total += outer.measure_above(lam)
    return total


def _weak_norm(levels, meas, q, inner, outer, d) -> float:
    """sup over lam of lam * d(lam)^(1/q)."""
    if levels.size == 0 and inner is None and outer is None:
        return 0.0
    # divergence screens
    if inner is not None and inner.beta * q > d:
        raise DivergentNormError(
            f"inner tail r^-{inner.beta + 0:g} too singular for weak-L^{q:g}"
        )
    if outer is not None and (outer.beta <= 0 or outer.beta * q < d):
        raise DivergentNormError(
            f"outer tail decays too slowly for weak-L^{q:g}"
        )
    if levels.size:
        # merge duplicate levels, keeping descending order
        asc_levels, asc_meas = levels[::-1], meas[::-1]
        uniq, start = np.unique(asc_levels, return_index=True)
        levels = uniq[::-1]
        meas = np.add.reduceat(asc_meas, start)[::-1]
    cum = np.cumsum(meas) if levels.size else np.array([])
    candidates: list[float] = []

    def h(lam: float) -> float:
        if lam <= 0:
            return 0.0
        dd = _distribution_at(levels, meas, cum, lam, inner, outer)
        if dd <= 0:
            return 0.0
        if math.isinf(dd):
            return math.inf
        return lam * dd ** (1.0 / q)

    for j in range(levels.size):
        # sup over the step at level v_j is approached as lam -> v_j^-
        lam = float(levels[j])
        dd = float(cum[j])
        if inner is not None:
            dd += inner.measure_above(lam * (1 - 1e-15))
        if outer is not None:
            dd += outer.measure_above(lam)
        candidates.append(lam * dd ** (1.0 / q))
    for piece in (inner, outer):
        if piece is None:
            continue
        candidates.append(h(piece.edge_level * (1 - 1e-15)))
        if isinstance(piece, _InnerPiece) and piece.beta > 0 and piece.beta * q == d:
            candidates.append(piece.a * ball_volume(piece.d, 1.0) ** (1.0 / q))
        if isinstance(piece, _OuterPiece) and piece.beta * q == d:
            candidates.append(piece.a * ball_volume(piece.d, 1.0) ** (1.0 / q))
        # interior stationary points of lam*(C + b lam^-m)^(1/q) zones are
        # covered by a local refinement scan around the edge level
        lam0 = piece.edge_level
        if lam0 > 0 and math.isfinite(lam0):
            for f in np.geomspace(1e-3, 1e3, 25):
                candidates.append(h(lam0 * f))
    return max(candidates) if candidates else 0.0


def _strong_norm(levels, meas, q, r, inner, outer) -> float:
    """(q * int_0^inf lam^(r-1) d(lam)^(r/q) dlam)^(1/r).

    The lambda axis is cut at every step level and tail edge level.  On
    pieces where d is constant the integral is exact; where a tail makes d
    vary the piece is either a pure power (exact) or integrated with an
    adaptive 1-d quadrature.
    """
    if inner is not None and inner.beta > 0 and inner.beta * q >= inner.d:
        raise DivergentNormError("inner tail too singular for this (q, r)")
    if outer is not None and (outer.beta <= 0 or outer.beta * q <= outer.d):
        raise DivergentNormError("outer tail too heavy for this (q, r)")
    cum = np.cumsum(meas) if levels.size else np.array([])
    cuts = set(float(v) for v in levels)
    for piece in (inner, outer):
        if piece is not None and math.isfinite(piece.edge_level):
            cuts.add(piece.edge_level)
    cuts = sorted(c for c in cuts if c > 0)
    if not cuts:
        return 0.0

    def d_of(lam: float) -> float:
        return _distribution_at(levels, meas, cum, lam, inner, outer)

    def varies_on(lo: float, hi: float) -> bool:
        if inner is not None:
            if inner.beta > 0 and hi > inner.edge_level * (1 + 1e-12):
                return True
            if inner.beta < 0 and lo < inner.edge_level * (1 - 1e-12):
                return True
        if outer is not None and lo < outer.edge_level * (1 - 1e-12):
            return True
        return False

    total = 0.0
    grid_pts = [0.0] + cuts
    for lo, hi in zip(grid_pts[:-1], grid_pts[1:]):
        if hi <= lo:
            continue
        if not varies_on(lo, hi):
            dd = d_of(0.5 * (lo + hi))
            total += q / r * dd ** (r / q) * (hi**r - lo**r)
        else:
            val, _ = integrate.quad(
                lambda lam: q * lam ** (r - 1) * d_of(lam) ** (r / q),
                lo,
                hi,
                limit=200,
            )
            total += val
    # zone above the largest cut: only a singular inner tail can live there
    top = cuts[-1]
    if inner is not None and inner.beta > 0:
        m = inner.d / inner.beta
        c = ball_volume(inner.d, 1.0) * inner.a**m
        expo = r - 1 - m * r / q
        # integrable because beta*q < d was checked above
        total += q * c ** (r / q) * top ** (expo + 1) / (-(expo + 1))
    return total ** (1.0 / r)


# ---------------------------------------------------------------------------
# closed-form norms of exact power laws  a * r^(-p) on (0, R]
# ---------------------------------------------------------------------------


def power_law_norm(a: float, p: float, R: float, d: int, idx: SpaceIndex) -> float:
    """Closed-form ||  |x|^s a r^(-p) 1_(r<=R) ||_(q,r)."""
    if a == 0:
        return 0.0
    s = float(idx.s)
    q = float(idx.q)
    r = float(idx.r)
    beta = p - s
    v1 = ball_volume(d, 1.0)
    if math.isinf(q):
        if beta > 0:
            raise DivergentNormError("power field unbounded at the origin")
        if beta == 0:
            return a
        if math.isinf(R):
            raise DivergentNormError("power field grows at infinity")
        return a * R ** (-beta)
    if math.isinf(r):
        if beta > 0:
            if beta * q > d or (beta * q < d and math.isinf(R)):
                raise DivergentNormError("power field outside weak-L^q")
            if beta * q == d:
                return a * v1 ** (1.0 / q)
            # subcritical decay with finite support: corner at lam = a R^-beta
            return a * R ** (-beta) * (v1 * R**d) ** (1.0 / q)
        if beta == 0:
            if math.isinf(R):
                raise DivergentNormError("constant field not in weak-L^q")
            return a * (v1 * R**d) ** (1.0 / q)
        # beta < 0: increasing toward R
        if math.isinf(R):
            raise DivergentNormError("growing power field not in weak-L^q")
        m = d / -beta
        lam_star = a * R ** (-beta) * (q / (q + m)) ** (1.0 / m)
        dd = v1 * R**d * (1.0 - q / (q + m))
        return lam_star * dd ** (1.0 / q)
    # r < inf
    if math.isinf(R):
        raise DivergentNormError("exact power laws lie only in the weak space")
    if beta > 0:
        if beta * q >= d:
            raise DivergentNormError("power field outside L^(q,r)")
        lam_star = a * R ** (-beta)
        m = d / beta
        flat = q / r * (v1 * R**d) ** (r / q) * lam_star**r
        expo = r - 1 - m * r / q
        powr = q * (v1 * a**m) ** (r / q) * lam_star ** (expo + 1) / (-(expo + 1))
        return (flat + powr) ** (1.0 / r)
    if beta == 0:
        return a * (v1 * R**d) ** (1.0 / q) * (q / r) ** (1.0 / r)
    m = d / -beta
    integral = beta_function(r / m, r / q + 1.0) / m
    total = q * (a * R ** (-beta)) ** r * (v1 * R**d) ** (r / q) * integral
    return total ** (1.0 / r)


# ---------------------------------------------------------------------------
# direct-quadrature oracle and inequality probes
# ---------------------------------------------------------------------------


def weighted_lebesgue_norm(field: RadialField, s: float, q: float) -> float:
    """(int (|x|^s |f|)^q dx)^(1/q) of the step representative, directly."""
    levels = field.grid.nodes**s * np.abs(field.values)
    if math.isinf(q):
        return float(np.max(levels)) if levels.size else 0.0
    return float(np.sum(levels**q * field.grid.cell_measures) ** (1.0 / q))


@dataclass
class InequalityReport:
    lhs: float
    rhs: float
    constant: float  # calibrated C = lhs / rhs (0 when rhs == 0)
    holds_with: float  # smallest C >= 1 such that lhs <= C * rhs

    @property
    def trivial(self) -> bool:
        return self.lhs == 0.0 and self.rhs == 0.0


def holder_product_check(
    f: RadialField,
    g: RadialField,
    idx: SpaceIndex,
    idx1: SpaceIndex,
    idx2: SpaceIndex,
) -> InequalityReport:
    """Empirically calibrate || fg ||_idx <= C ||f||_idx1 ||g||_idx2."""
    if abs(_inv(idx.q) - _inv(idx1.q) - _inv(idx2.q)) > 1e-12:
        raise ValueError("needs 1/q = 1/q1 + 1/q2")
    if _inv(idx.r) > _inv(idx1.r) + _inv(idx2.r) + 1e-12:
        raise ValueError("needs 1/r <= 1/r1 + 1/r2")
    if abs(float(idx.s) - float(idx1.s) - float(idx2.s)) > 1e-12:
        raise ValueError("weights must split: s = s1 + s2")
    product = RadialField(f.grid, f.values * g.values)
    lhs = lorentz_quasi_norm(product, idx)
    rhs = lorentz_quasi_norm(f, idx1) * lorentz_quasi_norm(g, idx2)
    c = lhs / rhs if rhs > 0 else 0.0
    return InequalityReport(lhs=lhs, rhs=rhs, constant=c, holds_with=max(1.0, c))


def embedding_check(f: RadialField, idx1: SpaceIndex, idx2: SpaceIndex) -> InequalityReport:
    """Empirically calibrate ||f||_idx2 <= C ||f||_idx1 under the
    scaling-compatible embedding hypotheses."""
    d = f.grid.dim
    if float(idx2.s) > float(idx1.s) + 1e-12:
        raise ValueError("embedding needs l2 <= l1")
    if _inv(idx2.q) < _inv(idx1.q) - 1e-12:
        raise ValueError("embedding needs q2 <= q1")
    if _inv(idx1.r) < _inv(idx2.r) - 1e-12:
        raise ValueError("embedding needs r1 <= r2")
    if abs(float(idx1.s) / d + _inv(idx1.q) - float(idx2.s) / d - _inv(idx2.q)) > 1e-12:
        raise ValueError("embedding needs matched scaling l/d + 1/q")
    lhs = lorentz_quasi_norm(f, idx2)
    rhs = lorentz_quasi_norm(f, idx1)
    c = lhs / rhs if rhs > 0 else 0.0
    return InequalityReport(lhs=lhs, rhs=rhs, constant=c, holds_with=max(1.0, c))
