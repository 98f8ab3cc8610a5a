"""Radially symmetric fields sampled on a radial grid.

A RadialField is the piecewise-constant-per-annulus representative of a
radial function: one value per cell, sampled at the cell node.  Fields may
carry power-law continuations beyond the grid:

* ``inner_tail`` describes f(r) ~ coef * r^(-power) for r below the first
  edge (power 0 with the first cell's value is the default continuation);
* ``outer_tail`` describes the behavior beyond the last edge (None means
  the field vanishes there);
* ``exact_power`` marks fields that are exactly coef * r^(-power) on
  0 < r <= support (support may be inf); norms of such fields are computed
  in closed form instead of from the sampled steps.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .grid import RadialGrid


@dataclass(frozen=True)
class PowerTail:
    coef: complex
    power: float

    def __call__(self, r):
        return self.coef * np.asarray(r, dtype=float) ** (-self.power)

    def scaled(self, c: complex) -> "PowerTail":
        return PowerTail(self.coef * c, self.power)


@dataclass(frozen=True)
class ExactPower:
    coef: complex
    power: float
    support: float  # field is coef * r^(-power) on (0, support], 0 beyond


def _combine_tails(
    a: Optional[PowerTail], b: Optional[PowerTail], sign: float, side: str
) -> Optional[PowerTail]:
    """Leading-order tail of a + sign*b.

    Inner tails are dominated by the larger power (more singular at the
    origin); outer tails by the smaller power (slower decay at infinity).
    """
    if a is None and b is None:
        return None
    if a is None:
        return b.scaled(sign)
    if b is None:
        return a
    if abs(a.power - b.power) < 1e-12:
        coef = a.coef + sign * b.coef
        return None if coef == 0 else PowerTail(coef, a.power)
    if side == "inner":
        return a if a.power > b.power else b.scaled(sign)
    return a if a.power < b.power else b.scaled(sign)


@dataclass(frozen=True)
class RadialField:
    grid: RadialGrid
    values: np.ndarray
    inner_tail: Optional[PowerTail] = None
    outer_tail: Optional[PowerTail] = None
    exact_power: Optional[ExactPower] = None
    tail_loss: float = 0.0  # set by the semigroup when mass escapes the grid

    def __post_init__(self) -> None:
        v = np.asarray(self.values)
        if v.shape != (self.grid.n,):
            raise ValueError(f"values shape {v.shape} does not match grid ({self.grid.n},)")
        if not np.iscomplexobj(v):
            v = v.astype(float)
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", v)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, grid: RadialGrid) -> "RadialField":
        return cls(grid, np.zeros(grid.n))

    @classmethod
    def from_profile(cls, grid: RadialGrid, fn: Callable) -> "RadialField":
        return cls(grid, np.asarray(fn(grid.nodes)))

    @classmethod
    def gaussian(cls, grid: RadialGrid, t: float, mass: float = 1.0) -> "RadialField":
        """mass * (4 pi t)^(-d/2) exp(-r^2/(4t)), the heat kernel at time t."""
        d = grid.dim
        vals = mass * (4 * math.pi * t) ** (-d / 2.0) * np.exp(-(grid.nodes**2) / (4 * t))
        return cls(grid, vals, inner_tail=PowerTail(vals[0], 0.0))

    @classmethod
    def power(cls, grid: RadialGrid, coef: complex, power: float, support: float = math.inf) -> "RadialField":
        """coef * r^(-power) on (0, support], zero beyond."""
        vals = np.where(grid.nodes <= support, coef * grid.nodes ** (-power), 0.0)
        outer = None if support < math.inf else PowerTail(coef, power)
        return cls(
            grid,
            vals,
            inner_tail=PowerTail(coef, power),
            outer_tail=outer,
            exact_power=ExactPower(coef, power, support),
        )

    # -- basic properties --------------------------------------------------

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def inner_coef_power(self) -> tuple[complex, float]:
        """Continuation below the first edge; constant by default."""
        if self.inner_tail is not None:
            return self.inner_tail.coef, self.inner_tail.power
        return (complex(self.values[0]) if self.is_complex else float(self.values[0])), 0.0

    def integral(self) -> complex:
        """Integral over the gridded region (tails excluded)."""
        return np.sum(self.values * self.grid.cell_measures)

    def abs(self) -> "RadialField":
        it = self.inner_tail
        ot = self.outer_tail
        ep = self.exact_power
        return RadialField(
            self.grid,
            np.abs(self.values),
            inner_tail=None if it is None else PowerTail(abs(it.coef), it.power),
            outer_tail=None if ot is None else PowerTail(abs(ot.coef), ot.power),
            exact_power=None if ep is None else ExactPower(abs(ep.coef), ep.power, ep.support),
        )

    def real(self) -> "RadialField":
        def re_tail(t):
            if t is None:
                return None
            c = complex(t.coef).real
            return None if c == 0 else PowerTail(c, t.power)

        return RadialField(
            self.grid,
            self.values.real.copy(),
            inner_tail=re_tail(self.inner_tail),
            outer_tail=re_tail(self.outer_tail),
        )

    def imag(self) -> "RadialField":
        def im_tail(t):
            if t is None:
                return None
            c = complex(t.coef).imag
            return None if c == 0 else PowerTail(c, t.power)

        return RadialField(
            self.grid,
            self.values.imag.copy(),
            inner_tail=im_tail(self.inner_tail),
            outer_tail=im_tail(self.outer_tail),
        )

    # -- arithmetic --------------------------------------------------------

    def _binary(self, other: "RadialField", sign: float) -> "RadialField":
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")
        ep = None
        if (
            self.exact_power is not None
            and other.exact_power is not None
            and abs(self.exact_power.power - other.exact_power.power) < 1e-12
            and self.exact_power.support == other.exact_power.support
        ):
            coef = self.exact_power.coef + sign * other.exact_power.coef
            ep = ExactPower(coef, self.exact_power.power, self.exact_power.support)
        return RadialField(
            self.grid,
            self.values + sign * other.values,
            inner_tail=_combine_tails(self.inner_tail, other.inner_tail, sign, "inner"),
            outer_tail=_combine_tails(self.outer_tail, other.outer_tail, sign, "outer"),
            exact_power=ep,
        )

    def __add__(self, other: "RadialField") -> "RadialField":
        return self._binary(other, +1.0)

    def __sub__(self, other: "RadialField") -> "RadialField":
        return self._binary(other, -1.0)

    def scale(self, c: complex) -> "RadialField":
        if c == 0:
            return RadialField.zero(self.grid)
        return RadialField(
            self.grid,
            c * self.values,
            inner_tail=None if self.inner_tail is None else self.inner_tail.scaled(c),
            outer_tail=None if self.outer_tail is None else self.outer_tail.scaled(c),
            exact_power=None
            if self.exact_power is None
            else ExactPower(c * self.exact_power.coef, self.exact_power.power, self.exact_power.support),
        )

    def __mul__(self, c) -> "RadialField":
        return self.scale(c)

    __rmul__ = __mul__

    def __neg__(self) -> "RadialField":
        return self.scale(-1.0)

    # -- sampling ----------------------------------------------------------

    def at(self, r) -> np.ndarray:
        """Log-linear interpolation of the node samples, tails beyond."""
        r = np.asarray(r, dtype=float)
        nodes = self.grid.nodes
        pos = nodes > 0
        ln_nodes = np.log(nodes[pos])
        vals = self.values[pos]
        with np.errstate(divide="ignore"):
            ln_r = np.log(r)

        def interp(component):
            return np.interp(ln_r, ln_nodes, component)

        if self.is_complex:
            out = interp(vals.real) + 1j * interp(vals.imag)
        else:
            out = interp(vals)
        coef_in, pow_in = self.inner_coef_power()
        inner = r < nodes[pos][0]
        if np.any(inner):
            out = np.asarray(out, dtype=complex if self.is_complex else float)
            out[inner] = coef_in * r[inner] ** (-pow_in) if pow_in != 0 else coef_in
        outer = r > nodes[-1]
        if np.any(outer):
            out = np.asarray(out, dtype=complex if self.is_complex else float)
            if self.outer_tail is not None:
                out[outer] = self.outer_tail(r[outer])
            else:
                out[outer] = 0.0
        return out

    def dilate(self, lam: float, amplitude_exponent: float) -> "RadialField":
        """lam^e * f(lam r) resampled onto the same grid.

        Exact for tagged power laws (homogeneity in closed form); smooth
        fields are resampled by log-linear interpolation.
        """
        if self.exact_power is not None:
            ep = self.exact_power
            return RadialField.power(
                self.grid,
                ep.coef * lam ** (amplitude_exponent - ep.power),
                ep.power,
                support=ep.support / lam,
            )
        vals = lam**amplitude_exponent * self.at(self.grid.nodes * lam)
        def tail(t):
            return None if t is None else PowerTail(t.coef * lam ** (amplitude_exponent - t.power), t.power)
        ep = self.exact_power
        return RadialField(
            self.grid,
            vals,
            inner_tail=tail(self.inner_tail),
            outer_tail=tail(self.outer_tail),
            exact_power=None
            if ep is None
            else ExactPower(ep.coef * lam ** (amplitude_exponent - ep.power), ep.power, ep.support / lam),
        )

    # -- snapshot format: CSV with header r,re,im --------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "re", "im"])
        for r, v in zip(self.grid.nodes, self.values):
            c = complex(v)
            w.writerow([repr(float(r)), repr(c.real), repr(c.imag)])
        return buf.getvalue()

    @classmethod
    def read_csv(cls, text: str, dim: int) -> "RadialField":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["r", "re", "im"]:
            raise ValueError("snapshot CSV must have header r,re,im")
        r = np.array([float(row[0]) for row in rows[1:]])
        re = np.array([float(row[1]) for row in rows[1:]])
        im = np.array([float(row[2]) for row in rows[1:]])
        if r.size < 2:
            raise ValueError("need at least two nodes")
        # reconstruct geometric edges consistent with geometric-midpoint nodes
        ratio = np.sqrt(r[1:] / r[:-1])
        edges = np.empty(r.size + 1)
        edges[1:-1] = r[:-1] * ratio
        edges[0] = r[0] / ratio[0]
        edges[-1] = r[-1] * ratio[-1]
        grid = RadialGrid(dim, edges)
        vals = re if np.all(im == 0) else re + 1j * im
        return cls(grid, vals)
