"""Logarithmic radial grids with exact annulus measures.

A grid is a set of increasing cell edges in (0, inf) (the first edge may be
0, in which case the first cell is a ball around the origin).  A field is
piecewise constant per cell; the node of a cell is its geometric midpoint
(arithmetic midpoint for an origin cell).  Cell measures are the exact
d-dimensional Lebesgue measures of the annuli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def sphere_area(d: int) -> float:
    """|S^(d-1)|, the surface measure of the unit sphere (2 for d=1)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def ball_volume(d: int, r: float = 1.0) -> float:
    return sphere_area(d) / d * r**d


@dataclass(frozen=True)
class RadialGrid:
    dim: int
    edges: np.ndarray  # shape (n+1,), increasing, edges[0] >= 0
    nodes: np.ndarray = field(init=False)  # shape (n,)
    cell_measures: np.ndarray = field(init=False)  # shape (n,)

    def __post_init__(self) -> None:
        e = np.asarray(self.edges, dtype=float)
        if e.ndim != 1 or e.size < 2:
            raise ValueError("need at least two edges")
        if e[0] < 0 or np.any(np.diff(e) <= 0):
            raise ValueError("edges must be nonnegative and strictly increasing")
        object.__setattr__(self, "edges", e)
        nodes = np.sqrt(e[:-1] * e[1:])
        if e[0] == 0.0:
            nodes = nodes.copy()
            nodes[0] = 0.5 * e[1]
        d = self.dim
        meas = sphere_area(d) / d * (e[1:] ** d - e[:-1] ** d)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "cell_measures", meas)

    @classmethod
    def log(cls, dim: int, r_min: float, r_max: float, n: int) -> "RadialGrid":
        """n cells, geometrically spaced edges on [r_min, r_max]."""
        if not 0 < r_min < r_max:
            raise ValueError("need 0 < r_min < r_max")
        return cls(dim, np.geomspace(r_min, r_max, n + 1))

    @classmethod
    def from_edges(cls, dim: int, edges) -> "RadialGrid":
        return cls(dim, np.asarray(edges, dtype=float))

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def r_min(self) -> float:
        return float(self.edges[0])

    @property
    def r_max(self) -> float:
        return float(self.edges[-1])

    def ball_measure(self, r: float) -> float:
        return ball_volume(self.dim, r)

    def cache_key(self) -> tuple:
        e = self.edges
        return (self.dim, e.size, float(e[0]), float(e[-1]), float(e[min(1, e.size - 1)]))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RadialGrid)
            and self.dim == other.dim
            and self.edges.shape == other.edges.shape
            and bool(np.all(self.edges == other.edges))
        )

    def __hash__(self) -> int:
        return hash(self.cache_key())
