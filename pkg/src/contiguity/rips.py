"""Finite metric spaces, Vietoris-Rips complexes and their filtrations."""
from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .complex import SimplicialComplex
from .errors import ComplexError, MapError
from .maps import _assignments


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    distances: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("distance matrix must be square")
        if np.any(np.diag(d) != 0):
            raise ValueError("distance matrix must have zero diagonal")
        if not np.array_equal(d, d.T):
            raise ValueError("distance matrix must be symmetric")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValueError("distances must be finite and non-negative")
        d.setflags(write=False)
        object.__setattr__(self, "distances", d)

    @classmethod
    def from_points(cls, points) -> "FiniteMetricSpace":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if len(pts) == 1:
            return cls(np.zeros((1, 1)))
        return cls(squareform(pdist(pts)))

    @property
    def point_count(self) -> int:
        return self.distances.shape[0]

    def satisfies_triangle_inequality(self, tol: float = 0.0) -> bool:
        d = self.distances
        return bool(np.all(d[:, None, :] <= d[:, :, None] + d[None, :, :].transpose(0, 2, 1) + tol))


def rips_complex(space: FiniteMetricSpace, epsilon: float, max_dim: int = 2) -> "RipsComplex":
    """Vietoris-Rips complex: subsets of size <= max_dim + 1 with all distances <= epsilon."""
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    n = space.point_count
    d = space.distances
    nbrs = [set(np.flatnonzero(d[i] <= epsilon).tolist()) - {i} for i in range(n)]
    facets = []

    # Bron-Kerbosch with pivoting; cliques larger than max_dim + 1 are split
    # into their (max_dim + 1)-subsets by the closure below.
    def expand(r, p, x):
        if not p and not x:
            facets.append(tuple(sorted(r)))
            return
        pivot = max(p | x, key=lambda u: len(nbrs[u] & p))
        for v in sorted(p - nbrs[pivot]):
            expand(r | {v}, p & nbrs[v], x & nbrs[v])
            p = p - {v}
            x = x | {v}

    expand(set(), set(range(n)), set())
    size = max_dim + 1
    truncated = []
    for c in facets:
        truncated.extend([c] if len(c) <= size else itertools.combinations(c, size))
    cx = RipsComplex(n, truncated)
    cx.space = space
    cx.epsilon = float(epsilon)
    return cx


class RipsComplex(SimplicialComplex):
    """A SimplicialComplex tagged with the metric data it came from."""

    space: FiniteMetricSpace | None = None
    epsilon: float | None = None


def rips_contiguous(maps, epsilon: float | None = None, space: FiniteMetricSpace | None = None,
                    domain: SimplicialComplex | None = None) -> bool:
    """Mutual contiguity of maps into a Rips complex, decided from distances alone.

    For every maximal domain simplex every pair of image points, across all
    maps, must lie within ``epsilon``.
    """
    maps = list(maps)
    if not maps:
        return True
    if space is None or epsilon is None:
        cod = maps[0].codomain
        if not isinstance(cod, RipsComplex) or cod.space is None:
            raise MapError("codomain is not tagged as a Rips complex")
        space = cod.space if space is None else space
        epsilon = cod.epsilon if epsilon is None else epsilon
    if domain is None:
        domain = maps[0].domain
    fs = _assignments(maps)
    d = space.distances
    for s in domain.maximal_simplices:
        pts = sorted({f[v] for f in fs for v in s})
        sub = d[np.ix_(pts, pts)]
        if sub.max() > epsilon:
            return False
    return True


@dataclass
class RipsFiltration:
    """Rips complexes at each critical scale, built on first access."""

    space: FiniteMetricSpace
    max_dim: int = 2
    critical_values: list = field(init=False)
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        d = self.space.distances
        iu = np.triu_indices(self.space.point_count, k=1)
        self.critical_values = sorted(set(d[iu].tolist()))

    def __len__(self) -> int:
        return len(self.critical_values)

    def complex_at(self, index: int) -> RipsComplex:
        """Complex at ``critical_values[index]``; ``index = -1`` means the discrete stage."""
        if index not in self._cache:
            eps = 0.0 if index < 0 else self.critical_values[index]
            self._cache[index] = rips_complex(self.space, eps, self.max_dim)
        return self._cache[index]

    def grades(self, include_zero: bool = True) -> list:
        return ([0.0] if include_zero else []) + list(self.critical_values)

    def complexes(self, include_zero: bool = True) -> list:
        idx = ([-1] if include_zero else []) + list(range(len(self.critical_values)))
        return [self.complex_at(i) for i in idx]

    def report(self) -> dict:
        return {"critical_values": [repr(float(e)) for e in self.critical_values],
                "simplex_counts": [len(self.complex_at(i)) for i in range(len(self))]}


def critical_filtration(space: FiniteMetricSpace, max_dim: int = 2) -> RipsFiltration:
    if space.point_count < 1:
        raise ValueError("need at least one point")
    return RipsFiltration(space, max_dim)


def read_points_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(Decimal(c.strip())) for c in row])
            except Exception as exc:
                raise ComplexError(f"{path}: non-numeric row {row}") from exc
    if not rows or len({len(r) for r in rows}) != 1:
        raise ComplexError(f"{path}: rows must be non-empty and of equal length")
    return np.array(rows)


def read_space_csv(path, distance_matrix: bool = False) -> FiniteMetricSpace:
    """Load a point cloud (Euclidean metric) or, with ``distance_matrix``, a distance matrix."""
    data = read_points_csv(Path(path))
    if distance_matrix:
        return FiniteMetricSpace(data)
    return FiniteMetricSpace.from_points(data)
