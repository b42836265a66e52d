"""Degree-0 persistence of direct systems of mapping complexes."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .complex import SimplicialComplex, barycentric_subdivision, circle
from .errors import FiltrationError
from .homology import Barcode
from .maps import (DEFAULT_MAP_CAP, SimplicialMap, approximate_subdivision, circle_collapse,
                   exact_class_count)
from .montecarlo import circle_walk_partition
from .rips import FiniteMetricSpace, critical_filtration, rips_complex
from .unionfind import UnionFind


def h0_barcode(class_counts: Sequence[int], transitions: Sequence, grades: Sequence) -> Barcode:
    """H0 barcode of a direct system of finite sets of components.

    ``class_counts[s]`` is the number of components at stage ``s`` and
    ``transitions[s - 1]`` sends each component of stage ``s - 1`` to one of
    stage ``s``.  When components merge the oldest bar survives (ties go to
    the lower bar index); components with no preimage start new bars.
    """
    if len(grades) != len(class_counts) or len(transitions) != max(len(class_counts) - 1, 0):
        raise FiltrationError("inconsistent stage data")
    births: list = []
    deaths: list = []
    owner = []  # bar carried by each class of the current stage
    for c in range(class_counts[0] if class_counts else 0):
        births.append(0)
        deaths.append(None)
        owner.append(c)
    for s in range(1, len(class_counts)):
        incoming: list = [[] for _ in range(class_counts[s])]
        trans = transitions[s - 1]
        if len(trans) != len(owner):
            raise FiltrationError(f"transition {s - 1} has wrong length")
        for prev, cur in enumerate(trans):
            if not 0 <= cur < class_counts[s]:
                raise FiltrationError(f"transition {s - 1} points outside stage {s}")
            incoming[cur].append(owner[prev])
        new_owner = []
        for c in range(class_counts[s]):
            bars = sorted(set(incoming[c]), key=lambda b: (births[b], b))
            if not bars:
                births.append(s)
                deaths.append(None)
                new_owner.append(len(births) - 1)
                continue
            for b in bars[1:]:
                deaths[b] = s
            new_owner.append(bars[0])
        owner = new_owner
    bars = [(grades[b], None if d is None else grades[d]) for b, d in zip(births, deaths)]
    return Barcode(0, [(b, d) for b, d in bars if d is None or b != d], list(grades))


def rips_h0(space: FiniteMetricSpace, include_zero: bool = True) -> Barcode:
    """H0 barcode of the Rips filtration by Kruskal-style union-find."""
    n = space.point_count
    d = space.distances
    iu = np.triu_indices(n, k=1)
    order = np.lexsort((iu[1], iu[0], d[iu]))
    uf = UnionFind(n)
    bars = []
    for e in order:
        a, b = int(iu[0][e]), int(iu[1][e])
        if uf.union(a, b):
            bars.append((0.0, float(d[a, b])))
    bars.append((0.0, None))
    bars = [(b, dd) for b, dd in bars if dd is None or dd > 0.0]
    grades = critical_filtration(space).grades(include_zero)
    return Barcode(0, bars, grades)


def _stage_partition(z, y, based, cap):
    part = exact_class_count(z, y, based=based, cap=cap)
    lookup = {m.assignment: c for m, c in zip(part.maps, part.labels)}
    return part, lookup


def _circle_length(z: SimplicialComplex) -> int | None:
    n = z.vertex_count
    return n if n >= 3 and z == circle(n) else None


def persistent_contiguity_h0(z: SimplicialComplex, space: FiniteMetricSpace, based: bool = False,
                             base_point: int = 0, include_zero: bool = True,
                             max_epsilon: float | None = None, cap: int = DEFAULT_MAP_CAP,
                             engine: str = "generic", scales: Sequence | None = None) -> tuple:
    """H0 persistence of Map_SC(z, R_eps(M)) over the critical scales of M.

    Stages are the discrete complex (grade 0, when ``include_zero``) and
    each critical value up to ``max_epsilon``.  Returns ``(barcode,
    class_counts)``.  Based maps send vertex 0 of ``z`` to ``base_point``.

    ``engine="compiled"`` handles based maps out of ``circle(k)`` with the
    closed-walk enumerator, where ``cap`` bounds the walks per stage.
    An increasing ``scales`` list replaces the critical values; the
    system restricted to those stages is still a direct system.
    """
    if engine not in ("generic", "compiled"):
        raise ValueError(f"unknown engine {engine!r}")
    if scales is not None:
        grades = [float(e) for e in scales]
        if any(b <= a for a, b in zip(grades, grades[1:])):
            raise FiltrationError("scales must be strictly increasing")
    else:
        grades = critical_filtration(space).grades(include_zero)
    if max_epsilon is not None:
        grades = [g for g in grades if g <= max_epsilon]
    if engine == "compiled":
        k = _circle_length(z)
        if k is None or not based:
            raise FiltrationError("the compiled engine needs based maps out of a circle")
        return _circle_h0(k, space, base_point, grades, cap)
    # flag complex: keep every simplex a pair of domain facets can hit
    max_dim = 2 * (z.dimension + 1) - 1
    basing = (0, base_point) if based else None
    counts, transitions, prev_reps = [], [], None
    for eps in grades:
        y = rips_complex(space, eps, max_dim)
        part, lookup = _stage_partition(z, y, basing, cap)
        if prev_reps is not None:
            transitions.append([lookup[r] for r in prev_reps])
        counts.append(part.class_count)
        prev_reps = [m.assignment for m in part.representatives()]
    return h0_barcode(counts, transitions, grades), counts


def _circle_h0(k, space, base_point, grades, cap):
    counts, transitions, prev_reps = [], [], None
    for eps in grades:
        y = rips_complex(space, eps, 2)
        codes, labels = circle_walk_partition(y, k, base_point, limit=cap)
        if prev_reps is not None:
            # a walk of the smaller complex is still a walk here
            transitions.append(labels[np.searchsorted(codes, prev_reps)].tolist())
        n = int(labels.max()) + 1
        counts.append(n)
        first = np.full(n, len(codes))
        np.minimum.at(first, labels, np.arange(len(codes)))
        prev_reps = codes[first]
    return h0_barcode(counts, transitions, grades), counts


def persistent_subdivision_h0(xs: Sequence[SimplicialComplex], connecting: Sequence[SimplicialMap],
                              y: SimplicialComplex, based: bool = False, base_point: int = 0,
                              grades: Sequence | None = None, cap: int = DEFAULT_MAP_CAP) -> tuple:
    """H0 persistence of Map_SC(X_0, Y) -> Map_SC(X_1, Y) -> ...

    ``connecting[n]`` maps ``xs[n + 1]`` onto ``xs[n]`` and must hit every
    vertex, so precomposition is injective on maps.  Returns ``(barcode,
    class_counts)``.
    """
    if len(connecting) != len(xs) - 1:
        raise FiltrationError("need one connecting map between consecutive stages")
    for n, f in enumerate(connecting):
        if len(f.assignment) != xs[n + 1].vertex_count:
            raise FiltrationError(f"connecting map {n} has the wrong domain")
        if set(f.assignment) != set(range(xs[n].vertex_count)):
            raise FiltrationError(f"connecting map {n} is not surjective on vertices")
        if based and f.assignment[0] != 0:
            raise FiltrationError(f"connecting map {n} does not preserve the base vertex")
    grades = list(range(len(xs))) if grades is None else list(grades)
    basing = (0, base_point) if based else None
    counts, transitions, prev_reps = [], [], None
    for n, x in enumerate(xs):
        part, lookup = _stage_partition(x, y, basing, cap)
        if prev_reps is not None:
            h = connecting[n - 1].assignment
            transitions.append([lookup[tuple(r[a] for a in h)] for r in prev_reps])
        counts.append(part.class_count)
        prev_reps = [m.assignment for m in part.representatives()]
    return h0_barcode(counts, transitions, grades), counts


def circle_sequence(ks: Sequence[int]) -> tuple:
    """Circles S^1_k for increasing ``ks`` with the collapse maps between them."""
    ks = list(ks)
    if any(b < a for a, b in zip(ks, ks[1:])):
        raise FiltrationError("circle sizes must be non-decreasing")
    xs = [circle(k) for k in ks]
    maps = [circle_collapse(b, a) for a, b in zip(ks, ks[1:])]
    return xs, maps


def subdivision_sequence(x: SimplicialComplex, steps: int, tiebreak: str = "lowest") -> tuple:
    """Iterated barycentric subdivisions with simplicial approximations back one step."""
    xs, maps = [x], []
    for _ in range(steps):
        s = barycentric_subdivision(xs[-1])
        maps.append(approximate_subdivision(s, tiebreak))
        xs.append(s.refined)
    return xs, maps


def contiguity_h0_grid(ks: Sequence[int], space: FiniteMetricSpace, based: bool = False,
                       base_point: int = 0, max_epsilon: float | None = None,
                       cap: int = DEFAULT_MAP_CAP) -> dict:
    """Class counts of Map_SC(S^1_k, R_eps(M)) over a (k, eps) grid."""
    rows = {}
    grades = None
    for k in ks:
        barcode, counts = persistent_contiguity_h0(circle(k), space, based, base_point,
                                                   max_epsilon=max_epsilon, cap=cap)
        rows[k] = counts
        grades = barcode.grades
    return {"epsilons": grades, "counts": rows}
