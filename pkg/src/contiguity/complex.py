"""Finite abstract simplicial complexes, standard examples and subdivisions."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CapExceededError, ComplexError

Simplex = tuple  # strictly increasing tuple of vertex ids

DEFAULT_SIMPLEX_CAP = 2_000_000


def canonical(vertices: Iterable[int]) -> Simplex:
    """Sorted, duplicate-free tuple form of a vertex set."""
    return tuple(sorted(set(vertices)))


def _closure(facets: Sequence[Simplex], cap: int) -> set:
    simplices: set = set()
    for facet in facets:
        if facet in simplices:
            continue
        n = len(facet)
        if (1 << n) - 1 > cap:
            raise CapExceededError(
                f"facet with {n} vertices has {(1 << n) - 1} faces, above cap {cap}")
        for r in range(1, n + 1):
            simplices.update(itertools.combinations(facet, r))
        if len(simplices) > cap:
            raise CapExceededError(f"closure has more than {cap} simplices")
    return simplices


class SimplicialComplex:
    """A finite simplicial complex on vertices ``0..vertex_count-1``.

    Simplices are sorted integer tuples held in a set, so membership tests
    are O(1).  Instances are treated as immutable.
    """

    def __init__(self, vertex_count: int, facets: Iterable[Iterable[int]] = (),
                 labels: Sequence[str] | None = None, cap: int = DEFAULT_SIMPLEX_CAP):
        if vertex_count < 0:
            raise ComplexError("vertex_count must be non-negative")
        cleaned = []
        for facet in facets:
            s = canonical(facet)
            if not s:
                raise ComplexError("empty facet")
            if s[0] < 0 or s[-1] >= vertex_count:
                raise ComplexError(f"facet {s} has a vertex outside 0..{vertex_count - 1}")
            cleaned.append(s)
        cleaned.extend((v,) for v in range(vertex_count))
        self.vertex_count = vertex_count
        self.simplices = frozenset(_closure(cleaned, cap))
        if labels is not None and len(labels) != vertex_count:
            raise ComplexError("labels must have one entry per vertex")
        self.labels = list(labels) if labels is not None else None

    def __contains__(self, simplex) -> bool:
        return tuple(simplex) in self.simplices

    def __len__(self) -> int:
        return len(self.simplices)

    def __eq__(self, other) -> bool:
        return (isinstance(other, SimplicialComplex)
                and self.vertex_count == other.vertex_count
                and self.simplices == other.simplices)

    def __hash__(self) -> int:
        return hash((self.vertex_count, self.simplices))

    def __repr__(self) -> str:
        return f"SimplicialComplex(vertices={self.vertex_count}, f_vector={self.f_vector})"

    def is_simplex(self, vertices: Iterable[int]) -> bool:
        """Membership test for an arbitrary (unsorted, possibly repeated) vertex collection."""
        return canonical(vertices) in self.simplices

    @property
    def dimension(self) -> int:
        return max((len(s) for s in self.simplices), default=0) - 1

    @cached_property
    def f_vector(self) -> tuple:
        counts = [0] * (self.dimension + 1)
        for s in self.simplices:
            counts[len(s) - 1] += 1
        return tuple(counts)

    def simplices_of_dim(self, k: int) -> list:
        return sorted(s for s in self.simplices if len(s) == k + 1)

    def sorted_simplices(self) -> list:
        """All simplices ordered by dimension, then lexicographically."""
        return sorted(self.simplices, key=lambda s: (len(s), s))

    @cached_property
    def maximal_simplices(self) -> tuple:
        maximal = []
        for s in self.simplices:
            if not any(canonical(s + (v,)) in self.simplices for v in self._link_candidates(s)):
                maximal.append(s)
        return tuple(sorted(maximal, key=lambda s: (len(s), s)))

    def _link_candidates(self, s):
        # a coface of s has a vertex adjacent to s[0]
        return (w for w in self.neighbors[s[0]] if w not in s)

    def is_maximal(self, simplex) -> bool:
        return tuple(simplex) in self._maximal_set

    @cached_property
    def _maximal_set(self) -> frozenset:
        return frozenset(self.maximal_simplices)

    @cached_property
    def neighbors(self) -> tuple:
        """Adjacency lists of the 1-skeleton (excluding the vertex itself)."""
        adj = [set() for _ in range(self.vertex_count)]
        for s in self.simplices:
            if len(s) == 2:
                a, b = s
                adj[a].add(b)
                adj[b].add(a)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edges(self) -> list:
        return self.simplices_of_dim(1)

    def facets_containing(self, v: int) -> list:
        return [s for s in self.maximal_simplices if v in s]

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            for w in self.neighbors[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.vertex_count

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self.vertex_count <= other.vertex_count and self.simplices <= other.simplices

    # serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        data = {"vertex_count": self.vertex_count,
                "facets": [list(s) for s in self.maximal_simplices]}
        if self.labels is not None:
            data["labels"] = list(self.labels)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict, cap: int = DEFAULT_SIMPLEX_CAP) -> "SimplicialComplex":
        try:
            n = int(data["vertex_count"])
            facets = [[int(v) for v in f] for f in data["facets"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ComplexError(f"malformed complex description: {exc}") from exc
        return cls(n, facets, labels=data.get("labels"), cap=cap)

    @classmethod
    def from_json(cls, text: str, cap: int = DEFAULT_SIMPLEX_CAP) -> "SimplicialComplex":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ComplexError(f"malformed complex JSON: {exc}") from exc
        return cls.from_dict(data, cap=cap)


def make_complex(facets: Iterable[Iterable[int]], vertex_count: int | None = None,
                 labels=None, cap: int = DEFAULT_SIMPLEX_CAP) -> SimplicialComplex:
    """Downward closure of ``facets`` together with every singleton.

    ``vertex_count`` defaults to one more than the largest vertex mentioned.
    """
    facets = [list(f) for f in facets]
    if vertex_count is None:
        vertex_count = max((max(f) for f in facets if f), default=-1) + 1
    return SimplicialComplex(vertex_count, facets, labels=labels, cap=cap)


# standard complexes ------------------------------------------------------

def simplex(n: int) -> SimplicialComplex:
    """The standard n-simplex Delta[n]."""
    if n < 0:
        raise ComplexError("n must be >= 0")
    return make_complex([range(n + 1)], n + 1)


def boundary(n: int) -> SimplicialComplex:
    """Boundary of Delta[n]; for n = 0 this is the empty complex."""
    if n < 0:
        raise ComplexError("n must be >= 0")
    if n == 0:
        return SimplicialComplex(0)
    return make_complex(itertools.combinations(range(n + 1), n), n + 1)


def point() -> SimplicialComplex:
    return simplex(0)


def circle(k: int) -> SimplicialComplex:
    """The k-gon S^1_k with edges {i, i+1 mod k}; vertex 0 is the base point."""
    if k < 3:
        raise ComplexError("a simplicial circle needs k >= 3")
    return make_complex([(i, (i + 1) % k) for i in range(k)], k)


def torus() -> SimplicialComplex:
    """Nine-vertex torus: a 3x3 grid with wraparound and one diagonal per square.

    Vertex ``3*row + col``.  Each square is cut along its anti-diagonal
    from (row+1, col) to (row, col+1).
    """
    def vid(r, c):
        return 3 * (r % 3) + (c % 3)

    facets = []
    for r in range(3):
        for c in range(3):
            facets.append((vid(r, c), vid(r, c + 1), vid(r + 1, c)))
            facets.append((vid(r, c + 1), vid(r + 1, c), vid(r + 1, c + 1)))
    labels = [f"({r},{c})" for r in range(3) for c in range(3)]
    return make_complex(facets, 9, labels=labels)


def pinched_sphere() -> SimplicialComplex:
    """Barycentric subdivision of the boundary of Delta[3] plus two chords.

    The chords join the barycenters of the 2-faces {012}-{013} and
    {023}-{123} (the lexicographically first pair of disjoint pairs).
    Vertex ids 0..3 are the original vertices.
    """
    sd = barycentric_subdivision(boundary(3))
    bary = {s: i for i, s in enumerate(sd.vertex_simplices)}
    chords = [(bary[(0, 1, 2)], bary[(0, 1, 3)]), (bary[(0, 2, 3)], bary[(1, 2, 3)])]
    refined = sd.refined
    return make_complex(list(refined.maximal_simplices) + chords, refined.vertex_count,
                        labels=refined.labels)


def standard_complex(kind: str, n: int | None = None) -> SimplicialComplex:
    """Build a named complex.

    ``kind`` is one of ``simplex``, ``boundary``, ``circle``, ``torus_T``,
    ``pinched_P``, ``point``, plus the shorthands ``boundary2`` and ``simplex2``.
    """
    name = kind.strip()
    for prefix in ("simplex", "boundary"):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            name, n = prefix, int(name[len(prefix):])
    if name == "simplex":
        return simplex(_need(n, kind))
    if name == "boundary":
        return boundary(_need(n, kind))
    if name == "circle":
        return circle(_need(n, kind))
    if name in ("torus_T", "torus", "T"):
        return torus()
    if name in ("pinched_P", "pinched", "P"):
        return pinched_sphere()
    if name == "point":
        return point()
    raise ComplexError(f"unknown standard complex {kind!r}")


def _need(n, kind):
    if n is None:
        raise ComplexError(f"{kind} needs a size parameter")
    return int(n)


# products -----------------------------------------------------------------

def product_complex(x: SimplicialComplex, y: SimplicialComplex,
                    cap: int = DEFAULT_SIMPLEX_CAP) -> SimplicialComplex:
    """The product complex with vertex ``(v, w)`` stored as ``v * |W| + w``.

    A vertex set is a simplex when both projections are simplices, so the
    facets are the full grids sigma x tau over pairs of maximal simplices.
    """
    m = y.vertex_count
    facets = [tuple(v * m + w for v in s for w in t)
              for s in x.maximal_simplices for t in y.maximal_simplices]
    labels = [f"({v},{w})" for v in range(x.vertex_count) for w in range(m)]
    return SimplicialComplex(x.vertex_count * m, facets, labels=labels, cap=cap)


def product_vertex(x_vertex: int, y_vertex: int, y: SimplicialComplex) -> int:
    return x_vertex * y.vertex_count + y_vertex


# subdivision ----------------------------------------------------------------

@dataclass(frozen=True)
class Subdivision:
    """A refinement of ``ancestor`` with exact barycentric coordinates.

    ``embedding[v]`` maps ancestor vertex ids to positive Fraction weights
    summing to one.  ``vertex_simplices`` records, for barycentric
    subdivisions, which simplex of the previous stage each vertex is the
    barycenter of.
    """

    ancestor: SimplicialComplex
    refined: SimplicialComplex
    embedding: tuple
    vertex_simplices: tuple = field(default=())

    def support(self, v: int) -> Simplex:
        return tuple(sorted(self.embedding[v]))

    def carrier(self, sigma) -> Simplex:
        return carrier(self, sigma)

    @property
    def mesh(self) -> float:
        return mesh_size(self)


def identity_subdivision(x: SimplicialComplex) -> Subdivision:
    emb = tuple({v: Fraction(1)} for v in range(x.vertex_count))
    return Subdivision(x, x, emb, tuple((v,) for v in range(x.vertex_count)))


def barycentric_subdivision(x) -> Subdivision:
    """Barycentric subdivision of a complex or of an existing subdivision.

    The new vertices are the simplices of the input ordered by (dimension,
    lexicographic), so original vertex ids are preserved; simplices are
    chains of faces.  Coordinates are composed back to the original ancestor.
    """
    base = identity_subdivision(x) if isinstance(x, SimplicialComplex) else x
    cx = base.refined
    order = cx.sorted_simplices()
    index = {s: i for i, s in enumerate(order)}
    facets = []
    for top in cx.maximal_simplices:
        for perm in itertools.permutations(top):
            facets.append(tuple(index[canonical(perm[:i + 1])] for i in range(len(perm))))
    embedding = []
    for s in order:
        acc: dict = {}
        w = Fraction(1, len(s))
        for v in s:
            for a, c in base.embedding[v].items():
                acc[a] = acc.get(a, Fraction(0)) + w * c
        embedding.append(acc)
    labels = ["b" + ",".join(map(str, s)) if len(s) > 1 else str(s[0]) for s in order]
    refined = SimplicialComplex(len(order), facets, labels=labels)
    return Subdivision(base.ancestor, refined, tuple(embedding), tuple(order))


def iterated_subdivision(x: SimplicialComplex, n: int) -> Subdivision:
    """Sd^n(x) as a subdivision of x (n = 0 gives the identity)."""
    s = identity_subdivision(x)
    for _ in range(n):
        s = barycentric_subdivision(s)
    return s


def carrier(s: Subdivision, sigma) -> Simplex:
    """Smallest ancestor simplex containing the refined simplex ``sigma``."""
    sigma = tuple(sigma)
    if sigma not in s.refined:
        raise ComplexError(f"{sigma} is not a simplex of the refined complex")
    return canonical(a for v in sigma for a in s.embedding[v])


def squared_distance(p: dict, q: dict) -> Fraction:
    keys = set(p) | set(q)
    return sum(((p.get(k, 0) - q.get(k, 0)) ** 2 for k in keys), Fraction(0))


def mesh_size(s: Subdivision) -> float:
    """Longest edge of the refined complex in the ancestor's standard metric."""
    best = Fraction(0)
    for a, b in s.refined.edges:
        d = squared_distance(s.embedding[a], s.embedding[b])
        if d > best:
            best = d
    return math.sqrt(best)


def mesh_size_squared(s: Subdivision) -> Fraction:
    """Exact square of :func:`mesh_size`."""
    return max((squared_distance(s.embedding[a], s.embedding[b]) for a, b in s.refined.edges),
               default=Fraction(0))


def isomorphic(x: SimplicialComplex, y: SimplicialComplex) -> bool:
    """Brute-force isomorphism test for small complexes."""
    if x.vertex_count != y.vertex_count or x.f_vector != y.f_vector:
        return False
    return find_isomorphism(x, y) is not None


def find_isomorphism(x: SimplicialComplex, y: SimplicialComplex):
    n = x.vertex_count
    if n != y.vertex_count or x.f_vector != y.f_vector:
        return None
    deg_x = [len(a) for a in x.neighbors]
    deg_y = [len(a) for a in y.neighbors]
    assign = [-1] * n
    used = [False] * n

    def extend(i):
        if i == n:
            return all(canonical(assign[v] for v in s) in y.simplices for s in x.maximal_simplices)
        for w in range(n):
            if used[w] or deg_y[w] != deg_x[i]:
                continue
            if any(assign[u] >= 0 and u < i and (min(assign[u], w), max(assign[u], w)) not in y.simplices
                   for u in x.neighbors[i] if u < i):
                continue
            assign[i] = w
            used[w] = True
            if extend(i + 1):
                return True
            used[w] = False
            assign[i] = -1
        return False

    return list(assign) if extend(0) else None
