"""Simplicial maps, contiguity and the contiguity complex of maps."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .complex import (SimplicialComplex, Subdivision, canonical, product_complex)
from .errors import CapExceededError, MapError
from .unionfind import UnionFind

DEFAULT_MAP_CAP = 50_000


@dataclass(frozen=True, eq=False)
class SimplicialMap:
    """A vertex assignment ``domain -> codomain`` carrying simplices to simplices."""

    domain: SimplicialComplex
    codomain: SimplicialComplex
    assignment: tuple

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))

    def __call__(self, v: int) -> int:
        return self.assignment[v]

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialMap) and self.assignment == other.assignment

    def __hash__(self) -> int:
        return hash(self.assignment)

    def __repr__(self) -> str:
        return f"SimplicialMap({list(self.assignment)})"

    def image(self, simplex: Iterable[int]) -> tuple:
        return canonical(self.assignment[v] for v in simplex)

    def compose(self, g: "SimplicialMap") -> "SimplicialMap":
        """``self o g`` (apply ``g`` first)."""
        return SimplicialMap(g.domain, self.codomain,
                             tuple(self.assignment[a] for a in g.assignment))

    def to_dict(self, domain_name: str = "X", codomain_name: str = "Y") -> dict:
        return {"domain": domain_name, "codomain": codomain_name,
                "assignment": list(self.assignment)}


def _check_assignment(f: Sequence[int], x: SimplicialComplex, y: SimplicialComplex):
    if len(f) != x.vertex_count:
        raise MapError(f"assignment has {len(f)} entries, domain has {x.vertex_count} vertices")
    for a in f:
        if not 0 <= a < y.vertex_count:
            raise MapError(f"codomain vertex {a} out of range")


def is_simplicial(f: Sequence[int], x: SimplicialComplex, y: SimplicialComplex) -> bool:
    """True iff the assignment sends every maximal simplex of x onto a simplex of y."""
    _check_assignment(f, x, y)
    return all(canonical(f[v] for v in s) in y.simplices for s in x.maximal_simplices)


def simplicial_map(f: Sequence[int], x: SimplicialComplex, y: SimplicialComplex) -> SimplicialMap:
    if not is_simplicial(f, x, y):
        raise MapError(f"{list(f)} is not simplicial")
    return SimplicialMap(x, y, tuple(f))


def _assignments(maps) -> list:
    return [m.assignment if isinstance(m, SimplicialMap) else tuple(m) for m in maps]


def _shared_complexes(maps):
    doms = {id(m.domain) for m in maps if isinstance(m, SimplicialMap)}
    cods = {id(m.codomain) for m in maps if isinstance(m, SimplicialMap)}
    if len(doms) > 1 or len(cods) > 1:
        ref = maps[0]
        if any(m.domain != ref.domain or m.codomain != ref.codomain for m in maps[1:]):
            raise MapError("maps do not share domain and codomain")


def mutually_contiguous(maps: Sequence, x: SimplicialComplex | None = None,
                        y: SimplicialComplex | None = None, all_simplices: bool = False) -> bool:
    """True iff the joint image of every domain simplex is a codomain simplex.

    Only maximal simplices are examined unless ``all_simplices`` is set;
    the two tests agree because the simplex family is downward closed.
    Raw assignment tuples are accepted when ``x`` and ``y`` are given.
    """
    maps = list(maps)
    if not maps:
        return True
    if x is None or y is None:
        _shared_complexes(maps)
        x, y = maps[0].domain, maps[0].codomain
    fs = _assignments(maps)
    simplices = x.simplices if all_simplices else x.maximal_simplices
    ys = y.simplices
    for s in simplices:
        if canonical(f[v] for f in fs for v in s) not in ys:
            return False
    return True


def contiguous(f, g, x=None, y=None) -> bool:
    return mutually_contiguous([f, g], x, y)


# enumeration -------------------------------------------------------------

def _domain_order(x: SimplicialComplex) -> list:
    """Vertices in breadth-first order so that most have an earlier neighbour."""
    order, seen = [], [False] * x.vertex_count
    for start in range(x.vertex_count):
        if seen[start]:
            continue
        seen[start] = True
        queue = [start]
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in x.neighbors[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return order


def enumerate_assignments(x: SimplicialComplex, y: SimplicialComplex, based=None,
                          cap: int = DEFAULT_MAP_CAP) -> list:
    """All simplicial vertex assignments x -> y as tuples, by backtracking.

    ``based`` is an optional ``(x_vertex, y_vertex)`` pair that must be
    respected.  Raises :class:`CapExceededError` past ``cap`` maps.
    """
    n = x.vertex_count
    if n == 0:
        return [()]
    order = _domain_order(x)
    if based is not None:
        bx, by = based
        if not (0 <= bx < n and 0 <= by < y.vertex_count):
            raise MapError("base point out of range")
        order.remove(bx)
        order.insert(0, bx)
    position = {v: i for i, v in enumerate(order)}
    # facets to check when vertex order[i] is assigned: their already-assigned part
    checks = []
    for i, v in enumerate(order):
        parts = []
        for s in x.facets_containing(v):
            part = tuple(w for w in s if position[w] <= i)
            if len(part) > 1:
                parts.append(part)
        anchors = [w for w in x.neighbors[v] if position[w] < i]
        checks.append((parts, anchors[0] if anchors else None))
    closed_nbrs = [(a,) + y.neighbors[a] for a in range(y.vertex_count)]
    ys = y.simplices
    f = [0] * n
    out = []

    def extend(i):
        if i == n:
            out.append(tuple(f))
            if len(out) > cap:
                raise CapExceededError(f"more than {cap} simplicial maps")
            return
        v = order[i]
        parts, anchor = checks[i]
        if i == 0 and based is not None:
            candidates = (based[1],)
        elif anchor is not None:
            candidates = closed_nbrs[f[anchor]]
        else:
            candidates = range(y.vertex_count)
        for a in candidates:
            f[v] = a
            if all(canonical(f[w] for w in p) in ys for p in parts):
                extend(i + 1)

    extend(0)
    out.sort()
    return out


def enumerate_maps(x: SimplicialComplex, y: SimplicialComplex, based=None,
                   cap: int = DEFAULT_MAP_CAP) -> list:
    """All simplicial maps x -> y (optionally based), in lexicographic order."""
    return [SimplicialMap(x, y, a) for a in enumerate_assignments(x, y, based, cap)]


# contiguity complex -------------------------------------------------------

@dataclass
class ContiguityComplex:
    """Simplicial complex whose vertices index ``maps``.

    A set of indices spans a simplex iff those maps are mutually contiguous
    (truncated at ``max_dim``).
    """

    maps: list
    complex: SimplicialComplex
    domain: SimplicialComplex
    codomain: SimplicialComplex
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {m.assignment: i for i, m in enumerate(self.maps)}

    def index_of(self, f) -> int:
        key = f.assignment if isinstance(f, SimplicialMap) else tuple(f)
        try:
            return self._index[key]
        except KeyError:
            raise MapError(f"{list(key)} is not a vertex of the contiguity complex") from None

    def __len__(self) -> int:
        return len(self.maps)


def build_contiguity_complex(x: SimplicialComplex, y: SimplicialComplex, based=None,
                             max_dim: int = 1, cap: int = DEFAULT_MAP_CAP) -> ContiguityComplex:
    """Map_SC(x, y) up to dimension ``max_dim``.

    A candidate k-simplex is tested only when it extends a (k-1)-simplex by
    a vertex adjacent to all of it; subsets of contiguous families are
    contiguous, so nothing is missed.
    """
    assignments = enumerate_assignments(x, y, based, cap)
    maps = [SimplicialMap(x, y, a) for a in assignments]
    m = len(assignments)
    xs = x.maximal_simplices
    ys = y.simplices
    images = [[canonical(a[v] for v in s) for s in xs] for a in assignments]
    nbrs = [set() for _ in range(m)]
    for i in range(m):
        img_i = images[i]
        for j in range(i + 1, m):
            img_j = images[j]
            if all(canonical(p + q) in ys for p, q in zip(img_i, img_j)):
                nbrs[i].add(j)
                nbrs[j].add(i)
    facets = [(i, j) for i in range(m) for j in nbrs[i] if j > i]
    layer = facets
    for _ in range(2, max_dim + 1):
        nxt = []
        for s in layer:
            common = set.intersection(*(nbrs[v] for v in s))
            for w in sorted(c for c in common if c > s[-1]):
                cand = s + (w,)
                if all(canonical(q for i in cand for q in images[i][t]) in ys
                       for t in range(len(xs))):
                    nxt.append(cand)
        facets.extend(nxt)
        layer = nxt
        if not layer:
            break
    return ContiguityComplex(maps, SimplicialComplex(m, facets), x, y)


# class counting ------------------------------------------------------------

@dataclass
class ClassPartition:
    """Contiguity classes of a list of maps: ``labels[i]`` is the class of ``maps[i]``."""

    maps: list
    labels: list
    class_count: int

    def sizes(self) -> list:
        counts = [0] * self.class_count
        for c in self.labels:
            counts[c] += 1
        return counts

    def representatives(self) -> list:
        reps: dict = {}
        for m, c in zip(self.maps, self.labels):
            reps.setdefault(c, m)
        return [reps[c] for c in range(self.class_count)]

    def class_of(self, f) -> int:
        key = f.assignment if isinstance(f, SimplicialMap) else tuple(f)
        for m, c in zip(self.maps, self.labels):
            if m.assignment == key:
                return c
        raise MapError(f"{list(key)} is not among the partitioned maps")

    def to_dict(self) -> dict:
        return {"class_count": self.class_count,
                "map_count": len(self.maps),
                "class_sizes": self.sizes(),
                "representatives": [list(m.assignment) for m in self.representatives()]}


def single_vertex_moves(f: tuple, v: int, x: SimplicialComplex, y: SimplicialComplex,
                        facets=None) -> list:
    """Values ``u != f[v]`` for which changing ``f`` at ``v`` gives a map contiguous to ``f``."""
    facets = x.facets_containing(v) if facets is None else facets
    images = [tuple(f[w] for w in s) for s in facets]
    ys = y.simplices
    out = []
    for u in range(y.vertex_count):
        if u != f[v] and all(canonical(img + (u,)) in ys for img in images):
            out.append(u)
    return out


def exact_class_count(x: SimplicialComplex, y: SimplicialComplex, based=None,
                      method: str = "moves", cap: int = DEFAULT_MAP_CAP) -> ClassPartition:
    """Exact contiguity classes of simplicial maps x -> y.

    ``method="pairwise"`` unions every contiguous pair (quadratic).  The
    default ``"moves"`` unions only pairs differing at one vertex; any
    contiguous pair f, g is joined by the chain that switches f to g one
    vertex at a time, each step contiguous to the last, so the partitions
    coincide.
    """
    assignments = enumerate_assignments(x, y, based, cap)
    m = len(assignments)
    uf = UnionFind(m)
    if method == "pairwise":
        xs = x.maximal_simplices
        ys = y.simplices
        images = [[canonical(a[v] for v in s) for s in xs] for a in assignments]
        for i in range(m):
            for j in range(i + 1, m):
                if all(canonical(p + q) in ys for p, q in zip(images[i], images[j])):
                    uf.union(i, j)
    elif method == "moves":
        index = {a: i for i, a in enumerate(assignments)}
        movable = [v for v in range(x.vertex_count) if based is None or v != based[0]]
        stars = {v: x.facets_containing(v) for v in movable}
        for i, a in enumerate(assignments):
            for v in movable:
                for u in single_vertex_moves(a, v, x, y, stars[v]):
                    b = a[:v] + (u,) + a[v + 1:]
                    uf.union(i, index[b])
    else:
        raise ValueError(f"unknown method {method!r}")
    maps = [SimplicialMap(x, y, a) for a in assignments]
    return ClassPartition(maps, uf.labels(), uf.components)


# simplicial approximation ---------------------------------------------------

def approximate_subdivision(s: Subdivision, tiebreak: str = "lowest") -> SimplicialMap:
    """Simplicial approximation ``s.refined -> s.ancestor`` of the identity of |X|.

    Each refined vertex goes to a vertex of its support: the lowest id
    (``"lowest"``) or the heaviest barycentric weight, ties to the lowest id
    (``"max_weight"``).
    """
    out = []
    for coords in s.embedding:
        if tiebreak == "lowest":
            out.append(min(coords))
        elif tiebreak == "max_weight":
            out.append(min(coords, key=lambda a: (-coords[a], a)))
        else:
            raise ValueError(f"unknown tiebreak {tiebreak!r}")
    return SimplicialMap(s.refined, s.ancestor, tuple(out))


def verify_approximation(s: Subdivision, f: SimplicialMap) -> bool:
    """Carrier condition: each refined simplex lands inside its carrier."""
    if not is_simplicial(f.assignment, s.refined, s.ancestor):
        return False
    for sigma in s.refined.simplices:
        car = set(s.carrier(sigma))
        if not all(f.assignment[v] in car for v in sigma):
            return False
    return True


# exponential law -------------------------------------------------------------

def exponential_transpose(f: SimplicialMap, x: SimplicialComplex, z: SimplicialComplex,
                          mapping: ContiguityComplex) -> SimplicialMap:
    """Turn ``f: x (x) z -> y`` into ``z -> Map_SC(x, y)``.

    ``f.domain`` must be ``product_complex(x, z)``; ``mapping`` must be
    built with ``max_dim >= z.dimension``.
    """
    nz = z.vertex_count
    if len(f.assignment) != x.vertex_count * nz:
        raise MapError("f is not defined on the product x (x) z")
    if not is_simplicial(f.assignment, f.domain, mapping.codomain):
        raise MapError("f is not simplicial")
    out = []
    for w in range(nz):
        slice_ = tuple(f.assignment[v * nz + w] for v in range(x.vertex_count))
        out.append(mapping.index_of(slice_))
    g = SimplicialMap(z, mapping.complex, tuple(out))
    if not is_simplicial(g.assignment, z, mapping.complex):
        raise MapError("transpose is not simplicial; build the mapping complex with larger max_dim")
    return g


def exponential_untranspose(g: SimplicialMap, x: SimplicialComplex, z: SimplicialComplex,
                            mapping: ContiguityComplex, product: SimplicialComplex | None = None
                            ) -> SimplicialMap:
    """Inverse of :func:`exponential_transpose`."""
    if not is_simplicial(g.assignment, z, mapping.complex):
        raise MapError("g is not simplicial")
    product = product_complex(x, z) if product is None else product
    nz = z.vertex_count
    out = [0] * (x.vertex_count * nz)
    for w in range(nz):
        fw = mapping.maps[g.assignment[w]].assignment
        for v in range(x.vertex_count):
            out[v * nz + w] = fw[v]
    return SimplicialMap(product, mapping.codomain, tuple(out))


def precompose(maps: Iterable, h: SimplicialMap) -> list:
    """Pull back maps along ``h``: each ``g`` becomes ``g o h``."""
    return [g.compose(h) if isinstance(g, SimplicialMap)
            else tuple(g[a] for a in h.assignment) for g in maps]


def circle_collapse(k_fine: int, k_coarse: int):
    """Vertex-surjective simplicial map S^1_{k_fine} -> S^1_{k_coarse}, i -> floor(i*k_coarse/k_fine).

    For k_fine = 2*k_coarse this sends each new midpoint to its lower neighbour.
    """
    from .complex import circle
    if k_fine < k_coarse:
        raise MapError("collapse needs k_fine >= k_coarse")
    assignment = tuple(i * k_coarse // k_fine for i in range(k_fine))
    return simplicial_map(assignment, circle(k_fine), circle(k_coarse))

