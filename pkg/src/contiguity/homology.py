"""Simplicial homology over prime fields and persistence by column reduction."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .complex import SimplicialComplex
from .errors import FiltrationError

COCYCLE_PRIME = 1_000_003


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def _check_prime(p: int):
    if not is_prime(int(p)):
        raise ValueError(f"{p} is not prime")


def boundary_columns(simplices: Sequence[tuple], index: dict, p: int) -> list:
    """Sparse boundary columns ``{row: coeff}`` of ``simplices`` over GF(p)."""
    cols = []
    for s in simplices:
        col = {}
        if len(s) > 1:
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                col[index[face]] = (-1) ** i % p
        cols.append(col)
    return cols


def boundary_matrix(x: SimplicialComplex, k: int, p: int = 2) -> np.ndarray:
    """Dense matrix of the boundary map C_k -> C_{k-1}, entries in 0..p-1."""
    rows = x.simplices_of_dim(k - 1) if k > 0 else []
    cols = x.simplices_of_dim(k)
    index = {s: i for i, s in enumerate(rows)}
    out = np.zeros((len(rows), len(cols)), dtype=np.int64)
    if k == 0:
        return out
    for j, c in enumerate(boundary_columns(cols, index, p)):
        for i, v in c.items():
            out[i, j] = v
    return out


def _reduce(cols: list, p: int) -> dict:
    """Standard persistence reduction in place; returns ``{pivot_row: column}``."""
    pivots: dict = {}
    for j, col in enumerate(cols):
        while col:
            low = max(col)
            other = pivots.get(low)
            if other is None:
                pivots[low] = j
                break
            ocol = cols[other]
            factor = col[low] * pow(ocol[low], p - 2, p) % p
            for r, v in ocol.items():
                nv = (col.get(r, 0) - factor * v) % p
                if nv:
                    col[r] = nv
                else:
                    col.pop(r, None)
    return pivots


def betti_numbers(x: SimplicialComplex, p: int = 2) -> tuple:
    """Betti numbers ``(b_0, ..., b_dim)`` over GF(p)."""
    _check_prime(p)
    order = x.sorted_simplices()
    index = {s: i for i, s in enumerate(order)}
    cols = boundary_columns(order, index, p)
    pivots = _reduce(cols, p)
    dim = x.dimension
    counts = [0] * (dim + 2)
    ranks = [0] * (dim + 2)  # ranks[k] = rank of boundary C_k -> C_{k-1}
    for s in order:
        counts[len(s) - 1] += 1
    for row, col in pivots.items():
        ranks[len(order[col]) - 1] += 1
    return tuple(counts[k] - ranks[k] - ranks[k + 1] for k in range(dim + 1))


def rank_mod_p(a: np.ndarray, p: int) -> int:
    """Rank of a dense integer matrix over GF(p) by row reduction."""
    m = np.array(a, dtype=np.int64) % p
    rank = 0
    rows, ncols = m.shape
    for c in range(ncols):
        piv = next((r for r in range(rank, rows) if m[r, c]), None)
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        m[rank] = m[rank] * pow(int(m[rank, c]), p - 2, p) % p
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] = (m[r] - m[r, c] * m[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank


def nullspace_mod_p(a: np.ndarray, p: int) -> np.ndarray:
    """Basis (as rows) of ``{v : a v = 0}`` over GF(p)."""
    m = np.array(a, dtype=np.int64) % p
    rows, ncols = m.shape
    pivcols = []
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, rows) if m[r, c]), None)
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        m[rank] = m[rank] * pow(int(m[rank, c]), p - 2, p) % p
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] = (m[r] - m[r, c] * m[rank]) % p
        pivcols.append(c)
        rank += 1
        if rank == rows:
            break
    free = [c for c in range(ncols) if c not in set(pivcols)]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for r, pc in enumerate(pivcols):
            basis[i, pc] = (-m[r, fc]) % p
    return basis


def loop_cocycles(y: SimplicialComplex, p: int = COCYCLE_PRIME):
    """Basis of 1-cocycles mod p vanishing on a spanning forest.

    Returns ``(w, p)`` with ``w[r, a, b]`` the value of cocycle ``r`` on the
    oriented edge a -> b (zero off edges and on the diagonal).  Summing
    along a closed walk gives a homotopy invariant of the loop.
    """
    n = y.vertex_count
    tree = set()
    seen = [False] * n
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        while stack:
            a = stack.pop()
            for b in y.neighbors[a]:
                if not seen[b]:
                    seen[b] = True
                    tree.add((min(a, b), max(a, b)))
                    stack.append(b)
    free_edges = [e for e in y.edges if e not in tree]
    col = {e: i for i, e in enumerate(free_edges)}
    tris = y.simplices_of_dim(2)
    cons = np.zeros((len(tris), len(free_edges)), dtype=np.int64)
    for r, (a, b, c) in enumerate(tris):
        for e, sign in (((a, b), 1), ((b, c), 1), ((a, c), -1)):
            if e in col:
                cons[r, col[e]] = (cons[r, col[e]] + sign) % p
    basis = nullspace_mod_p(cons, p) if free_edges else np.zeros((0, 0), dtype=np.int64)
    w = np.zeros((len(basis), n, n), dtype=np.int64)
    for r, vec in enumerate(basis):
        for e, i in col.items():
            w[r, e[0], e[1]] = vec[i]
            w[r, e[1], e[0]] = (-vec[i]) % p
    return w, p


# persistence ---------------------------------------------------------------------

@dataclass
class Barcode:
    """Persistence intervals ``[birth, death)`` in one degree; ``death=None`` is infinite."""

    degree: int
    bars: list
    grades: list = field(default_factory=list)

    def __post_init__(self):
        self.bars = sorted(((b, d) for b, d in self.bars),
                           key=lambda bd: (bd[0], float("inf") if bd[1] is None else bd[1]))

    def alive_at(self, grade) -> int:
        return sum(1 for b, d in self.bars if b <= grade and (d is None or grade < d))

    def finite(self) -> list:
        return [bd for bd in self.bars if bd[1] is not None]

    def infinite(self) -> list:
        return [bd for bd in self.bars if bd[1] is None]

    def multiset(self) -> list:
        return sorted(self.bars, key=lambda bd: (bd[0], float("inf") if bd[1] is None else bd[1]))

    def to_dict(self) -> dict:
        return {"degree": self.degree, "bars": [[b, d] for b, d in self.bars],
                "grades": list(self.grades)}

    def to_text(self) -> str:
        lines = [f"H{self.degree}: {len(self.bars)} bars"]
        for b, d in self.bars:
            lines.append(f"  [{b}, {'inf' if d is None else d})")
        return "\n".join(lines)


def simplexwise_order(complexes: Sequence[SimplicialComplex]) -> tuple:
    """Simplices ordered by (first stage, dimension, lex) and their stage index."""
    stage: dict = {}
    prev = None
    for i, cx in enumerate(complexes):
        if prev is not None and not prev.is_subcomplex_of(cx):
            raise FiltrationError(f"stage {i} does not contain stage {i - 1}")
        for s in cx.simplices:
            stage.setdefault(s, i)
        prev = cx
    order = sorted(stage, key=lambda s: (stage[s], len(s), s))
    return order, [stage[s] for s in order]


def persistence_pairs(complexes: Sequence[SimplicialComplex], p: int = 2):
    """Birth/death stage pairs for every degree: ``{k: [(birth_stage, death_stage|None)]}``."""
    _check_prime(p)
    order, stages = simplexwise_order(complexes)
    index = {s: i for i, s in enumerate(order)}
    cols = boundary_columns(order, index, p)
    pivots = _reduce(cols, p)
    killed = set(pivots)  # rows that are the birth of a finite bar
    negative = set(pivots.values())
    out: dict = {}
    for row, col in pivots.items():
        k = len(order[row]) - 1
        if stages[row] != stages[col]:
            out.setdefault(k, []).append((stages[row], stages[col]))
    for i, s in enumerate(order):
        if i not in killed and i not in negative:
            out.setdefault(len(s) - 1, []).append((stages[i], None))
    return out


def persistent_homology(complexes: Sequence[SimplicialComplex], degree: int,
                        grades: Sequence | None = None, p: int = 2) -> Barcode:
    """Barcode of a nested sequence of complexes, reported at ``grades``."""
    grades = list(range(len(complexes))) if grades is None else list(grades)
    if len(grades) != len(complexes):
        raise FiltrationError("need one grade per complex")
    pairs = persistence_pairs(complexes, p).get(degree, [])
    bars = [(grades[b], None if d is None else grades[d]) for b, d in pairs]
    return Barcode(degree, bars, grades)
