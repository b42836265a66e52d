"""Edge-path presentations of the fundamental group and loop words.

Generators are the 1-simplices outside a spanning tree; every 2-simplex
contributes one relation.  Tietze moves eliminate any generator that occurs
exactly once in some relation.  When every relation then reduces to the
empty word the group is free on the survivors, and the freely reduced word
of a based loop decides its homotopy class.
"""
from __future__ import annotations

from collections import deque

from .complex import SimplicialComplex

# a word is a tuple of nonzero ints: +g is generator g, -g its inverse (g >= 1)


def free_reduce(word) -> tuple:
    out: list = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _cyclic_reduce(word) -> tuple:
    w = list(free_reduce(word))
    while len(w) > 1 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def inverse(word) -> tuple:
    return tuple(-x for x in reversed(word))


def _substitute(word, defs: dict) -> tuple:
    out = []
    for x in word:
        g = abs(x)
        if g in defs:
            out.extend(defs[g] if x > 0 else inverse(defs[g]))
        else:
            out.append(x)
    return free_reduce(out)


class LoopPresentation:
    """Presentation of the fundamental group of ``y`` at ``base``.

    ``edge_word[(a, b)]`` is the word of the oriented 1-simplex a -> b in the
    surviving generators; ``is_free`` records whether all relations vanished.
    """

    def __init__(self, y: SimplicialComplex, base: int = 0, max_word: int = 10_000):
        parent = {base: None}
        queue = deque([base])
        while queue:
            a = queue.popleft()
            for b in y.neighbors[a]:
                if b not in parent:
                    parent[b] = a
                    queue.append(b)
        tree = {(min(a, p), max(a, p)) for a, p in parent.items() if p is not None}
        gens = {e: i + 1 for i, e in enumerate(e for e in y.edges if e not in tree)}

        def word(a, b):
            if (a, b) in gens:
                return (gens[(a, b)],)
            if (b, a) in gens:
                return (-gens[(b, a)],)
            return ()

        relations = [_cyclic_reduce(word(a, b) + word(b, c) + word(c, a))
                     for a, b, c in y.simplices_of_dim(2)]
        defs: dict = {}
        changed = True
        while changed:
            changed = False
            relations = [r for r in (_cyclic_reduce(_substitute(r, defs)) for r in relations) if r]
            for r in relations:
                counts: dict = {}
                for x in r:
                    counts[abs(x)] = counts.get(abs(x), 0) + 1
                g = next((g for g, c in counts.items() if c == 1), None)
                if g is None:
                    continue
                i = next(i for i, x in enumerate(r) if abs(x) == g)
                u, v = r[:i], r[i + 1:]
                # u g v = 1 gives g = u^-1 v^-1; u g^-1 v = 1 gives g = v u
                sol = free_reduce(inverse(u) + inverse(v)) if r[i] > 0 else free_reduce(v + u)
                if len(sol) > max_word:
                    continue
                defs = {h: _substitute(w, {g: sol}) for h, w in defs.items()}
                defs[g] = sol
                changed = True
                break
        self.relations = relations
        self.is_free = not relations
        self.rank = len(gens) - len(defs)
        self.base = base
        self.edge_word = {}
        for a in range(y.vertex_count):
            for b in y.neighbors[a]:
                self.edge_word[(a, b)] = _substitute(word(a, b), defs)

    def loop_word(self, walk) -> tuple:
        """Freely reduced word of the closed walk ``walk`` (which returns to ``walk[0]``)."""
        out: list = []
        n = len(walk)
        for i in range(n):
            a, b = walk[i], walk[(i + 1) % n]
            if a != b:
                for x in self.edge_word[(a, b)]:
                    if out and out[-1] == -x:
                        out.pop()
                    else:
                        out.append(x)
        return tuple(out)
