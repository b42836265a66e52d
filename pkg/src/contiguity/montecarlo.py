"""Randomized same-class search, uniform closed walks and class-count estimation."""
from __future__ import annotations

import hashlib
import itertools
import logging
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from . import _kernels
from .complex import SimplicialComplex, circle
from .errors import CapExceededError, ComplexError, MapError
from .maps import SimplicialMap, mutually_contiguous
from .homology import loop_cocycles
from .loops import LoopPresentation

log = logging.getLogger(__name__)

UNREACHABLE = 1 << 30
DEFAULT_SCHEDULE = (1_000, 10_000, 100_000)
CIRCLE_TABLE_LIMIT = 20_000_000


@dataclass(frozen=True)
class WalkConfig:
    """Parameters of the randomized same-class search.

    ``step_soundness="contiguous"`` only proposes single-vertex changes that
    are contiguous to the current map, so a successful walk is a proof.
    ``"literal"`` proposes any change that keeps the map simplicial.
    """

    kappa: float = 0.1
    max_iters: int = 500_000
    seed: int = 0
    step_soundness: str = "contiguous"
    max_attempts: int = 32

    def __post_init__(self):
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError("kappa must lie in [0, 1]")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.step_soundness not in ("contiguous", "literal"):
            raise ValueError("step_soundness must be 'contiguous' or 'literal'")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass
class WalkCertificate:
    """Chain of maps from ``f`` to ``g`` changing one vertex per step."""

    steps: list
    verified: bool = False

    def verify(self, x: SimplicialComplex, y: SimplicialComplex) -> bool:
        ok = True
        for a, b in zip(self.steps, self.steps[1:]):
            if sum(p != q for p, q in zip(a, b)) != 1 or not mutually_contiguous([a, b], x, y):
                ok = False
                break
        self.verified = ok
        return ok


@dataclass
class WalkResult:
    found: bool
    iterations: int
    certificate: WalkCertificate | None = None


class _Tables:
    """Array views of a (domain, codomain) pair for the compiled walk."""

    def __init__(self, x: SimplicialComplex, y: SimplicialComplex, base=None):
        self.x, self.y = x, y
        ny = y.vertex_count
        facets = x.maximal_simplices
        width = max((len(s) for s in facets), default=1)
        self.xfacets = np.full((max(len(facets), 1), width), -1, dtype=np.int64)
        for i, s in enumerate(facets):
            self.xfacets[i, :len(s)] = s
        stars = [[] for _ in range(x.vertex_count)]
        for i, s in enumerate(facets):
            for v in s:
                stars[v].append(i)
        self.star_ptr = np.zeros(x.vertex_count + 1, dtype=np.int64)
        self.star_ptr[1:] = np.cumsum([len(s) for s in stars])
        self.star_idx = np.array([i for s in stars for i in s], dtype=np.int64)
        closed = [(a,) + y.neighbors[a] for a in range(ny)]
        self.nbr_ptr = np.zeros(ny + 1, dtype=np.int64)
        self.nbr_ptr[1:] = np.cumsum([len(c) for c in closed])
        self.nbr_idx = np.array([a for c in closed for a in c], dtype=np.int64)
        self.max_size = y.dimension + 1
        self.base = ny + 1
        if self.max_size * math.log2(self.base) > 62:
            raise ComplexError("codomain too large for the compiled simplex index")
        self.codes = np.array(sorted(_encode(s, self.base) for s in y.simplices), dtype=np.int64)
        # dense lookup tables when the domain is a graph: only vertex sets of
        # size <= 3 ever need testing, indexed by ordered tuples
        self.use_tables = x.dimension <= 1 and ny <= 256
        self.graph_mode = self.use_tables
        if self.use_tables:
            pair = np.eye(ny, dtype=np.bool_)
            for a, b in y.edges:
                pair[a, b] = pair[b, a] = True
            triple = pair[:, :, None] & pair[:, None, :] & pair[None, :, :]
            tri = np.zeros((ny, ny, ny), dtype=np.bool_)
            for s in y.simplices_of_dim(2):
                for a, b, c in itertools.permutations(s):
                    tri[a, b, c] = True
            distinct = ((np.arange(ny)[:, None, None] != np.arange(ny)[None, :, None])
                        & (np.arange(ny)[None, :, None] != np.arange(ny)[None, None, :])
                        & (np.arange(ny)[:, None, None] != np.arange(ny)[None, None, :]))
            self.pair_tab = pair
            self.triple_tab = np.where(distinct, tri, triple)
            self.edge_tab, self.tri_tab = pair, tri
            xn = [x.neighbors[v] for v in range(x.vertex_count)]
            self.xnbr_ptr = np.zeros(x.vertex_count + 1, dtype=np.int64)
            self.xnbr_ptr[1:] = np.cumsum([len(a) for a in xn])
            self.xnbr_idx = np.array([w for a in xn for w in a], dtype=np.int64)
        else:
            self.edge_tab = self.pair_tab = np.zeros((1, 1), dtype=np.bool_)
            self.tri_tab = self.triple_tab = np.zeros((1, 1, 1), dtype=np.bool_)
            self.xnbr_ptr = np.zeros(1, dtype=np.int64)
            self.xnbr_idx = np.zeros(0, dtype=np.int64)
        self.dist = graph_distances(y)
        mov = [v for v in range(x.vertex_count) if base is None or v != base]
        self.movable = np.array(mov, dtype=np.int64)
        self.circle_ok = (self.use_tables and base in (None, 0) and x.vertex_count >= 3
                          and x == circle(x.vertex_count)
                          and ny ** 3 * max(len(a) + 1 for a in closed) <= CIRCLE_TABLE_LIMIT)
        self._circle_tabs: dict = {}

    def _circle(self, contiguous: bool):
        if contiguous not in self._circle_tabs:
            self._circle_tabs[contiguous] = _kernels.circle_tables(
                self.pair_tab, self.triple_tab, contiguous)
        return self._circle_tabs[contiguous]

    def run(self, f, g, cfg: WalkConfig, seed: int, record: bool = False):
        contiguous = cfg.step_soundness == "contiguous"
        if self.circle_ok:
            count, lists = self._circle(contiguous)
            return _kernels.walk_circle(
                np.asarray(f, dtype=np.int64), np.asarray(g, dtype=np.int64),
                len(self.movable) < self.x.vertex_count, count, lists, self.dist,
                float(cfg.kappa), int(cfg.max_iters), int(cfg.max_attempts), int(seed), record)
        return _kernels.walk(
            np.asarray(f, dtype=np.int64), np.asarray(g, dtype=np.int64), self.movable,
            self.xfacets, self.star_ptr, self.star_idx, self.nbr_ptr, self.nbr_idx,
            self.y.vertex_count, self.edge_tab, self.tri_tab, self.use_tables, self.codes,
            self.base, self.max_size, self.dist, float(cfg.kappa), int(cfg.max_iters),
            contiguous, int(cfg.max_attempts), int(seed), record,
            self.graph_mode, self.xnbr_ptr, self.xnbr_idx, self.pair_tab, self.triple_tab)


def _encode(s, base: int) -> int:
    code, mult = 0, 1
    for v in s:
        code += (v + 1) * mult
        mult *= base
    return code


def graph_distances(y: SimplicialComplex) -> np.ndarray:
    """All-pairs shortest-path lengths in the 1-skeleton (BFS).

    Unreachable pairs get the ``UNREACHABLE`` sentinel.  When the
    ``CONTIG_CACHE_DIR`` environment variable names a directory, tables are
    memoized there keyed by a hash of the edge list.
    """
    n = y.vertex_count
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    edges = sorted(y.edges)
    cache_dir = os.environ.get("CONTIG_CACHE_DIR")
    path = None
    if cache_dir:
        key = hashlib.sha256(repr((n, edges)).encode()).hexdigest()[:32]
        path = Path(cache_dir) / f"bfs-{key}.npy"
        if path.exists():
            try:
                return np.load(path)
            except (OSError, ValueError):
                log.warning("ignoring unreadable cache file %s", path)
    rows = [a for a, b in edges] + [b for a, b in edges]
    cols = [b for a, b in edges] + [a for a, b in edges]
    adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    d = shortest_path(adj, unweighted=True, directed=False)
    d[np.isinf(d)] = UNREACHABLE
    d = d.astype(np.int64)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(f".{os.getpid()}.tmp.npy")
        np.save(tmp, d)
        os.replace(tmp, path)
    return d


def map_distance(f, g, y: SimplicialComplex | None = None, dist: np.ndarray | None = None) -> float:
    """Sum over domain vertices of the graph distance between f(v) and g(v).

    Returns ``math.inf`` when some pair lies in different components.
    """
    fa = f.assignment if isinstance(f, SimplicialMap) else tuple(f)
    ga = g.assignment if isinstance(g, SimplicialMap) else tuple(g)
    if len(fa) != len(ga):
        raise MapError("maps have different domains")
    if dist is None:
        if y is None:
            if not isinstance(f, SimplicialMap):
                raise MapError("need the codomain to measure distance")
            y = f.codomain
        dist = graph_distances(y)
    total = 0
    for a, b in zip(fa, ga):
        d = int(dist[a, b])
        if d >= UNREACHABLE:
            return math.inf
        total += d
    return total


def walk_seed(seed: int, *stream: int) -> int:
    """32-bit seed for the compiled walk, derived from ``(seed, *stream)``."""
    return int(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, *stream]).generate_state(1)[0])


def same_class_walk(f: SimplicialMap, g: SimplicialMap, cfg: WalkConfig = WalkConfig(),
                    based: int | None = None, stream: Sequence[int] = (),
                    tables: _Tables | None = None) -> WalkResult:
    """Randomized local search for a chain of single-vertex changes from f to g.

    ``based`` names a domain vertex that is never changed.  A negative result
    proves nothing.  In contiguous mode a positive result carries a verified
    certificate.
    """
    if tables is None:
        if f.domain is not g.domain and f.domain != g.domain:
            raise MapError("maps do not share a domain")
        tables = _Tables(f.domain, f.codomain, based)
    found, iters, rec_v, rec_u = tables.run(f.assignment, g.assignment, cfg,
                                            walk_seed(cfg.seed, *stream), record=True)
    if not found:
        return WalkResult(False, int(iters))
    steps = [tuple(f.assignment)]
    cur = list(f.assignment)
    for v, u in zip(rec_v.tolist(), rec_u.tolist()):
        cur[v] = u
        steps.append(tuple(cur))
    cert = WalkCertificate(steps)
    if cfg.step_soundness == "contiguous":
        cert.verify(tables.x, tables.y)
    return WalkResult(True, int(iters), cert)


# uniform closed walks --------------------------------------------------------

def walk_count_table(y: SimplicialComplex, base: int, k: int, collapse: bool = True) -> list:
    """``table[j][w]``: number of length-``j`` walks from ``w`` to ``base``.

    Steps follow edges of the 1-skeleton, plus staying put when ``collapse``.
    Counts are exact Python integers.
    """
    steps = [((a,) if collapse else ()) + y.neighbors[a] for a in range(y.vertex_count)]
    cur = [0] * y.vertex_count
    cur[base] = 1
    table = [cur]
    for _ in range(k):
        cur = [sum(cur[b] for b in steps[a]) for a in range(y.vertex_count)]
        table.append(cur)
    return table


def closed_walk_total(y: SimplicialComplex, base: int, k: int, collapse: bool = True) -> int:
    """Number of based simplicial maps S^1_k -> y (closed walks of length k)."""
    return walk_count_table(y, base, k, collapse)[k][base]


def _randbelow(rng: np.random.Generator, n: int) -> int:
    if n <= 0:
        raise ValueError("n must be positive")
    if n < 1 << 62:
        return int(rng.integers(n))
    bits = n.bit_length()
    while True:
        words = rng.integers(0, 1 << 32, size=(bits + 31) // 32, dtype=np.uint64)
        r = 0
        for w in words.tolist():
            r = (r << 32) | w
        r >>= 32 * len(words) - bits
        if r < n:
            return r


class ClosedWalkSampler:
    """Uniform sampler of based maps S^1_k -> y by inverse transfer-matrix counting."""

    def __init__(self, y: SimplicialComplex, base: int, k: int, collapse: bool = True):
        if k < 3:
            raise ComplexError("k must be >= 3")
        if not 0 <= base < y.vertex_count:
            raise ComplexError("base vertex out of range")
        self.y, self.base, self.k = y, base, k
        self.steps = [((a,) if collapse else ()) + y.neighbors[a] for a in range(y.vertex_count)]
        self.table = walk_count_table(y, base, k, collapse)
        self.total = self.table[k][base]
        if self.total == 0:
            raise ComplexError("no closed walks of this length")

    def sample(self, rng: np.random.Generator) -> tuple:
        r = _randbelow(rng, self.total)
        out = [self.base]
        cur = self.base
        for j in range(1, self.k):
            remaining = self.table[self.k - j]
            for w in self.steps[cur]:
                c = remaining[w]
                if r < c:
                    cur = w
                    break
                r -= c
            out.append(cur)
        return tuple(out)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based generator for one trial, independent across (seed, trial)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, trial])))


def uniform_closed_walk(y: SimplicialComplex, base: int, k: int, seed: int = 0,
                        collapse: bool = True) -> SimplicialMap:
    """One uniformly random based simplicial map S^1_k -> y."""
    sampler = ClosedWalkSampler(y, base, k, collapse)
    return SimplicialMap(circle(k), y, sampler.sample(trial_rng(seed, 0)))


def circle_walk_partition(y: SimplicialComplex, k: int, base: int = 0,
                          limit: int = 50_000_000) -> tuple:
    """Codes and class labels of every based map S^1_k -> y.

    Walk ``w`` is coded as ``sum(w[i] * n**(k-1-i))`` with ``n`` the vertex
    count of ``y``; codes come back sorted.  Labels are dense class indices
    numbered by first appearance.  Raises ``CapExceededError`` beyond
    ``limit`` walks.
    """
    if k < 3:
        raise ComplexError("k must be >= 3")
    ny = y.vertex_count
    if k * math.log2(max(ny, 2)) > 62:
        raise CapExceededError("walk codes overflow 64 bits")
    total = closed_walk_total(y, base, k)
    if total > limit:
        raise CapExceededError(f"{total} closed walks exceed the limit {limit}")
    tables = _Tables(circle(k), y, base=0)
    if not tables.use_tables:
        raise ComplexError("codomain too large for the compiled tables")
    table = walk_count_table(y, base, k)
    reach = np.array([[1 if c else 0 for c in row] for row in table], dtype=np.int8)
    codes = _kernels.enumerate_closed_walks(tables.nbr_ptr, tables.nbr_idx, reach, base, k, limit)
    count, lists = _kernels.circle_tables(tables.pair_tab, tables.triple_tab, True)
    roots = _kernels.closed_walk_classes(codes, ny, k, count, lists)
    _, first, labels = np.unique(roots, return_index=True, return_inverse=True)
    # renumber so that class c is the c-th class met in code order
    order = np.argsort(np.argsort(first))
    return codes, order[labels]


def decode_walk(code: int, ny: int, k: int) -> tuple:
    out = []
    for _ in range(k):
        out.append(int(code % ny))
        code //= ny
    return tuple(reversed(out))


def exact_circle_class_count(y: SimplicialComplex, k: int, base: int = 0,
                             limit: int = 50_000_000) -> tuple:
    """Exact count of contiguity classes of based maps S^1_k -> y.

    Compiled counterpart of ``exact_class_count`` for circle domains.
    Returns ``(walk_count, class_count)``.
    """
    codes, labels = circle_walk_partition(y, k, base, limit)
    return len(codes), int(labels.max()) + 1 if len(labels) else 0


# estimator ----------------------------------------------------------------------

@dataclass
class EstimatorState:
    catalog: list = field(default_factory=list)
    trials: int = 0
    schedule: tuple = DEFAULT_SCHEDULE
    stabilized: bool = False
    history: list = field(default_factory=list)
    walks: int = 0
    failed_walks: int = 0
    pruned: int = 0
    wall_time: float = 0.0

    @property
    def class_count(self) -> int:
        return len(self.catalog)


def loop_invariant(y: SimplicialComplex, base: int = 0):
    """A function sending based closed walks to a homotopy invariant.

    Uses the reduced word in a free fundamental group when the edge-path
    presentation of ``y`` collapses to one, and otherwise the values of a
    basis of mod-p 1-cocycles.  Walks with different invariants are never
    contiguity-equivalent.
    """
    pres = LoopPresentation(y, base)
    if pres.is_free:
        return pres.loop_word
    cocycles, p = loop_cocycles(y)

    def pairing(walk):
        a = np.asarray(walk)
        return tuple((cocycles[:, a, np.roll(a, -1)].sum(axis=1) % p).tolist())
    return pairing


class _Catalog:
    """Representatives found so far, with the arrays the compiled walk needs."""

    def __init__(self, k: int):
        self.entries: list = []
        self.rows = np.zeros((0, k), dtype=np.int64)
        self.invariants: list = []

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, gamma: tuple, garr: np.ndarray, inv) -> int:
        self.entries.append(gamma)
        self.rows = np.vstack([self.rows, garr[None, :]])
        self.invariants.append(inv)
        return len(self.entries) - 1


def _compare(tables: _Tables, cfg: WalkConfig, t: int, garr: np.ndarray, inv, rows: np.ndarray,
             invariants: list, start: int = 0) -> tuple:
    """Walk from ``garr`` to catalog rows ``start:`` nearest-first.

    Returns ``(hit, walks, failed, pruned)`` where ``hit`` is the matched
    catalog index or -1.
    """
    walks = failed = pruned = 0
    if len(rows) <= start:
        return -1, 0, 0, 0
    dists = _kernels.sum_distances(tables.dist, garr, rows[start:])
    for j in np.argsort(dists, kind="stable").tolist():
        j += start
        if inv is not None and invariants[j] != inv:
            pruned += 1
            continue
        walks += 1
        found = tables.run(garr, rows[j], cfg, walk_seed(cfg.seed, t, j))[0]
        if found:
            return j, walks, failed, pruned
        failed += 1
    return -1, walks, failed, pruned


def estimate_class_count(y: SimplicialComplex, k: int, cfg: WalkConfig = WalkConfig(),
                         schedule: Sequence[int] = DEFAULT_SCHEDULE, base: int = 0,
                         collapse: bool = True, prune: bool = True,
                         time_limit: float | None = None, workers: int = 1,
                         batch_size: int = 256) -> EstimatorState:
    """Estimate the number of contiguity classes of based maps S^1_k -> y.

    Samples uniform closed walks and keeps a catalog of representatives; a
    sample joins the catalog only when the randomized walk fails to reach
    every existing entry (nearest entries first).  ``schedule`` lists
    cumulative trial budgets; the run stops at the end of the first round
    in which the catalog did not grow.

    With ``prune`` (contiguous mode only) entries whose ``loop_invariant``
    differs from the sample's are skipped: contiguous steps preserve the
    homotopy class, so those walks cannot succeed.

    ``workers > 1`` compares batches of samples against a catalog snapshot
    in threads, then inserts them in trial order after checking entries
    added since the snapshot.  Only ``workers=1`` replays bit-for-bit.
    """
    if not y.is_connected():
        raise ComplexError("target 1-skeleton must be connected")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    schedule = tuple(int(b) for b in schedule)
    if any(b2 <= b1 for b1, b2 in zip(schedule, schedule[1:])) or not schedule:
        raise ValueError("schedule must be a non-empty increasing list of trial budgets")
    start = time.perf_counter()
    tables = _Tables(circle(k), y, base=0)
    if tables.circle_ok:
        tables._circle(cfg.step_soundness == "contiguous")  # build before threads share it
    sampler = ClosedWalkSampler(y, base, k, collapse)
    invariant = loop_invariant(y, base) if prune and cfg.step_soundness == "contiguous" else None
    state = EstimatorState(schedule=schedule)
    catalog = _Catalog(k)
    memo: dict = {}
    pool = None
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        pool = ThreadPoolExecutor(max_workers=workers)

    def out_of_time() -> bool:
        return time_limit is not None and time.perf_counter() - start > time_limit

    def tally(res):
        state.walks += res[1]
        state.failed_walks += res[2]
        state.pruned += res[3]

    def insert(t, gamma, garr, inv, hit):
        if hit < 0:
            hit = catalog.add(gamma, garr, inv)
            log.debug("trial %d: new class %d", t, hit)
        memo[gamma] = hit

    try:
        for r, budget in enumerate(schedule):
            before = len(catalog)
            while state.trials < budget and not out_of_time():
                if pool is None:
                    t = state.trials
                    state.trials += 1
                    gamma = sampler.sample(trial_rng(cfg.seed, t))
                    if gamma in memo:
                        continue
                    garr = np.asarray(gamma, dtype=np.int64)
                    inv = None if invariant is None else invariant(gamma)
                    res = _compare(tables, cfg, t, garr, inv, catalog.rows, catalog.invariants)
                    tally(res)
                    insert(t, gamma, garr, inv, res[0])
                    continue
                n = min(batch_size, budget - state.trials)
                first = state.trials
                state.trials += n
                jobs = {}
                for t in range(first, first + n):
                    gamma = sampler.sample(trial_rng(cfg.seed, t))
                    if gamma in memo or gamma in jobs:
                        continue
                    jobs[gamma] = t
                snap = len(catalog)
                rows, invs = catalog.rows, list(catalog.invariants)
                futures = []
                for gamma, t in jobs.items():
                    garr = np.asarray(gamma, dtype=np.int64)
                    inv = None if invariant is None else invariant(gamma)
                    futures.append((t, gamma, garr, inv,
                                    pool.submit(_compare, tables, cfg, t, garr, inv, rows, invs)))
                for t, gamma, garr, inv, fut in futures:
                    res = fut.result()
                    tally(res)
                    hit = res[0]
                    if hit < 0:
                        res = _compare(tables, cfg, t, garr, inv, catalog.rows,
                                       catalog.invariants, start=snap)
                        tally(res)
                        hit = res[0]
                    insert(t, gamma, garr, inv, hit)
            state.history.append((state.trials, len(catalog)))
            if out_of_time():
                break
            if r > 0 and len(catalog) == before:
                state.stabilized = True
                break
    finally:
        if pool is not None:
            pool.shutdown()
    state.catalog = list(catalog.entries)
    state.wall_time = time.perf_counter() - start
    return state


def estimator_report(state: EstimatorState, target: str, k: int, cfg: WalkConfig,
                     based: bool = True) -> dict:
    return {"target": target, "k": k, "based": based, "kappa": cfg.kappa, "M": cfg.max_iters,
            "seed": cfg.seed, "step_soundness": cfg.step_soundness,
            "schedule": list(state.schedule), "class_count": state.class_count,
            "class_count_over_k2": state.class_count / k ** 2,
            "class_representatives": [list(c) for c in state.catalog],
            "trials": state.trials, "stabilized": state.stabilized,
            "history": [list(h) for h in state.history], "walks": state.walks,
            "failed_walks": state.failed_walks, "pruned_comparisons": state.pruned,
            "wall_time": state.wall_time}
