"""Scikit-learn style wrappers around class counting and Rips persistence."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .complex import circle
from .homology import persistent_homology
from .maps import SimplicialMap, exact_class_count
from .montecarlo import (DEFAULT_SCHEDULE, WalkConfig, _compare, _Tables, estimate_class_count,
                         loop_invariant, walk_seed)
from .persistence import rips_h0
from .rips import critical_filtration
from .validation import check_complex, check_positive_int, check_prime, check_space


class ContiguityClassCounter(BaseEstimator):
    """Counts contiguity classes of based maps S^1_k -> Y.

    ``fit`` takes the target complex.  With ``mode="exact"`` every map is
    enumerated; ``mode="estimate"`` runs the randomized catalog search.
    ``predict`` assigns closed walks to fitted classes.
    """

    def __init__(self, k=9, mode="estimate", based=True, kappa=0.1, max_iters=500_000,
                 seed=0, step_soundness="contiguous", schedule=DEFAULT_SCHEDULE, workers=1,
                 cap=50_000):
        self.k = k
        self.mode = mode
        self.based = based
        self.kappa = kappa
        self.max_iters = max_iters
        self.seed = seed
        self.step_soundness = step_soundness
        self.schedule = schedule
        self.workers = workers
        self.cap = cap

    def _config(self) -> WalkConfig:
        return WalkConfig(kappa=self.kappa, max_iters=self.max_iters, seed=self.seed,
                          step_soundness=self.step_soundness)

    def fit(self, Y, y=None):
        target = check_complex(Y)
        k = check_positive_int(self.k, "k", 3)
        if self.mode == "exact":
            part = exact_class_count(circle(k), target, based=(0, 0) if self.based else None,
                                     cap=self.cap)
            self.partition_ = part
            self.representatives_ = [m.assignment for m in part.representatives()]
            self.stabilized_ = True
        elif self.mode == "estimate":
            if not self.based:
                raise ValueError("the estimator samples based closed walks; use based=True")
            state = estimate_class_count(target, k, self._config(), self.schedule,
                                         workers=check_positive_int(self.workers, "workers"))
            self.state_ = state
            self.representatives_ = list(state.catalog)
            self.stabilized_ = state.stabilized
        else:
            raise ValueError(f"mode must be 'exact' or 'estimate', got {self.mode!r}")
        self.target_ = target
        self.class_count_ = len(self.representatives_)
        return self

    def predict(self, maps):
        """Class index of each map, or -1 when no walk reaches a representative."""
        check_is_fitted(self, "class_count_")
        walks = [m.assignment if isinstance(m, SimplicialMap) else tuple(int(v) for v in m)
                 for m in maps]
        if self.mode == "exact":
            return np.array([self.partition_.class_of(w) for w in walks], dtype=np.int64)
        cfg = self._config()
        tables = _Tables(circle(self.k), self.target_, base=0)
        invariant = (loop_invariant(self.target_) if cfg.step_soundness == "contiguous"
                     else (lambda w: None))
        rows = np.array(self.representatives_, dtype=np.int64).reshape(-1, self.k)
        invs = [invariant(tuple(r)) for r in self.representatives_]
        out = []
        for i, w in enumerate(walks):
            garr = np.asarray(w, dtype=np.int64)
            hit = _compare(tables, cfg, walk_seed(self.seed, i), garr,
                           invariant(w), rows, invs)[0]
            out.append(hit)
        return np.array(out, dtype=np.int64)


class RipsPersistence(TransformerMixin, BaseEstimator):
    """Rips barcodes of point clouds.

    ``transform`` maps a sequence of point clouds (or metric spaces) to a
    list of ``{degree: Barcode}`` dicts.  Degree 0 uses union-find, higher
    degrees use column reduction over GF(``field``).
    """

    def __init__(self, max_degree=1, field=2, include_zero=True):
        self.max_degree = max_degree
        self.field = field
        self.include_zero = include_zero

    def fit(self, X=None, y=None):
        check_positive_int(self.max_degree, "max_degree", 0)
        check_prime(self.field)
        self.n_degrees_ = self.max_degree + 1
        return self

    def _one(self, cloud) -> dict:
        space = check_space(cloud)
        out = {0: rips_h0(space, self.include_zero)}
        if self.max_degree >= 1:
            filt = critical_filtration(space, max_dim=self.max_degree + 1)
            complexes = filt.complexes(self.include_zero)
            grades = filt.grades(self.include_zero)
            for d in range(1, self.max_degree + 1):
                out[d] = persistent_homology(complexes, d, grades, self.field)
        return out

    def transform(self, X):
        check_is_fitted(self, "n_degrees_")
        return [self._one(cloud) for cloud in X]
