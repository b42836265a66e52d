"""Input checks shared by the estimator wrappers and the CLI."""
from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array

from .complex import SimplicialComplex, make_complex
from .errors import ComplexError
from .homology import is_prime
from .rips import FiniteMetricSpace


def check_complex(obj) -> SimplicialComplex:
    """Coerce a complex, its JSON dict, or a list of facets."""
    if isinstance(obj, SimplicialComplex):
        return obj
    if isinstance(obj, dict):
        return SimplicialComplex.from_dict(obj)
    if isinstance(obj, (list, tuple)):
        return make_complex(obj)
    raise ComplexError(f"cannot interpret {type(obj).__name__} as a simplicial complex")


def check_point_cloud(points) -> np.ndarray:
    return check_array(points, ensure_2d=True, dtype=np.float64, ensure_min_samples=1)


def check_space(obj) -> FiniteMetricSpace:
    """A FiniteMetricSpace, or a point cloud to be measured with the Euclidean metric."""
    if isinstance(obj, FiniteMetricSpace):
        return obj
    return FiniteMetricSpace.from_points(check_point_cloud(obj))


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_prime(p, name: str = "field") -> int:
    p = check_positive_int(p, name, 2)
    if not is_prime(p):
        raise ValueError(f"{name} must be prime, got {p}")
    return p
