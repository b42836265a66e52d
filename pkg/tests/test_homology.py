import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contiguity.complex import (barycentric_subdivision, boundary, circle, make_complex,
                                pinched_sphere, point, simplex, torus)
from contiguity.errors import FiltrationError
from contiguity.homology import (Barcode, betti_numbers, boundary_matrix, loop_cocycles,
                                 nullspace_mod_p, persistence_pairs, persistent_homology,
                                 rank_mod_p)
from contiguity.rips import FiniteMetricSpace, critical_filtration

from oracles import betti_oracle, gf_rank


def test_small_betti_numbers():
    assert betti_numbers(boundary(2)) == (1, 1)
    assert betti_numbers(point()) == (1,)
    assert betti_numbers(simplex(3)) == (1, 0, 0, 0)
    assert betti_numbers(boundary(3)) == (1, 0, 1)


@pytest.mark.parametrize("p", [2, 3])
def test_torus_and_pinched_sphere_agree(p):
    assert betti_numbers(torus(), p) == betti_oracle(torus(), p) == (1, 2, 1)
    assert betti_numbers(pinched_sphere(), p) == betti_oracle(pinched_sphere(), p) == (1, 2, 1)


def test_non_prime_rejected():
    with pytest.raises(ValueError):
        betti_numbers(torus(), 4)


@pytest.mark.parametrize("x", [torus(), pinched_sphere(), simplex(3),
                               barycentric_subdivision(boundary(3)).refined])
@pytest.mark.parametrize("p", [2, 3, 5])
def test_boundary_squares_to_zero(x, p):
    for k in range(2, x.dimension + 1):
        prod = boundary_matrix(x, k - 1, p) @ boundary_matrix(x, k, p)
        assert not np.any(prod % p)


def test_rank_helpers_match_oracle():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = rng.integers(0, 7, size=(5, 7))
        assert rank_mod_p(a, 7) == gf_rank(a.tolist(), 7)
        basis = nullspace_mod_p(a, 7)
        assert basis.shape[0] == 7 - gf_rank(a.tolist(), 7)
        assert not np.any((a @ basis.T) % 7)


def test_cocycles_vanish_on_triangles():
    for y in (torus(), pinched_sphere()):
        w, p = loop_cocycles(y)
        assert w.shape[0] == 2
        for a, b, c in y.simplices_of_dim(2):
            assert not np.any((w[:, a, b] + w[:, b, c] + w[:, c, a]) % p)


def test_triple_h0_bars():
    space = FiniteMetricSpace(np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], dtype=float))
    f = critical_filtration(space)
    bc = persistent_homology(f.complexes(), 0, f.grades())
    assert bc.multiset() == [(0.0, 1.0), (0.0, 1.0), (0.0, None)]


def test_single_complex_gives_betti_bars():
    for x in (torus(), boundary(2)):
        b = betti_numbers(x)
        for k, bk in enumerate(b):
            bc = persistent_homology([x], k)
            assert bc.bars == [(0, None)] * bk


def test_circle_points_h1_bar():
    theta = np.arange(8) * 2 * np.pi / 8
    space = FiniteMetricSpace.from_points(np.column_stack([np.cos(theta), np.sin(theta)]))
    f = critical_filtration(space, max_dim=2)
    cxs, grades = f.complexes(), f.grades()
    bc = persistent_homology(cxs, 1, grades)
    assert len(bc.bars) == 1
    birth, death = bc.bars[0]
    assert birth == pytest.approx(grades[1])  # the octagon closes at the side length
    for g, cx in zip(grades, cxs):
        b = betti_oracle(cx)
        assert bc.alive_at(g) == (b[1] if len(b) > 1 else 0)
    assert death is not None and betti_oracle(cxs[grades.index(death)])[1] == 0


def test_non_nested_rejected():
    with pytest.raises(FiltrationError):
        persistence_pairs([torus(), boundary(2)])


def test_grade_refinement_invariance():
    theta = np.arange(6) * 2 * np.pi / 6
    space = FiniteMetricSpace.from_points(np.column_stack([np.cos(theta), np.sin(theta)]))
    f = critical_filtration(space)
    cxs, grades = f.complexes(), f.grades()
    padded = cxs[:2] + [cxs[1]] + cxs[2:]
    pgrades = grades[:2] + [(grades[1] + grades[2]) / 2] + grades[2:]
    for k in (0, 1):
        assert persistent_homology(cxs, k, grades).bars == persistent_homology(padded, k, pgrades).bars


def test_barcode_serialisation():
    bc = Barcode(0, [(1, None), (0, 2)], [0, 1, 2])
    assert bc.to_dict() == {"degree": 0, "bars": [[0, 2], [1, None]], "grades": [0, 1, 2]}
    assert "inf" in bc.to_text()
    assert bc.finite() == [(0, 2)] and bc.infinite() == [(1, None)]


@st.composite
def filtrations(draw):
    n = draw(st.integers(2, 6))
    facets = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=1, max_size=3),
                           min_size=1, max_size=6))
    cut = sorted(draw(st.lists(st.integers(0, len(facets)), min_size=1, max_size=3)))
    return [make_complex(facets[:c], vertex_count=n) for c in cut] + [make_complex(facets, vertex_count=n)]


@settings(max_examples=60, deadline=None)
@given(filtrations())
def test_alive_bars_equal_stage_betti(cxs):
    top = max(c.dimension for c in cxs)
    for k in range(top + 1):
        bc = persistent_homology(cxs, k)
        for g, cx in enumerate(cxs):
            b = betti_oracle(cx)
            assert bc.alive_at(g) == (b[k] if k < len(b) else 0)
