import itertools
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contiguity.complex import (SimplicialComplex, barycentric_subdivision, boundary, carrier,
                                circle, identity_subdivision, isomorphic, iterated_subdivision,
                                make_complex, mesh_size, mesh_size_squared, pinched_sphere, point,
                                product_complex, simplex, standard_complex, torus)
from contiguity.errors import CapExceededError, ComplexError

from oracles import exact_norm_squared, product_oracle


@st.composite
def random_complexes(draw, max_vertices=7, max_facets=5):
    n = draw(st.integers(1, max_vertices))
    facets = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=1, max_size=4),
                           max_size=max_facets))
    return make_complex(facets, vertex_count=n)


def test_boundary_of_triangle_from_facets():
    cx = make_complex([{0, 1}, {1, 2}, {0, 2}])
    assert cx.f_vector == (3, 3)
    assert (0, 1, 2) not in cx


def test_point_and_triangle_closures():
    assert len(make_complex([{0}])) == 1
    assert len(make_complex([{0, 1, 2}])) == 7


def test_bad_facets_rejected():
    with pytest.raises(ComplexError):
        make_complex([[]])
    with pytest.raises(ComplexError):
        make_complex([[0, 3]], vertex_count=3)


def test_closure_cap():
    with pytest.raises(CapExceededError):
        make_complex([range(12)], cap=100)


def test_standard_counts():
    assert torus().f_vector == (9, 27, 18)
    assert pinched_sphere().f_vector == (14, 38, 24)
    assert isomorphic(circle(3), boundary(2))
    assert circle(12).f_vector == (12, 12)


def test_standard_complex_names():
    assert standard_complex("boundary2") == boundary(2)
    assert standard_complex("simplex", 3) == simplex(3)
    assert standard_complex("circle", 5) == circle(5)
    assert standard_complex("torus_T") == torus()
    assert standard_complex("pinched_P") == pinched_sphere()
    with pytest.raises(ComplexError):
        standard_complex("circle", 2)
    with pytest.raises(ComplexError):
        standard_complex("klein")


def test_torus_links_are_hexagons():
    # every vertex of a triangulated surface has a circle as its link
    t = torus()
    for v in range(9):
        link = [tuple(w for w in s if w != v) for s in t.simplices_of_dim(2) if v in s]
        assert len(link) == 6
        degree = {}
        for a, b in link:
            degree[a] = degree.get(a, 0) + 1
            degree[b] = degree.get(b, 0) + 1
        assert set(degree.values()) == {2}


def test_pinched_sphere_is_sphere_plus_two_chords():
    p = pinched_sphere()
    sd = barycentric_subdivision(boundary(3)).refined
    extra = set(p.edges) - set(sd.edges)
    assert len(extra) == 2
    assert sd.simplices <= p.simplices
    a, b = sorted(extra)
    assert not set(a) & set(b)


@pytest.mark.parametrize("x,y", [(simplex(1), simplex(1)), (boundary(2), simplex(1)),
                                 (simplex(1), boundary(2)), (circle(4), point())])
def test_product_matches_subset_filter(x, y):
    assert product_complex(x, y).simplices == product_oracle(x, y)


def test_product_of_edges_is_tetrahedron():
    assert isomorphic(product_complex(simplex(1), simplex(1)), simplex(3))


def test_product_with_point_is_identity():
    assert isomorphic(product_complex(boundary(2), point()), boundary(2))


def test_product_symmetry():
    x, y = boundary(2), simplex(1)
    xy, yx = product_complex(x, y), product_complex(y, x)
    swap = {v * 2 + w: w * 3 + v for v in range(3) for w in range(2)}
    assert {tuple(sorted(swap[a] for a in s)) for s in xy.simplices} == yx.simplices


def test_subdivision_counts():
    assert barycentric_subdivision(boundary(2)).refined.f_vector == (6, 6)
    assert barycentric_subdivision(point()).refined == point()
    sd = barycentric_subdivision(simplex(2)).refined
    # a flag of faces of the triangle: choose a chain of nonempty faces
    faces = [s for r in range(1, 4) for s in itertools.combinations(range(3), r)]
    chains = [c for r in range(1, 4) for c in itertools.combinations(faces, r)
              if all(set(a) < set(b) for a, b in zip(sorted(c, key=len), sorted(c, key=len)[1:]))
              and len({len(f) for f in c}) == len(c)]
    assert sd.vertex_count == 7 and len(sd) == len(chains) == 25


def test_mesh_sizes():
    assert abs(mesh_size(identity_subdivision(boundary(2))) - math.sqrt(2)) < 1e-12
    assert mesh_size(barycentric_subdivision(boundary(2))) <= 1
    for n in range(1, 7):
        s = iterated_subdivision(boundary(2), n)
        assert mesh_size_squared(s) <= Fraction(1, 2 ** (n - 1))
        assert mesh_size_squared(s) == Fraction(2, 4 ** n)


def test_mesh_matches_exact_oracle():
    s = iterated_subdivision(simplex(2), 2)
    best = max(exact_norm_squared(s.embedding[a], s.embedding[b]) for a, b in s.refined.edges)
    assert mesh_size_squared(s) == best


@pytest.mark.parametrize("x", [boundary(2), simplex(2), simplex(3), torus()])
def test_mesh_monotone(x):
    s = identity_subdivision(x)
    prev = mesh_size_squared(s)
    for _ in range(2 if x.vertex_count < 9 else 1):
        s = barycentric_subdivision(s)
        cur = mesh_size_squared(s)
        assert cur <= prev
        prev = cur


def test_carrier_examples():
    s = barycentric_subdivision(boundary(2))
    b01 = next(v for v, coords in enumerate(s.embedding) if set(coords) == {0, 1})
    assert carrier(s, (0, b01)) == (0, 1)
    assert carrier(s, (0,)) == (0,)
    assert carrier(s, (b01,)) == (0, 1)
    with pytest.raises(ComplexError):
        carrier(s, (1, 2))


@pytest.mark.parametrize("x,n", [(simplex(2), 2), (boundary(3), 1), (torus(), 1)])
def test_carrier_partition(x, n):
    s = iterated_subdivision(x, n)
    carried = {}
    for sigma in s.refined.simplices:
        c = s.carrier(sigma)
        assert c in x
        for v in sigma:
            assert set(s.embedding[v]) <= set(c)
        carried.setdefault(c, []).append(sigma)
    assert set(carried) == set(x.simplices)


def test_ancestor_vertices_survive():
    s = iterated_subdivision(simplex(2), 2)
    for v in range(3):
        assert s.embedding[v] == {v: 1}


def test_weights_sum_to_one():
    s = iterated_subdivision(boundary(3), 2)
    assert all(sum(c.values()) == 1 and min(c.values()) > 0 for c in s.embedding)


def test_json_roundtrip(tmp_path):
    t = torus()
    again = SimplicialComplex.from_json(t.to_json())
    assert again == t
    data = json.loads(t.to_json())
    assert data["facets"] == sorted(data["facets"])
    with pytest.raises(ComplexError):
        SimplicialComplex.from_dict({"facets": [[0]]})


@settings(max_examples=60, deadline=None)
@given(random_complexes())
def test_downward_closed(cx):
    for s in cx.simplices:
        for r in range(1, len(s)):
            for face in itertools.combinations(s, r):
                assert face in cx
    assert all((v,) in cx for v in range(cx.vertex_count))


@settings(max_examples=60, deadline=None)
@given(random_complexes())
def test_maximal_cover(cx):
    maximal = cx.maximal_simplices
    for s in cx.simplices:
        assert any(set(s) <= set(m) for m in maximal)
    for m in maximal:
        assert not any(set(m) < set(t) for t in cx.simplices)


@settings(max_examples=25, deadline=None)
@given(random_complexes(max_vertices=4, max_facets=3), random_complexes(max_vertices=3, max_facets=2))
def test_product_property(x, y):
    assert product_complex(x, y).simplices == product_oracle(x, y)
