from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conesmith import exactlin as xl
from conesmith.cones import Fan, RationalCone, dual_cone, face_lattice, hull_facets, intersect
from conesmith.errors import NonPointedCone

import oracles

PENTAGON = [(1, 1, 1), (-1, 1, 1), (-1, -1, 1), (1, -1, 1), (0, 2, 1)]


@st.composite
def gens(draw, max_dim=4):
    d = draw(st.integers(2, max_dim))
    k = draw(st.integers(1, 5))
    vecs = draw(st.lists(st.lists(st.integers(-3, 3), min_size=d, max_size=d), min_size=k, max_size=k))
    return d, [tuple(v) for v in vecs]


def test_dual_examples():
    assert dual_cone(RationalCone([(1, 0), (0, 1)])).rays == ((0, 1), (1, 0))
    half = dual_cone(RationalCone([(1, 0)]))
    assert half.dim == 2 and not half.is_pointed
    assert half.contains((0, 5)) and half.contains((0, -5)) and not half.contains((-1, 0))
    assert dual_cone(RationalCone([(1, 0), (1, 2)])).rays == ((0, 1), (2, -1))


@given(gens())
@settings(max_examples=80, deadline=None)
def test_dual_is_an_involution(data):
    d, g = data
    c = RationalCone(g, d)
    assert dual_cone(dual_cone(c)).same_as(c)


@given(gens(3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
@settings(max_examples=80, deadline=None)
def test_membership_matches_caratheodory(data, x):
    d, g = data
    if d != 3:
        return
    c = RationalCone(g, d)
    assert c.contains(tuple(x)) == oracles.in_cone(g, tuple(x))


@given(gens())
@settings(max_examples=80, deadline=None)
def test_double_description_consistency(data):
    d, g = data
    c = RationalCone(g, d)
    for v in c.generators:
        assert all(xl.dot(n, v) >= 0 for n in c.facet_normals)
        assert all(xl.dot(e, v) == 0 for e in c.equations)
    for n in c.facet_normals:
        assert xl.content(n) == 1
    if c.is_pointed:
        for r in c.rays:
            xl_rank = xl.rank([n for n in c.facet_normals if xl.dot(n, r) == 0] + list(c.equations))
            assert xl_rank >= d - 1
        for a in c.rays:
            assert xl.content(a) == 1
        for i, a in enumerate(c.rays):
            for b in c.rays[i + 1:]:
                assert xl.rank([a, b]) == 2


def test_face_lattice_examples():
    assert len(face_lattice(RationalCone([(1, 0), (0, 1)]))) == 4
    faces = face_lattice(RationalCone(PENTAGON))
    dims = [f.dim for f in faces]
    assert dims.count(0) == 1 and dims.count(1) == 5 and dims.count(2) == 5 and dims.count(3) == 1
    assert len(face_lattice(RationalCone([(1, 0, 0), (0, 1, 0), (0, 0, 1)]))) == 8
    with pytest.raises(NonPointedCone):
        face_lattice(RationalCone([(1, 0), (-1, 0), (0, 1)]))


def test_lower_dimensional_cone():
    c = RationalCone([(1, 1, 0), (1, -1, 0)])
    assert c.dim == 2 and c.equations and c.contains((1, 0, 0)) and not c.contains((1, 0, 1))
    assert c.relative_interior_contains((2, 0, 0)) and not c.relative_interior_contains((1, 1, 0))


def test_hull_examples():
    p = hull_facets([(1, 0), (0, 1)])
    assert p.vertices == ((0, 1), (1, 0)) and p.dim == 1 and p.equations
    p = hull_facets([(1, 1), (1, 0), (1, -1)])
    assert p.vertices == ((1, -1), (1, 1)) and p.contains((1, 0))
    pts = [(x, y, 1) for x, y in [(1, 1), (-1, 1), (-1, -1), (1, -1), (0, 2), (0, 0), (0, 1)]]
    p = hull_facets(pts)
    assert p.dim == 2 and p.vertices == tuple(sorted(PENTAGON)) and len(p.facets) == 5


def test_hull_with_fractions():
    p = hull_facets([(Fraction(1, 2), 0), (0, 0), (0, Fraction(1, 3))])
    assert p.vertices == ((0, 0), (0, Fraction(1, 3)), (Fraction(1, 2), 0))
    assert p.contains((Fraction(1, 10), Fraction(1, 10)))


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=8),
       st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_hull_order_insensitive(pts, rnd):
    shuffled = list(pts)
    rnd.shuffle(shuffled)
    a, b = hull_facets(pts), hull_facets(shuffled)
    assert a == b
    for x in pts:
        assert a.contains(x)
    lo = [min(p[i] for p in pts) for i in range(3)]
    hi = [max(p[i] for p in pts) for i in range(3)]
    inside = [x for x in oracles.box(lo, hi) if a.contains(x)]
    assert [tuple(x) for x in a.lattice_points()] == inside


def test_intersection():
    a = RationalCone([(1, 0), (1, 2)])
    b = RationalCone([(1, 1), (0, 1)])
    assert intersect(a, b).rays == ((1, 1), (1, 2))


def test_fan_validation():
    good = Fan.from_maximal([RationalCone([(1, 0), (0, 1)]), RationalCone([(0, 1), (-1, 0)])])
    assert good.validate()["valid"]
    assert len(good.maximal_cones) == 2 and good.rays == ((-1, 0), (0, 1), (1, 0))
    assert ((0, 1),) in [f for f, _ in good.incidence()]
    bad = Fan.from_maximal([RationalCone([(1, 0), (0, 1)]), RationalCone([(1, 1), (-1, 2)])])
    report = bad.validate()
    assert not report["valid"]
    assert any(v["kind"] == "bad-intersection" for v in report["violations"])
    corrupted = Fan([c for c in good.cones if c.rays != ((0, 1),)])
    kinds = {v["kind"] for v in corrupted.validate()["violations"]}
    assert "missing-face" in kinds


def test_no_floats_in_generators():
    with pytest.raises(TypeError):
        RationalCone([(0.5, 1)])
