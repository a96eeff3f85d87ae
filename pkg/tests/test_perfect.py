from fractions import Fraction

import pytest

from conesmith import exactlin as xl
from conesmith.cones import Fan, intersect
from conesmith.errors import CertificateFailure
from conesmith.lattice import parse_lattice
from conesmith.perfect import (
    LorentzianModel,
    PSDModel,
    cone_points,
    default_window,
    initial_facet,
    make_window,
    perfect_fan_local,
    region_points,
    verify_admissible_local,
    verify_perfect_canonical,
)

import oracles


def lorentz(name):
    return LorentzianModel(parse_lattice(name))


def in_closed_cone(model, x):
    if isinstance(model, PSDModel):
        if model.g == 1:
            return x[0] >= 0
        return oracles.psd2(*x)
    gx = [sum(a * b for a, b in zip(row, x)) for row in model.gram]
    return sum(a * b for a, b in zip(x, gx)) >= 0 and sum(a * b for a, b in zip(gx, model.p)) >= 0


def brute_facet_check(model, facet, radius):
    """Minimum of <w, x> over nonzero cone points in a box is exactly 1 and
    is attained exactly at the facet's points inside that box."""
    w = [Fraction(t) for t in facet.normal]
    best = None
    tight = []
    for x in oracles.box([-radius] * model.dim, [radius] * model.dim):
        if not any(x) or not in_closed_cone(model, x):
            continue
        val = sum(a * b for a, b in zip(w, x))
        best = val if best is None else min(best, val)
        if val == 1:
            tight.append(tuple(x))
    assert best == 1
    inside = [p for p in facet.points if max(abs(t) for t in p) <= radius]
    assert sorted(tight) == sorted(inside)


def test_cone_points_examples():
    assert cone_points(lorentz("U"), 1) == [(0, 1), (1, 0), (1, 1)]
    assert cone_points(lorentz("<2>+<-2>"), 1) == [(1, -1), (1, 0), (1, 1)]
    assert cone_points(PSDModel(1), 2) == [(1,), (2,)]
    assert cone_points(lorentz("U"), 0) == []


def test_cone_points_brute_force():
    for model in (lorentz("U+<-2>"), PSDModel(2)):
        got = cone_points(model, 2)
        want = sorted(tuple(x) for x in oracles.box([-2] * model.dim, [2] * model.dim)
                      if any(x) and in_closed_cone(model, x))
        assert got == want


def test_model_validation():
    with pytest.raises(ValueError):
        LorentzianModel(parse_lattice("U+U"))
    with pytest.raises(ValueError):
        LorentzianModel(parse_lattice("U"), p=(1, -1))
    with pytest.raises(ValueError):
        PSDModel(0)
    with pytest.raises(ValueError):
        make_window(lorentz("U+<-4>"), [(5, 1, 2), (1, 1, 0), (0, 1, 0)])
    with pytest.raises(ValueError):
        make_window(lorentz("U"), [(1, 1)])


def test_region_points_are_all_points_below():
    model = lorentz("U+<-2>")
    w = (1, 1, 0)
    pts, box = region_points(model, w, 2)
    want = sorted(tuple(x) for x in oracles.box([-4] * 3, [4] * 3)
                  if any(x) and in_closed_cone(model, x) and sum(a * b for a, b in zip(w, x)) <= 2)
    assert sorted(pts) == want
    assert all(lo <= t <= hi for p in want for t, lo, hi in zip(p, *box))


def test_hyperbolic_plane():
    model = lorentz("U")
    piece = perfect_fan_local(model, make_window(model, [(1, 0), (0, 1)]))
    assert [f.normal for f in piece.facets] == [(1, 1)]
    assert piece.facets[0].vertices == ((0, 1), (1, 0))
    res = verify_perfect_canonical(model, piece=piece)
    assert res["canonical"] and res["verdicts"][0].smooth and not res["witnesses"]
    assert verify_admissible_local(model, piece.fan, window=piece.window)["ok"]


def test_split_binary_form():
    model = lorentz("<2>+<-2>")
    piece = perfect_fan_local(model)
    (f,) = piece.facets
    assert f.normal == (1, 0) and f.vertices == ((1, -1), (1, 1))
    assert f.points == ((1, -1), (1, 0), (1, 1))
    assert abs(xl.det(f.vertices)) == 2
    assert verify_perfect_canonical(model, piece=piece)["canonical"]
    report = verify_admissible_local(model, piece.fan, [((1, 0), (0, -1))], piece.window)
    assert report["ok"] and report["global_finiteness"] == "out-of-window-scope"


def test_psd_binary_forms():
    model = PSDModel(2)
    window = make_window(model, [(4, -1, 2), (2, -1, 4), (3, -2, 3)])
    piece = perfect_fan_local(model, window)
    a2 = [f for f in piece.facets if f.normal == (1, 1, 1)]
    assert len(a2) == 1
    f = a2[0]
    rank_one = sorted(model.rank_one(v) for v in [(1, 0), (0, 1), (1, -1)])
    assert list(f.vertices) == rank_one and abs(xl.det(f.vertices)) == 1
    brute_facet_check(model, f, 4)
    assert verify_perfect_canonical(model, piece=piece)["canonical"]


@pytest.mark.parametrize("name,window", [
    ("U", None),
    ("<2>+<-2>", None),
    ("U+<-2>", None),
    ("U+<-2>", [(1, 1, 0), (2, 1, 1), (1, 2, -1), (1, 1, 1)]),
    ("U+<-4>", None),
])
def test_facets_are_minimal(name, window):
    model = lorentz(name)
    w = make_window(model, window) if window else None
    piece = perfect_fan_local(model, w)
    assert piece.facets
    for f in piece.facets:
        assert model.dual_interior(f.normal)
        brute_facet_check(model, f, 4)
    res = verify_perfect_canonical(model, piece=piece)
    assert res["canonical"] and res["q_gorenstein"] and not res["witnesses"]
    for f in piece.facets:
        for v in res["verdicts"]:
            if v.rays == f.cone.rays:
                assert all(sum(Fraction(a) * b for a, b in zip(f.normal, x)) == 1 for x in v.lattice_points)


def test_scaling_invariance():
    a = lorentz("U+<-2>")
    b = LorentzianModel(parse_lattice("U+<-2>").scaled(3))
    wa = make_window(a, [(1, 1, 0), (2, 1, 1), (1, 2, -1), (1, 1, 1)])
    wb = make_window(b, [(1, 1, 0), (2, 1, 1), (1, 2, -1), (1, 1, 1)])
    pa, pb = perfect_fan_local(a, wa), perfect_fan_local(b, wb)
    assert [f.normal for f in pa.facets] == [f.normal for f in pb.facets]
    assert [f.vertices for f in pa.facets] == [f.vertices for f in pb.facets]


def test_group_equivariance():
    model = lorentz("U+<-2>")
    window = make_window(model, [(2, 2, 1), (2, 2, -1), (3, 1, 1), (1, 3, 1), (3, 1, -1), (1, 3, -1)])
    piece = perfect_fan_local(model, window)
    found = {f.vertices for f in piece.facets}
    checked = 0
    for g in [((1, 0, 0), (0, 1, 0), (0, 0, -1)), ((0, 1, 0), (1, 0, 0), (0, 0, 1))]:
        assert model.preserves(g)
        for f in piece.facets:
            img = f.cone.transform(g)
            if intersect(img, window.cone).dim == 3:
                assert img.rays in found
                checked += 1
    assert checked >= 2
    report = verify_admissible_local(model, piece.fan, [((1, 0, 0), (0, 1, 0), (0, 0, -1))], window)
    assert report["ok"]


def test_corrupted_fan_is_rejected():
    model = lorentz("U")
    piece = perfect_fan_local(model, make_window(model, [(1, 0), (0, 1)]))
    broken = Fan([c for c in piece.fan.cones if c.rays != ((0, 1),)], 2)
    report = verify_admissible_local(model, broken, window=piece.window)
    assert not report["ok"] and not report["checks"]["face_closure"]
    assert report["violations"][0]["face"] == ((0, 1),)


def test_non_isometry_is_reported():
    model = lorentz("U")
    piece = perfect_fan_local(model, make_window(model, [(1, 0), (0, 1)]))
    report = verify_admissible_local(model, piece.fan, [((1, 1), (0, 1))], piece.window)
    assert not report["checks"]["group_compatible"]


def test_insufficient_height_fails_loudly():
    model = lorentz("U+<-4>")
    with pytest.raises(CertificateFailure):
        initial_facet(model, (3, 1, 0), [])


def test_certificates_record_the_box():
    model = lorentz("U+<-2>")
    piece = perfect_fan_local(model)
    for f in piece.facets:
        lo, hi = f.certificate["box"]
        assert len(lo) == 3 and f.certificate["points_checked"] >= len(f.points)


def test_default_window_is_full_dimensional():
    for name in ("U", "<2>+<-2>", "U+<-2>", "U+<-4>"):
        w = default_window(lorentz(name))
        assert w.cone.dim == w.cone.ambient_dim
