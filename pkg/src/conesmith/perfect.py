"""Perfect cone decompositions of self-adjoint cones, computed locally.

The hull ``K = conv(C̄ ∩ L \\ {0})`` of the lattice points of a closed cone
has facets ``{x : <w, x> = 1}`` with ``w`` in the interior of the dual cone.
Cones over these facets form the perfect cone decomposition.  It is
infinite in general, so it is computed inside a polyhedral window by
walking from facet to facet across ridges.

Every facet carries a certificate: its normal ``w`` is interior to the dual
cone, which makes ``{x in C̄ : <w, x> <= 1}`` compact, and all lattice points
of an exact bounding box of that region were enumerated.

Two models are provided.  ``LorentzianModel`` is the positive cone of a
lattice of signature ``(1, k)``.  ``PSDModel`` is the cone of positive
semidefinite ``g x g`` forms with the lattice of integer symmetric
matrices.  Functionals pair with points by the plain dot product of
coordinates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, isqrt, lcm

from . import exactlin as xl
from .cones import Fan, RationalCone, intersect
from .errors import CertificateFailure
from .kernels import box_points
from .lattice import IntegralLattice, Isometry
from .toric import fan_singularity_verdict

log = logging.getLogger(__name__)

WALK_LIMIT = 1000
REFINE_LIMIT = 100


def default_height(model) -> int:
    return 6 if model.dim <= 3 else 4


def _sqrt_upper(x: Fraction) -> Fraction:
    """Rational upper bound for the square root of ``x >= 0``."""
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    return Fraction(isqrt(p * q) + 1, q)


def _as_matrix(g):
    return g.matrix if isinstance(g, Isometry) else xl.as_matrix(g)


class LorentzianModel:
    """Closed positive cone ``{x : (x, x) >= 0, (x, p) >= 0}``."""

    kind = "lorentzian"

    def __init__(self, lattice: IntegralLattice, p=None):
        sig = lattice.signature
        if sig[0] != 1 or sig[2] != 0:
            raise ValueError(f"a Lorentzian model needs signature (1, k), got {sig}")
        self.lattice = lattice
        self.dim = lattice.rank
        self.gram = lattice.gram
        self._ginv = xl.inverse(lattice.gram)
        self.p = tuple(p) if p is not None else self._default_p()
        if lattice.norm(self.p) <= 0:
            raise ValueError("component point must have positive norm")

    def _default_p(self):
        h = 1
        while True:
            pts = box_points([0] + [-h] * (self.dim - 1), [h] * self.dim, quad=self.gram, quad_min=1)
            pts = [x for x in pts if next((t for t in x if t), 0) > 0]
            pts.sort(key=lambda x: (max(abs(t) for t in x), x))
            if pts:
                return pts[0]
            h += 1

    def describe(self) -> dict:
        return {"kind": self.kind, "gram": [list(r) for r in self.gram], "component": list(self.p)}

    def contains(self, x) -> bool:
        return self.lattice.norm(x) >= 0 and self.lattice.pair(x, self.p) >= 0

    def point_functional(self, d) -> tuple:
        return xl.mat_vec(self.gram, d)

    def _dual_point(self, w):
        return xl.mat_vec(self._ginv, w)

    def _norm(self, y):
        return xl.dot(y, xl.mat_vec(self.gram, y))

    def dual_interior(self, w) -> bool:
        y = self._dual_point(w)
        return self._norm(y) > 0 and xl.dot(y, xl.mat_vec(self.gram, self.p)) > 0

    def dual_closed(self, w) -> bool:
        y = self._dual_point(w)
        return self._norm(y) >= 0 and xl.dot(y, xl.mat_vec(self.gram, self.p)) >= 0

    def region_box(self, w, t=1):
        """Bounding box of ``{x in C̄ : <w, x> <= t}`` for interior ``w``."""
        y = self._dual_point(w)
        yy = Fraction(self._norm(y))
        t = Fraction(t)
        lo, hi = [], []
        for i in range(self.dim):
            phi = self._ginv[i]  # (phi, x) = x_i
            a = Fraction(xl.dot(phi, xl.mat_vec(self.gram, y)))
            b = a * a - Fraction(self._norm(phi)) * yy
            s = _sqrt_upper(max(b, Fraction(0)))
            hi.append(max(0, floor(t * (a + s) / yy)))
            lo.append(min(0, ceil(t * (a - s) / yy)))
        return lo, hi

    def enumerate(self, lo, hi, rows=(), rhs=()) -> list:
        pts = box_points(lo, hi, rows, rhs, quad=self.gram, quad_min=0)
        return [x for x in pts if any(x) and self.lattice.pair(x, self.p) >= 0]

    def induced(self, g):
        return _as_matrix(g)

    def preserves(self, g) -> bool:
        m = _as_matrix(g)
        return self.lattice.is_isometry(m) and self.lattice.pair(xl.mat_vec(m, self.p), self.p) > 0


class PSDModel:
    """Positive semidefinite ``g x g`` forms in coordinates ``(a_ij, i <= j)``."""

    kind = "psd"

    def __init__(self, g: int):
        if g < 1:
            raise ValueError("g must be positive")
        self.g = g
        self.index = [(i, j) for i in range(g) for j in range(i, g)]
        self.dim = len(self.index)

    def describe(self) -> dict:
        return {"kind": self.kind, "g": self.g}

    def to_matrix(self, x):
        m = [[0] * self.g for _ in range(self.g)]
        for (i, j), v in zip(self.index, x):
            m[i][j] = m[j][i] = v
        return xl.as_matrix(m)

    def from_matrix(self, m) -> tuple:
        return tuple(m[i][j] for i, j in self.index)

    def rank_one(self, v) -> tuple:
        return tuple(v[i] * v[j] for i, j in self.index)

    def _functional_matrix(self, w):
        m = [[Fraction(0)] * self.g for _ in range(self.g)]
        for (i, j), v in zip(self.index, w):
            v = Fraction(v)
            if i == j:
                m[i][i] = v
            else:
                m[i][j] = m[j][i] = v / 2
        return xl.as_matrix(m)

    def contains(self, x) -> bool:
        return xl.signature_of_symmetric(self.to_matrix(x))[1] == 0

    def point_functional(self, d) -> tuple:
        return tuple(v if i == j else 2 * v for (i, j), v in zip(self.index, d))

    def dual_interior(self, w) -> bool:
        return xl.signature_of_symmetric(self._functional_matrix(w))[0] == self.g

    def dual_closed(self, w) -> bool:
        return xl.signature_of_symmetric(self._functional_matrix(w))[1] == 0

    def region_box(self, w, t=1):
        winv = xl.inverse(self._functional_matrix(w))
        t = Fraction(t)
        lo, hi = [], []
        for i, j in self.index:
            if i == j:
                lo.append(0)
                hi.append(floor(t * winv[i][i]))
            else:
                b = floor(t * _sqrt_upper(Fraction(winv[i][i]) * winv[j][j]))
                lo.append(-b)
                hi.append(b)
        return lo, hi

    def enumerate(self, lo, hi, rows=(), rhs=()) -> list:
        pts = box_points(lo, hi, rows, rhs)
        return [x for x in pts if any(x) and self.contains(x)]

    def induced(self, a):
        """Matrix of ``X -> A X A^T`` on coordinates."""
        a = _as_matrix(a)
        cols = []
        for k in range(self.dim):
            e = tuple(int(t == k) for t in range(self.dim))
            x = self.to_matrix(e)
            y = xl.mat_mul(xl.mat_mul(a, x), xl.transpose(a))
            cols.append(self.from_matrix(y))
        return xl.transpose(cols)

    def preserves(self, a) -> bool:
        a = _as_matrix(a)
        return len(a) == self.g and xl.det(a) in (1, -1)


def cone_points(model, height: int) -> list:
    """Lattice points of ``C̄ \\ {0}`` with all coordinates of size at most
    ``height``, in lexicographic order."""
    if height < 1:
        return []
    return model.enumerate([-height] * model.dim, [height] * model.dim)


def region_points(model, w, t=1) -> tuple:
    """All lattice points of ``C̄ \\ {0}`` with ``<w, x> <= t`` and the box
    used.  ``w`` must be interior to the dual cone."""
    w = [Fraction(v) for v in w]
    t = Fraction(t)
    lo, hi = model.region_box(w, t)
    den = lcm(*(v.denominator for v in w + [t]))
    rows = [[-int(v * den) for v in w]]
    rhs = [-int(t * den)]
    return model.enumerate(lo, hi, rows, rhs), (tuple(lo), tuple(hi))


@dataclass(frozen=True)
class Window:
    cone: RationalCone

    @property
    def generators(self):
        return self.cone.rays

    def interior_point(self):
        return self.cone.interior_point()


def make_window(model, generators) -> Window:
    cone = RationalCone(generators, model.dim)
    if cone.dim != model.dim:
        raise ValueError("window must be full-dimensional")
    for v in cone.rays:
        if not model.contains(v):
            raise ValueError(f"window generator {v} lies outside the closed cone")
    return Window(cone)


def default_window(model) -> Window:
    """Cone over the points of the closed cone of the smallest height at
    which they span."""
    h = 1
    while True:
        pts = cone_points(model, h)
        if pts and xl.rank(pts) == model.dim:
            return make_window(model, pts)
        h += 1


@dataclass(frozen=True)
class PerfectFacet:
    normal: tuple
    points: tuple
    vertices: tuple
    certificate: dict = field(compare=False)

    @property
    def cone(self) -> RationalCone:
        return RationalCone(self.vertices)


def _value(w, x):
    return sum(Fraction(a) * b for a, b in zip(w, x))


def _facet_from(model, w, region, box) -> PerfectFacet:
    pts = tuple(sorted(x for x in region if _value(w, x) == 1))
    cone = RationalCone(pts, model.dim)
    w = tuple(xl._exact(Fraction(v)) for v in w)
    cert = {"box": box, "points_checked": len(region), "interior_dual": True}
    return PerfectFacet(w, pts, cone.rays, cert)


def _advance(model, w, n, pool):
    """Rotate the supporting hyperplane ``<w, .> = 1`` about ``{n = 0}``.

    Returns the new normal, the certified region points and the box.  Raises
    :class:`CertificateFailure` when the candidate pool cannot produce an
    interior normal.
    """
    cands = [x for x in pool if xl.dot(n, x) < 0]
    for _ in range(REFINE_LIMIT):
        if not cands:
            raise CertificateFailure("no candidate across the ridge; raise the height", None)
        best = min(cands, key=lambda x: ((_value(w, x) - 1) / -xl.dot(n, x), x))
        t = (_value(w, best) - 1) / -xl.dot(n, best)
        w2 = tuple(Fraction(a) + t * b for a, b in zip(w, n))
        if not model.dual_interior(w2):
            raise CertificateFailure(
                "rotated normal is not interior to the dual cone; raise the height", best
            )
        region, box = region_points(model, w2, 1)
        low = [x for x in region if _value(w2, x) < 1]
        if not low:
            return w2, region, box
        cands = sorted(set(cands) | set(low))
    raise CertificateFailure("certificate refinement did not converge", None)


def initial_facet(model, direction, pool) -> PerfectFacet:
    """A facet whose cone contains ``direction`` (an interior point)."""
    w0 = model.point_functional(direction)
    if not pool:
        raise CertificateFailure("empty candidate pool; raise the height", None)
    bound = min(_value(w0, x) for x in pool)
    region, box = region_points(model, w0, bound)
    mu = min(_value(w0, x) for x in region)
    w = tuple(Fraction(v) / mu for v in w0)
    region, box = region_points(model, w, 1)
    tight = [x for x in region if _value(w, x) == 1]
    while xl.rank(tight) < model.dim:
        v = xl.integer_kernel(tight)[0]
        if xl.dot(v, direction) > 0:
            v = tuple(-a for a in v)
        if model.dual_closed(v):
            v = tuple(-a for a in v)
        w, region, box = _advance(model, w, v, sorted(set(pool) | set(region)))
        tight = [x for x in region if _value(w, x) == 1]
    facet = _facet_from(model, w, region, box)
    for _ in range(WALK_LIMIT):
        cone = facet.cone
        if cone.contains(direction):
            return facet
        n = min(u for u in cone.facet_normals if xl.dot(u, direction) < 0)
        w, region, box = _advance(model, facet.normal, n, pool)
        facet = _facet_from(model, w, region, box)
    raise CertificateFailure("walk toward the window did not terminate", None)


def _meets_interior(cone: RationalCone, window: Window) -> bool:
    inter = intersect(cone, window.cone)
    if inter.dim < cone.dim:
        return False
    pt = inter.interior_point()
    return all(xl.dot(n, pt) > 0 for n in window.cone.facet_normals)


def _full_overlap(cone: RationalCone, window: Window) -> bool:
    return intersect(cone, window.cone).dim == window.cone.ambient_dim


@dataclass
class PerfectFanPiece:
    model: object
    window: Window
    height: int
    facets: list
    fan: Fan
    boundary_ridges: int
    crossed_ridges: int

    @property
    def maximal_cones(self) -> list:
        return [f.cone for f in self.facets]


def perfect_fan_local(model, window: Window | None = None, height: int | None = None) -> PerfectFanPiece:
    """Facets of the perfect cone decomposition whose cones meet the window
    interior, each certified, together with the fan they generate."""
    window = window if window is not None else default_window(model)
    height = height if height is not None else default_height(model)
    pool = cone_points(model, height)
    first = initial_facet(model, window.interior_point(), pool)
    found = {first.normal: first}
    queue = [first]
    boundary = crossed = 0
    while queue:
        facet = queue.pop(0)
        cone = facet.cone
        for n in cone.facet_normals:
            if model.dual_closed(n):
                boundary += 1
                continue
            ridge = RationalCone([v for v in cone.rays if xl.dot(n, v) == 0], model.dim)
            if not _meets_interior(ridge, window):
                continue
            crossed += 1
            w, region, box = _advance(model, facet.normal, n, sorted(set(pool) | set(facet.points)))
            nb = _facet_from(model, w, region, box)
            if nb.normal not in found:
                found[nb.normal] = nb
                queue.append(nb)
    facets = sorted(found.values(), key=lambda f: f.vertices)
    facets = [f for f in facets if _full_overlap(f.cone, window)]
    fan = Fan.from_maximal([f.cone for f in facets], model.dim)
    log.info("perfect fan piece: %d facets", len(facets))
    return PerfectFanPiece(model, window, height, facets, fan, boundary, crossed)


def _ridges(cone: RationalCone) -> list:
    out = []
    for n in cone.facet_normals:
        out.append((n, tuple(sorted(v for v in cone.rays if xl.dot(n, v) == 0))))
    return out


def verify_admissible_local(model, fan: Fan, group_generators=(), window: Window | None = None) -> dict:
    """Admissibility checks of a fan piece inside a window.

    Face closure, intersections, compatibility with the group generators,
    coverage of the window and the cone count are checked; finiteness modulo
    the full group is outside what a window can certify.
    """
    window = window if window is not None else default_window(model)
    rep = fan.validate()
    face_v = [v for v in rep["violations"] if v["kind"] == "missing-face"]
    inter_v = [v for v in rep["violations"] if v["kind"] == "bad-intersection"]
    maximal = [c for c in fan.cones if c.dim == model.dim]
    keys = {c.rays for c in maximal}

    group_v = []
    for g in group_generators:
        if not model.preserves(g):
            group_v.append({"kind": "not-an-automorphism", "element": _as_matrix(g)})
            continue
        m = model.induced(g)
        for c in maximal:
            img = c.transform(m)
            if _full_overlap(img, window) and img.rays not in keys:
                group_v.append({"kind": "image-not-in-fan", "element": _as_matrix(g), "cone": c.rays})

    cover_v = []
    count = {}
    for c in maximal:
        for n, r in _ridges(c):
            count[r] = count.get(r, 0) + 1
    for c in maximal:
        for n, r in _ridges(c):
            if count[r] >= 2 or model.dual_closed(n):
                continue
            if _meets_interior(RationalCone(r, model.dim), window):
                cover_v.append({"kind": "uncovered-ridge", "cone": c.rays, "ridge": r})

    bullets = {
        "face_closure": not face_v,
        "intersections_are_faces": not inter_v,
        "group_compatible": not group_v,
        "covers_window": not cover_v,
        "finite_in_window": True,
    }
    return {
        "ok": all(bullets.values()),
        "checks": bullets,
        "cone_count": len(fan),
        "maximal_cone_count": len(maximal),
        "global_finiteness": "out-of-window-scope",
        "violations": face_v + inter_v + group_v + cover_v,
    }


def verify_perfect_canonical(model, window: Window | None = None, height: int | None = None, piece=None) -> dict:
    """Singularity verdict of every maximal cone of the local perfect fan.

    Each facet normal must also be the Gorenstein functional of its cone,
    and every lattice point of ``Pi`` must lie on the facet; any failure is
    returned as a falsification witness.
    """
    piece = piece if piece is not None else perfect_fan_local(model, window, height)
    verdict = fan_singularity_verdict(piece.fan)
    by_rays = {v.rays: v for v in verdict.verdicts}
    witnesses = []
    for f in piece.facets:
        v = by_rays.get(f.cone.rays)
        if v is None or not v.canonical:
            witnesses.append({"cone": f.vertices, "reason": "not canonical", "witness": v and v.witness})
            continue
        if tuple(Fraction(t) for t in v.m) != tuple(Fraction(t) for t in f.normal):
            witnesses.append({"cone": f.vertices, "reason": "Gorenstein functional differs from facet normal"})
        off = [x for x in v.lattice_points if _value(f.normal, x) != 1]
        if off:
            witnesses.append({"cone": f.vertices, "reason": "lattice point of Pi off the facet", "witness": off[0]})
    return {
        "q_gorenstein": verdict.q_gorenstein,
        "canonical": verdict.canonical,
        "gorenstein_index": verdict.gorenstein_index,
        "verdicts": verdict.verdicts,
        "witnesses": witnesses,
        "piece": piece,
    }
