"""Exact rational polyhedral cones, polytopes and fans.

A cone is given by generators; its facet description is computed with an
incremental double-description step in the saturated lattice of its linear
span.  Polytopes are handled by homogenizing to cones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil, floor, lcm

from . import exactlin as xl
from .errors import NonPointedCone
from .kernels import box_points


def _neg(v):
    return tuple(-x for x in v)


def _dd_facets(gens, k):
    """Inward primitive facet normals of the full-dimensional cone in ``Z^k``
    spanned by ``gens``, together with each facet's set of tight generator
    indices.
    """
    basis = []
    rows = []
    for i, g in enumerate(gens):
        if xl.rank(rows + [g]) > len(rows):
            rows.append(g)
            basis.append(i)
            if len(rows) == k:
                break
    inv = xl.inverse(xl.transpose(rows))
    rays = []
    for a in range(k):
        normal = xl.primitive(inv[a])
        zeros = frozenset(basis[b] for b in range(k) if b != a)
        rays.append((normal, zeros))
    processed = set(basis)
    for idx, g in enumerate(gens):
        if idx in processed:
            continue
        processed.add(idx)
        vals = [xl.dot(n, g) for n, _ in rays]
        pos = [i for i, s in enumerate(vals) if s > 0]
        neg = [i for i, s in enumerate(vals) if s < 0]
        zer = [i for i, s in enumerate(vals) if s == 0]
        new = [rays[i] for i in pos] + [(rays[i][0], rays[i][1] | {idx}) for i in zer]
        for p in pos:
            zp = rays[p][1]
            for q in neg:
                common = zp & rays[q][1]
                if len(common) < k - 2:
                    continue
                if any(r != p and r != q and common <= rays[r][1] for r in range(len(rays))):
                    continue
                sp, sq = vals[p], vals[q]
                combo = tuple(sp * b - sq * a for a, b in zip(rays[p][0], rays[q][0]))
                new.append((xl.primitive(combo), common | {idx}))
        rays = new
    return rays


@dataclass(frozen=True, eq=False)
class RationalCone:
    """Cone ``R>=0 g_1 + ... + R>=0 g_m`` in ``R^d`` with rational generators.

    Generators are stored as sorted, deduplicated primitive integer vectors.
    """

    generators: tuple
    ambient_dim: int

    def __init__(self, generators, ambient_dim: int | None = None):
        gens = [xl.primitive(g) for g in generators]
        if ambient_dim is None:
            if not gens:
                raise ValueError("ambient dimension needed for a cone without generators")
            ambient_dim = len(gens[0])
        if any(len(g) != ambient_dim for g in gens):
            raise ValueError("generators of mixed dimension")
        gens = sorted({g for g in gens if any(g)})
        object.__setattr__(self, "generators", tuple(gens))
        object.__setattr__(self, "ambient_dim", ambient_dim)

    def __repr__(self):
        return f"RationalCone({list(self.generators)})"

    @cached_property
    def span_basis(self) -> tuple:
        return xl.row_space_basis(self.generators) if self.generators else ()

    @property
    def dim(self) -> int:
        return len(self.span_basis)

    @cached_property
    def _coord(self):
        return xl.saturated_right_inverse(self.span_basis) if self.span_basis else ()

    @cached_property
    def equations(self) -> tuple:
        """Integer basis of linear forms vanishing on the span."""
        if not self.generators:
            return xl.identity(self.ambient_dim)
        return xl.integer_kernel(self.span_basis) if self.dim < self.ambient_dim else ()

    def local(self, x) -> tuple:
        """Coordinates of a vector of the span in ``span_basis``."""
        return xl.vec_mat(x, self._coord)

    def from_local(self, c) -> tuple:
        return xl.vec_mat(c, self.span_basis)

    def lift_functional(self, u) -> tuple:
        """Ambient functional restricting to the local functional ``u``."""
        return xl.mat_vec(self._coord, u)

    @cached_property
    def _local_generators(self):
        return [self.local(g) for g in self.generators]

    @cached_property
    def _dd(self):
        k = self.dim
        if k == 0:
            return []
        return _dd_facets(self._local_generators, k)

    @cached_property
    def local_facets(self) -> tuple:
        return tuple(sorted(n for n, _ in self._dd))

    @cached_property
    def facet_normals(self) -> tuple:
        """Inward primitive normals (ambient), modulo the span equations."""
        return tuple(sorted(xl.primitive(self.lift_functional(n)) for n, _ in self._dd))

    @cached_property
    def is_pointed(self) -> bool:
        if self.dim == 0:
            return True
        if not self._dd:
            return False
        return xl.rank([n for n, _ in self._dd]) == self.dim

    @cached_property
    def rays(self) -> tuple:
        """Primitive extreme generators, sorted."""
        if not self.is_pointed:
            raise NonPointedCone(f"{self!r} contains a line")
        k = self.dim
        if k == 0:
            return ()
        if k == 1:
            return self.generators
        out = []
        for i, g in enumerate(self.generators):
            tight = [n for n, z in self._dd if i in z]
            if len(tight) >= k - 1 and xl.rank(tight) == k - 1:
                out.append(g)
        return tuple(sorted(out))

    def contains(self, x) -> bool:
        if any(xl.dot(e, x) != 0 for e in self.equations):
            return False
        if self.dim == 0:
            return True
        c = self.local(x) if all(isinstance(t, int) for t in x) else _local_rational(self, x)
        return all(xl.dot(n, c) >= 0 for n in self.local_facets)

    def relative_interior_contains(self, x) -> bool:
        if not self.contains(x):
            return False
        if self.dim == 0:
            return True
        c = self.local(x) if all(isinstance(t, int) for t in x) else _local_rational(self, x)
        return all(xl.dot(n, c) > 0 for n in self.local_facets)

    def key(self) -> tuple:
        return self.rays

    def same_as(self, other: "RationalCone") -> bool:
        return all(other.contains(g) for g in self.generators) and all(
            self.contains(g) for g in other.generators
        )

    def transform(self, g) -> "RationalCone":
        return RationalCone([xl.mat_vec(g, v) for v in self.generators], self.ambient_dim)

    def interior_point(self) -> tuple:
        """Sum of the generators (relative interior for pointed cones)."""
        if not self.generators:
            return (0,) * self.ambient_dim
        return tuple(sum(col) for col in zip(*self.generators))

    def faces(self) -> list:
        return face_lattice(self)


def _local_rational(cone, x):
    den = lcm(*(Fraction(t).denominator for t in x))
    c = cone.local(tuple(int(Fraction(t) * den) for t in x))
    return tuple(Fraction(t, den) for t in c)


def dual_cone(cone: RationalCone) -> RationalCone:
    """Closed dual ``{w : <w, x> >= 0 for all x in cone}``."""
    gens = list(cone.facet_normals)
    for e in cone.equations:
        gens.append(tuple(e))
        gens.append(_neg(e))
    return RationalCone(gens, cone.ambient_dim)


def intersect(a: RationalCone, b: RationalCone) -> RationalCone:
    da, db = dual_cone(a), dual_cone(b)
    return dual_cone(RationalCone(da.generators + db.generators, a.ambient_dim))


@dataclass(frozen=True)
class Face:
    rays: tuple
    dim: int

    def cone(self, ambient_dim) -> RationalCone:
        return RationalCone(self.rays, ambient_dim)


def face_lattice(cone: RationalCone) -> list:
    """All faces of a pointed cone, from ``{0}`` up to the cone itself.

    Sorted by dimension, then by ray tuple.
    """
    if not cone.is_pointed:
        raise NonPointedCone(f"{cone!r} contains a line")
    rays = cone.rays
    k = cone.dim
    if k == 0:
        return [Face((), 0)]
    local_rays = [cone.local(r) for r in rays]
    facet_sets = []
    for n in cone.local_facets:
        facet_sets.append(frozenset(i for i, r in enumerate(local_rays) if xl.dot(n, r) == 0))
    faces = {frozenset(range(len(rays))), frozenset()}
    frontier = list(set(facet_sets))
    faces.update(frontier)
    while frontier:
        nxt = []
        for f in frontier:
            for s in facet_sets:
                g = f & s
                if g not in faces:
                    faces.add(g)
                    nxt.append(g)
        frontier = nxt
    out = []
    for f in faces:
        fr = tuple(sorted(rays[i] for i in f))
        out.append(Face(fr, xl.rank(fr) if fr else 0))
    return sorted(out, key=lambda f: (f.dim, f.rays))


@dataclass(frozen=True)
class Polytope:
    """Convex hull of rational points, within its affine span.

    ``facets`` are pairs ``(normal, offset)`` meaning ``normal . x >= offset``;
    ``equations`` are pairs ``(normal, offset)`` with ``normal . x == offset``
    cutting out the affine span.
    """

    vertices: tuple
    facets: tuple
    equations: tuple
    dim: int

    def contains(self, x) -> bool:
        return all(xl.dot(a, x) == b for a, b in self.equations) and all(
            xl.dot(a, x) >= b for a, b in self.facets
        )

    def lattice_points(self) -> list:
        """Integer points of the polytope, lexicographically sorted."""
        if not self.vertices:
            return []
        d = len(self.vertices[0])
        lo = [ceil(min(Fraction(v[i]) for v in self.vertices)) for i in range(d)]
        hi = [floor(max(Fraction(v[i]) for v in self.vertices)) for i in range(d)]
        rows, rhs = [], []
        for a, b in self.facets:
            den = lcm(*(Fraction(t).denominator for t in list(a) + [b]))
            rows.append([int(Fraction(t) * den) for t in a])
            rhs.append(int(Fraction(b) * den))
        for a, b in self.equations:
            den = lcm(*(Fraction(t).denominator for t in list(a) + [b]))
            row = [int(Fraction(t) * den) for t in a]
            rows.append(row)
            rhs.append(int(Fraction(b) * den))
            rows.append([-t for t in row])
            rhs.append(-int(Fraction(b) * den))
        return box_points(lo, hi, rows, rhs)


def _homogenize(points):
    return [tuple(Fraction(t) for t in p) + (Fraction(1),) for p in points]


def hull_facets(points) -> Polytope:
    """Exact convex hull of finitely many rational points."""
    points = [tuple(Fraction(t) for t in p) for p in points]
    if not points:
        raise ValueError("hull of an empty point set")
    d = len(points[0])
    cone = RationalCone(_homogenize(points), d + 1)
    verts = []
    for r in cone.rays:
        verts.append(tuple(xl._exact(Fraction(t, r[-1])) for t in r[:-1]))
    facets = []
    for n in cone.facet_normals:
        facets.append((tuple(n[:-1]), xl._exact(-n[-1])))
    eqs = []
    for e in cone.equations:
        eqs.append((tuple(e[:-1]), xl._exact(-e[-1])))
    return Polytope(tuple(sorted(verts)), tuple(sorted(facets)), tuple(sorted(eqs)), cone.dim - 1)


class Fan:
    """Finite collection of pointed cones; :meth:`validate` checks fan axioms."""

    def __init__(self, cones, ambient_dim: int | None = None):
        cones = list(cones)
        if ambient_dim is None:
            if not cones:
                raise ValueError("ambient dimension needed for an empty fan")
            ambient_dim = cones[0].ambient_dim
        self.ambient_dim = ambient_dim
        seen = {}
        for c in cones:
            if not c.is_pointed:
                raise NonPointedCone(f"fan cone {c!r} contains a line")
            seen.setdefault(c.rays, RationalCone(c.rays, ambient_dim) if c.rays else RationalCone([], ambient_dim))
        self._cones = dict(sorted(seen.items()))

    @classmethod
    def from_maximal(cls, cones, ambient_dim: int | None = None) -> "Fan":
        cones = list(cones)
        dim = ambient_dim if ambient_dim is not None else cones[0].ambient_dim
        allf = {}
        for c in cones:
            for f in face_lattice(c):
                allf.setdefault(f.rays, f.cone(dim))
        return cls(allf.values(), dim)

    @property
    def cones(self) -> list:
        return list(self._cones.values())

    def __contains__(self, cone: RationalCone) -> bool:
        return cone.rays in self._cones

    def __len__(self):
        return len(self._cones)

    @property
    def rays(self) -> tuple:
        out = set()
        for c in self._cones.values():
            out.update(c.rays)
        return tuple(sorted(out))

    @property
    def maximal_cones(self) -> list:
        keys = list(self._cones)
        out = []
        for k in keys:
            ks = set(k)
            if not any(ks < set(o) for o in keys):
                out.append(self._cones[k])
        return out

    def incidence(self) -> list:
        """Pairs ``(face_rays, cone_rays)`` of the face relation."""
        pairs = []
        for k, c in self._cones.items():
            for f in face_lattice(c):
                if f.rays in self._cones and f.rays != k:
                    pairs.append((f.rays, k))
        return sorted(pairs)

    def validate(self) -> dict:
        """Check closure under faces and that intersections are common faces."""
        violations = []
        for k, c in self._cones.items():
            for f in face_lattice(c):
                if f.rays not in self._cones:
                    violations.append({"kind": "missing-face", "cone": k, "face": f.rays})
        faces_of = {k: {f.rays for f in face_lattice(c)} for k, c in self._cones.items()}
        keys = list(self._cones)
        for i, a in enumerate(keys):
            for b in keys[i + 1 :]:
                inter = intersect(self._cones[a], self._cones[b])
                ir = inter.rays
                if ir not in faces_of[a] or ir not in faces_of[b]:
                    violations.append({"kind": "bad-intersection", "cones": (a, b), "intersection": ir})
        return {"valid": not violations, "violations": violations}
