"""Even lattices, discriminant forms, isometries, reflections and the
quotient ``l^⊥ / l`` by a primitive isotropic vector.

Vectors are integer coordinate tuples in the lattice basis; isometries act on
column vectors, so ``g`` is an isometry of ``L`` when ``g^T G g = G``.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

from . import exactlin as xl
from .errors import (
    DegenerateLattice,
    LiftNotFound,
    NotInStabilizer,
    NotIntegral,
    NotSymmetric,
)
from .kernels import box_points

log = logging.getLogger(__name__)

# Cartan matrix of E8 in the Bourbaki numbering: chain 1-3-4-5-6-7-8, node 2 on 4.
E8_GRAM = xl.as_matrix(
    [
        [2, 0, -1, 0, 0, 0, 0, 0],
        [0, 2, 0, -1, 0, 0, 0, 0],
        [-1, 0, 2, -1, 0, 0, 0, 0],
        [0, -1, -1, 2, -1, 0, 0, 0],
        [0, 0, 0, -1, 2, -1, 0, 0],
        [0, 0, 0, 0, -1, 2, -1, 0],
        [0, 0, 0, 0, 0, -1, 2, -1],
        [0, 0, 0, 0, 0, 0, -1, 2],
    ]
)
U_GRAM = ((0, 1), (1, 0))
A2_GRAM = ((2, -1), (-1, 2))

DEFAULT_ORDER_BOUND = 120


@dataclass(frozen=True)
class IntegralLattice:
    """Free abelian group with a symmetric integer Gram matrix."""

    gram: tuple
    name: str = ""
    allow_degenerate: bool = False

    def __post_init__(self):
        if len(self.gram) == 0:
            object.__setattr__(self, "gram", ())
            return
        g = xl.as_matrix(self.gram)
        n = len(g)
        if any(len(r) != n for r in g):
            raise NotSymmetric("Gram matrix must be square")
        if not all(isinstance(x, int) for r in g for x in r):
            raise TypeError("Gram matrix must be integral")
        bad = [(i, j) for i in range(n) for j in range(i) if g[i][j] != g[j][i]]
        if bad:
            raise NotSymmetric(f"Gram matrix not symmetric at entries {bad}")
        object.__setattr__(self, "gram", g)
        if not self.allow_degenerate and xl.det(g) == 0:
            raise DegenerateLattice("Gram matrix is degenerate")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return xl.det(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @cached_property
    def signature(self) -> tuple:
        return xl.signature_of_symmetric(self.gram)

    @property
    def is_definite(self) -> bool:
        pos, neg, zero = self.signature
        return zero == 0 and (pos == 0 or neg == 0)

    def pair(self, x, y):
        return xl.dot(x, xl.mat_vec(self.gram, y))

    def norm(self, x):
        return self.pair(x, x)

    def direct_sum(self, other: "IntegralLattice") -> "IntegralLattice":
        n, m = self.rank, other.rank
        rows = [list(r) + [0] * m for r in self.gram] + [[0] * n + list(r) for r in other.gram]
        name = "+".join(s for s in (self.name, other.name) if s)
        return IntegralLattice(xl.as_matrix(rows), name=name)

    def scaled(self, k: int) -> "IntegralLattice":
        return IntegralLattice(
            tuple(tuple(k * x for x in r) for r in self.gram), name=f"{self.name}({k})"
        )

    def is_isometry(self, g) -> bool:
        g = xl.as_matrix(g)
        if len(g) != self.rank or len(g[0]) != self.rank:
            return False
        return xl.mat_mul(xl.mat_mul(xl.transpose(g), self.gram), g) == self.gram


_TOKEN = re.compile(r"^(U|E8|A2)(?:\((-?\d+)\))?$|^<(-?\d+)>$")


def parse_lattice(text: str) -> IntegralLattice:
    """Build a lattice from the ASCII syntax ``"U+U+E8(-1)+<-4>"``."""
    parts = [p.strip() for p in text.replace(" ", "").split("+") if p.strip()]
    if not parts:
        raise ValueError("empty lattice description")
    result = None
    for part in parts:
        m = _TOKEN.match(part)
        if not m:
            raise ValueError(f"unknown lattice summand {part!r}")
        if m.group(3) is not None:
            k = int(m.group(3))
            piece = IntegralLattice(((k,),), name=f"<{k}>")
        else:
            base = {"U": U_GRAM, "E8": E8_GRAM, "A2": A2_GRAM}[m.group(1)]
            piece = IntegralLattice(base, name=m.group(1))
            if m.group(2) is not None:
                piece = piece.scaled(int(m.group(2)))
        result = piece if result is None else result.direct_sum(piece)
    return IntegralLattice(result.gram, name=text.replace(" ", ""))


def load_lattice(obj) -> IntegralLattice:
    """Lattice from a JSON value: a named string or ``{"gram": [[...]]}``."""
    if isinstance(obj, IntegralLattice):
        return obj
    if isinstance(obj, str):
        return parse_lattice(obj)
    if isinstance(obj, dict) and "gram" in obj:
        return IntegralLattice(xl.as_matrix(obj["gram"]), name=obj.get("name", ""))
    raise ValueError("lattice must be a name or an object with a 'gram' entry")


@dataclass(frozen=True)
class Isometry:
    """Integer matrix acting on lattice coordinates (columns)."""

    matrix: tuple
    vector: tuple | None = None  # reflection vector, when built from one

    def __post_init__(self):
        m = xl.as_matrix(self.matrix)
        if len(m) != len(m[0]):
            raise ValueError("isometry matrix must be square")
        object.__setattr__(self, "matrix", m)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def __call__(self, x):
        return xl.mat_vec(self.matrix, x)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(xl.mat_mul(self.matrix, other.matrix))

    def __eq__(self, other):
        if not isinstance(other, Isometry):
            return NotImplemented
        return self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def is_identity(self) -> bool:
        return self.matrix == xl.identity(self.rank)


@dataclass(frozen=True)
class DiscriminantForm:
    """``L^∨ / L`` with its ``Q/2Z`` quadratic form and ``Q/Z`` pairing.

    ``generators`` are dual vectors in lattice coordinates, one per
    nontrivial invariant factor; ``q_values`` lie in ``[0, 2)`` and the
    entries of ``pairing`` in ``[0, 1)``.
    """

    invariant_factors: tuple
    generators: tuple
    q_values: tuple
    pairing: tuple

    @property
    def order(self) -> int:
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors


def mod2(x) -> Fraction:
    return Fraction(x) % 2


def mod1(x) -> Fraction:
    return Fraction(x) % 1


def discriminant_form(lat: IntegralLattice) -> DiscriminantForm:
    """Discriminant group of an even non-degenerate lattice."""
    if lat.det == 0:
        raise DegenerateLattice("discriminant form of a degenerate lattice")
    if not lat.is_even:
        raise ValueError("discriminant quadratic form needs an even lattice")
    _, d, v = xl.smith_normal_form(lat.gram)
    n = lat.rank
    factors, gens = [], []
    for i in range(n):
        di = d[i][i]
        if di > 1:
            factors.append(di)
            gens.append(tuple(xl._exact(Fraction(v[r][i], di)) for r in range(n)))
    q = tuple(mod2(lat.pair(x, x)) for x in gens)
    b = tuple(tuple(mod1(lat.pair(x, y)) for y in gens) for x in gens)
    return DiscriminantForm(tuple(factors), tuple(gens), q, b)


@dataclass(frozen=True)
class IsometryReport:
    is_isometry: bool
    is_stable: bool | None
    is_reflection: bool
    is_quasi_reflection: bool
    order: int | None
    det: int
    rank_g_minus_identity: int
    eigenvalue: Fraction | None = None
    reflection_vector: tuple | None = None
    reflection_norm: int | None = None
    notes: tuple = ()


def _order(m, bound):
    n = len(m)
    ident = xl.identity(n)
    power = m
    for k in range(1, bound + 1):
        if power == ident:
            return k
        power = xl.mat_mul(power, m)
    return None


def _image_vector(m):
    """Primitive generator of the column space of a rank-1 integer matrix."""
    for j in range(len(m[0])):
        col = tuple(m[i][j] for i in range(len(m)))
        if any(col):
            v = xl.primitive(col)
            first = next(x for x in v if x)
            return v if first > 0 else tuple(-x for x in v)
    return None


def is_stable(lat: IntegralLattice, g, disc: DiscriminantForm | None = None) -> bool:
    """True when ``g`` acts trivially on the discriminant group."""
    disc = disc if disc is not None else discriminant_form(lat)
    m = g.matrix if isinstance(g, Isometry) else xl.as_matrix(g)
    for x in disc.generators:
        gx = xl.mat_vec(m, x)
        if any(Fraction(a - b).denominator != 1 for a, b in zip(gx, x)):
            return False
    return True


def classify_isometry(
    lat: IntegralLattice, g, order_bound: int = DEFAULT_ORDER_BOUND
) -> IsometryReport:
    """Isometry, stability, reflection and order data for ``g``.

    Non-isometries are reported, not rejected.  For reflections the norm of
    the reflection vector is recorded as the spinor-norm datum.
    """
    m = g.matrix if isinstance(g, Isometry) else xl.as_matrix(g)
    n = lat.rank
    if len(m) != n or len(m[0]) != n:
        raise ValueError("isometry rank does not match the lattice")
    iso = lat.is_isometry(m)
    d = xl.det(m)
    diff = tuple(tuple(m[i][j] - int(i == j) for j in range(n)) for i in range(n))
    r = xl.rank(diff)
    order = _order(m, order_bound) if d in (1, -1) else None
    notes = []
    if order is None:
        notes.append(f"order unknown within bound {order_bound}")
    stable = None
    if iso and lat.det != 0 and lat.is_even:
        stable = is_stable(lat, m)
    eig = None
    vec = vnorm = None
    quasi = refl = False
    if r == 1:
        trace = sum(m[i][i] for i in range(n))
        eig = Fraction(trace - (n - 1))
        vec = _image_vector(diff)
        if order is not None:
            quasi = True
            refl = eig == -1
        if iso and vec is not None:
            vnorm = lat.norm(vec)
            if refl:
                notes.append("spinor datum: reflection vector norm " + ("negative" if vnorm < 0 else "positive"))
    return IsometryReport(
        is_isometry=iso,
        is_stable=stable,
        is_reflection=refl,
        is_quasi_reflection=quasi,
        order=order,
        det=d,
        rank_g_minus_identity=r,
        eigenvalue=eig,
        reflection_vector=vec,
        reflection_norm=vnorm,
        notes=tuple(notes),
    )


def make_reflection(lat: IntegralLattice, v) -> Isometry:
    """``x -> x - 2 (x, v) / (v, v) v``; raises :class:`NotIntegral`."""
    v = tuple(int(a) for a in v)
    vv = lat.norm(v)
    if vv == 0:
        raise ValueError("cannot reflect in an isotropic vector")
    gv = xl.mat_vec(lat.gram, v)
    n = lat.rank
    cols = []
    for j in range(n):
        c = Fraction(2 * gv[j], vv)
        if c.denominator != 1:
            raise NotIntegral(f"2(e_{j}, v)/(v, v) = {c} is not an integer")
        c = int(c)
        cols.append([int(i == j) - c * v[i] for i in range(n)])
    return Isometry(xl.transpose(cols), vector=v)


def _canonical_sign(v):
    for x in v:
        if x:
            return x > 0
    return False


def primitive_isotropic_vectors(lat: IntegralLattice, height: int) -> list:
    """Primitive ``v`` with ``(v, v) = 0`` and all ``|v_i| <= height``.

    Sign normalized so the first nonzero coordinate is positive, sorted
    lexicographically.  Definite lattices give an empty list.
    """
    if lat.is_definite:
        log.info("lattice %s is definite: no isotropic vectors", lat.name or lat.gram)
        return []
    if height < 1:
        return []
    n = lat.rank
    lo = [0] + [-height] * (n - 1)
    hi = [height] * n
    pts = box_points(lo, hi, quad=lat.gram, quad_min=0)
    out = [
        p
        for p in pts
        if lat.norm(p) == 0 and _canonical_sign(p) and xl.content(p) == 1
    ]
    return sorted(out)


@dataclass(frozen=True)
class IsotropicData:
    """A primitive isotropic ``l`` with a basis of ``l^⊥`` starting at ``l``.

    ``perp_basis`` holds ambient vectors; dropping the first coordinate in
    that basis (``reduction_matrix``) maps ``l^⊥`` onto the quotient.
    """

    lattice: IntegralLattice
    vector: tuple
    perp_basis: tuple
    quotient: IntegralLattice
    reduction_matrix: tuple
    coordinate_map: tuple = field(repr=False, default=())

    def perp_coordinates(self, x) -> tuple:
        """Coordinates of ``x ∈ l^⊥`` in ``perp_basis``."""
        c = xl.vec_mat(x, self.coordinate_map)
        back = xl.vec_mat(c, self.perp_basis)
        if back != tuple(x):
            raise ValueError("vector is not orthogonal to the isotropic vector")
        return c

    def project(self, x) -> tuple:
        return tuple(self.perp_coordinates(x)[1:])

    def lift(self, xbar) -> tuple:
        """Ambient vector in ``l^⊥`` with first perp coordinate 0."""
        return xl.vec_mat((0,) + tuple(xbar), self.perp_basis)


def _isotropic_data(lat, l, perp):
    perp = tuple(tuple(v) for v in perp)
    coord = xl.saturated_right_inverse(perp)
    rest = perp[1:]
    qgram = tuple(tuple(lat.pair(a, b) for b in rest) for a in rest)
    k = len(perp)
    red = tuple(tuple(int(j == i + 1) for j in range(k)) for i in range(k - 1))
    quotient = IntegralLattice(qgram, name=f"({lat.name})/l" if lat.name else "")
    return IsotropicData(lat, tuple(l), perp, quotient, red, coord)


def _check_isotropic(lat, l):
    l = tuple(int(x) for x in l)
    if len(l) != lat.rank:
        raise ValueError("vector length does not match the lattice rank")
    if lat.norm(l) != 0:
        raise ValueError(f"vector {l} is not isotropic")
    if xl.content(l) != 1:
        raise ValueError(f"vector {l} is not primitive")
    return l


def quotient_by_isotropic(lat: IntegralLattice, l) -> IsotropicData:
    """The lattice ``l^⊥ / Z l`` with its induced (even) form."""
    l = _check_isotropic(lat, l)
    gl = xl.mat_vec(lat.gram, l)
    kernel = xl.integer_kernel((gl,))
    c = xl.vec_mat(l, xl.saturated_right_inverse(kernel))
    w = xl.extend_to_basis(c)
    basis = [xl.vec_mat(tuple(w[i][j] for i in range(len(w))), kernel) for j in range(len(w))]
    rest = xl.hermite_normal_form(basis[1:]) if len(basis) > 1 else ()
    return _isotropic_data(lat, l, (l,) + tuple(rest))


def reduce_isometry(data: IsotropicData, g) -> Isometry:
    """Induced isometry of ``l^⊥ / l`` for ``g`` with ``g l = ±l``."""
    m = g.matrix if isinstance(g, Isometry) else xl.as_matrix(g)
    lat = data.lattice
    if not lat.is_isometry(m):
        raise ValueError("matrix is not an isometry of the ambient lattice")
    gl = xl.mat_vec(m, data.vector)
    neg = tuple(-x for x in data.vector)
    if gl != data.vector and gl != neg:
        raise NotInStabilizer(f"g maps l = {data.vector} to {gl}")
    cols = []
    for b in data.perp_basis[1:]:
        cols.append(data.perp_coordinates(xl.mat_vec(m, b))[1:])
    k = len(cols)
    if k == 0:
        raise ValueError("quotient lattice has rank 0")
    return Isometry(xl.transpose(cols))


def lift_reflection(data: IsotropicData, s, search_bound: int = 3) -> Isometry:
    """Stable ambient reflection ``r`` with ``r l = l`` inducing ``s``.

    Searches reflection vectors ``k w + t l`` (``w`` the lift of the
    ``-1``-eigenvector of ``s``) with ``1 <= k <= bound`` and
    ``|t| <= bound``.  Raises :class:`LiftNotFound` when the box is
    exhausted.
    """
    q = data.quotient
    sm = s.matrix if isinstance(s, Isometry) else xl.as_matrix(s)
    rep = classify_isometry(q, sm)
    if not (rep.is_isometry and rep.is_reflection):
        raise ValueError("input is not a reflection of the quotient lattice")
    wbar = rep.reflection_vector
    w0 = data.lift(wbar)
    lat = data.lattice
    disc = discriminant_form(lat)
    target = Isometry(sm)
    candidates = sorted(
        ((k, t) for k in range(1, search_bound + 1) for t in range(-search_bound, search_bound + 1) if gcd(k, t) == 1),
        key=lambda kt: (kt[0], abs(kt[1]), kt[1] < 0),
    )
    for k, t in candidates:
        w = tuple(k * a + t * b for a, b in zip(w0, data.vector))
        try:
            r = make_reflection(lat, w)
        except NotIntegral:
            continue
        if r(data.vector) != data.vector:
            continue
        if not is_stable(lat, r, disc):
            continue
        if reduce_isometry(data, r) == target:
            return r
    raise LiftNotFound(f"no stable lift with coefficients bounded by {search_bound}")
