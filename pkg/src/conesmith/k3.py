"""K3 lattices, polarized lattices and isotropic splittings.

``polarized_lattice(d)`` is ``U + U + E8(-1) + E8(-1) + <-2d>``, the
orthogonal complement of a primitive vector of norm ``2d`` in the K3
lattice ``U^3 + E8(-1)^2``.  A primitive isotropic ``l`` with a partner
``l'`` (``(l, l') = 1``, ``(l', l') = 0``) splits off a hyperbolic plane,
and ``l^⊥ / l`` is identified with the orthogonal complement of that plane.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from . import exactlin as xl
from .errors import LiftNotFound, NoPartner, NotIntegral
from .lattice import (
    U_GRAM,
    IntegralLattice,
    IsotropicData,
    _check_isotropic,
    _isotropic_data,
    classify_isometry,
    lift_reflection,
    make_reflection,
    parse_lattice,
    reduce_isometry,
)


def _square_free(d: int) -> bool:
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def k3_lattice() -> IntegralLattice:
    return parse_lattice("U+U+U+E8(-1)+E8(-1)")


def build_polarized_lattice(d: int) -> IntegralLattice:
    if int(d) != d or d < 1:
        raise ValueError("d must be a positive integer")
    return parse_lattice(f"U+U+E8(-1)+E8(-1)+<{-2 * int(d)}>")


@dataclass(frozen=True)
class PolarizedScenario:
    lattice: IntegralLattice
    isotropic: IsotropicData
    partner: tuple
    splitting: tuple  # columns l, l', then a basis of the plane's complement
    d: int | None = None
    notes: tuple = field(default=())

    @property
    def quotient(self) -> IntegralLattice:
        return self.isotropic.quotient


def _partner(lat: IntegralLattice, l) -> tuple:
    gl = xl.mat_vec(lat.gram, l)
    div = xl.content(gl)
    if div != 1:
        raise NoPartner(f"(l, x) is always divisible by {div}", div)
    u, _, v = xl.smith_normal_form((gl,))
    x = tuple(u[0][0] * v[i][0] for i in range(len(v)))
    assert xl.dot(gl, x) == 1
    half = lat.norm(x) // 2
    return tuple(a - half * b for a, b in zip(x, l))


def isotropic_splitting(lat: IntegralLattice, l, d: int | None = None) -> PolarizedScenario:
    """Split ``lat = <l, l'> + (l, l')^⊥`` and build the quotient data."""
    if not lat.is_even:
        raise ValueError("isotropic splitting needs an even lattice")
    l = _check_isotropic(lat, l)
    lp = _partner(lat, l)
    comp = xl.integer_kernel((xl.mat_vec(lat.gram, l), xl.mat_vec(lat.gram, lp)))
    comp = xl.hermite_normal_form(comp) if comp else ()
    basis = (l, lp) + tuple(comp)
    b = xl.transpose(basis)
    k = len(comp)
    gram_c = tuple(tuple(lat.pair(x, y) for y in comp) for x in comp)
    block = [list(U_GRAM[0]) + [0] * k, list(U_GRAM[1]) + [0] * k]
    block += [[0, 0] + list(r) for r in gram_c]
    if xl.mat_mul(xl.mat_mul(xl.transpose(b), lat.gram), b) != xl.as_matrix(block):
        raise AssertionError("splitting Gram identity failed")
    if abs(xl.det(b)) != 1:
        raise AssertionError("splitting basis is not unimodular")
    data = _isotropic_data(lat, l, (l,) + tuple(comp))
    notes = []
    if d is not None and not _square_free(d):
        notes.append(f"d = {d} is not square-free; single-orbit input assumes square-free d")
    return PolarizedScenario(lat, data, lp, basis, d, tuple(notes))


def polarized_scenario(d: int) -> PolarizedScenario:
    """Scenario for ``polarized_lattice(d)`` at ``e`` of the first ``U``."""
    lat = build_polarized_lattice(d)
    l = (1,) + (0,) * (lat.rank - 1)
    return isotropic_splitting(lat, l, d)


def _vectors(n, height, max_support):
    if height < 1:
        return []
    top = n if max_support is None else min(n, max_support)
    out = []
    vals = [v for v in range(-height, height + 1) if v]
    for s in range(1, top + 1):
        for pos in combinations(range(n), s):
            for choice in product(vals, repeat=s):
                if choice[0] < 0:
                    continue
                v = [0] * n
                for p, c in zip(pos, choice):
                    v[p] = c
                out.append(tuple(v))
    return sorted(out)


@dataclass
class ProbeReport:
    height: int
    max_support: int | None
    examined: int
    reflections: int
    lifted: list
    not_lifted: list
    skipped_non_integral: int
    round_trip_ok: bool
    label: str = "finite probe of the reflection-lifting hypothesis; not a proof"


def main_theorem_probe(scenario: PolarizedScenario, height: int, max_support: int | None = None,
                       search_bound: int = 3) -> ProbeReport:
    """Try to lift every reflection ``sigma_v`` of ``l^⊥ / l`` with
    primitive ``v`` of bounded height (and support) to a stable ambient
    reflection fixing ``l``."""
    q = scenario.quotient
    data = scenario.isotropic
    lifted, failed = [], []
    skipped = refl = examined = 0
    seen = set()
    ok = True
    for v in _vectors(q.rank, height, max_support):
        if xl.content(v) != 1:
            continue
        examined += 1
        if q.norm(v) == 0:
            continue
        try:
            s = make_reflection(q, v)
        except NotIntegral:
            skipped += 1
            continue
        if s.matrix in seen:
            continue
        seen.add(s.matrix)
        refl += 1
        try:
            r = lift_reflection(data, s, search_bound)
        except LiftNotFound:
            failed.append({"v": v, "norm": q.norm(v)})
            continue
        rep = classify_isometry(scenario.lattice, r)
        back = reduce_isometry(data, r)
        good = back == s and rep.is_reflection and rep.is_stable and r(data.vector) == data.vector
        ok = ok and good
        lifted.append({"v": v, "norm": q.norm(v), "lift_vector": r.vector, "round_trip": good})
    return ProbeReport(height, max_support, examined, refl, lifted, failed, skipped, ok)
