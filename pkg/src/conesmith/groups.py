"""Finite groups of lattice automorphisms acting on toric varieties.

A matrix ``g`` in ``GL(N)`` acts on the torus ``T = N (x) C*`` and on
characters through its transpose.  The fixed locus of ``g`` on ``T`` is
``Hom(M / (g^T - 1) M, C*)``, so its components are counted by the torsion
of that quotient and its dimension by the free rank.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd

from . import exactlin as xl
from .cones import Fan, RationalCone
from .errors import GroupDoesNotAct, GroupTooLarge, InternalInconsistency, NonUnimodular
from .toric import (
    QCartierResult,
    SingularityVerdict,
    TorusInvariantDivisor,
    divisor_of_character,
    q_cartier_test,
    singularity_verdict,
)

DEFAULT_GROUP_BOUND = 10000
CHARACTER_BOUND = 3


def _minus_identity(g):
    n = len(g)
    return tuple(tuple(g[i][j] - int(i == j) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class FiniteMatrixGroup:
    generators: tuple
    elements: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def rank(self) -> int:
        return len(self.elements[0])

    @property
    def identity(self):
        return xl.identity(self.rank)


def close_group(generators, bound: int = DEFAULT_GROUP_BOUND, rank: int | None = None) -> FiniteMatrixGroup:
    """All products of the generators; identity first, the rest sorted."""
    gens = [xl.as_matrix(g) for g in generators]
    if not gens and rank is None:
        raise ValueError("rank needed for the trivial group without generators")
    n = rank if rank is not None else len(gens[0])
    for g in gens:
        if len(g) != n or any(len(row) != n for row in g):
            raise ValueError("generators must be square of a common size")
        if xl.det(g) not in (1, -1):
            raise NonUnimodular(f"generator {g} has determinant {xl.det(g)}")
    ident = xl.identity(n)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                p = xl.mat_mul(g, h)
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
                    if len(seen) > bound:
                        raise GroupTooLarge(f"more than {bound} elements (infinite group?)")
        frontier = nxt
    rest = sorted(seen - {ident})
    return FiniteMatrixGroup(tuple(gens), (ident,) + tuple(rest))


@dataclass(frozen=True)
class FixedLocusReport:
    element: tuple
    classification: str
    rank_g_minus_identity: int
    eigenvalue: Fraction | None
    torus_fixed_components: int
    fixed_dimension: int
    component_labels: tuple

    @property
    def divisorial_components(self) -> int:
        return self.torus_fixed_components if self.classification == "reflection" else 0


def fixed_locus_torsion(g) -> tuple:
    """Invariant factors ``> 1`` and free rank of ``M / (g^T - 1) M``."""
    diff = xl.transpose(_minus_identity(xl.as_matrix(g)))
    n = len(diff)
    facs = xl.invariant_factors(diff)
    torsion = tuple(d for d in facs if d > 1)
    free = n - sum(1 for d in facs if d != 0)
    return torsion, free


def _classify(g) -> FixedLocusReport:
    n = len(g)
    diff = _minus_identity(g)
    r = xl.rank(diff)
    torsion, free = fixed_locus_torsion(g)
    labels = tuple(product(*(range(d) for d in torsion))) if torsion else ((),)
    count = len(labels)
    eig = None
    if r == 0:
        kind = "identity"
    elif r == 1:
        eig = Fraction(sum(g[i][i] for i in range(n)) - (n - 1))
        if eig != -1:
            raise InternalInconsistency(f"finite-order quasi-reflection {g} with eigenvalue {eig}")
        if xl.mat_mul(g, g) != xl.identity(n):
            raise InternalInconsistency(f"reflection {g} is not an involution")
        kind = "reflection"
    else:
        kind = "other"
    return FixedLocusReport(g, kind, r, eig, count, free, labels)


def classify_elements(group: FiniteMatrixGroup) -> list:
    return [_classify(g) for g in group.elements]


def reflections(group: FiniteMatrixGroup) -> list:
    return [rep.element for rep in classify_elements(group) if rep.classification == "reflection"]


@dataclass(frozen=True)
class RamificationDivisor:
    """Reduced divisor ``sum_r Fix(r)`` over the reflections ``r``."""

    summands: tuple

    @property
    def total_components(self) -> int:
        return sum(c for _, c in self.summands)

    @property
    def is_zero(self) -> bool:
        return not self.summands

    def __str__(self):
        if not self.summands:
            return "0"
        return " + ".join(f"Fix({list(map(list, g))})[{c}]" for g, c in self.summands)


def ramification_divisor(group: FiniteMatrixGroup) -> RamificationDivisor:
    return RamificationDivisor(
        tuple((rep.element, rep.torus_fixed_components) for rep in classify_elements(group)
              if rep.classification == "reflection")
    )


def _maps_cone(g, cone: RationalCone) -> RationalCone:
    return RationalCone([xl.mat_vec(g, r) for r in cone.rays], cone.ambient_dim)


def acts_on_fan(group: FiniteMatrixGroup, fan: Fan) -> tuple:
    """``(True, None)`` or ``(False, (g, cone_rays))`` for the first failure."""
    for g in group.generators or group.elements:
        for c in fan.cones:
            if _maps_cone(g, c).rays not in {k.rays for k in fan.cones}:
                return False, (g, c.rays)
    return True, None


def acts_on_cone(group: FiniteMatrixGroup, cone: RationalCone) -> bool:
    rays = set(cone.rays)
    return all({xl.mat_vec(g, r) for r in rays} == rays for g in group.elements)


@dataclass(frozen=True)
class InvariantDivisorReport:
    passed: bool
    checked: int
    violations: tuple


def check_no_invariant_fixed_divisor(group: FiniteMatrixGroup, fan: Fan) -> InvariantDivisorReport:
    """No non-identity element may fix a torus-invariant divisor pointwise.

    ``g`` fixes ``D_rho`` pointwise exactly when ``g u = u`` and ``g`` acts
    trivially on ``N / Z u``, i.e. every column of ``g - 1`` is a multiple
    of ``u``.
    """
    ok, bad = acts_on_fan(group, fan)
    if not ok:
        raise GroupDoesNotAct(f"element {bad[0]} does not map cone {bad[1]} into the fan")
    violations = []
    checked = 0
    for g in group.elements[1:]:
        diff = _minus_identity(g)
        for u in fan.rays:
            if xl.mat_vec(g, u) != u:
                continue
            checked += 1
            cols = xl.transpose(diff)
            if xl.rank([u] + [c for c in cols if any(c)]) <= 1:
                violations.append((g, u))
    return InvariantDivisorReport(not violations, checked, tuple(violations))


def _characters(n, bound):
    pts = [p for p in product(range(-bound, bound + 1), repeat=n)]
    return sorted(pts, key=lambda p: (sum(abs(t) for t in p), p))


@dataclass(frozen=True)
class ReflectionCharacter:
    """Anti-invariant function ``chi^m0 (chi^(c alpha) - 1)`` whose zero
    locus in the torus is ``Fix(r)``."""

    reflection: tuple
    alpha: tuple
    multiple: int
    m0: tuple

    def boundary_orders(self, rays) -> dict:
        top = tuple(a + self.multiple * b for a, b in zip(self.m0, self.alpha))
        return {u: min(xl.dot(self.m0, u), xl.dot(top, u)) for u in rays}


def reflection_characters(r, bound: int = CHARACTER_BOUND) -> list:
    """Characters ``m0`` with ``(r^T - 1) m0 = c alpha`` in (L1, lex) order."""
    rt = xl.transpose(_minus_identity(xl.as_matrix(r)))
    cols = [c for c in xl.transpose(rt) if any(c)]
    alpha = xl.primitive(cols[0])
    if next(t for t in alpha if t) < 0:
        alpha = tuple(-t for t in alpha)
    # every column is k_j alpha, so the image is gcd(k_j) Z alpha
    i0 = next(i for i, a in enumerate(alpha) if a)
    c = gcd(*(col[i0] // alpha[i0] for col in cols))
    target = tuple(c * a for a in alpha)
    out = []
    for m in _characters(len(alpha), bound):
        if xl.mat_vec(rt, m) == target:
            out.append(ReflectionCharacter(tuple(map(tuple, r)), alpha, c, m))
    return out


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class KltCertificate:
    """Record of the checked hypotheses behind the klt conclusion for the
    pair ``(X_sigma / G, 1/2 pi_*(R))``."""

    cone_rays: tuple
    fan_canonical: bool
    gorenstein_index: int
    group_acts: bool
    group_order: int
    reflections: tuple
    ramification: str
    boundary: str
    hypothesis_trace: tuple
    conclusion: str = (
        "klt: a finite quotient of a variety with canonical singularities, "
        "with boundary half the image of the ramification divisor"
    )


@dataclass(frozen=True)
class Refusal:
    failed_check: str
    hypothesis_trace: tuple


@dataclass(frozen=True)
class QuotientAnalysis:
    verdict: SingularityVerdict
    group: FiniteMatrixGroup
    elements: tuple
    ramification: RamificationDivisor
    characters: tuple
    invariant_reduction: TorusInvariantDivisor | None
    q_cartier: QCartierResult | None
    q_cartier_status: str
    independence: tuple
    klt: object

    @property
    def certified(self) -> bool:
        return isinstance(self.klt, KltCertificate)


def invariant_reduction(cone: RationalCone, chars) -> TorusInvariantDivisor:
    """``R - div(f)`` for ``f`` the product of the reflection characters;
    this is torus-invariant and linearly equivalent to ``R``."""
    total = {u: 0 for u in cone.rays}
    for ch in chars:
        for u, o in ch.boundary_orders(cone.rays).items():
            total[u] -= o
    return TorusInvariantDivisor(total)


def quotient_analysis(cone: RationalCone, group: FiniteMatrixGroup, characters=None) -> QuotientAnalysis:
    """Singularity, ramification, Q-Cartier and klt analysis of ``X_sigma / G``.

    ``characters`` optionally fixes the ``m0`` used for each reflection, in
    the order returned by :func:`reflections`.
    """
    if not acts_on_cone(group, cone):
        raise GroupDoesNotAct("the group does not preserve the cone")
    verdict = singularity_verdict(cone)
    reports = tuple(classify_elements(group))
    ram = ramification_divisor(group)
    refl = [rep.element for rep in reports if rep.classification == "reflection"]

    chosen = []
    alternatives = []
    status = "determined"
    for i, r in enumerate(refl):
        cands = reflection_characters(r)
        if characters is not None:
            m0 = tuple(characters[i])
            base = cands[0] if cands else None
            if base is None:
                status = "undetermined"
                break
            ch = ReflectionCharacter(base.reflection, base.alpha, base.multiple, m0)
            rt = xl.transpose(_minus_identity(r))
            if xl.mat_vec(rt, m0) != tuple(base.multiple * a for a in base.alpha):
                raise ValueError(f"character {m0} does not match reflection {r}")
            cands = [ch] + cands
        if not cands:
            status = "undetermined"
            break
        chosen.append(cands[0])
        alternatives.append(cands[1:3])

    reduction = qc = None
    independence = []
    if status == "determined":
        reduction = invariant_reduction(cone, chosen)
        qc = q_cartier_test(cone, reduction)
        for i, alts in enumerate(alternatives):
            for alt in alts:
                swap = list(chosen)
                swap[i] = alt
                other = q_cartier_test(cone, invariant_reduction(cone, swap))
                independence.append((f"reflection {i} with m0={alt.m0}", other.q_cartier == qc.q_cartier))
        for j in range(cone.ambient_dim):
            e = tuple(int(k == j) for k in range(cone.ambient_dim))
            shifted = q_cartier_test(cone, reduction + divisor_of_character(cone, e))
            independence.append((f"plus div of character {e}", shifted.q_cartier == qc.q_cartier))
        if not all(ok for _, ok in independence):
            raise InternalInconsistency("Q-Cartier verdict depends on the chosen character")

    trace = [
        HypothesisCheck("cone is pointed", True),
        HypothesisCheck(
            "cone is Q-Gorenstein",
            verdict.q_gorenstein,
            f"m = {verdict.m}" if verdict.q_gorenstein else "no m with <m, u> = 1 on all rays",
        ),
        HypothesisCheck(
            "cone has canonical singularities",
            bool(verdict.canonical),
            "all nonzero lattice points of Pi lie on <m, x> = 1"
            if verdict.canonical
            else f"witness {verdict.witness}",
        ),
        HypothesisCheck("group is finite", True, f"order {group.order}"),
        HypothesisCheck("group preserves the cone", True),
        HypothesisCheck(
            "every reflection is an involution with eigenvalue -1",
            all(rep.eigenvalue == -1 for rep in reports if rep.classification == "reflection"),
        ),
    ]
    inv = check_no_invariant_fixed_divisor(group, Fan.from_maximal([cone]))
    trace.append(
        HypothesisCheck(
            "no element fixes a torus-invariant divisor pointwise",
            inv.passed,
            f"{inv.checked} fixed rays checked",
        )
    )
    trace = tuple(trace)
    failed = next((h for h in trace if not h.passed), None)
    if failed is None:
        klt = KltCertificate(
            cone_rays=cone.rays,
            fan_canonical=True,
            gorenstein_index=verdict.gorenstein_index,
            group_acts=True,
            group_order=group.order,
            reflections=tuple(refl),
            ramification=str(ram),
            boundary="1/2 pi_*(R)" if refl else "0",
            hypothesis_trace=trace,
        )
    else:
        klt = Refusal(failed.name, trace)
    return QuotientAnalysis(
        verdict, group, reports, ram, tuple(chosen), reduction, qc, status, tuple(independence), klt
    )
