"""Singularity tests for affine toric varieties and fans.

For a pointed cone with primitive ray generators ``u_rho`` the polytope
``Pi = conv(0, u_rho)`` decides everything here: the variety is
Q-Gorenstein when some rational ``m`` has ``<m, u_rho> = 1`` on every ray,
and it is canonical when in addition every nonzero lattice point of ``Pi``
lies on the hyperplane ``<m, x> = 1``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import exactlin as xl
from .cones import Fan, Polytope, RationalCone, hull_facets
from .errors import InternalInconsistency, InvalidFan, NonPointedCone, NoSolution


@dataclass(frozen=True)
class TorusInvariantDivisor:
    """``sum a_rho D_rho``; ``terms`` is a sorted tuple of ``(ray, a_rho)``."""

    terms: tuple

    def __init__(self, coefficients):
        items = coefficients.items() if isinstance(coefficients, dict) else coefficients
        terms = tuple(sorted((tuple(r), xl._exact(Fraction(a))) for r, a in items))
        object.__setattr__(self, "terms", terms)

    @classmethod
    def zero(cls, rays) -> "TorusInvariantDivisor":
        return cls({r: 0 for r in rays})

    @property
    def rays(self) -> tuple:
        return tuple(r for r, _ in self.terms)

    def coefficient(self, ray):
        for r, a in self.terms:
            if r == tuple(ray):
                return a
        return 0

    def __add__(self, other):
        rays = sorted(set(self.rays) | set(other.rays))
        return TorusInvariantDivisor({r: self.coefficient(r) + other.coefficient(r) for r in rays})

    def __neg__(self):
        return TorusInvariantDivisor({r: -a for r, a in self.terms})

    def __sub__(self, other):
        return self + (-other)

    def support(self) -> tuple:
        return tuple(r for r, a in self.terms if a != 0)

    def as_dict(self) -> dict:
        return dict(self.terms)


def pi_polytope(cone: RationalCone) -> Polytope:
    """``conv({0} union {u_rho})`` in ambient coordinates."""
    if not cone.is_pointed:
        raise NonPointedCone(f"{cone!r} contains a line")
    return hull_facets([(0,) * cone.ambient_dim] + list(cone.rays))


@dataclass(frozen=True)
class SingularityVerdict:
    rays: tuple
    q_gorenstein: bool
    m: tuple | None
    gorenstein_index: int | None
    canonical: bool | None
    witness: tuple | None = None
    terminal: bool | None = None
    facet_normal: tuple | None = None
    lattice_points: tuple = ()
    smooth: bool = False


@dataclass(frozen=True)
class AffineToricData:
    cone: RationalCone

    def __post_init__(self):
        if not self.cone.is_pointed:
            raise NonPointedCone(f"{self.cone!r} contains a line")

    @property
    def rank(self) -> int:
        return self.cone.ambient_dim

    def verdict(self) -> SingularityVerdict:
        return singularity_verdict(self.cone)


def _is_lattice_basis_part(local_rays) -> bool:
    # rays extend to a basis of the span lattice iff their SNF is all ones
    return len(local_rays) == len(local_rays[0]) and abs(xl.det(local_rays)) == 1


def _by_system(local):
    try:
        sol = xl.solve_rational(local, [1] * len(local))
    except NoSolution:
        return None
    if not sol.unique:
        raise InternalInconsistency("rays of a cone do not span it")
    return tuple(Fraction(t) for t in sol.solution)


def _by_facet(local, k):
    poly = hull_facets([(0,) * k] + list(local))
    off = [(n, b) for n, b in poly.facets if b != 0]
    if len(off) != 1:
        return None, poly, off
    n, b = off[0]
    return tuple(Fraction(t) / b for t in n), poly, off


def _ambient(cone, m_local):
    return tuple(xl._exact(t) for t in xl.mat_vec(cone._coord, m_local))


def q_gorenstein_by_system(cone: RationalCone):
    """``m`` with ``<m, u_rho> = 1`` on every ray, or None."""
    if cone.dim == 0:
        return (0,) * cone.ambient_dim
    m = _by_system([cone.local(r) for r in cone.rays])
    return None if m is None else _ambient(cone, m)


def q_gorenstein_by_facet(cone: RationalCone):
    """``m`` read off the facet of ``Pi`` missing the origin when that facet
    is unique, or None."""
    if cone.dim == 0:
        return (0,) * cone.ambient_dim
    m, _, _ = _by_facet([cone.local(r) for r in cone.rays], cone.dim)
    return None if m is None else _ambient(cone, m)


def singularity_verdict(cone: RationalCone) -> SingularityVerdict:
    """Q-Gorenstein, index and canonical tests for the affine toric variety
    of a pointed cone.  Lower-dimensional cones are analyzed in the
    saturated lattice of their span.
    """
    if not cone.is_pointed:
        raise NonPointedCone(f"{cone!r} contains a line")
    rays = cone.rays
    k = cone.dim
    if k == 0:
        return SingularityVerdict(rays, True, (0,) * cone.ambient_dim, 1, True, None, True, None, (), True)
    local = [cone.local(r) for r in rays]
    m_sys = _by_system(local)
    m_facet, poly, off = _by_facet(local, k)
    if m_sys != m_facet:
        raise InternalInconsistency(
            f"Q-Gorenstein tests disagree on {cone!r}: system {m_sys}, facet {m_facet}"
        )
    if m_sys is None:
        return SingularityVerdict(rays, False, None, None, None, None, None, None, ())

    index = lcm(*(t.denominator for t in m_sys))
    points = [p for p in poly.lattice_points() if any(p)]
    witness = None
    for p in points:
        if xl.dot(m_sys, p) != 1:
            witness = p
            break
    m_amb = _ambient(cone, m_sys)
    amb_points = tuple(sorted(cone.from_local(p) for p in points))
    terminal = witness is None and len(points) == len(rays)
    facet = _ambient(cone, off[0][0])
    return SingularityVerdict(
        rays,
        True,
        m_amb,
        index,
        witness is None,
        cone.from_local(witness) if witness is not None else None,
        terminal,
        facet,
        amb_points,
        _is_lattice_basis_part(local),
    )


@dataclass(frozen=True)
class FanVerdict:
    verdicts: tuple
    q_gorenstein: bool
    canonical: bool
    gorenstein_index: int | None

    @property
    def witnesses(self) -> list:
        return [(v.rays, v.witness) for v in self.verdicts if v.canonical is False]


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CONESMITH_THREADS", "1")))
    except ValueError:
        return 1


def fan_singularity_verdict(fan: Fan, check: bool = True) -> FanVerdict:
    """Verdicts on the maximal cones only; they decide the whole fan."""
    if check:
        rep = fan.validate()
        if not rep["valid"]:
            raise InvalidFan("not a fan", rep["violations"])
    cones = sorted(fan.maximal_cones, key=lambda c: c.rays)
    workers = _threads()
    if workers > 1 and len(cones) > 1:
        with ThreadPoolExecutor(workers) as pool:
            verdicts = tuple(pool.map(singularity_verdict, cones))
    else:
        verdicts = tuple(singularity_verdict(c) for c in cones)
    qg = all(v.q_gorenstein for v in verdicts)
    can = qg and all(v.canonical for v in verdicts)
    index = lcm(*(v.gorenstein_index for v in verdicts)) if qg and verdicts else (1 if qg else None)
    return FanVerdict(verdicts, qg, can, index)


@dataclass(frozen=True)
class QCartierResult:
    q_cartier: bool
    m: tuple | None
    certificate: tuple | None = None
    inconsistent_rays: tuple = ()


def q_cartier_test(cone: RationalCone, divisor: TorusInvariantDivisor) -> QCartierResult:
    """Is ``sum a_rho D_rho`` Q-Cartier on the affine toric variety of ``cone``?

    Solves ``<m, u_rho> = -a_rho``.  On failure the certificate ``y`` satisfies
    ``sum y_rho u_rho = 0`` and ``sum y_rho a_rho != 0``.
    """
    rays = cone.rays
    if set(divisor.rays) - set(rays):
        raise ValueError("divisor has terms on rays outside the cone")
    if not rays:
        return QCartierResult(True, (0,) * cone.ambient_dim)
    rhs = [-Fraction(divisor.coefficient(r)) for r in rays]
    try:
        sol = xl.solve_rational(rays, rhs)
    except NoSolution as exc:
        bad = tuple(r for r, y in zip(rays, exc.certificate) if y != 0)
        return QCartierResult(False, None, exc.certificate, bad)
    return QCartierResult(True, sol.solution)


def divisor_of_character(obj, m) -> TorusInvariantDivisor:
    """``div(chi^m) = sum <m, u_rho> D_rho`` over the rays of a cone or fan."""
    if any(Fraction(t).denominator != 1 for t in m):
        raise ValueError("characters are integral")
    rays = obj.rays
    return TorusInvariantDivisor({r: xl.dot(m, r) for r in rays})


def canonical_divisor(obj) -> TorusInvariantDivisor:
    return TorusInvariantDivisor({r: -1 for r in obj.rays})
