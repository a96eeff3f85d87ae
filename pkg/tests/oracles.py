"""Independent reference computations used by the tests.

Nothing here imports the package: these are slow, direct methods (minors,
characteristic polynomials, Caratheodory decompositions, brute-force box
scans) that the package results are compared against.
"""

from fractions import Fraction
from itertools import combinations, product
from math import gcd

import sympy


def det(rows):
    """Determinant by cofactor expansion along the first row."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j, a in enumerate(rows[0]):
        if a:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * a * det(minor)
    return total


def minors_gcd(m, k):
    """gcd of all ``k x k`` minors (the k-th determinantal divisor)."""
    rows, cols = len(m), len(m[0])
    g = 0
    for r in combinations(range(rows), k):
        for c in combinations(range(cols), k):
            g = gcd(g, det([[m[i][j] for j in c] for i in r]))
    return g


def invariant_factors(m):
    """Diagonal of the Smith form from determinantal divisors."""
    out = []
    prev = 1
    for k in range(1, min(len(m), len(m[0])) + 1):
        d = minors_gcd(m, k)
        if d == 0:
            out.extend([0] * (min(len(m), len(m[0])) - k + 1))
            break
        out.append(d // prev)
        prev = d
    return out


def torsion_order(m):
    """Order of the torsion subgroup of the cokernel of ``m``: the gcd of
    the nonzero minors of maximal size."""
    for k in range(min(len(m), len(m[0])), 0, -1):
        g = minors_gcd(m, k)
        if g:
            return g
    return 1


def inertia(g):
    """Exact inertia by Descartes' rule on the characteristic polynomial
    (all roots are real for a symmetric matrix)."""
    x = sympy.symbols("x")
    poly = sympy.Poly(sympy.Matrix(g).charpoly(x).as_expr(), x)
    coeffs = poly.all_coeffs()
    zero = 0
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
        zero += 1

    def changes(cs):
        signs = [c > 0 for c in cs if c != 0]
        return sum(1 for a, b in zip(signs, signs[1:]) if a != b)

    n = len(coeffs) - 1
    neg_coeffs = [c * (-1) ** (n - i) for i, c in enumerate(coeffs)]
    return changes(coeffs), changes(neg_coeffs), zero


def _eliminate(a):
    """Row echelon form over the rationals; returns (rows, pivot columns)."""
    a = [[Fraction(v) for v in r] for r in a]
    pivots = []
    r = 0
    for c in range(len(a[0]) if a else 0):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(vectors):
    return len(_eliminate(vectors)[1]) if vectors else 0


def _solve(columns, x):
    """Coefficients ``l`` with ``sum l_i c_i = x`` for independent columns, or None."""
    k = len(columns)
    aug = [[columns[i][j] for i in range(k)] + [x[j]] for j in range(len(x))]
    red, piv = _eliminate(aug)
    if k in piv:
        return None
    sol = [Fraction(0)] * k
    for row, c in zip(red, piv):
        sol[c] = row[-1] / row[c]
    return sol


def in_cone(generators, x):
    """Membership by Caratheodory: ``x`` lies in some simplicial subcone."""
    if not any(x):
        return True
    gens = [tuple(g) for g in generators if any(g)]
    n = len(x)
    for k in range(1, min(n, len(gens)) + 1):
        for sub in combinations(gens, k):
            if rank(list(sub)) < k:
                continue
            lam = _solve(sub, x)
            if lam is not None and all(t >= 0 for t in lam):
                return True
    return False


def box(lo, hi):
    return product(*(range(a, b + 1) for a, b in zip(lo, hi)))


def pi_points(rays, m):
    """Nonzero lattice points of ``conv(0, rays)`` for a cone whose rays
    all satisfy ``<m, u> = 1``: they are the cone points with ``<m, x> <= 1``."""
    n = len(rays[0])
    lo = [min(0, *(r[i] for r in rays)) for i in range(n)]
    hi = [max(0, *(r[i] for r in rays)) for i in range(n)]
    out = []
    for x in box(lo, hi):
        if not any(x):
            continue
        v = sum(Fraction(a) * b for a, b in zip(m, x))
        if 0 < v <= 1 and in_cone(rays, x):
            out.append(x)
    return sorted(out)


def psd2(a, b, c):
    """``[[a, b], [b, c]]`` is positive semidefinite."""
    return a >= 0 and c >= 0 and a * c - b * b >= 0
