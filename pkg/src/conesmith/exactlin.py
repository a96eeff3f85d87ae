"""Exact integer and rational linear algebra.

Matrices are tuples of row tuples holding Python ``int`` or
``fractions.Fraction`` entries.  Nothing in here ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

Vector = tuple
Matrix = tuple

__all__ = [
    "LinearSolution",
    "as_matrix",
    "identity",
    "transpose",
    "mat_mul",
    "mat_vec",
    "vec_mat",
    "dot",
    "det",
    "rank",
    "inverse",
    "primitive",
    "content",
    "integer_kernel",
    "row_space_basis",
    "hermite_normal_form",
    "smith_normal_form",
    "invariant_factors",
    "solve_rational",
    "signature_of_symmetric",
    "extend_to_basis",
    "saturated_right_inverse",
    "is_unimodular",
]


def as_matrix(rows) -> Matrix:
    """Convert nested sequences to an immutable matrix, checking shape."""
    out = tuple(tuple(r) for r in rows)
    if not out or not out[0]:
        raise ValueError("matrix dimensions must be positive")
    width = len(out[0])
    if any(len(r) != width for r in out):
        raise ValueError("ragged matrix")
    return tuple(tuple(_exact(x) for x in r) for r in out)


def _exact(x):
    if isinstance(x, bool):
        raise TypeError("boolean matrix entry")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else x
    if isinstance(x, str):
        return _exact(Fraction(x))
    raise TypeError(f"inexact matrix entry {x!r}")


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a: Matrix, x) -> Vector:
    return tuple(sum(p * q for p, q in zip(row, x)) for row in a)


def vec_mat(x, a: Matrix) -> Vector:
    return tuple(sum(p * q for p, q in zip(x, col)) for col in zip(*a))


def dot(x, y):
    return sum(p * q for p, q in zip(x, y))


def content(v) -> int:
    """gcd of the entries of an integer vector (0 for the zero vector)."""
    return reduce(gcd, (int(x) for x in v), 0)


def primitive(v) -> Vector:
    """Primitive integer vector on the ray through the rational vector ``v``."""
    fr = [Fraction(_exact(x)) for x in v]
    den = reduce(lcm, (x.denominator for x in fr), 1)
    ints = [int(x * den) for x in fr]
    g = content(ints)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def _fraction_rows(m):
    return [[Fraction(x) for x in row] for row in m]


def _echelon(rows):
    """Row-reduce a list of Fraction rows in place; return pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def rank(m) -> int:
    rows = _fraction_rows(m)
    if not rows:
        return 0
    return len(_echelon(rows))


def det(m: Matrix):
    """Determinant; integer-preserving Bareiss elimination for integer input."""
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    if all(isinstance(x, int) for r in m for x in r):
        a = [list(r) for r in m]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]
    rows = _fraction_rows(m)
    result = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if rows[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            result = -result
        p = rows[k][k]
        result *= p
        for i in range(k + 1, n):
            f = rows[i][k] / p
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[k])]
    return _exact(result)


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    rows = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(m)]
    pivots = _echelon(rows)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(_exact(x) for x in r[n:]) for r in rows)


def is_unimodular(m: Matrix) -> bool:
    n = len(m)
    if any(len(r) != n for r in m):
        return False
    if not all(isinstance(x, int) for r in m for x in r):
        return False
    return det(m) in (1, -1)


def smith_normal_form(m: Matrix):
    """Return ``(U, D, V)`` with ``U m V = D`` in Smith normal form.

    Pivot: smallest nonzero absolute value in the active block, ties broken
    by lowest row then lowest column.  ``U`` and ``V`` are unimodular and the
    diagonal of ``D`` is non-negative with ``d_i | d_{i+1}``.
    """
    a = [list(r) for r in as_matrix(m)]
    if not all(isinstance(x, int) for r in a for x in r):
        raise TypeError("Smith normal form needs an integer matrix")
    nr, nc = len(a), len(a[0])
    u = [list(r) for r in identity(nr)]
    v = [list(r) for r in identity(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for row in a:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    for t in range(min(nr, nc)):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                x = a[i][j]
                if x and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = a[t][t]
            for i in range(t + 1, nr):
                q = a[i][t] // p
                if q:
                    add_row(i, t, -q)
            for j in range(t + 1, nc):
                q = a[t][j] // p
                if q:
                    add_col(j, t, -q)
            best = None
            for i in range(t + 1, nr):
                if a[i][t] and (best is None or abs(a[i][t]) < abs(best[2])):
                    best = ("r", i, a[i][t])
            for j in range(t + 1, nc):
                if a[t][j] and (best is None or abs(a[t][j]) < abs(best[2])):
                    best = ("c", j, a[t][j])
            if best is not None:
                if best[0] == "r":
                    swap_rows(t, best[1])
                else:
                    swap_cols(t, best[1])
                continue
            bad = next(
                ((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return as_matrix(u), as_matrix(a), as_matrix(v)


def invariant_factors(m: Matrix) -> tuple:
    """Nonzero diagonal entries of the Smith normal form."""
    _, d, _ = smith_normal_form(m)
    return tuple(d[i][i] for i in range(min(len(d), len(d[0]))) if d[i][i])


def integer_kernel(m: Matrix) -> tuple:
    """Z-basis (tuple of vectors, Hermite-reduced) of ``{x in Z^n : m x = 0}``."""
    m = as_matrix(m)
    n = len(m[0])
    _, d, v = smith_normal_form(m)
    r = sum(1 for i in range(min(len(d), n)) if d[i][i])
    basis = [tuple(v[i][j] for i in range(n)) for j in range(r, n)]
    if not basis:
        return ()
    return hermite_normal_form(basis)


def row_space_basis(rows) -> tuple:
    """Saturated Z-basis of ``span_Q(rows) ∩ Z^n`` in Hermite normal form."""
    rows = [tuple(primitive(r)) for r in rows]
    rows = [r for r in rows if any(r)]
    if not rows:
        return ()
    n = len(rows[0])
    perp = integer_kernel(rows)
    if not perp:
        return identity(n)
    return integer_kernel(perp)


def hermite_normal_form(rows) -> tuple:
    """Row-style Hermite normal form, zero rows dropped."""
    a = [list(r) for r in rows]
    if not a:
        return ()
    nr, nc = len(a), len(a[0])
    r = 0
    for c in range(nc):
        if r == nr:
            break
        while True:
            nz = [i for i in range(r, nr) if a[i][c]]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(a[i][c]), i))
            a[r], a[piv] = a[piv], a[r]
            done = True
            for i in range(r + 1, nr):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if all(a[i][c] == 0 for i in range(r, nr)):
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return tuple(tuple(row) for row in a[:r])


@dataclass(frozen=True)
class LinearSolution:
    """One solution of ``A x = b`` plus a basis of the kernel of ``A``."""

    solution: tuple
    kernel: tuple

    @property
    def unique(self) -> bool:
        return not self.kernel


def solve_rational(a, b) -> LinearSolution:
    """Solve ``a x = b`` exactly over Q.

    Raises :class:`NoSolution` carrying a row ``y`` with ``y a = 0`` and
    ``y b != 0`` when the system is inconsistent.
    """
    from .errors import NoSolution

    a = as_matrix(a)
    m, n = len(a), len(a[0])
    if len(b) != m:
        raise ValueError("right-hand side has the wrong length")
    rows = [
        [Fraction(x) for x in a[i]] + [Fraction(int(i == j)) for j in range(m)]
        for i in range(m)
    ]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    bvec = [Fraction(x) for x in b]
    tb = [sum(row[n + j] * bvec[j] for j in range(m)) for row in rows]
    for i in range(r, m):
        if tb[i] != 0:
            cert = tuple(_exact(x) for x in rows[i][n:])
            raise NoSolution(cert, _exact(tb[i]))
    x = [Fraction(0)] * n
    for k, c in enumerate(pivots):
        x[c] = tb[k]
    kernel = []
    for f in (c for c in range(n) if c not in pivots):
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for k, c in enumerate(pivots):
            vec[c] = -rows[k][f]
        kernel.append(tuple(_exact(t) for t in vec))
    return LinearSolution(tuple(_exact(t) for t in x), tuple(kernel))


def signature_of_symmetric(g) -> tuple:
    """Inertia ``(positive, negative, zero)`` by exact congruence diagonalization."""
    from .errors import NotSymmetric

    g = as_matrix(g)
    n = len(g)
    if any(len(r) != n for r in g) or any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
        raise NotSymmetric("signature needs a symmetric matrix")
    a = _fraction_rows(g)
    pos = neg = zero = 0
    for k in range(n):
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[k], a[j] = a[j], a[k]
                for row in a:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    zero += 1
                    continue
                a[k] = [x + y for x, y in zip(a[k], a[j])]
                for row in a:
                    row[k] += row[j]
        p = a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for j in range(k + 1, n):
                    a[i][j] -= f * a[k][j]
            a[i][k] = Fraction(0)
        for j in range(k + 1, n):
            a[k][j] = Fraction(0)
        if p > 0:
            pos += 1
        else:
            neg += 1
    return pos, neg, zero


def saturated_right_inverse(b: Matrix) -> Matrix:
    """Integer ``R`` with ``b R = I`` for a saturated basis ``b`` (rows).

    ``R^T x`` gives the integer coordinates of any ``x`` in the row span and
    ``R u`` lifts an integer functional ``u`` on the span to ``Z^n``.
    """
    b = as_matrix(b)
    k, n = len(b), len(b[0])
    u, d, v = smith_normal_form(b)
    if any(d[i][i] != 1 for i in range(k)):
        raise ValueError("rows do not form a saturated basis")
    left = tuple(tuple(v[i][j] for j in range(k)) for i in range(n))
    return mat_mul(left, u)


def extend_to_basis(v) -> Matrix:
    """Unimodular matrix whose first column is the primitive vector ``v``."""
    v = tuple(int(x) for x in v)
    if content(v) != 1:
        raise ValueError("vector is not primitive")
    u, _, s = smith_normal_form(tuple((x,) for x in v))
    # u v s = e_1 with s = ±1, so the first column of u^-1 is s v
    w = [list(r) for r in inverse(u)]
    if s[0][0] < 0:
        for row in w:
            row[0] = -row[0]
    assert tuple(row[0] for row in w) == v
    return as_matrix(w)
