# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled box enumeration kernel (64-bit; callers guard against overflow)."""

from libc.stdlib cimport malloc, free

ctypedef long long i64


def box_points(lo, hi, rows, rhs, quad=None, quad_min=0):
    cdef Py_ssize_t n = len(lo)
    cdef Py_ssize_t m = len(rows)
    cdef Py_ssize_t i, j, k
    if n == 0:
        return []
    for i in range(n):
        if lo[i] > hi[i]:
            return []
    cdef bint use_q = quad is not None
    cdef i64 *x = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *clo = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *chi = <i64 *> malloc(n * sizeof(i64))
    cdef i64 *a = <i64 *> malloc((m * n + 1) * sizeof(i64))
    cdef i64 *b = <i64 *> malloc((m + 1) * sizeof(i64))
    cdef i64 *ax = <i64 *> malloc((m + 1) * sizeof(i64))
    cdef i64 *q = <i64 *> malloc(n * n * sizeof(i64))
    cdef i64 *qx = <i64 *> malloc(n * sizeof(i64))
    cdef i64 qv = 0, qmin = quad_min, delta
    cdef bint ok
    out = []
    try:
        for k in range(n):
            clo[k] = lo[k]
            chi[k] = hi[k]
            x[k] = clo[k]
        for i in range(m):
            b[i] = rhs[i]
            for k in range(n):
                a[i * n + k] = rows[i][k]
        for i in range(m):
            ax[i] = 0
            for k in range(n):
                ax[i] += a[i * n + k] * x[k]
        if use_q:
            for i in range(n):
                for k in range(n):
                    q[i * n + k] = quad[i][k]
            for i in range(n):
                qx[i] = 0
                for k in range(n):
                    qx[i] += q[i * n + k] * x[k]
            for i in range(n):
                qv += x[i] * qx[i]
        while True:
            ok = True
            for i in range(m):
                if ax[i] < b[i]:
                    ok = False
                    break
            if ok and (not use_q or qv >= qmin):
                out.append(tuple([x[k] for k in range(n)]))
            j = n - 1
            while j >= 0 and x[j] == chi[j]:
                j -= 1
            if j < 0:
                break
            for k in range(j, n):
                if k == j:
                    delta = 1
                else:
                    delta = clo[k] - x[k]
                if delta == 0:
                    continue
                x[k] += delta
                for i in range(m):
                    ax[i] += delta * a[i * n + k]
                if use_q:
                    qv += 2 * delta * qx[k] + delta * delta * q[k * n + k]
                    for i in range(n):
                        qx[i] += delta * q[i * n + k]
    finally:
        free(x)
        free(clo)
        free(chi)
        free(a)
        free(b)
        free(ax)
        free(q)
        free(qx)
    return out
