"""Pure-Python box enumeration kernel (fallback for the compiled one)."""


def box_points(lo, hi, rows, rhs, quad=None, quad_min=0):
    """Integer points ``x`` with ``lo <= x <= hi``, ``rows @ x >= rhs`` and,
    when ``quad`` is given, ``x^T quad x >= quad_min``.

    Points come out in lexicographic order.  Linear and quadratic values are
    updated incrementally as the odometer advances.
    """
    n = len(lo)
    if n == 0 or any(a > b for a, b in zip(lo, hi)):
        return []
    m = len(rows)
    cols = [[rows[i][k] for i in range(m)] for k in range(n)]
    x = list(lo)
    ax = [sum(r[k] * x[k] for k in range(n)) for r in rows]
    use_q = quad is not None
    if use_q:
        qx = [sum(quad[i][k] * x[k] for k in range(n)) for i in range(n)]
        qv = sum(x[i] * qx[i] for i in range(n))
        qcols = [[quad[i][k] for i in range(n)] for k in range(n)]
    out = []
    last = n - 1
    while True:
        ok = True
        for i in range(m):
            if ax[i] < rhs[i]:
                ok = False
                break
        if ok and (not use_q or qv >= quad_min):
            out.append(tuple(x))
        j = last
        while j >= 0 and x[j] == hi[j]:
            j -= 1
        if j < 0:
            return out
        for k in range(j, n):
            delta = 1 if k == j else lo[k] - x[k]
            if not delta:
                continue
            x[k] += delta
            col = cols[k]
            for i in range(m):
                ax[i] += delta * col[i]
            if use_q:
                qv += 2 * delta * qx[k] + delta * delta * quad[k][k]
                qc = qcols[k]
                for i in range(n):
                    qx[i] += delta * qc[i]
