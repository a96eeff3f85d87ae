"""Backend selection for the lattice-point enumeration kernel.

The compiled extension is used when it was built and the inputs fit in
64-bit arithmetic; otherwise the exact pure-Python kernel runs.  Setting
``CONESMITH_PURE=1`` forces the fallback.
"""

import os

from . import _kernels_py

try:
    if os.environ.get("CONESMITH_PURE", "") not in ("", "0"):
        raise ImportError("pure backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"

_LIMIT = 1 << 62


def _fits(lo, hi, rows, rhs, quad, quad_min):
    bound = max([abs(v) for v in lo] + [abs(v) for v in hi] + [1])
    for r, c in zip(rows, rhs):
        if sum(abs(v) for v in r) * bound + abs(c) >= _LIMIT:
            return False
    if quad is not None:
        if sum(abs(v) for r in quad for v in r) * (bound * bound) * 4 + abs(quad_min) >= _LIMIT:
            return False
    return True


def box_points(lo, hi, rows=(), rhs=(), quad=None, quad_min=0, backend=None):
    """Lattice points of a box cut out by ``rows @ x >= rhs`` (and a quadratic
    lower bound ``x^T quad x >= quad_min``), in lexicographic order.

    All inputs are integers.  ``backend`` may be ``"python"`` or
    ``"compiled"`` to pin a kernel, mainly for benchmarks and tests.
    """
    lo = [int(v) for v in lo]
    hi = [int(v) for v in hi]
    rows = [[int(v) for v in r] for r in rows]
    rhs = [int(v) for v in rhs]
    if quad is not None:
        quad = [[int(v) for v in r] for r in quad]
    quad_min = int(quad_min)
    use = backend or BACKEND
    if use == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel not available")
        if _fits(lo, hi, rows, rhs, quad, quad_min):
            return _compiled.box_points(lo, hi, rows, rhs, quad, quad_min)
    return _kernels_py.box_points(lo, hi, rows, rhs, quad, quad_min)
