"""Compare the compiled and pure-Python lattice-point kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each case is a ``box_points`` call of the kind the library issues: a
Lorentzian region certificate, an isotropic-vector scan and a plain
polytope box.  Both backends must return identical points.
"""

import argparse
import timeit

from conesmith import kernels
from conesmith.lattice import parse_lattice

U4 = parse_lattice("U+<-4>").gram
UU2 = parse_lattice("U+U+<-2>").gram

CASES = {
    "lorentzian region U+<-4>": dict(lo=[0, 0, -6], hi=[24, 24, 6], rows=[[-1, -1, 0]], rhs=[-24], quad=U4, quad_min=0),
    "isotropic scan U+U+<-2>": dict(lo=[0, -4, -4, -4, -4], hi=[4] * 5, quad=UU2, quad_min=0),
    "polytope box 4d": dict(lo=[-8] * 4, hi=[8] * 4, rows=[[1, 1, 1, 1], [-1, 2, 0, 1], [1, -1, 3, -2]], rhs=[-6, -9, -12]),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if kernels._compiled is None:
        print("compiled kernel not built; only the python backend is available")
    print(f"{'case':28} {'points':>7} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for name, kw in CASES.items():
        ref = kernels.box_points(backend="python", **kw)
        t_py = min(timeit.repeat(lambda: kernels.box_points(backend="python", **kw), number=1, repeat=args.repeat))
        if kernels._compiled is not None:
            got = kernels.box_points(backend="compiled", **kw)
            assert [tuple(p) for p in got] == [tuple(p) for p in ref], name
            t_c = min(timeit.repeat(lambda: kernels.box_points(backend="compiled", **kw), number=1, repeat=args.repeat))
            print(f"{name:28} {len(ref):>7} {t_py:>10.4f} {t_c:>11.4f} {t_py / t_c:>7.1f}x")
        else:
            print(f"{name:28} {len(ref):>7} {t_py:>10.4f} {'-':>11} {'-':>8}")


if __name__ == "__main__":
    main()
