"""Compare the compiled and pure-Python kernels.

Run with ``python benchmarks/bench_kernels.py``. Each kernel is timed on
both backends with :mod:`timeit`; the last row integrates an MPRK scheme
end to end with each backend swapped in.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from nsark import _kernels, pds, solvers
from nsark.nbseries import CoefficientProvider
from nsark.trees import enumerate_trees


def _cases(rng):
    A = rng.normal(size=(6, 6)) + 6 * np.eye(6)
    rhs = rng.normal(size=6)
    P = rng.uniform(size=(3, 3))
    np.fill_diagonal(P, 0.0)
    w = rng.uniform(0.5, 2.0, 3)
    M = _kernels.pure.patankar_matrix(P, w, 0.1)
    tree = max(enumerate_trees(5, 2).of_order(5), key=lambda t: len(t.children))
    parents, colors = tree.flatten()
    colors = [c - 1 for c in colors]
    co = CoefficientProvider(rng.uniform(size=(2, 4, 4)), rng.uniform(size=(2, 4)))
    return {
        "solve_dense 6x6": lambda k: k.solve_dense(A, rhs),
        "patankar_matrix 3x3": lambda k: k.patankar_matrix(P, w, 0.1),
        "solve_patankar 3x3": lambda k: k.solve_patankar(M, w),
        "label_sum |t|=5 s=4": lambda k: k.label_sum(parents, colors, co.A, co.b),
    }


def _integrate(backend):
    names = ("solve_patankar", "patankar_matrix", "label_sum")
    saved = {n: getattr(_kernels, n) for n in names}
    for n in names:
        setattr(_kernels, n, getattr(backend, n))
    try:
        problem = pds.builtin("nonlinear3")
        solvers.integrate(solvers.mprk43().bind(problem), problem.y0, 5.0, 0.01)
    finally:
        for n, fn in saved.items():
            setattr(_kernels, n, fn)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=2000)
    args = parser.parse_args(argv)

    backends = [("python", _kernels.pure)]
    if _kernels.compiled is not None:
        backends.insert(0, ("cython", _kernels.compiled))
    else:
        print("compiled kernels unavailable; timing the fallback only")

    cases = _cases(np.random.default_rng(0))
    print(f"{'kernel':<24}" + "".join(f"{name:>14}" for name, _ in backends) + f"{'speedup':>10}")
    for label, fn in cases.items():
        times = [min(timeit.repeat(lambda: fn(mod), number=args.number, repeat=args.repeat))
                 / args.number * 1e6 for _, mod in backends]
        speed = f"{times[-1] / times[0]:9.1f}x" if len(times) == 2 else ""
        print(f"{label:<24}" + "".join(f"{t:11.2f} us" for t in times) + f" {speed}")

    times = [min(timeit.repeat(lambda: _integrate(mod), number=1, repeat=3)) * 1e3
             for _, mod in backends]
    speed = f"{times[-1] / times[0]:9.1f}x" if len(times) == 2 else ""
    print(f"{'mprk43 nonlinear3 500 st':<24}" + "".join(f"{t:11.2f} ms" for t in times) + f" {speed}")


if __name__ == "__main__":
    main()
