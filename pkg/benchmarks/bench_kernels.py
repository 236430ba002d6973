"""Compare the numba and numpy code paths of the two hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json]

Both paths run in the same process through the ``use_numba`` switch; with
``APATHKIT_NO_NUMBA=1`` the numba column times the un-jitted Python loops.
"""
from __future__ import annotations

import argparse
import json
import timeit

import numpy as np

from apathkit import backend, kernels


def _affine_case(n_eps: int, n_t: int, n: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    f = tuple(rng.normal(size=(n_eps + 1, n_t, n)) for _ in range(3))
    k = tuple(0.3 * rng.normal(size=(n_eps + 1, n_t, n, n)) for _ in range(3))
    b0 = rng.normal(size=(n_eps + 1, n))
    return f, k, b0, 1.0 / n_t


def _matrix_case(n_t: int, d: int, seed: int = 1):
    rng = np.random.default_rng(seed)
    a = tuple((rng.normal(size=(n_t, d, d)) + 1j * rng.normal(size=(n_t, d, d))) for _ in range(3))
    return a, 1.0 / n_t


def run(repeat: int = 5) -> list[dict]:
    rows = []
    small, large = _affine_case(200, 200, 3), _affine_case(200, 800, 3)
    mat, hm = _matrix_case(2000, 2)

    def affine(case):
        f, k, b0, h = case
        return lambda u: kernels.rk4_affine(f, k, b0, h, use_numba=u)

    cases = [
        ("rk4_affine 200x200 n=3", affine(small)),
        ("rk4_affine 200x800 n=3", affine(large)),
        ("rk4_matrix N=2000 2x2", lambda u: kernels.rk4_matrix(mat, hm, True, use_numba=u)),
    ]
    for name, fn in cases:
        ref = fn(False)
        out = fn(True)  # also triggers compilation before timing
        diff = float(np.max(np.abs(out - ref)))
        t_np = min(timeit.repeat(lambda: fn(False), number=1, repeat=repeat))
        t_nb = min(timeit.repeat(lambda: fn(True), number=1, repeat=repeat))
        rows.append({"kernel": name, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb, "max_diff": diff})
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rows = run(args.repeat)
    if args.json:
        print(json.dumps({"backend": backend(), "rows": rows}, indent=2))
        return
    print(f"default backend: {backend()}")
    print(f"{'kernel':<26}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}{'max diff':>12}")
    for r in rows:
        print(f"{r['kernel']:<26}{r['numpy_s']:>12.4f}{r['numba_s']:>12.4f}{r['speedup']:>10.1f}{r['max_diff']:>12.1e}")


if __name__ == "__main__":
    main()
