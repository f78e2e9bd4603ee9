"""Benchmark the compiled stepping kernel against its pure-Python twin.

Runs the same masked-relaxation + shift workload through both backends,
checks they agree, and reports wall time per backend and the speedup.

    python3 benchmarks/bench_kernels.py [--components N] [--cells M]
                                        [--steps K] [--repeats R]
"""

import argparse
import time

import numpy as np

from locdamp import _kernels_py

try:
    from locdamp import _kernels
except ImportError:
    _kernels = None


def make_workload(n: int, m: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    v = np.ascontiguousarray(rng.standard_normal((n, m)))
    shifts = rng.integers(-3, 4, size=n).astype(np.int64)
    shifts[shifts == 0] = 1
    r = rng.standard_normal((n, n))
    r *= 0.05 / max(1.0, np.linalg.norm(r))
    damp_half = np.ascontiguousarray(np.eye(n) - r)
    mask = np.zeros(m, dtype=np.uint8)
    mask[: m // 3] = 1
    mask[-m // 3 :] = 1
    return v, shifts, damp_half, mask


def bench(backend, v0, shifts, damp_half, mask, steps: int, repeats: int):
    best = float("inf")
    out = None
    for _ in range(repeats):
        v = v0.copy()
        t0 = time.perf_counter()
        code = backend.advance(v, shifts, damp_half, mask, steps, 1, 0, 1e-14)
        best = min(best, time.perf_counter() - t0)
        assert code == 0
        out = v
    return best, out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--components", type=int, default=3)
    parser.add_argument("--cells", type=int, default=8000)
    parser.add_argument("--steps", type=int, default=1200)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    v0, shifts, damp_half, mask = make_workload(args.components, args.cells)
    print(
        f"workload: {args.components} components x {args.cells} cells, "
        f"{args.steps} steps, best of {args.repeats}"
    )

    t_py, out_py = bench(
        _kernels_py, v0, shifts, damp_half, mask, args.steps, args.repeats
    )
    print(f"python   backend: {t_py * 1e3:10.2f} ms")

    if _kernels is None:
        print("compiled backend: not built (pip install -e . with Cython available)")
        return 0

    t_c, out_c = bench(_kernels, v0, shifts, damp_half, mask, args.steps, args.repeats)
    print(f"compiled backend: {t_c * 1e3:10.2f} ms")

    scale = max(1.0, float(np.abs(out_py).max()))
    agree = np.allclose(out_c, out_py, rtol=0.0, atol=1e-12 * scale)
    print(f"backends agree: {agree}")
    print(f"speedup: {t_py / t_c:.1f}x")
    return 0 if agree else 1


if __name__ == "__main__":
    raise SystemExit(main())
