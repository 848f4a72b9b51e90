"""Time the numba and numpy paths of the hot kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--sizes 200,800,1600] [--dim 1584] [--repeat 5]

The default dimension matches 44x36 face images. Each kernel is checked for
agreement between the two paths before timing.
"""
import argparse
import time

import numpy as np

from wfda import _accel


def _best(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(n, d, repeat, rng):
    X = rng.standard_normal((d, n))
    Q = rng.standard_normal((d, n // 2))
    gamma = 1.0 / d
    cases = {
        "sqdist": lambda: _accel.sqdist(X, Q),
        "rbf_gram": lambda: _accel.rbf_gram(X, X, gamma),
        "nearest": lambda: _accel.nearest(X, Q),
        "nearest_loo": lambda: _accel.nearest(X, X, exclude_self=True),
    }
    rows = []
    for name, fn in cases.items():
        _accel.set_backend(False)
        ref = fn()
        t_np = _best(fn, repeat)
        _accel.set_backend(True)
        out = fn()  # first call compiles or loads the cache
        t_nb = _best(fn, repeat)
        if ref.dtype.kind == "f":
            ok = np.allclose(out, ref, rtol=1e-10, atol=1e-10)
        else:
            ok = np.array_equal(out, ref)
        rows.append((name, n, t_np, t_nb, ok))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="200,800,1600")
    ap.add_argument("--dim", type=int, default=44 * 36)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if not _accel.HAS_NUMBA:
        raise SystemExit("numba is not installed")
    rng = np.random.default_rng(args.seed)
    previous = _accel.USE_NUMBA
    print(f"d={args.dim}, best of {args.repeat}")
    print(f"{'kernel':<12} {'n':>6} {'numpy s':>10} {'numba s':>10} {'speedup':>8}  agree")
    try:
        for n in (int(s) for s in args.sizes.split(",")):
            for name, n_, t_np, t_nb, ok in bench(n, args.dim, args.repeat, rng):
                print(f"{name:<12} {n_:>6} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>7.2f}x  {ok}")
    finally:
        _accel.set_backend(previous)


if __name__ == "__main__":
    main()
