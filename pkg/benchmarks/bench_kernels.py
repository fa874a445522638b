"""Time the numba and numpy kernel backends side by side.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from speechpat import _kernels
from speechpat.models import cart


def best_of(fn, repeat):
    fn()  # warm-up, includes jit compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)

    n = np.arange(800)
    frames = np.sin(2 * np.pi * rng.uniform(80, 400, (400, 1)) * n / 16000) + 0.1 * rng.standard_normal((400, 800))
    X = rng.normal(size=(2000, 41))
    y = rng.integers(0, 2, 2000).astype(float)
    w = np.ones(2000)
    idx = np.arange(2000, dtype=np.int64)
    feats = np.arange(41, dtype=np.int64)

    Xs = rng.normal(size=(60, 41))
    ys = rng.normal(size=60)

    def grow(kernel):
        # full tree on corpus-sized data: many small nodes, so per-call overhead shows
        saved = _kernels.best_split
        _kernels.best_split = kernel
        try:
            cart.build_cart(Xs, ys)
        finally:
            _kernels.best_split = saved

    cases = {
        "autocorr_peak (400 x 800)": (
            lambda: _kernels.autocorr_peak_numpy(frames, 32, 213),
            lambda: _kernels.autocorr_peak_numba(frames, 32, 213),
        ),
        "best_split (2000 x 41)": (
            lambda: _kernels.best_split_numpy(X, y, w, idx, feats, 1, 1e-10),
            lambda: _kernels.best_split_numba(X, y, w, idx, feats, 1, 1e-10),
        ),
        "build_cart (60 x 41)": (
            lambda: grow(_kernels.best_split_numpy),
            lambda: grow(_kernels.best_split_numba),
        ),
    }
    print(f"{'kernel':<28}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, (np_fn, nb_fn) in cases.items():
        t_np = best_of(np_fn, args.repeat)
        if _kernels.HAS_NUMBA:
            t_nb = best_of(nb_fn, args.repeat)
            print(f"{name:<28}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>9.1f}x")
        else:
            print(f"{name:<28}{t_np * 1e3:>12.2f}{'n/a':>12}")


if __name__ == "__main__":
    main()
