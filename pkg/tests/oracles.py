"""Independent reference computations used only by the tests."""

import numpy as np


def direct_dft_magnitude(x):
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    k = np.arange(n // 2 + 1)[:, None]
    t = np.arange(n)[None, :]
    return np.abs(np.sum(x[None, :] * np.exp(-2j * np.pi * k * t / n), axis=1))


def brute_force_root_split(X, y, w=None, min_leaf=1, rel_tol=1e-10):
    """Exhaustive (feature, threshold) search on weighted SSE, computed directly.

    Returns ``(feature, threshold, gain)`` or ``None`` when no candidate
    improves on the parent by more than the tolerance.  Among candidates
    within tolerance of the best gain, the lowest feature then the lowest
    threshold wins.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=np.float64)

    def sse(mask):
        ww, yy = w[mask], y[mask]
        if ww.sum() == 0:
            return 0.0
        m = np.sum(ww * yy) / ww.sum()
        return float(np.sum(ww * (yy - m) ** 2))

    everything = np.ones(y.size, dtype=bool)
    parent = sse(everything)
    if not parent > 0:
        return None
    tol = rel_tol * parent
    cands = []
    for f in range(X.shape[1]):
        vals = np.unique(X[:, f])
        for lo, hi in zip(vals[:-1], vals[1:]):
            thr = 0.5 * (lo + hi)
            if thr >= hi:
                thr = lo
            left = X[:, f] <= thr
            if left.sum() < min_leaf or (~left).sum() < min_leaf:
                continue
            cands.append((f, thr, parent - sse(left) - sse(~left)))
    if not cands:
        return None
    best = max(c[2] for c in cands)
    if best <= tol:
        return None
    near = [c for c in cands if c[2] >= best - tol]
    return min(near, key=lambda c: (c[0], c[1]))


def mean_by_loop(rows):
    """Column means by explicit accumulation."""
    total = [0.0] * len(rows[0])
    for r in rows:
        for j, v in enumerate(r):
            total[j] += v
    return [t / len(rows) for t in total]
