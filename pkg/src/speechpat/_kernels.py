"""Hot numeric kernels with a numba path and a pure-numpy path.

The backend is picked once at import time and governs the CART split scan.
Set ``SPEECHPAT_DISABLE_NUMBA=1`` (or uninstall numba) to force the numpy
implementations.  Both paths are
always importable under explicit names (``*_numba`` / ``*_numpy``) so tests
and the benchmark can compare them directly.
"""

import os

import numpy as np

_FLAG = os.environ.get("SPEECHPAT_DISABLE_NUMBA", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# normalized autocorrelation peak search (pitch)
# ---------------------------------------------------------------------------

def autocorr_peak_numpy(frames, lag_min, lag_max):
    """Best lag and normalized autocorrelation peak for each row of ``frames``.

    ``r(tau) = sum_n x[n] x[n + tau]`` over the overlapping part, divided by
    ``r(0)``.  Rows with zero energy get lag 0 and peak 0.  Ties resolve to
    the smallest lag.
    """
    frames = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    n_frames, length = frames.shape
    nfft = 1
    while nfft < 2 * length:
        nfft *= 2
    spec = np.fft.rfft(frames, nfft, axis=1)
    ac = np.fft.irfft(spec.real ** 2 + spec.imag ** 2, nfft, axis=1)[:, : lag_max + 1]
    r0 = ac[:, 0].copy()
    lags = np.zeros(n_frames, dtype=np.int64)
    peaks = np.zeros(n_frames, dtype=np.float64)
    live = r0 > 0.0
    if np.any(live):
        norm = ac[live, lag_min : lag_max + 1] / r0[live, None]
        best = np.argmax(norm, axis=1)
        lags[live] = best + lag_min
        peaks[live] = norm[np.arange(norm.shape[0]), best]
    return lags, peaks


def _autocorr_peak_py(frames, lag_min, lag_max):
    n_frames, length = frames.shape
    lags = np.zeros(n_frames, dtype=np.int64)
    peaks = np.zeros(n_frames, dtype=np.float64)
    for i in range(n_frames):
        x = frames[i]
        r0 = 0.0
        for n in range(length):
            r0 += x[n] * x[n]
        if r0 <= 0.0:
            continue
        best_lag = lag_min
        best = -np.inf
        for tau in range(lag_min, lag_max + 1):
            acc = 0.0
            for n in range(length - tau):
                acc += x[n] * x[n + tau]
            val = acc / r0
            if val > best:
                best = val
                best_lag = tau
        lags[i] = best_lag
        peaks[i] = best
    return lags, peaks


# ---------------------------------------------------------------------------
# CART best split (weighted squared error)
# ---------------------------------------------------------------------------
#
# Targets are centred on the node's weighted mean, so the impurity decrease of
# a split reduces to  S_L^2 / W_L + S_R^2 / W_R  with S_R = -S_L.  A candidate
# replaces the incumbent only when it beats it by more than ``tol``; scanning
# features in ascending order and thresholds ascending gives the
# lowest-feature, lowest-threshold tie break.

def best_split_numpy(X, y, w, idx, features, min_leaf, tol):
    """Return ``(feature, threshold, gain)``; feature is -1 when nothing splits."""
    yy = y[idx]
    ww = w[idx]
    wsum = ww.sum()
    yc = yy - (ww * yy).sum() / wsum
    n = idx.shape[0]
    best_f, best_t, best_g = -1, 0.0, tol
    if n < 2 * min_leaf:
        return best_f, best_t, 0.0
    pos = np.arange(1, n)  # left child holds the first `pos` sorted samples
    ok_count = (pos >= min_leaf) & (n - pos >= min_leaf)
    for f in features:
        xs = X[idx, f]
        order = np.argsort(xs, kind="mergesort")
        xs = xs[order]
        cw = np.cumsum(ww[order])[:-1]
        cs = np.cumsum(ww[order] * yc[order])[:-1]
        wr = wsum - cw
        valid = ok_count & (xs[:-1] < xs[1:]) & (cw > 0) & (wr > 0)
        if not np.any(valid):
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            gain = np.where(valid, cs * cs / cw + cs * cs / wr, -np.inf)
        gmax = gain.max()
        k = int(np.argmax(gain >= gmax - tol))
        if gain[k] - best_g > tol:
            lo, hi = xs[k], xs[k + 1]
            thr = 0.5 * (lo + hi)
            if thr >= hi:
                thr = lo
            best_f, best_t, best_g = int(f), float(thr), float(gain[k])
    if best_f < 0:
        return -1, 0.0, 0.0
    return best_f, best_t, best_g


def _best_split_py(X, y, w, idx, features, min_leaf, tol):
    n = idx.shape[0]
    if n < 2 * min_leaf:
        return -1, 0.0, 0.0
    wsum = 0.0
    wy = 0.0
    for i in range(n):
        wsum += w[idx[i]]
        wy += w[idx[i]] * y[idx[i]]
    mean = wy / wsum
    best_f = -1
    best_t = 0.0
    best_g = tol
    xs = np.empty(n)
    for fi in range(features.shape[0]):
        f = features[fi]
        for i in range(n):
            xs[i] = X[idx[i], f]
        order = np.argsort(xs, kind="mergesort")
        cw = 0.0
        cs = 0.0
        gains = np.full(n - 1, -np.inf)
        f_max = -np.inf
        for k in range(n - 1):
            j = idx[order[k]]
            cw += w[j]
            cs += w[j] * (y[j] - mean)
            left = k + 1
            if left < min_leaf or n - left < min_leaf:
                continue
            if not xs[order[k]] < xs[order[k + 1]]:
                continue
            wr = wsum - cw
            if cw <= 0.0 or wr <= 0.0:
                continue
            g = cs * cs / cw + cs * cs / wr
            gains[k] = g
            if g > f_max:
                f_max = g
        if f_max == -np.inf:
            continue
        # lowest threshold among the near-maximal candidates
        f_best_k = 0
        while gains[f_best_k] < f_max - tol:
            f_best_k += 1
        f_best_g = gains[f_best_k]
        if f_best_g - best_g > tol:
            lo = xs[order[f_best_k]]
            hi = xs[order[f_best_k + 1]]
            thr = 0.5 * (lo + hi)
            if thr >= hi:
                thr = lo
            best_f = f
            best_t = thr
            best_g = f_best_g
    if best_f < 0:
        return -1, 0.0, 0.0
    return best_f, best_t, best_g


if HAS_NUMBA:
    autocorr_peak_numba = njit(cache=True)(_autocorr_peak_py)
    _best_split_nb = njit(cache=True)(_best_split_py)

    def best_split_numba(X, y, w, idx, features, min_leaf, tol):
        f, t, g = _best_split_nb(X, y, w, idx, features, min_leaf, tol)
        return int(f), float(t), float(g)
else:  # pragma: no cover
    autocorr_peak_numba = None
    best_split_numba = None


def autocorr_peak(frames, lag_min, lag_max):
    # The FFT route beats the direct lag loop at every frame length used for
    # pitch, so both backends take it; the jitted loop stays as a cross-check.
    frames = np.ascontiguousarray(np.atleast_2d(frames), dtype=np.float64)
    return autocorr_peak_numpy(frames, int(lag_min), int(lag_max))


def best_split(X, y, w, idx, features, min_leaf, tol):
    if USE_NUMBA:
        return best_split_numba(X, y, w, idx, features, int(min_leaf), float(tol))
    return best_split_numpy(X, y, w, idx, features, int(min_leaf), float(tol))
