"""Spectral and pitch kernels shared by the feature extractors."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels

LOG_FLOOR = 1e-10

N_MEL_FILTERS = 26
N_MFCC = 13
PITCH_FMIN = 75.0
PITCH_FMAX = 500.0
VOICING_THRESHOLD = 0.45
SILENCE_FLOOR = 1e-4  # mean-square


def safe_log(x):
    return np.log(np.maximum(x, LOG_FLOOR))


def safe_log2(x):
    return np.log2(np.maximum(x, LOG_FLOOR))


@dataclass(frozen=True)
class MagnitudeSpectrum:
    bins: np.ndarray
    bin_hz: float

    @property
    def freqs(self):
        return np.arange(self.bins.shape[-1]) * self.bin_hz

    @property
    def nyquist(self):
        return (self.bins.shape[-1] - 1) * self.bin_hz


def magnitude_spectrum(frame, sample_rate=1):
    """|DFT| for bins 0..N/2 of a (windowed) frame.

    ``frame`` may also be a 2-D stack of frames; the transform runs along the
    last axis.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape[-1] == 0:
        raise ValueError("frame is empty")
    return MagnitudeSpectrum(np.abs(np.fft.rfft(frame, axis=-1)), sample_rate / frame.shape[-1])


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MelFilterbank:
    weights: np.ndarray  # (n_filters, K)
    edges: np.ndarray  # (n_filters, 3) left, centre, right in Hz

    @property
    def n_filters(self):
        return self.weights.shape[0]


@lru_cache(maxsize=32)
def build_mel_filterbank(sample_rate, frame_len, n_filters=N_MEL_FILTERS):
    """Triangular filters with centres evenly spaced in mel from 0 Hz to Nyquist."""
    if n_filters < N_MFCC + 1:
        raise ValueError(f"need at least {N_MFCC + 1} filters, got {n_filters}")
    n_bins = frame_len // 2 + 1
    freqs = np.arange(n_bins) * sample_rate / frame_len
    points = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_filters + 2))
    edges = np.stack([points[:-2], points[1:-1], points[2:]], axis=1)
    weights = np.zeros((n_filters, n_bins))
    for i, (lo, mid, hi) in enumerate(edges):
        rise = (freqs - lo) / (mid - lo)
        fall = (hi - freqs) / (hi - mid)
        weights[i] = np.maximum(0.0, np.minimum(rise, fall))
        if weights[i].max() <= 0.0:
            # filter narrower than a bin: fall back to the bin nearest its centre
            weights[i, int(np.argmin(np.abs(freqs - mid)))] = 1.0
    weights.setflags(write=False)
    edges.setflags(write=False)
    return MelFilterbank(weights, edges)


@lru_cache(maxsize=32)
def dct2_basis(n):
    """Orthonormal DCT-II matrix; row k is the k-th basis vector."""
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    basis = np.cos(np.pi * k * (2 * i + 1) / (2 * n)) * np.sqrt(2.0 / n)
    basis[0] /= np.sqrt(2.0)
    basis.setflags(write=False)
    return basis


def dct2_orthonormal(v):
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] == 0:
        raise ValueError("empty input")
    return v @ dct2_basis(v.shape[-1]).T


def idct2_orthonormal(c):
    c = np.asarray(c, dtype=np.float64)
    return c @ dct2_basis(c.shape[-1])


@dataclass(frozen=True)
class PitchEstimate:
    f0_hz: float | None
    voiced: bool
    confidence: float


def pitch_lag_range(sample_rate, f_min=PITCH_FMIN, f_max=PITCH_FMAX):
    lag_min = int(np.ceil(sample_rate / f_max))
    lag_max = int(np.floor(sample_rate / f_min))
    return lag_min, lag_max


def estimate_pitch_batch(frames, sample_rate, f_min=PITCH_FMIN, f_max=PITCH_FMAX,
                         voicing_threshold=VOICING_THRESHOLD, silence_floor=SILENCE_FLOOR):
    """Vectorised pitch for a stack of unwindowed frames.

    Returns ``(f0, voiced, confidence)`` arrays; ``f0`` is NaN where unvoiced.
    """
    frames = np.atleast_2d(np.asarray(frames, dtype=np.float64))
    lag_min, lag_max = pitch_lag_range(sample_rate, f_min, f_max)
    if frames.shape[1] < 2 * lag_max:
        raise ValueError(
            f"frame of {frames.shape[1]} samples does not cover two periods of {f_min} Hz"
        )
    lags, peaks = _kernels.autocorr_peak(frames, lag_min, lag_max)
    energy = np.mean(frames * frames, axis=1)
    confidence = np.clip(peaks, 0.0, 1.0)
    voiced = (peaks >= voicing_threshold) & (energy >= silence_floor)
    f0 = np.full(frames.shape[0], np.nan)
    f0[voiced] = sample_rate / lags[voiced]
    return f0, voiced, confidence


def estimate_pitch(frame, sample_rate, f_min=PITCH_FMIN, f_max=PITCH_FMAX,
                   voicing_threshold=VOICING_THRESHOLD, silence_floor=SILENCE_FLOOR):
    f0, voiced, conf = estimate_pitch_batch(
        np.asarray(frame)[None, :], sample_rate, f_min, f_max, voicing_threshold, silence_floor
    )
    return PitchEstimate(float(f0[0]) if voiced[0] else None, bool(voiced[0]), float(conf[0]))
