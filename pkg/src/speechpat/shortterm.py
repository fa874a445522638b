"""Frame-level features and their per-recording means.

Every function works on a single frame or on a stack of frames along the
last axis, so the extractor can run one vectorised pass per recording.
Time-domain features take unwindowed frames; spectral features take the
magnitude spectrum of hamming-windowed frames.
"""

from dataclasses import dataclass, fields

import numpy as np

from .dsp import LOG_FLOOR, N_MFCC, MagnitudeSpectrum, dct2_orthonormal, safe_log, safe_log2
from .errors import BinMismatch, EmptyInput

N_SUBFRAMES = 10
N_BANDS = 10
ROLLOFF_FRACTION = 0.90
CHROMA_FMIN = 30.0
A4_HZ = 440.0

AGGREGATE_NAMES = (
    [f"mfcc_{i}" for i in range(1, N_MFCC + 1)]
    + ["energy", "energy_entropy", "zcr"]
    + ["spectral_centroid", "spectral_spread", "spectral_rolloff", "spectral_flux", "spectral_entropy"]
    + [f"chroma_{i}" for i in range(1, 13)]
)


def zero_crossing_rate(frame):
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape[-1] < 2:
        raise ValueError("need at least two samples")
    sign = frame >= 0.0
    changes = np.count_nonzero(sign[..., 1:] != sign[..., :-1], axis=-1)
    return changes / (frame.shape[-1] - 1)


def short_energy(frame):
    frame = np.asarray(frame, dtype=np.float64)
    if frame.shape[-1] == 0:
        raise ValueError("frame is empty")
    return np.mean(frame * frame, axis=-1)


def _entropy_bits(parts):
    """Shannon entropy of nonnegative ``parts`` (last axis) after normalisation; 0 if all zero."""
    total = parts.sum(axis=-1, keepdims=True)
    p = np.divide(parts, total, out=np.zeros_like(parts), where=total > 0)
    return -np.sum(p * safe_log2(p), axis=-1)


def energy_entropy(frame, n_sub=N_SUBFRAMES):
    if n_sub < 2:
        raise ValueError("n_sub must be >= 2")
    frame = np.asarray(frame, dtype=np.float64)
    length = frame.shape[-1]
    sub_len = -(-length // n_sub)
    starts = np.arange(n_sub) * sub_len
    starts = starts[starts < length]
    sub_energy = np.add.reduceat(frame * frame, starts, axis=-1)
    return _entropy_bits(sub_energy)


def spectral_centroid_spread(spec: MagnitudeSpectrum):
    mag = spec.bins
    f = spec.freqs
    total = mag.sum(axis=-1)
    live = total > 0
    safe = np.where(live, total, 1.0)
    centroid = np.where(live, (mag * f).sum(axis=-1) / safe, 0.0)
    var = ((f - np.expand_dims(centroid, -1)) ** 2 * mag).sum(axis=-1) / safe
    spread = np.where(live, np.sqrt(np.maximum(var, 0.0)), 0.0)
    return centroid, spread


def spectral_rolloff(spec: MagnitudeSpectrum, c=ROLLOFF_FRACTION):
    if not 0.0 < c < 1.0:
        raise ValueError("rolloff fraction must lie in (0, 1)")
    power = spec.bins ** 2
    cum = np.cumsum(power, axis=-1)
    total = cum[..., -1:]
    m = np.argmax(cum >= c * total, axis=-1)
    return np.where(total[..., 0] > 0, m * spec.bin_hz, 0.0)


def _sum_normalise(mag):
    total = mag.sum(axis=-1, keepdims=True)
    uniform = np.full_like(mag, 1.0 / mag.shape[-1])
    return np.where(total > 0, mag / np.where(total > 0, total, 1.0), uniform)


def spectral_flux(spec_t: MagnitudeSpectrum, spec_prev: MagnitudeSpectrum):
    if spec_t.bins.shape[-1] != spec_prev.bins.shape[-1]:
        raise BinMismatch(f"{spec_t.bins.shape[-1]} bins vs {spec_prev.bins.shape[-1]}")
    p = _sum_normalise(spec_t.bins)
    q = _sum_normalise(spec_prev.bins)
    return np.sum((p - q) ** 2, axis=-1)


def spectral_entropy(spec: MagnitudeSpectrum, n_bands=N_BANDS):
    if n_bands < 2:
        raise ValueError("n_bands must be >= 2")
    power = spec.bins ** 2
    n_bins = power.shape[-1]
    sizes = np.full(n_bands, n_bins // n_bands)
    sizes[: n_bins % n_bands] += 1
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    starts = starts[sizes > 0]
    return _entropy_bits(np.add.reduceat(power, starts, axis=-1))


def mfcc(spec: MagnitudeSpectrum, filterbank):
    if filterbank.weights.shape[1] != spec.bins.shape[-1]:
        raise BinMismatch("filterbank was built for a different frame size")
    mel_energy = spec.bins @ filterbank.weights.T
    return dct2_orthonormal(safe_log(mel_energy))[..., :N_MFCC]


def pitch_classes(n_bins, bin_hz, tuning=A4_HZ):
    """Pitch class (C = 0) per bin, -1 for bins below the chroma floor."""
    f = np.arange(n_bins) * bin_hz
    pc = np.full(n_bins, -1, dtype=np.int64)
    ok = f >= CHROMA_FMIN
    pc[ok] = np.mod(np.round(12.0 * np.log2(f[ok] / tuning) + 69.0).astype(np.int64), 12)
    return pc


def chroma(spec: MagnitudeSpectrum, tuning=A4_HZ):
    power = spec.bins ** 2
    pc = pitch_classes(power.shape[-1], spec.bin_hz, tuning)
    onehot = (pc[:, None] == np.arange(12)[None, :]).astype(np.float64)
    classes = power @ onehot
    total = classes.sum(axis=-1, keepdims=True)
    return np.divide(classes, total, out=np.zeros_like(classes), where=total > 0)


@dataclass
class FrameFeatures:
    """Per-frame values.  Scalars for one frame, or arrays with a leading frame axis."""

    zcr: np.ndarray
    energy: np.ndarray
    energy_entropy: np.ndarray
    centroid: np.ndarray
    spread: np.ndarray
    rolloff: np.ndarray
    flux: np.ndarray  # first frame has no predecessor; its slot is ignored
    spectral_entropy: np.ndarray
    mfcc: np.ndarray
    chroma: np.ndarray

    def __len__(self):
        return np.atleast_1d(self.zcr).shape[0]

    @classmethod
    def stack(cls, items):
        return cls(**{
            fld.name: np.stack([np.asarray(getattr(it, fld.name), dtype=np.float64) for it in items])
            for fld in fields(cls)
        })


def frame_features(raw_frames, windowed_frames, sample_rate, filterbank):
    """Compute :class:`FrameFeatures` for a stack of frames in one pass."""
    spec = MagnitudeSpectrum(
        np.abs(np.fft.rfft(windowed_frames, axis=-1)), sample_rate / windowed_frames.shape[-1]
    )
    centroid, spread = spectral_centroid_spread(spec)
    flux = np.zeros(spec.bins.shape[0])
    if spec.bins.shape[0] > 1:
        flux[1:] = spectral_flux(
            MagnitudeSpectrum(spec.bins[1:], spec.bin_hz), MagnitudeSpectrum(spec.bins[:-1], spec.bin_hz)
        )
    return FrameFeatures(
        zcr=zero_crossing_rate(raw_frames),
        energy=short_energy(raw_frames),
        energy_entropy=energy_entropy(raw_frames),
        centroid=centroid,
        spread=spread,
        rolloff=spectral_rolloff(spec),
        flux=flux,
        spectral_entropy=spectral_entropy(spec),
        mfcc=mfcc(spec, filterbank),
        chroma=chroma(spec),
    )


def aggregate_frames(per_frame):
    """Mean of every field over frames, in ``AGGREGATE_NAMES`` order (33 values).

    Flux is averaged over frames 2..T and is 0 for a single frame.  Accepts a
    batched :class:`FrameFeatures` or a sequence of single-frame ones.
    """
    if not isinstance(per_frame, FrameFeatures):
        per_frame = list(per_frame)
        if not per_frame:
            raise EmptyInput("no frames to aggregate")
        per_frame = FrameFeatures.stack(per_frame)
    n = len(per_frame)
    if n == 0:
        raise EmptyInput("no frames to aggregate")

    def mean(name):
        return float(np.mean(np.atleast_1d(getattr(per_frame, name))))

    flux = np.atleast_1d(per_frame.flux)
    values = list(np.mean(np.atleast_2d(per_frame.mfcc), axis=0))
    values += [mean("energy"), mean("energy_entropy"), mean("zcr")]
    values += [mean("centroid"), mean("spread"), mean("rolloff")]
    values += [float(np.mean(flux[1:])) if n > 1 else 0.0, mean("spectral_entropy")]
    values += list(np.mean(np.atleast_2d(per_frame.chroma), axis=0))
    return np.array(values, dtype=np.float64)


__all__ = [
    "AGGREGATE_NAMES", "FrameFeatures", "LOG_FLOOR", "aggregate_frames", "chroma",
    "energy_entropy", "frame_features", "mfcc", "short_energy", "spectral_centroid_spread",
    "spectral_entropy", "spectral_flux", "spectral_rolloff", "zero_crossing_rate",
]
