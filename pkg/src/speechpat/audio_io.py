"""WAV decoding and short-term framing."""

from dataclasses import dataclass
import struct

import numpy as np

from .errors import MalformedWav, SignalTooShort, UnsupportedFormat

MIN_SAMPLE_RATE = 8000
WINDOW_KINDS = ("rectangular", "hamming")


@dataclass(frozen=True)
class AudioSignal:
    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D sequence")
        if not np.all(np.abs(samples) <= 1.0):
            raise ValueError("amplitudes must lie in [-1, 1]")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate < MIN_SAMPLE_RATE:
            raise UnsupportedFormat(f"sample rate {self.sample_rate} Hz is below {MIN_SAMPLE_RATE}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def duration(self):
        return self.samples.size / self.sample_rate

    def __len__(self):
        return self.samples.size


@dataclass(frozen=True)
class FrameSequence:
    frames: np.ndarray  # (n_frames, frame_len)
    frame_len: int
    hop_len: int
    sample_rate: int
    window_kind: str

    def __len__(self):
        return self.frames.shape[0]

    @property
    def starts(self):
        return np.arange(len(self)) * self.hop_len


def to_mono(data):
    """Average channels of an ``(n, channels)`` array; 1-D input passes through."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 1:
        return data
    return data.mean(axis=1)


def _chunks(buf):
    pos = 12
    while pos + 8 <= len(buf):
        cid, size = struct.unpack_from("<4sI", buf, pos)
        yield cid, pos + 8, size
        pos += 8 + size + (size & 1)


def load_wav(path):
    """Read a 16-bit PCM mono/stereo WAV file into an :class:`AudioSignal`."""
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < 12 or buf[:4] != b"RIFF" or buf[8:12] != b"WAVE":
        raise MalformedWav(f"{path}: not a RIFF/WAVE file")

    fmt = None
    data = None
    for cid, start, size in _chunks(buf):
        if cid == b"fmt ":
            if size < 16 or start + 16 > len(buf):
                raise MalformedWav(f"{path}: truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", buf, start)
        elif cid == b"data":
            if start + size > len(buf):
                raise MalformedWav(
                    f"{path}: data chunk declares {size} bytes, only {len(buf) - start} present"
                )
            data = buf[start : start + size]
            break
    if fmt is None:
        raise MalformedWav(f"{path}: missing fmt chunk")
    if data is None:
        raise MalformedWav(f"{path}: missing data chunk")

    tag, channels, rate, _, block_align, bits = fmt
    # 0xFFFE (extensible) is accepted when the payload is still 16-bit PCM
    if tag not in (1, 0xFFFE) or bits != 16:
        raise UnsupportedFormat(f"{path}: only 16-bit PCM is supported (tag={tag}, bits={bits})")
    if channels not in (1, 2):
        raise UnsupportedFormat(f"{path}: {channels} channels (1 or 2 supported)")
    if rate < MIN_SAMPLE_RATE:
        raise UnsupportedFormat(f"{path}: sample rate {rate} Hz is below {MIN_SAMPLE_RATE}")
    if block_align != 2 * channels or len(data) % block_align:
        raise MalformedWav(f"{path}: data size is not a whole number of frames")
    if not data:
        raise MalformedWav(f"{path}: empty data chunk")

    pcm = np.frombuffer(data, dtype="<i2").reshape(-1, channels)
    return AudioSignal(to_mono(pcm / 32768.0), rate)


def write_wav(path, signal):
    """Write ``signal`` as 16-bit PCM mono.  Samples are clipped and rounded."""
    pcm = np.clip(np.round(signal.samples * 32768.0), -32768, 32767).astype("<i2")
    payload = pcm.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(payload), b"WAVE",
        b"fmt ", 16, 1, 1, signal.sample_rate, 2 * signal.sample_rate, 2, 16,
        b"data", len(payload),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def hamming(length):
    if length == 1:
        return np.ones(1)
    n = np.arange(length)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (length - 1))


def ms_to_samples(ms, sample_rate):
    return int(round(ms * sample_rate / 1000.0))


def frame_signal(signal, frame_ms=50.0, hop_ms=25.0, window_kind="hamming"):
    if not frame_ms >= hop_ms > 0:
        raise ValueError("need frame_ms >= hop_ms > 0")
    if window_kind not in WINDOW_KINDS:
        raise ValueError(f"window_kind must be one of {WINDOW_KINDS}")
    frame_len = ms_to_samples(frame_ms, signal.sample_rate)
    hop_len = max(1, ms_to_samples(hop_ms, signal.sample_rate))
    x = signal.samples
    if x.size < frame_len:
        raise SignalTooShort(f"{x.size} samples is shorter than one {frame_len}-sample frame")
    n_frames = (x.size - frame_len) // hop_len + 1
    frames = np.lib.stride_tricks.sliding_window_view(x, frame_len)[::hop_len][:n_frames].copy()
    if window_kind == "hamming":
        frames *= hamming(frame_len)
    return FrameSequence(frames, frame_len, hop_len, signal.sample_rate, window_kind)


def resample_check(signal):
    """Validate the sample rate and return the signal unchanged (no resampling)."""
    if signal.sample_rate < MIN_SAMPLE_RATE:
        raise UnsupportedFormat(f"sample rate {signal.sample_rate} Hz is below {MIN_SAMPLE_RATE}")
    return signal
