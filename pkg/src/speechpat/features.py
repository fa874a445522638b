"""The canonical 41-slot recording-level feature vector."""

from dataclasses import dataclass

import numpy as np

from .audio_io import frame_signal, hamming
from .dsp import build_mel_filterbank
from .prosody import MIN_DIP_DB, MIN_PAUSE_S, SILENCE_DB_BELOW_PEAK, analyze_prosody
from .shortterm import AGGREGATE_NAMES, aggregate_frames, frame_features

SCHEMA_VERSION = 1

FEATURE_NAMES = (
    ["f0_mean"]
    + [f"mfcc_{i}" for i in range(1, 14)]
    + ["energy", "energy_entropy", "zcr", "rate_of_speech", "n_syllables", "n_pauses", "balance"]
    + ["spectral_centroid", "spectral_spread", "spectral_rolloff", "spectral_flux", "spectral_entropy"]
    + [f"chroma_{i}" for i in range(1, 13)]
    + ["speaking_duration", "original_duration", "articulation_rate"]
)
N_FEATURES = len(FEATURE_NAMES)
assert N_FEATURES == 41


@dataclass(frozen=True)
class ExtractionConfig:
    frame_ms: float = 50.0
    hop_ms: float = 25.0
    silence_db: float = SILENCE_DB_BELOW_PEAK
    min_pause_s: float = MIN_PAUSE_S
    min_dip_db: float = MIN_DIP_DB


def extract_features(signal, config=ExtractionConfig()):
    """Return the 41 features of one recording as a dict in schema order."""
    raw = frame_signal(signal, config.frame_ms, config.hop_ms, "rectangular")
    windowed = raw.frames * hamming(raw.frame_len)
    fb = build_mel_filterbank(signal.sample_rate, raw.frame_len)
    short = dict(zip(AGGREGATE_NAMES, aggregate_frames(
        frame_features(raw.frames, windowed, signal.sample_rate, fb)
    )))
    pros = analyze_prosody(
        signal, config.silence_db, config.min_pause_s, config.min_dip_db, config.frame_ms, config.hop_ms
    )
    values = dict(short)
    values.update(
        f0_mean=pros.f0_mean,
        rate_of_speech=pros.rate_of_speech,
        n_syllables=float(pros.n_syllables),
        n_pauses=float(pros.n_pauses),
        balance=pros.balance,
        speaking_duration=pros.speaking_duration,
        original_duration=pros.original_duration,
        articulation_rate=pros.articulation_rate,
    )
    return {name: float(values[name]) for name in FEATURE_NAMES}


def feature_vector(signal, config=ExtractionConfig()):
    return np.array(list(extract_features(signal, config).values()))
