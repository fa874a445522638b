import numpy as np
import pytest

from speechpat.audio_io import AudioSignal
from speechpat.errors import SignalTooShort
from speechpat.features import FEATURE_NAMES, ExtractionConfig, extract_features, feature_vector
from speechpat.synth import ClipSpec, synth_clip


def test_schema():
    assert len(FEATURE_NAMES) == 41 == len(set(FEATURE_NAMES))
    assert list(FEATURE_NAMES[:2]) == ["f0_mean", "mfcc_1"]
    assert list(FEATURE_NAMES[-3:]) == ["speaking_duration", "original_duration", "articulation_rate"]


def test_vector_finite_and_ordered():
    sig = synth_clip(ClipSpec(5, ((0.5, 0.4),)))
    d = extract_features(sig)
    assert list(d) == list(FEATURE_NAMES)
    v = feature_vector(sig)
    assert np.all(np.isfinite(v))
    assert d["n_syllables"] == 5 and d["n_pauses"] == 1
    assert d["original_duration"] == pytest.approx(len(sig) / 16000)
    assert 0 <= d["balance"] <= 1
    # silent frames carry an all-zero chroma, so the mean sums to at most 1
    assert 0 < sum(d[f"chroma_{i}"] for i in range(1, 13)) <= 1 + 1e-12


def test_silence_is_finite():
    v = feature_vector(AudioSignal(np.zeros(8000), 16000))
    assert np.all(np.isfinite(v))


def test_config_changes_frames():
    sig = synth_clip(ClipSpec(4))
    a = feature_vector(sig)
    b = feature_vector(sig, ExtractionConfig(frame_ms=40, hop_ms=20))
    assert not np.array_equal(a, b)


def test_too_short():
    with pytest.raises(SignalTooShort):
        feature_vector(AudioSignal(np.zeros(100), 16000))
