import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from speechpat.audio_io import AudioSignal
from speechpat.prosody import analyze_prosody, detect_syllable_nuclei, segment_speech
from speechpat.synth import ClipSpec, clip_layout, synth_clip


def test_pause_recovery():
    spec = ClipSpec(6, ((0.7, 0.5),), f0_base=160)
    sig = synth_clip(spec)
    seg = segment_speech(sig)
    assert seg.n_pauses == 1
    (start, end), = seg.pause_spans
    planted = clip_layout(spec).pause_spans[0]
    assert abs(start - planted[0]) < 0.06 and abs(end - planted[1]) < 0.06


def test_syllables_counted():
    for n in (1, 4, 9):
        assert analyze_prosody(synth_clip(ClipSpec(n))).n_syllables == n


def test_short_gap_is_not_a_pause():
    # two bursts separated by 200 ms of silence
    sr = 16000
    burst = synth_clip(ClipSpec(1, syllable_dur_s=0.25)).samples
    x = np.concatenate([burst, np.zeros(int(0.2 * sr)), burst])
    p = analyze_prosody(AudioSignal(x, sr))
    assert p.n_pauses == 0
    assert p.balance == pytest.approx(1.0)


def test_fully_silent_clip():
    p = analyze_prosody(AudioSignal(np.zeros(16000), 16000))
    assert p.n_syllables == 0 and p.n_pauses == 0
    assert p.speaking_duration == 0.0 and p.balance == 0.0
    assert p.rate_of_speech == 0.0 and p.articulation_rate == 0.0
    assert p.f0_mean == 0.0


def test_durations_consistent():
    sig = synth_clip(ClipSpec(8, ((0.5, 0.4), (1.4, 0.6))))
    seg = segment_speech(sig)
    p = analyze_prosody(sig)
    paused = sum(b - a for a, b in seg.pause_spans)
    assert p.speaking_duration + paused == pytest.approx(p.original_duration)
    assert p.original_duration == pytest.approx(len(sig) / sig.sample_rate)
    assert p.balance == pytest.approx(p.speaking_duration / p.original_duration)
    assert p.rate_of_speech <= p.articulation_rate


def test_f0_mean_near_contour():
    p = analyze_prosody(synth_clip(ClipSpec(10, f0_base=180, f0_variation=5)))
    assert p.f0_mean == pytest.approx(180, abs=8)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 1.4))
def test_gain_invariance(alpha):
    sig = synth_clip(ClipSpec(7, ((0.6, 0.45),), amplitude=0.6))
    scaled = AudioSignal(np.clip(sig.samples * alpha, -1, 1), sig.sample_rate)
    a, b = analyze_prosody(sig), analyze_prosody(scaled)
    assert (a.n_syllables, a.n_pauses) == (b.n_syllables, b.n_pauses)


def test_concatenation_adds_counts():
    a = synth_clip(ClipSpec(4, ((0.3, 0.4),), seed=1))
    b = synth_clip(ClipSpec(5, ((0.5, 0.5),), seed=2))
    gap = np.zeros(int(0.5 * 16000))
    joined = AudioSignal(np.concatenate([a.samples, gap, b.samples]), 16000)
    pa, pb, pj = analyze_prosody(a), analyze_prosody(b), analyze_prosody(joined)
    assert pj.n_syllables == pa.n_syllables + pb.n_syllables
    assert pj.n_pauses == pa.n_pauses + pb.n_pauses + 1


def test_nuclei_are_voiced_and_loud():
    sig = synth_clip(ClipSpec(6))
    seg = segment_speech(sig)
    nuc = detect_syllable_nuclei(sig, seg)
    assert np.all(seg.voiced_mask[nuc.frames])
    assert np.all(~seg.silent_mask[nuc.frames])
    assert np.all(np.diff(nuc.times) > 0)


def test_longer_min_pause_drops_pauses():
    sig = synth_clip(ClipSpec(6, ((0.5, 0.4),)))
    assert analyze_prosody(sig).n_pauses == 1
    assert analyze_prosody(sig, min_pause_s=0.6).n_pauses == 0
