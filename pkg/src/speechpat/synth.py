"""Deterministic synthetic speech: harmonic vowel bursts, planted pauses, labelled corpora.

Each syllable is a four-harmonic tone (relative amplitudes 1, 1/2, 1/4, 1/8)
under a raised-cosine envelope, following a slow sinusoidal pitch contour.
Syllables are separated by 60 ms of digital silence unless a planted pause
takes that slot.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import AudioSignal, write_wav
from .dsp import PITCH_FMAX, PITCH_FMIN
from .errors import InvalidSpec

SYLLABLE_GAP_S = 0.06
HARMONIC_AMPS = (1.0, 0.5, 0.25, 0.125)
CONTOUR_HZ = 0.5


@dataclass(frozen=True)
class ClipSpec:
    n_syllables: int
    pause_spans: tuple = ()  # (start_s, dur_s); each fills the first syllable gap at or after start_s
    f0_base: float = 150.0
    f0_variation: float = 30.0
    syllable_dur_s: float = 0.18
    amplitude: float = 0.7
    sample_rate: int = 16000
    seed: int = 0

    def validate(self):
        if self.n_syllables < 0:
            raise InvalidSpec("n_syllables must be >= 0")
        if self.f0_variation < 0 or self.f0_base - self.f0_variation < PITCH_FMIN \
                or self.f0_base + self.f0_variation > PITCH_FMAX:
            raise InvalidSpec(
                f"pitch contour {self.f0_base}±{self.f0_variation} Hz leaves [{PITCH_FMIN}, {PITCH_FMAX}]"
            )
        if not 0.0 < self.amplitude <= 1.0:
            raise InvalidSpec("amplitude must lie in (0, 1]")
        if self.syllable_dur_s <= 0:
            raise InvalidSpec("syllable_dur_s must be positive")
        if self.sample_rate < 8000:
            raise InvalidSpec("sample_rate must be >= 8000")
        spans = sorted(self.pause_spans)
        for start, dur in spans:
            if start < 0 or dur <= 0:
                raise InvalidSpec(f"bad pause span ({start}, {dur})")
        for (s0, d0), (s1, _) in zip(spans, spans[1:]):
            if s0 + d0 > s1:
                raise InvalidSpec("pause spans overlap")


@dataclass(frozen=True)
class ClipLayout:
    syllable_onsets: np.ndarray
    pause_spans: list  # realised (start_s, end_s)
    duration: float


def clip_layout(spec: ClipSpec) -> ClipLayout:
    spec.validate()
    pending = sorted(spec.pause_spans)
    if spec.n_syllables == 0:
        total = sum(d for _, d in pending) or spec.syllable_dur_s
        return ClipLayout(np.zeros(0), [], float(total))
    onsets, pauses = [], []
    cursor = 0.0
    for i in range(spec.n_syllables):
        if i > 0:
            if pending and pending[0][0] <= cursor:
                _, dur = pending.pop(0)
                pauses.append((cursor, cursor + dur))
                cursor += dur
            else:
                cursor += SYLLABLE_GAP_S
        onsets.append(cursor)
        cursor += spec.syllable_dur_s
    if pending:
        raise InvalidSpec(f"{len(pending)} pause(s) start after the last syllable boundary")
    return ClipLayout(np.array(onsets), pauses, cursor)


def synth_clip(spec: ClipSpec) -> AudioSignal:
    layout = clip_layout(spec)
    sr = spec.sample_rate
    n = int(round(layout.duration * sr))
    out = np.zeros(n)
    if spec.n_syllables == 0:
        return AudioSignal(out, sr)

    rng = np.random.default_rng(spec.seed)
    contour_phase = rng.uniform(0.0, 2.0 * np.pi)
    gains = rng.uniform(0.85, 1.0, spec.n_syllables)

    t = np.arange(n) / sr
    f0 = spec.f0_base + spec.f0_variation * np.sin(2.0 * np.pi * CONTOUR_HZ * t + contour_phase)
    phase = 2.0 * np.pi * np.cumsum(f0) / sr
    voice = sum(a * np.sin((k + 1) * phase) for k, a in enumerate(HARMONIC_AMPS))
    voice *= spec.amplitude / sum(HARMONIC_AMPS)

    seg_len = int(round(spec.syllable_dur_s * sr))
    env = 0.5 * (1.0 - np.cos(2.0 * np.pi * np.arange(seg_len) / seg_len))
    for onset, g in zip(layout.syllable_onsets, gains):
        a = int(round(onset * sr))
        b = min(a + seg_len, n)
        out[a:b] = g * env[: b - a] * voice[a:b]
    return AudioSignal(np.clip(out, -1.0, 1.0), sr)


@dataclass(frozen=True)
class CorpusSpec:
    n_clips: int
    class_balance: float = 0.5
    separation: float = 1.0
    seed: int = 0
    sample_rate: int = 16000

    def validate(self, k=5):
        if self.n_clips < 2 * k:
            raise InvalidSpec(f"need at least {2 * k} clips for {k}-fold use")
        if not 0.0 < self.class_balance < 1.0:
            raise InvalidSpec("class_balance must lie in (0, 1)")
        if self.separation < 0:
            raise InvalidSpec("separation must be >= 0")


@dataclass
class CorpusClip:
    id: str
    label: int
    score: float
    spec: ClipSpec
    layout: ClipLayout = field(repr=False)


def draw_clip_params(rng, shift, sample_rate, seed):
    """Sample a ClipSpec; ``shift`` >= 0 slows speech, flattens pitch, and lengthens pauses."""
    n_syl = int(rng.integers(8, 15))
    syl_dur = rng.uniform(0.14, 0.20) + 0.04 * shift
    f0_base = rng.uniform(140.0, 220.0)
    f0_var = max(5.0, rng.uniform(30.0, 60.0) - 12.0 * shift)
    amplitude = rng.uniform(0.4, 0.9)
    n_pauses = int(rng.integers(1, 3)) + int(shift // 2)
    n_pauses = min(n_pauses, n_syl - 1)
    boundaries = np.sort(rng.choice(np.arange(1, n_syl), size=n_pauses, replace=False))
    durs = rng.uniform(0.35, 0.55, n_pauses) + 0.1 * shift

    # place each pause half a gap before the cursor position of its boundary
    spans, cursor, k = [], 0.0, 0
    for i in range(1, n_syl):
        cursor += syl_dur
        if k < n_pauses and boundaries[k] == i:
            spans.append((max(0.0, cursor - SYLLABLE_GAP_S / 2), float(durs[k])))
            cursor += durs[k]
            k += 1
        else:
            cursor += SYLLABLE_GAP_S
    return ClipSpec(n_syl, tuple(spans), f0_base, f0_var, syl_dur, amplitude, sample_rate, seed)


def build_corpus(spec: CorpusSpec):
    """Draw labels, scores and clip specs (no audio rendering)."""
    spec.validate()
    n_pos = int(round(spec.n_clips * spec.class_balance))
    labels = np.random.default_rng(spec.seed).permutation(
        np.array([1] * n_pos + [0] * (spec.n_clips - n_pos))
    )
    clips = []
    for i, label in enumerate(labels):
        rng = np.random.default_rng([spec.seed, i])
        score = rng.uniform(0.5, 1.0) if label else rng.uniform(0.0, 0.5)
        # severity scales the shift inside each class; separation 0 removes it entirely
        shift = spec.separation * (label + 2.0 * score)
        clip_seed = int(rng.integers(0, 2**31 - 1))
        cspec = draw_clip_params(rng, shift, spec.sample_rate, clip_seed)
        clips.append(CorpusClip(f"clip_{i:03d}", int(label), float(score), cspec, clip_layout(cspec)))
    return clips


def synth_corpus(spec: CorpusSpec, out_dir):
    """Render WAVs and ``manifest.csv`` into ``out_dir``; return the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    clips = build_corpus(spec)
    manifest = out_dir / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "path", "label", "score"])
        for clip in clips:
            name = f"{clip.id}.wav"
            write_wav(out_dir / name, synth_clip(clip.spec))
            writer.writerow([clip.id, name, clip.label, repr(clip.score)])
    return manifest
