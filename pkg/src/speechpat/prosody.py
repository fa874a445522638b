"""Recording-level prosody: pauses, syllable nuclei, durations, rates, mean F0.

Syllables are counted with the intensity-peak method: local maxima of the
frame intensity contour that clear the silence threshold, are separated from
the previously accepted peak by a dip of at least ``min_dip_db`` and sit in a
voiced frame.
"""

from dataclasses import dataclass

import numpy as np

from .audio_io import frame_signal
from .dsp import LOG_FLOOR, estimate_pitch_batch

SILENCE_DB_BELOW_PEAK = 25.0
MIN_PAUSE_S = 0.3
MIN_DIP_DB = 2.0
# frames at or below this mean-square are digital silence regardless of the peak
ABSOLUTE_SILENCE = 1e-10


@dataclass(frozen=True)
class SpeechSegmentation:
    voiced_mask: np.ndarray
    intensity_db: np.ndarray
    pause_spans: list
    speech_spans: list
    silent_mask: np.ndarray
    f0: np.ndarray  # NaN where unvoiced
    frame_times: np.ndarray  # frame centres, seconds
    threshold_db: float
    duration: float

    @property
    def n_pauses(self):
        return len(self.pause_spans)

    @property
    def speaking_duration(self):
        return float(sum(end - start for start, end in self.speech_spans))


@dataclass(frozen=True)
class SyllableNuclei:
    count: int
    times: np.ndarray
    frames: np.ndarray


@dataclass(frozen=True)
class ProsodyFeatures:
    f0_mean: float
    n_syllables: int
    n_pauses: int
    rate_of_speech: float
    articulation_rate: float
    speaking_duration: float
    original_duration: float
    balance: float


def _runs(mask):
    """(start, stop) index pairs of maximal True runs."""
    padded = np.concatenate([[False], mask, [False]])
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    return list(zip(edges[::2], edges[1::2]))


def segment_speech(signal, silence_db_below_peak=SILENCE_DB_BELOW_PEAK, min_pause_s=MIN_PAUSE_S,
                   frame_ms=50.0, hop_ms=25.0):
    fs = frame_signal(signal, frame_ms, hop_ms, "rectangular")
    sr = signal.sample_rate
    power = np.mean(fs.frames ** 2, axis=1)
    intensity = 10.0 * np.log10(power + LOG_FLOOR)
    f0, voiced, _ = estimate_pitch_batch(fs.frames, sr)

    threshold = float(intensity.max() - silence_db_below_peak)
    silent = (intensity < threshold) | (power <= ABSOLUTE_SILENCE)

    duration = signal.duration
    n = len(fs)
    centres = (np.arange(n) * fs.hop_len + fs.frame_len / 2.0) / sr
    # each frame owns the stretch of time closer to its centre than to its neighbours'
    bounds = np.empty(n + 1)
    bounds[0] = 0.0
    bounds[1:-1] = 0.5 * (centres[:-1] + centres[1:])
    bounds[-1] = duration

    pauses, speech = [], []
    if not silent.all():
        is_pause = np.zeros(n, dtype=bool)
        for a, b in _runs(silent):
            if bounds[b] - bounds[a] >= min_pause_s:
                is_pause[a:b] = True
        pauses = [(float(bounds[a]), float(bounds[b])) for a, b in _runs(is_pause)]
        speech = [(float(bounds[a]), float(bounds[b])) for a, b in _runs(~is_pause)]

    return SpeechSegmentation(
        voiced_mask=voiced, intensity_db=intensity, pause_spans=pauses, speech_spans=speech,
        silent_mask=silent, f0=f0, frame_times=centres, threshold_db=threshold, duration=duration,
    )


def detect_syllable_nuclei(signal, seg, min_dip_db=MIN_DIP_DB):
    """Count syllable nuclei on the segmentation's intensity contour.

    ``signal`` is accepted for interface symmetry; everything needed was
    computed by :func:`segment_speech`.
    """
    x = seg.intensity_db
    padded = np.concatenate([[-np.inf], x, [-np.inf]])
    is_peak = (padded[1:-1] > padded[:-2]) & (padded[1:-1] >= padded[2:])
    candidates = np.flatnonzero(is_peak & ~seg.silent_mask & seg.voiced_mask)

    accepted = []
    for i in candidates:
        if accepted:
            prev = accepted[-1]
            if x[i] - x[prev:i + 1].min() < min_dip_db:
                continue
        accepted.append(int(i))
    frames = np.array(accepted, dtype=np.int64)
    return SyllableNuclei(len(accepted), seg.frame_times[frames], frames)


def compute_prosody(signal, seg, nuclei):
    original = signal.duration
    speaking = seg.speaking_duration
    n_syl = int(nuclei.count)
    voiced_f0 = seg.f0[seg.voiced_mask]
    return ProsodyFeatures(
        f0_mean=float(voiced_f0.mean()) if voiced_f0.size else 0.0,
        n_syllables=n_syl,
        n_pauses=seg.n_pauses,
        rate_of_speech=n_syl / original,
        articulation_rate=n_syl / speaking if speaking > 0 else 0.0,
        speaking_duration=speaking,
        original_duration=original,
        balance=speaking / original,
    )


def analyze_prosody(signal, silence_db_below_peak=SILENCE_DB_BELOW_PEAK, min_pause_s=MIN_PAUSE_S,
                    min_dip_db=MIN_DIP_DB, frame_ms=50.0, hop_ms=25.0):
    seg = segment_speech(signal, silence_db_below_peak, min_pause_s, frame_ms, hop_ms)
    nuclei = detect_syllable_nuclei(signal, seg, min_dip_db)
    return compute_prosody(signal, seg, nuclei)
