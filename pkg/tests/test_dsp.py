import numpy as np
import pytest
import scipy.fft
from hypothesis import given, settings, strategies as st

from oracles import direct_dft_magnitude
from speechpat.dsp import (
    build_mel_filterbank, dct2_basis, dct2_orthonormal, estimate_pitch, estimate_pitch_batch,
    hz_to_mel, idct2_orthonormal, magnitude_spectrum,
)


def test_constant_frame_has_only_dc():
    np.testing.assert_allclose(magnitude_spectrum([1, 1, 1, 1]).bins, [4, 0, 0], atol=1e-12)


def test_on_bin_cosine():
    x = np.cos(2 * np.pi * np.arange(8) / 8)
    bins = magnitude_spectrum(x).bins
    assert np.argmax(bins) == 1
    assert bins[1] == pytest.approx(4.0, abs=1e-12)


@pytest.mark.parametrize("n", [7, 8, 64, 400, 401])
def test_matches_direct_dft(n):
    x = np.random.default_rng(n).standard_normal(n)
    ref = direct_dft_magnitude(x)
    got = magnitude_spectrum(x).bins
    assert got.shape == (n // 2 + 1,)
    np.testing.assert_allclose(got, ref, rtol=1e-9, atol=1e-9 * ref.max())


@pytest.mark.parametrize("n", [8, 9, 400])
def test_parseval(n):
    x = np.random.default_rng(1).standard_normal(n)
    X = magnitude_spectrum(x).bins
    if n % 2 == 0:
        total = X[0] ** 2 + 2 * np.sum(X[1:-1] ** 2) + X[-1] ** 2
    else:
        total = X[0] ** 2 + 2 * np.sum(X[1:] ** 2)
    assert np.sum(x ** 2) == pytest.approx(total / n, rel=1e-9)


def test_bin_spacing():
    assert magnitude_spectrum(np.zeros(400), 8000).bin_hz == 20.0


@given(st.floats(0.01, 100))
def test_spectrum_gain_equivariant(alpha):
    x = np.random.default_rng(2).standard_normal(64)
    np.testing.assert_allclose(magnitude_spectrum(alpha * x).bins, alpha * magnitude_spectrum(x).bins,
                               rtol=1e-9, atol=1e-12)


def test_mel_scale_values():
    assert hz_to_mel(700) == pytest.approx(781.17, abs=0.01)
    assert hz_to_mel(0) == 0.0


@pytest.mark.parametrize("sr,n", [(8000, 400), (16000, 800), (44100, 2205)])
def test_filterbank_shape_and_overlap(sr, n):
    fb = build_mel_filterbank(sr, n, 26)
    assert fb.weights.shape == (26, n // 2 + 1)
    assert np.all(fb.weights >= 0)
    assert np.all(fb.weights.max(axis=1) > 0)
    # right edge of filter i is the centre of filter i + 1
    np.testing.assert_allclose(fb.edges[:-1, 2], fb.edges[1:, 1])
    np.testing.assert_allclose(fb.edges[0, 0], 0.0)
    np.testing.assert_allclose(fb.edges[-1, 2], sr / 2)
    freqs = np.arange(n // 2 + 1) * sr / n
    for row, (lo, _, hi) in zip(fb.weights, fb.edges):
        assert np.all(row[(freqs < lo) | (freqs > hi)] == 0)
        nz = np.flatnonzero(row)
        peak = np.argmax(row)
        assert np.all(np.diff(row[nz[0]:peak + 1]) >= 0) and np.all(np.diff(row[peak:nz[-1] + 1]) <= 0)


def test_filterbank_needs_fourteen_filters():
    with pytest.raises(ValueError):
        build_mel_filterbank(16000, 800, 13)


def test_dct_constant_vector():
    out = dct2_orthonormal(np.full(10, 3.0))
    assert out[0] == pytest.approx(3.0 * np.sqrt(10))
    np.testing.assert_allclose(out[1:], 0, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 13, 26])
def test_dct_orthonormal(n):
    B = dct2_basis(n)
    np.testing.assert_allclose(B @ B.T, np.eye(n), atol=1e-9)
    v = np.random.default_rng(n).standard_normal(n)
    np.testing.assert_allclose(idct2_orthonormal(dct2_orthonormal(v)), v, atol=1e-9)
    np.testing.assert_allclose(dct2_orthonormal(v), scipy.fft.dct(v, norm="ortho"), atol=1e-9)


def test_pitch_sawtooth():
    n = np.arange(800)
    saw = 2 * ((n * 200 / 16000) % 1) - 1
    est = estimate_pitch(0.5 * saw, 16000)
    assert est.voiced
    assert est.f0_hz == pytest.approx(200, abs=2)
    assert 75 <= est.f0_hz <= 500


def test_pitch_silence_unvoiced():
    est = estimate_pitch(np.zeros(800), 16000)
    assert not est.voiced and est.f0_hz is None


def test_pitch_white_noise_unvoiced():
    est = estimate_pitch(np.random.default_rng(0).standard_normal(800) * 0.3, 16000)
    assert not est.voiced
    assert est.confidence < 0.45


def test_pitch_frame_too_short():
    with pytest.raises(ValueError):
        estimate_pitch(np.zeros(300), 16000)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.1, 20.0), st.floats(90, 450))
def test_pitch_gain_invariant(alpha, f0):
    # stays above the absolute silence floor for every alpha drawn
    n = np.arange(800)
    x = 0.3 * (np.sin(2 * np.pi * f0 * n / 16000) + 0.5 * np.sin(4 * np.pi * f0 * n / 16000))
    a = estimate_pitch(x, 16000)
    b = estimate_pitch(alpha * x, 16000)
    assert a.voiced == b.voiced and a.f0_hz == b.f0_hz
    assert a.confidence == pytest.approx(b.confidence, abs=1e-9)


def test_pitch_voicing_consistency():
    rng = np.random.default_rng(5)
    n = np.arange(800)
    frames = np.stack([np.sin(2 * np.pi * f * n / 16000) * a for f, a in
                       zip(rng.uniform(80, 480, 20), rng.uniform(0, 0.5, 20))] +
                      [rng.standard_normal(800) for _ in range(5)])
    f0, voiced, conf = estimate_pitch_batch(frames, 16000)
    assert np.array_equal(voiced, ~np.isnan(f0))
    assert np.all(conf[voiced] >= 0.45)
    assert np.all((f0[voiced] >= 75) & (f0[voiced] <= 500))
    assert np.all((conf >= 0) & (conf <= 1))
