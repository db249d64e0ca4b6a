from __future__ import annotations

import csv
import math

import numpy as np
import pytest

from hubbard_qre.errors import SpecificationError
from hubbard_qre.signal_lab import (
    SIX_TONE_FREQUENCIES,
    SWEEP_EPSILON,
    SWEEP_T_MAX,
    PeakSet,
    SignalSpec,
    SweepResult,
    ThresholdPolicy,
    draw_signal_sets,
    inject_noise,
    noise_signs,
    recovered_count,
    resolution_sweep,
    score_recovery,
    spectrum,
    spectrum_peaks,
    synthesize,
)


def direct_dft(x: np.ndarray) -> np.ndarray:
    n = len(x)
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) @ x


def test_sweep_grids():
    assert len(SWEEP_T_MAX) == 38 and SWEEP_T_MAX[0] == 70 and SWEEP_T_MAX[-1] == 995
    assert len(SWEEP_EPSILON) == 30 and SWEEP_EPSILON[0] == 0.01 and SWEEP_EPSILON[-1] == pytest.approx(0.59)


def test_constant_signal_single_peak_at_zero():
    trace = synthesize(SignalSpec((0.0,), (1.0,), 1.0, 50.0))
    np.testing.assert_allclose(trace.clean, 1.0)
    peaks = spectrum_peaks(trace)
    assert len(peaks) == 1
    assert peaks.frequencies[0] == 0.0
    assert peaks.amplitudes[0] == pytest.approx(1.0)


def test_equal_frequencies_add_linearly():
    a = synthesize(SignalSpec((0.3, 0.3), (1.0, 1.0), 1.5, 60.0)).clean
    b = synthesize(SignalSpec((0.3,), (2.0,), 1.5, 60.0)).clean
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_sample_grid_includes_endpoint():
    spec = SignalSpec((0.1,), (1.0,), 1.5, 700.0)
    assert spec.n_samples == 467
    assert spec.times[-1] <= 700.0
    assert spec.bin_width == pytest.approx(2 * math.pi / (467 * 1.5))


def test_nyquist_violation_rejected():
    with pytest.raises(SpecificationError):
        SignalSpec((2.2,), (1.0,), 1.5, 100.0)
    with pytest.raises(SpecificationError):
        SignalSpec((0.1,), (1.0, 2.0), 1.5, 100.0)


def test_spectrum_matches_direct_dft():
    rng = np.random.default_rng(3)
    x = rng.normal(size=37) + 1j * rng.normal(size=37)
    freqs, mags = spectrum(x, 0.4)
    ref = np.abs(direct_dft(x)) / 37
    order = np.argsort(np.fft.fftfreq(37))
    np.testing.assert_allclose(mags, ref[order], atol=1e-12)
    assert np.all(np.diff(freqs) > 0)


def test_noise_zero_is_identity_and_half_displaces_each_component():
    clean = synthesize(SignalSpec(SIX_TONE_FREQUENCIES, (1.0,) * 6, 1.5, 100.0))
    assert np.array_equal(inject_noise(clean, 0.0, 1).noisy, clean.clean)
    noisy = inject_noise(clean, 0.5, 1)
    d = noisy.noisy - clean.clean
    np.testing.assert_allclose(np.abs(d.real), 0.5, atol=1e-12)
    np.testing.assert_allclose(np.abs(d.imag), 0.5, atol=1e-12)
    assert np.array_equal(inject_noise(clean, 0.5, 1).noisy, noisy.noisy)
    assert not np.array_equal(inject_noise(clean, 0.5, 2).noisy, noisy.noisy)
    with pytest.raises(SpecificationError):
        inject_noise(clean, -0.1, 1)


def test_noise_signs_prefix_consistent():
    long = noise_signs([0, 1, 2], 500)
    short = noise_signs([0, 1, 2], 80)
    assert np.array_equal(long[:80], short)
    assert set(np.unique(long)) == {-1.0, 1.0}


def test_tones_clean_long_window_resolves_all_tones():
    spec = SignalSpec(SIX_TONE_FREQUENCIES, (1.0,) * 6, 1.5, 700.0)
    peaks = spectrum_peaks(synthesize(spec))
    assert len(peaks) == 6
    for w in SIX_TONE_FREQUENCIES:
        assert np.min(np.abs(peaks.frequencies - w)) <= 2 * math.pi / 700
    assert recovered_count(SIX_TONE_FREQUENCIES, peaks, 0.01) == 6


def test_peaks_lie_on_grid_and_above_threshold():
    spec = SignalSpec(SIX_TONE_FREQUENCIES, (1.0,) * 6, 1.5, 300.0)
    peaks = spectrum_peaks(inject_noise(synthesize(spec), 0.3, 4))
    grid = peaks.frequencies / peaks.bin_width
    np.testing.assert_allclose(grid, np.round(grid), atol=1e-9)
    assert np.all(peaks.amplitudes > peaks.threshold)


def test_absolute_threshold_policy_can_empty_the_set():
    trace = synthesize(SignalSpec((0.5,), (1.0,), 1.5, 90.0))
    assert len(spectrum_peaks(trace, policy=ThresholdPolicy(absolute=10.0))) == 0
    with pytest.raises(SpecificationError):
        spectrum_peaks(np.array([]), 1.0)


def _peakset(freqs, amps, bin_width):
    return PeakSet(np.array(freqs, float), np.array(amps, float), 0.0, bin_width)


def test_exact_recovery_scores_zero():
    spec = SignalSpec((-0.5, 0.5), (1.0, 0.7), 1.5, 100.0)
    score = score_recovery(spec, _peakset([-0.5, 0.5], [1.0, 0.7], spec.bin_width))
    assert score.freq_error == 0 and score.joint_error == 0
    assert (score.matched, score.missed, score.spurious) == (2, 0, 0)


def test_one_bin_shift_among_six():
    spec = SignalSpec(SIX_TONE_FREQUENCIES, (1.0,) * 6, 1.5, 700.0)
    b = spec.bin_width
    found = list(SIX_TONE_FREQUENCIES)
    found[2] += b
    score = score_recovery(spec, _peakset(found, [1.0] * 6, b))
    assert score.freq_error == pytest.approx(b / 6, rel=1e-12)
    assert score.joint_error == pytest.approx(b / 6, rel=1e-12)


def test_missed_and_spurious_penalties():
    spec = SignalSpec((-1.0, 1.0), (1.0, 0.5), 1.5, 100.0)
    b = spec.bin_width
    score = score_recovery(spec, _peakset([-1.0, 0.2], [0.9, 0.3], b))
    assert (score.matched, score.missed, score.spurious) == (1, 1, 1)
    assert score.freq_error == pytest.approx(2 * b / 2)
    assert score.joint_error == pytest.approx(score.freq_error + (0.1 + 0.5 + 0.3) / 2)


def test_greedy_matching_prefers_closest_pair():
    spec = SignalSpec((0.0, 0.05), (1.0, 1.0), 1.5, 100.0)
    b = spec.bin_width
    score = score_recovery(spec, _peakset([0.04], [1.0], b))
    assert score.matched == 1 and score.missed == 1
    assert score.freq_error == pytest.approx((0.01 + b) / 2)


def test_signal_sets_deterministic_and_distinct():
    sets = draw_signal_sets(5, 11)
    assert sets == draw_signal_sets(5, 11)
    for w, a in sets:
        assert len(set(w)) == 6 and all(0.4 <= x <= 1.0 for x in a)


def test_small_sweep_shape_and_csv(tmp_path):
    result = resolution_sweep(T_grid=(70.0, 300.0), eps_grid=(0.01, 0.5), n_sets=3, n_realizations=4, seed=2)
    assert result.freq_error.shape == (2, 2)
    assert result.samples == 12
    again = resolution_sweep(T_grid=(70.0, 300.0), eps_grid=(0.01, 0.5), n_sets=3, n_realizations=4, seed=2)
    assert np.array_equal(result.freq_error, again.freq_error)
    path = tmp_path / "sweep.csv"
    result.to_csv(path)
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["T_max", "epsilon", "freq_error", "joint_error", "missed", "spurious"]
    assert len(rows) == 4


def test_sweep_cell_equals_single_trace_scores():
    sets = draw_signal_sets(2, 5)
    result = resolution_sweep(T_grid=(200.0,), eps_grid=(0.4,), n_sets=2, n_realizations=3, seed=5, reference="given")
    total = 0.0
    for s, (w, a) in enumerate(sets):
        spec = SignalSpec(w, a, 1.5, 200.0)
        clean = synthesize(spec)
        for r in range(3):
            noisy = clean.clean + 0.4 * (lambda z: z[:, 0] + 1j * z[:, 1])(noise_signs([5, 1, s, r], spec.n_samples))
            total += score_recovery(spec, spectrum_peaks(noisy, 1.5)).freq_error
    assert result.freq_error[0, 0] == pytest.approx(total / 6, rel=1e-12)


def test_clean_reference_scores_zero_without_noise():
    result = resolution_sweep(T_grid=(150.0, 400.0), eps_grid=(0.0,), n_sets=3, n_realizations=2, seed=1)
    np.testing.assert_allclose(result.freq_error, 0.0)


def test_sweep_rejects_bad_reference():
    with pytest.raises(SpecificationError):
        resolution_sweep(T_grid=(100.0,), eps_grid=(0.1,), n_sets=1, n_realizations=1, reference="truth")


def test_monotonicity_violation_counter():
    e = np.array([[3.0, 4.0, 3.5], [2.0, 2.5, 3.0], [2.5, 2.6, 2.7]])
    r = SweepResult(np.arange(3.0), np.arange(3.0), e, np.zeros_like(e), e, e, e, "given", 1)
    # T axis: 2 -> 2.5, 2.5 -> 2.6 increase; epsilon axis: 4.0 -> 3.5 decreases
    assert r.monotonicity_violations() == {"T_max": (2, 6), "epsilon": (1, 6)}
    r.freq_error_sem = np.full_like(e, 1.0)
    assert r.monotonicity_violations(3.0) == {"T_max": (0, 6), "epsilon": (0, 6)}
