import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dualbloch.analysis.spectrum import (
    InsufficientDataError,
    Spectrum,
    detect_peaks,
    robustness_q,
    spectral_energy,
    spectrum,
    spectrum_of_series,
    windowed_energy,
)

FS = 10_000.0
T = np.arange(30_000) / FS


def tone(f, amp=1.0, phase=0.0):
    return amp * np.sin(2 * np.pi * f * T + phase)


def test_pure_tone_amplitude_and_frequency():
    peaks = detect_peaks(spectrum_of_series(tone(100.0), FS))
    assert len(peaks) == 1
    assert peaks.dominant.freq == pytest.approx(100.0, abs=0.05)
    assert peaks.dominant.amp == pytest.approx(1.0, rel=0.02)


def test_spectrum_grid_invariants():
    s = spectrum_of_series(tone(100.0), FS)
    assert s.freqs[0] == 0.0 and s.freqs[-1] == pytest.approx(FS / 2)
    assert np.all(np.diff(s.freqs) > 0)
    assert np.all(s.amps >= 0)
    assert s.n_fft == 32768 and s.window_id == "hann"
    assert s.bin_width == pytest.approx(FS / 32768)


def test_constant_signal_has_no_lines():
    s = spectrum_of_series(np.full(4096, 0.37), FS)
    assert np.max(s.amps) < 1e-12
    assert len(detect_peaks(s)) == 0


def test_short_series_rejected():
    with pytest.raises(InsufficientDataError):
        spectrum_of_series(np.ones(1023), FS)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(1024, 5000), elements=st.floats(-1e3, 1e3)))
def test_parseval(x):
    e = windowed_energy(x)
    if e < 1e-20:
        return
    assert spectral_energy(spectrum_of_series(x, FS)) == pytest.approx(e, rel=1e-6)


def test_two_tone_quasi_periodic_lines():
    s = spectrum_of_series(tone(2477.0) + tone(2672.0, 0.8, 1.0), FS)
    peaks = detect_peaks(s)
    assert len(peaks) == 2
    f = sorted(peaks.freqs)
    assert f == pytest.approx([2477.0, 2672.0], abs=0.1)
    assert f[1] - f[0] == pytest.approx(195.0, abs=0.2)


def test_sidebands_below_threshold_do_not_count():
    x = tone(2500.0) + tone(2440.0, 0.1) + tone(2560.0, 0.1)
    assert len(detect_peaks(spectrum_of_series(x, FS), 0.2)) == 1
    assert len(detect_peaks(spectrum_of_series(x, FS), 0.05)) == 3


def test_min_separation_suppresses_neighbours():
    x = tone(1000.0) + tone(1003.0, 0.9)
    s = spectrum_of_series(x, FS)
    assert len(detect_peaks(s, 0.2, min_separation=5.0)) == 1
    assert len(detect_peaks(s, 0.2, min_separation=1.0)) == 2


def test_rel_threshold_precondition():
    s = spectrum_of_series(tone(100.0), FS)
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            detect_peaks(s, bad)


def test_white_noise_peaks_are_few_and_unstable():
    # Monte-Carlo over 100 seeds: spurious lines near the top are rare and wander
    counts, dominant = [], []
    for seed in range(100):
        x = np.random.default_rng(seed).standard_normal(T.size)
        peaks = detect_peaks(spectrum_of_series(x, FS), 0.9)
        counts.append(len(peaks))
        dominant.append(round(peaks.dominant.freq))
    assert np.median(counts) <= 5
    assert len(set(dominant)) >= 90


def test_limit_cycle_has_single_sharp_line(limit_cycle_run):
    params, traj = limit_cycle_run
    peaks = detect_peaks(spectrum(traj))
    assert len(peaks) == 1
    lo, hi = params.larmor_band_hz
    assert lo <= peaks.dominant.freq <= hi


def _spec(amps):
    amps = np.asarray(amps, float)
    return Spectrum(np.arange(amps.size, dtype=float), amps, 1.0, "hann", 1.0, 2 * (amps.size - 1))


def test_q_identity_is_exactly_one(limit_cycle_run):
    s = spectrum(limit_cycle_run[1])
    assert robustness_q(s, s) == 1.0


def test_q_disjoint_support_is_zero():
    assert robustness_q(_spec([0, 1, 2, 0, 0]), _spec([0, 0, 0, 3, 1])) == 0.0


@settings(max_examples=200)
@given(st.lists(st.tuples(st.floats(0, 1e3), st.floats(0, 1e3)), min_size=3, max_size=50))
def test_q_symmetric_and_bounded(pairs):
    a, b = (np.array(v) for v in zip(*pairs))
    if not a.any() or not b.any():
        return
    q_ab = robustness_q(_spec(a), _spec(b))
    assert q_ab == robustness_q(_spec(b), _spec(a))
    assert 0.0 <= q_ab <= 1.0


def test_q_rejects_mismatched_grids():
    with pytest.raises(ValueError):
        robustness_q(_spec([0, 1, 2]), _spec([0, 1, 2, 3]))
