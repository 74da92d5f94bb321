"""Magnitude spectra of the probe signal, spectral-line detection and the Q overlap metric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..integrator import Trajectory

MIN_SPECTRUM_SAMPLES = 1024


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class Spectrum:
    """One-sided magnitude spectrum.

    Amplitudes are window-corrected so a unit sinusoid centred on a bin reads 1.0.
    ``window_sum`` and ``n_fft`` are kept so the unscaled FFT can be recovered.
    """

    freqs: np.ndarray
    amps: np.ndarray
    bin_width: float
    window_id: str
    window_sum: float
    n_fft: int

    @property
    def nyquist(self) -> float:
        return float(self.freqs[-1])

    def raw_magnitudes(self) -> np.ndarray:
        return self.amps * (0.5 * self.window_sum)


@dataclass(frozen=True)
class Peak:
    freq: float
    amp: float
    index: int


@dataclass(frozen=True)
class PeakSet:
    peaks: tuple[Peak, ...]  # descending amplitude

    def __len__(self) -> int:
        return len(self.peaks)

    def __iter__(self):
        return iter(self.peaks)

    @property
    def freqs(self) -> list[float]:
        return [p.freq for p in self.peaks]

    @property
    def dominant(self) -> Peak | None:
        return self.peaks[0] if self.peaks else None


def spectrum_of_series(x, sample_rate: float) -> Spectrum:
    """Mean-removed, Hann-windowed, zero-padded (next power of two) magnitude spectrum."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if n < MIN_SPECTRUM_SAMPLES:
        raise InsufficientDataError(
            f"spectrum needs >= {MIN_SPECTRUM_SAMPLES} samples, got {n}"
        )
    window = np.hanning(n)
    n_fft = 1 << int(np.ceil(np.log2(n)))
    windowed = (x - x.mean()) * window
    mags = np.abs(np.fft.rfft(windowed, n_fft))
    wsum = float(window.sum())
    return Spectrum(
        freqs=np.fft.rfftfreq(n_fft, 1.0 / sample_rate),
        amps=mags * (2.0 / wsum),
        bin_width=sample_rate / n_fft,
        window_id="hann",
        window_sum=wsum,
        n_fft=n_fft,
    )


def spectrum(traj: Trajectory) -> Spectrum:
    return spectrum_of_series(traj.mx, traj.sample_rate)


def windowed_energy(x) -> float:
    """Sum of squared Hann-windowed, mean-removed samples (Parseval reference)."""
    x = np.asarray(x, dtype=np.float64)
    return float(np.sum(((x - x.mean()) * np.hanning(x.size)) ** 2))


def spectral_energy(spec: Spectrum) -> float:
    """Parseval partner of :func:`windowed_energy` computed from the one-sided spectrum."""
    mag2 = spec.raw_magnitudes() ** 2
    weights = np.full(mag2.size, 2.0)
    weights[0] = 1.0
    if spec.n_fft % 2 == 0:
        weights[-1] = 1.0
    return float(np.sum(weights * mag2) / spec.n_fft)


def _refine(a: np.ndarray, freqs: np.ndarray, i: int) -> tuple[float, float]:
    """Apex of a parabola through the log magnitudes of bins ``i-1, i, i+1``.

    Removes the Hann scalloping loss of a line that falls between bins.
    """
    l, c, r = a[i - 1], a[i], a[i + 1]
    if l <= 0.0 or r <= 0.0:
        return float(freqs[i]), float(c)
    ll, lc, lr = np.log(l), np.log(c), np.log(r)
    denom = ll - 2.0 * lc + lr
    if denom >= 0.0:
        return float(freqs[i]), float(c)
    delta = 0.5 * (ll - lr) / denom
    df = freqs[1] - freqs[0]
    return float(freqs[i] + delta * df), float(np.exp(lc - 0.25 * (ll - lr) * delta))


def detect_peaks(spec: Spectrum, rel_threshold: float = 0.2,
                 min_separation: float = 5.0) -> PeakSet:
    """Local maxima above ``rel_threshold * max`` with non-maximum suppression.

    The DC and Nyquist bins never count as lines. Within ``min_separation`` Hz
    of a stronger accepted peak, weaker maxima are dropped. Reported frequency
    and amplitude are interpolated between bins; ``index`` is the raw bin.
    """
    if not 0.0 < rel_threshold < 1.0:
        raise ValueError("rel_threshold must lie in (0, 1)")
    a = spec.amps
    if a.size < 3:
        raise InsufficientDataError("empty spectrum")
    inner = a[1:-1]
    top = float(inner.max())
    if top <= 0.0:
        return PeakSet(())
    is_max = (inner >= a[:-2]) & (inner > a[2:]) & (inner >= rel_threshold * top)
    idx = np.nonzero(is_max)[0] + 1
    idx = idx[np.argsort(-a[idx], kind="stable")]
    kept: list[Peak] = []
    for i in idx:
        f = spec.freqs[i]
        if all(abs(f - spec.freqs[p.index]) >= min_separation for p in kept):
            freq, amp = _refine(a, spec.freqs, int(i))
            kept.append(Peak(freq, amp, int(i)))
    return PeakSet(tuple(kept))


def robustness_q(spec_clean: Spectrum, spec_noisy: Spectrum) -> float:
    """Normalized overlap of two magnitude spectra, in [0, 1].

    1 means the noisy spectrum has the same shape as the clean one; 0 means
    disjoint support. Symmetric in its arguments.
    """
    a, b = spec_clean.amps, spec_noisy.amps
    if a.shape != b.shape or not np.array_equal(spec_clean.freqs, spec_noisy.freqs):
        raise ValueError("spectra must share one frequency grid")
    if np.array_equal(a, b) and np.any(a):
        return 1.0
    if not a.any() or not b.any():
        raise ValueError("zero-energy spectrum")
    # normalise first so tiny or huge spectra cannot underflow or overflow
    a = np.abs(a) / np.max(np.abs(a))
    b = np.abs(b) / np.max(np.abs(b))
    q = float(np.dot(a, b)) / np.sqrt(float(np.dot(a, a)) * float(np.dot(b, b)))
    return min(1.0, q)
