"""Gottwald-Melbourne 0-1 test for chaos (correlation method).

For each random frequency ``c`` the series is turned into translation
variables ``p_c(n) = sum_j phi(j) cos(jc)``, ``q_c(n) = sum_j phi(j) sin(jc)``.
Bounded motion of (p, q) means regular dynamics, diffusive growth means
chaos. ``K_c`` is the correlation between lag ``n`` and the mean-square
displacement with its oscillatory part removed; K is the median over ``c``.
"""

from __future__ import annotations

import numpy as np

from ..integrator import Trajectory
from .spectrum import InsufficientDataError, detect_peaks, spectrum

C_LOW = np.pi / 5
C_HIGH = 4 * np.pi / 5


class UndefinedKError(ValueError):
    """The series is constant, so the test statistic is undefined."""


def mean_square_displacement(p, ncut: int) -> np.ndarray:
    """``M(n) = mean_j (p[j+n] - p[j])^2`` for ``n = 0..ncut``, via one FFT autocorrelation."""
    p = np.asarray(p, dtype=np.float64)
    n_total = p.size
    size = 1 << int(np.ceil(np.log2(2 * n_total)))
    f = np.fft.rfft(p, size)
    acf = np.fft.irfft(f * np.conj(f), size)[: ncut + 1]
    csum = np.concatenate(([0.0], np.cumsum(p * p)))
    lags = np.arange(ncut + 1)
    # sum_{j < N-n} p[j+n]^2 + p[j]^2 - 2 p[j] p[j+n]
    total = (csum[n_total] - csum[lags]) + csum[n_total - lags] - 2.0 * acf
    return np.maximum(total, 0.0) / (n_total - lags)


def k_statistic_for(phi, c: float, ncut: int | None = None) -> float:
    phi = np.asarray(phi, dtype=np.float64)
    n_total = phi.size
    if ncut is None:
        ncut = n_total // 10
    j = np.arange(1, n_total + 1)
    p = np.cumsum(phi * np.cos(j * c))
    q = np.cumsum(phi * np.sin(j * c))
    msd = mean_square_displacement(p, ncut) + mean_square_displacement(q, ncut)
    lags = np.arange(1, ncut + 1)
    v_osc = phi.mean() ** 2 * (1.0 - np.cos(lags * c)) / (1.0 - np.cos(c))
    d = msd[1:] - v_osc
    if np.ptp(d) == 0.0:
        return 0.0
    return float(np.corrcoef(lags, d)[0, 1])


def zero_one_k(series, n_c: int = 100, seed: int = 0) -> float:
    """K for a discrete series; near 0 for regular, near 1 for chaotic dynamics."""
    phi = np.asarray(series, dtype=np.float64)
    if phi.ndim != 1 or phi.size < 100:
        raise InsufficientDataError("0-1 test needs a 1-D series of >= 100 points")
    if not np.all(np.isfinite(phi)):
        raise ValueError("series contains non-finite values")
    if np.ptp(phi) == 0.0:
        raise UndefinedKError("constant series")
    rng = np.random.default_rng(seed)
    cs = rng.uniform(C_LOW, C_HIGH, n_c)
    return float(np.median([k_statistic_for(phi, c) for c in cs]))


def strobe_stride(sample_rate: float, dominant_freq: float,
                  samples_per_period: float) -> int:
    return max(1, int(round(sample_rate / (samples_per_period * dominant_freq))))


def chaos01_k(
    traj: Trajectory,
    samples_per_period: float = 1.5,
    n_c: int = 100,
    seed: int = 0,
    min_samples: int = 10_000,
    dominant_freq: float | None = None,
) -> float:
    """0-1 test on the probe signal after decimation to ~``samples_per_period`` per dominant period.

    A finely sampled carrier concentrates all power at one small frequency in
    sample units, outside the c-window, which drives K towards 0 even for
    chaotic flows. Decimating to 1.5 samples per carrier period folds the
    carrier to 2*pi/3 and spreads the chaotic band across the window.
    Decimation is plain subsampling (no anti-alias filter) on purpose.
    """
    mx = traj.mx
    if np.ptp(mx) == 0.0:
        raise UndefinedKError("constant signal")
    if dominant_freq is None:
        peaks = detect_peaks(spectrum(traj))
        if not peaks:
            raise UndefinedKError("no spectral line to set the sampling period")
        dominant_freq = peaks.dominant.freq
    stride = strobe_stride(traj.sample_rate, dominant_freq, samples_per_period)
    series = mx[::stride]
    if series.size < min_samples:
        raise InsufficientDataError(
            f"only {series.size} samples after decimation by {stride}; "
            f"need {min_samples} (lengthen the retained window)"
        )
    return zero_one_k(series, n_c=n_c, seed=seed)
