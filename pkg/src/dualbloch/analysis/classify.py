"""Regime labels from a probe-signal trajectory."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import SystemParams
from ..integrator import Trajectory
from .chaos01 import chaos01_k
from .spectrum import detect_peaks, spectrum


class Regime(str, enum.Enum):
    NO_SIGNAL = "NoSignal"
    LIMIT_CYCLE = "LimitCycle"
    QUASI_PERIODIC = "QuasiPeriodic"
    CHAOS = "Chaos"
    FAILED = "Failed"  # integration blew up; only produced by sweeps

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Thresholds:
    """Decision thresholds. All are relative, so labels do not depend on signal scale.

    ``band_tolerance_hz`` widens the Larmor band for the single-line test: the
    locked frequency carries a small nonlinear pull (a few Hz at high gain)
    that otherwise pushes it just outside a degenerate band at dfreq = 0.
    """

    signal_rms_rel: float = 1e-3
    peak_rel_threshold: float = 0.2
    min_separation_hz: float = 5.0
    k_threshold: float = 0.8
    band_tolerance_hz: float = 5.0
    k_samples_per_period: float = 1.5
    k_phases: int = 100
    k_min_samples: int = 10_000

    def __post_init__(self):
        if not 0 < self.peak_rel_threshold < 1:
            raise ValueError("peak_rel_threshold must lie in (0, 1)")
        if self.signal_rms_rel < 0 or self.min_separation_hz < 0 or self.band_tolerance_hz < 0:
            raise ValueError("thresholds must be non-negative")
        if self.k_samples_per_period <= 0 or self.k_phases < 1:
            raise ValueError("0-1 test settings must be positive")


@dataclass(frozen=True)
class RegimeLabel:
    regime: Regime
    k_statistic: Optional[float]
    peak_count: int
    dominant_freq: float  # Hz, nan when there is no line
    rms: float

    def __post_init__(self):
        if self.regime is Regime.CHAOS and self.k_statistic is None:
            raise ValueError("a Chaos label must carry its K statistic")

    def __str__(self) -> str:
        return self.regime.value


def steady_rms(traj: Trajectory) -> float:
    mx = traj.mx
    return float(np.sqrt(np.mean((mx - mx.mean()) ** 2)))


def classify_regime(traj: Trajectory, params: SystemParams,
                    thresholds: Thresholds = Thresholds(), seed: int = 0) -> RegimeLabel:
    """NoSignal / LimitCycle / QuasiPeriodic / Chaos decision cascade.

    1. NoSignal when the steady-state RMS of the probe signal is below
       ``signal_rms_rel * M0``.
    2. LimitCycle when exactly one significant line exists and it lies
       between the two Larmor frequencies (within ``band_tolerance_hz``).
    3. Otherwise the 0-1 test decides: Chaos when K >= ``k_threshold``.
    """
    th = thresholds
    rms = steady_rms(traj)
    if rms < th.signal_rms_rel * params.m0:
        return RegimeLabel(Regime.NO_SIGNAL, None, 0, float("nan"), rms)

    peaks = detect_peaks(spectrum(traj), th.peak_rel_threshold, th.min_separation_hz)
    if not peaks:
        return RegimeLabel(Regime.NO_SIGNAL, None, 0, float("nan"), rms)
    f0 = peaks.dominant.freq
    lo, hi = params.larmor_band_hz
    if len(peaks) == 1 and lo - th.band_tolerance_hz <= f0 <= hi + th.band_tolerance_hz:
        return RegimeLabel(Regime.LIMIT_CYCLE, None, 1, f0, rms)

    k = chaos01_k(
        traj,
        samples_per_period=th.k_samples_per_period,
        n_c=th.k_phases,
        seed=seed,
        min_samples=th.k_min_samples,
        dominant_freq=f0,
    )
    regime = Regime.CHAOS if k >= th.k_threshold else Regime.QUASI_PERIODIC
    return RegimeLabel(regime, k, len(peaks), f0, rms)
