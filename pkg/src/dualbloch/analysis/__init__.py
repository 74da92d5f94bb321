"""Diagnostics: spectra, spectral lines, Poincaré sections, the 0-1 chaos statistic, Q and regime labels."""

from .chaos01 import UndefinedKError, chaos01_k, zero_one_k
from .classify import Regime, RegimeLabel, Thresholds, classify_regime
from .poincare import (
    PoincareSection,
    correlation_dimension,
    curve_gaps,
    poincare_section,
    section_clusters,
)
from .spectrum import (
    InsufficientDataError,
    Peak,
    PeakSet,
    Spectrum,
    detect_peaks,
    robustness_q,
    spectrum,
    spectrum_of_series,
)

__all__ = [
    "InsufficientDataError", "Peak", "PeakSet", "PoincareSection", "Regime",
    "RegimeLabel", "Spectrum", "Thresholds", "UndefinedKError", "chaos01_k",
    "classify_regime", "correlation_dimension", "curve_gaps", "detect_peaks",
    "poincare_section", "robustness_q", "section_clusters", "spectrum",
    "spectrum_of_series", "zero_one_k",
]
