"""Spectral robustness of a dynamical regime against z-field noise."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis.spectrum import robustness_q, spectrum
from .core import SpinState, SystemParams, default_initial_state
from .integrator import IntegrationConfig, NoiseConfig, integrate, integrate_noisy


@dataclass(frozen=True)
class QCurve:
    sigmas: tuple[float, ...]      # nT
    q: np.ndarray                  # (n_sigma, repeats)

    @property
    def mean(self) -> np.ndarray:
        return self.q.mean(axis=1)

    @property
    def std(self) -> np.ndarray:
        return self.q.std(axis=1)


def repeat_seed(seed: int, point: int, sigma_index: int, repeat: int) -> int:
    ss = np.random.SeedSequence([int(seed), point, sigma_index, repeat])
    return int(ss.generate_state(1, np.uint64)[0])


def q_curve(
    params: SystemParams,
    sigmas: Sequence[float],
    repeats: int = 10,
    cfg: IntegrationConfig = IntegrationConfig(),
    independent: bool = False,
    seed: int = 0,
    point: int = 0,
    init: SpinState | None = None,
) -> QCurve:
    """Q of noisy runs against the noiseless baseline, ``repeats`` seeds per sigma."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    init = default_initial_state(params) if init is None else init
    clean = spectrum(integrate(params, init, cfg))
    q = np.empty((len(sigmas), repeats))
    for a, sigma in enumerate(sigmas):
        noise = NoiseConfig(sigma_b=float(sigma), independent=independent)
        for r in range(repeats):
            run_cfg = dataclasses.replace(cfg, seed=repeat_seed(seed, point, a, r))
            q[a, r] = robustness_q(clean, spectrum(integrate_noisy(params, init, run_cfg, noise)))
    return QCurve(tuple(float(s) for s in sigmas), q)
