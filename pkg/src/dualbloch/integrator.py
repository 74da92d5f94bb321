"""Fixed-step RK4 time integration, deterministic or with injected field noise."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .core import (
    TWO_PI,
    SpinState,
    SystemParams,
    exact_linear_solution,
)

MAX_PHASE_PER_STEP = 0.1
MIN_SAMPLES_PER_LARMOR = 20


class StepSizeError(ValueError):
    """``dt * max|w|`` exceeds the accuracy limit and no override was given."""


class NumericalBlowUp(ArithmeticError):
    def __init__(self, time: float, partial: Optional["Trajectory"] = None):
        super().__init__(f"non-finite state encountered at t = {time:.9g} s")
        self.time = time
        self.partial = partial


@dataclass(frozen=True)
class IntegrationConfig:
    dt: float = 5e-6
    t_total: float = 4.0
    t_transient: float = 1.0
    sample_stride: Optional[int] = None  # None: coarsest stride giving >= 20 samples per Larmor period
    seed: int = 0
    allow_coarse_step: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if not 0 <= self.t_transient < self.t_total:
            raise ValueError("need 0 <= t_transient < t_total")
        if self.sample_stride is not None and int(self.sample_stride) < 1:
            raise ValueError("sample_stride must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_total / self.dt))

    def stride_for(self, params: SystemParams) -> int:
        if self.sample_stride is not None:
            return int(self.sample_stride)
        f_max = max(abs(params.omega1), abs(params.omega2)) / TWO_PI
        if f_max == 0:
            return 1
        return max(1, int(1.0 / (MIN_SAMPLES_PER_LARMOR * f_max * self.dt)))

    def first_sample_step(self, stride: int) -> int:
        first = math.ceil(self.t_transient / self.dt - 1e-9)
        return -(-first // stride) * stride

    def check_step(self, params: SystemParams) -> None:
        phase = self.dt * max(abs(params.omega1), abs(params.omega2))
        if phase >= MAX_PHASE_PER_STEP and not self.allow_coarse_step:
            raise StepSizeError(
                f"dt*max|w| = {phase:.3g} >= {MAX_PHASE_PER_STEP}; reduce dt "
                "or set allow_coarse_step"
            )


@dataclass(frozen=True)
class NoiseConfig:
    """Gaussian z-field noise, one draw per step, standard deviation ``sigma_b`` in nT.

    By default a single draw is shared by both cells; ``independent=True``
    draws a separate value per cell.
    """

    sigma_b: float = 0.0
    enabled: bool = True
    independent: bool = False

    def __post_init__(self):
        if not self.sigma_b >= 0:
            raise ValueError(f"sigma_b must be >= 0, got {self.sigma_b}")


@dataclass(frozen=True)
class Trajectory:
    t0: float
    dt_sample: float
    states: np.ndarray  # (n, 6)
    mx: np.ndarray      # (n,)

    def __post_init__(self):
        states = np.asarray(self.states, dtype=np.float64)
        mx = np.asarray(self.mx, dtype=np.float64)
        if states.ndim != 2 or states.shape[1] != 6:
            raise ValueError("states must have shape (n, 6)")
        if states.shape[0] < 2:
            raise ValueError("a trajectory needs at least 2 samples")
        if mx.shape != (states.shape[0],):
            raise ValueError("mx length must match states")
        states.flags.writeable = False
        mx.flags.writeable = False
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "mx", mx)

    @classmethod
    def from_states(cls, t0: float, dt_sample: float, states) -> "Trajectory":
        states = np.asarray(states, dtype=np.float64)
        return cls(t0, dt_sample, states, states[:, 0] + states[:, 3])

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt_sample * np.arange(len(self))

    @property
    def sample_rate(self) -> float:
        return 1.0 / self.dt_sample

    @property
    def totals(self) -> np.ndarray:
        """Summed (Mx, My, Mz) of both cells, shape (n, 3)."""
        return self.states[:, :3] + self.states[:, 3:]

    def state(self, k: int) -> SpinState:
        return SpinState(self.states[k])

    def scaled(self, factor: float) -> "Trajectory":
        return Trajectory.from_states(self.t0, self.dt_sample, self.states * factor)


def _run(params, init, cfg, noise):
    cfg.check_step(params)
    stride = cfg.stride_for(params)
    first = cfg.first_sample_step(stride)
    n_steps = cfg.n_steps
    w1, w2, alpha, r1, r2, m0 = params.kernel_args()
    samples, blowup = kernels.rk4_run(
        np.array(init.m, dtype=np.float64), w1, w2, alpha, r1, r2, m0,
        float(cfg.dt), n_steps, stride, first, noise, float(params.gamma),
    )
    t0 = first * cfg.dt
    if blowup >= 0:
        partial = None
        if samples.shape[0] >= 2:
            partial = Trajectory.from_states(t0, stride * cfg.dt, samples)
        raise NumericalBlowUp(blowup * cfg.dt, partial)
    if samples.shape[0] < 2:
        raise ValueError("fewer than 2 samples after the transient; lengthen t_total")
    return Trajectory.from_states(t0, stride * cfg.dt, samples)


_NO_NOISE = np.empty((0, 0))


def integrate(params: SystemParams, init: SpinState, cfg: IntegrationConfig) -> Trajectory:
    """Classic RK4 with fixed step ``cfg.dt``; samples every ``stride`` steps from ``t_transient`` on."""
    return _run(params, init, cfg, _NO_NOISE)


def draw_noise(cfg: IntegrationConfig, noise: NoiseConfig) -> np.ndarray:
    ncol = 2 if noise.independent else 1
    rng = np.random.default_rng(int(cfg.seed))
    return rng.standard_normal((cfg.n_steps, ncol)) * noise.sigma_b


def integrate_noisy(
    params: SystemParams,
    init: SpinState,
    cfg: IntegrationConfig,
    noise: NoiseConfig,
) -> Trajectory:
    """RK4 with Larmor frequencies shifted by ``gamma * b`` each step, ``b ~ N(0, sigma_b^2)`` nT.

    Seeded from ``cfg.seed``. With ``sigma_b == 0`` (or noise disabled) the
    result is bit-identical to :func:`integrate`.
    """
    if not noise.enabled or noise.sigma_b == 0.0:
        return integrate(params, init, cfg)
    return _run(params, init, cfg, draw_noise(cfg, noise))


@dataclass(frozen=True)
class OrderEstimate:
    order: float
    dts: tuple[float, ...]
    errors: tuple[float, ...]
    inconclusive: bool


def convergence_order(
    params: SystemParams,
    init: SpinState,
    dt_list: Sequence[float],
    t_total: float = 0.01,
) -> OrderEstimate:
    """Empirical order of the integrator against the closed-form ``alpha = 0`` solution.

    Fits the least-squares slope of log(max abs error at ``t_total``) against
    log(dt). The slope is flagged inconclusive when the smallest error is at
    the floating-point floor.
    """
    dts = [float(d) for d in dt_list]
    if len(dts) < 3:
        raise ValueError("need at least 3 step sizes")
    if any(b >= a for a, b in zip(dts, dts[1:])):
        raise ValueError("dt_list must be strictly decreasing")
    if params.alpha != 0.0:
        raise ValueError("convergence_order needs the analytic alpha = 0 system")
    exact = exact_linear_solution(params, init, np.array([t_total]))[0]
    errors = []
    for dt in dts:
        n = int(round(t_total / dt))
        if not math.isclose(n * dt, t_total, rel_tol=1e-9):
            raise ValueError(f"t_total {t_total} is not a multiple of dt {dt}")
        cfg = IntegrationConfig(dt=dt, t_total=t_total, t_transient=0.0,
                                sample_stride=n, allow_coarse_step=True)
        traj = integrate(params, init, cfg)
        errors.append(float(np.max(np.abs(traj.states[-1] - exact))))
    scale = max(1.0, float(np.max(np.abs(exact))))
    inconclusive = min(errors) < 1e3 * np.finfo(float).eps * scale
    slope = float(np.polyfit(np.log(dts), np.log(np.maximum(errors, 1e-300)), 1)[0])
    return OrderEstimate(slope, tuple(dts), tuple(errors), bool(inconclusive))
