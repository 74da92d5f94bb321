"""Physical data model and vector field of the feedback-coupled dual-cell Bloch system.

Two spin ensembles precess at their own Larmor frequencies and share one
feedback field ``B_y = -alpha * M_x / gamma`` driven by the summed transverse
magnetization ``M_x = M_x1 + M_x2``. Per cell ``i``::

    dMx_i/dt =  w_i My_i + alpha Mx Mz_i - Mx_i / T2
    dMy_i/dt = -w_i Mx_i - My_i / T2
    dMz_i/dt = -alpha Mx Mx_i + (M0 - Mz_i) / T1

All frequencies are angular (rad/s). ``gamma`` is stored in rad/s/nT and is
only used to turn magnetic-field noise into frequency noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Simulation constants quoted for the rubidium cells.
GAMMA_HZ_PER_NT = 7.0
PAPER_GAMMA = TWO_PI * GAMMA_HZ_PER_NT
PAPER_T1 = 5e-3
PAPER_T2 = 2e-3
PAPER_M0 = 0.5
DEFAULT_MEAN_LARMOR_HZ = 2500.0

STATE_LABELS = ("Mx1", "My1", "Mz1", "Mx2", "My2", "Mz2")


class InvalidStateError(ValueError):
    """A magnetization state contains non-finite components."""


@dataclass(frozen=True)
class CellParams:
    larmor_frequency: float  # rad/s, sign is a field-direction convention

    def __post_init__(self):
        if not math.isfinite(self.larmor_frequency):
            raise ValueError(f"larmor_frequency must be finite, got {self.larmor_frequency}")


@dataclass(frozen=True)
class SystemParams:
    """Constants of the coupled system.

    ``t1``/``t2`` may be ``math.inf`` to switch the corresponding relaxation
    term off exactly (``1/inf == 0``).
    """

    cells: tuple[CellParams, CellParams]
    alpha: float
    t1: float = PAPER_T1
    t2: float = PAPER_T2
    m0: float = PAPER_M0
    gamma: float = PAPER_GAMMA

    def __post_init__(self):
        if len(self.cells) != 2:
            raise ValueError("exactly two cells are required")
        object.__setattr__(self, "cells", tuple(self.cells))
        for name in ("t1", "t2", "m0", "gamma"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value}")
        for name in ("m0", "gamma", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def from_split(
        cls,
        dfreq_hz: float,
        alpha_ratio: float,
        mean_larmor_hz: float = DEFAULT_MEAN_LARMOR_HZ,
        t1: float = PAPER_T1,
        t2: float = PAPER_T2,
        m0: float = PAPER_M0,
        gamma: float = PAPER_GAMMA,
    ) -> "SystemParams":
        """Cells at ``mean +/- dfreq/2`` (Hz) with ``alpha = alpha_ratio * alpha_c``."""
        w_mean = TWO_PI * mean_larmor_hz
        half = math.pi * dfreq_hz
        return cls(
            cells=(CellParams(w_mean + half), CellParams(w_mean - half)),
            alpha=alpha_ratio / (t2 * m0),
            t1=t1,
            t2=t2,
            m0=m0,
            gamma=gamma,
        )

    @property
    def omega1(self) -> float:
        return self.cells[0].larmor_frequency

    @property
    def omega2(self) -> float:
        return self.cells[1].larmor_frequency

    @property
    def delta_omega(self) -> float:
        return self.omega1 - self.omega2

    @property
    def alpha_c(self) -> float:
        return critical_alpha(self)

    @property
    def larmor_band_hz(self) -> tuple[float, float]:
        lo, hi = sorted((self.omega1, self.omega2))
        return lo / TWO_PI, hi / TWO_PI

    def swapped(self) -> "SystemParams":
        return SystemParams(
            cells=(self.cells[1], self.cells[0]),
            alpha=self.alpha,
            t1=self.t1,
            t2=self.t2,
            m0=self.m0,
            gamma=self.gamma,
        )

    def with_alpha(self, alpha: float) -> "SystemParams":
        return SystemParams(self.cells, alpha, self.t1, self.t2, self.m0, self.gamma)

    def kernel_args(self) -> tuple[float, ...]:
        """Flat float tuple ``(w1, w2, alpha, 1/T1, 1/T2, M0)`` consumed by the kernels."""
        return (
            float(self.omega1),
            float(self.omega2),
            float(self.alpha),
            1.0 / self.t1,
            1.0 / self.t2,
            float(self.m0),
        )


@dataclass(frozen=True)
class SpinState:
    """Magnetization of both cells, ordered (Mx1, My1, Mz1, Mx2, My2, Mz2)."""

    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=np.float64).reshape(-1)
        if m.shape != (6,):
            raise ValueError(f"SpinState needs 6 components, got {m.shape[0]}")
        if not np.all(np.isfinite(m)):
            raise InvalidStateError(f"non-finite magnetization components: {m}")
        m.flags.writeable = False
        object.__setattr__(self, "m", m)

    @classmethod
    def from_cells(cls, cell1, cell2) -> "SpinState":
        return cls(np.concatenate([np.asarray(cell1, float), np.asarray(cell2, float)]))

    def cell(self, i: int) -> np.ndarray:
        if i not in (1, 2):
            raise ValueError("cell index is 1 or 2")
        return self.m[3 * (i - 1): 3 * i]

    def magnitudes(self) -> tuple[float, float]:
        return float(np.linalg.norm(self.cell(1))), float(np.linalg.norm(self.cell(2)))

    def swapped(self) -> "SpinState":
        return SpinState(np.concatenate([self.m[3:], self.m[:3]]))

    def __iter__(self):
        return iter(self.m.tolist())

    def __eq__(self, other):
        if not isinstance(other, SpinState):
            return NotImplemented
        return bool(np.array_equal(self.m, other.m))

    def __hash__(self):
        return hash(self.m.tobytes())


def observable_mx(state: SpinState) -> float:
    """Summed transverse magnetization ``Mx1 + Mx2`` (the probe signal)."""
    m = state.m if isinstance(state, SpinState) else np.asarray(state, float)
    return float(m[0] + m[3])


def vector_field(state: SpinState, params: SystemParams) -> np.ndarray:
    m = state.m if isinstance(state, SpinState) else np.asarray(state, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise InvalidStateError(f"non-finite magnetization components: {m}")
    w1, w2, alpha, r1, r2, m0 = params.kernel_args()
    return _field(m, w1, w2, alpha, r1, r2, m0)


def _field(m, w1, w2, alpha, r1, r2, m0):
    mx = m[0] + m[3]
    out = np.empty(6)
    for base, w in ((0, w1), (3, w2)):
        x, y, z = m[base], m[base + 1], m[base + 2]
        out[base] = w * y + alpha * mx * z - x * r2
        out[base + 1] = -w * x - y * r2
        out[base + 2] = -alpha * mx * x + (m0 - z) * r1
    return out


def critical_alpha(params: SystemParams) -> float:
    """Feedback gain ``1/(T2 M0)`` above which a homogeneous pair self-oscillates."""
    return 1.0 / (params.t2 * params.m0)


def default_initial_state(params: SystemParams, tilt: float = 0.1) -> SpinState:
    """Both cells tilted by ``tilt`` (fraction of M0) from the pump axis toward +x.

    The exact equilibrium ``(0, 0, M0)`` is a fixed point and never starts
    oscillating on its own, hence ``tilt > 0``.
    """
    if not 0.0 < tilt <= 0.5:
        raise ValueError(f"tilt must satisfy 0 < tilt <= 0.5, got {tilt}")
    cell = (tilt * params.m0, 0.0, params.m0 * math.sqrt(1.0 - tilt * tilt))
    return SpinState.from_cells(cell, cell)


def equilibrium_state(params: SystemParams) -> SpinState:
    return SpinState.from_cells((0.0, 0.0, params.m0), (0.0, 0.0, params.m0))


def exact_linear_solution(params: SystemParams, init: SpinState, t) -> np.ndarray:
    """Closed-form trajectory for ``alpha == 0`` (free damped precession), shape (len(t), 6)."""
    if params.alpha != 0.0:
        raise ValueError("closed form exists only without feedback (alpha == 0)")
    t = np.asarray(t, dtype=np.float64)
    _, _, _, r1, r2, m0 = params.kernel_args()
    out = np.empty(t.shape + (6,))
    for base, w in ((0, params.omega1), (3, params.omega2)):
        x0, y0, z0 = init.m[base: base + 3]
        c = (x0 + 1j * y0) * np.exp((-1j * w - r2) * t)
        out[..., base] = c.real
        out[..., base + 1] = c.imag
        out[..., base + 2] = m0 + (z0 - m0) * np.exp(-r1 * t)
    return out
