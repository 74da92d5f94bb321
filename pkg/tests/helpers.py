"""Shared test helpers: anchor points and reference series."""

import numpy as np

from dualbloch.core import SystemParams, default_initial_state
from dualbloch.integrator import IntegrationConfig, integrate

# PASS/FAIL lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []

# (dfreq Hz, gain / alpha_c) at a 2500 Hz carrier
LIMIT_CYCLE = (40.0, 16.0)
QUASI_PERIODIC = (220.0, 16.0)
CHAOS_VERIFIED = (95.0, 20.0)   # Lyapunov-positive at this carrier
CHAOS_NOMINAL = (110.0, 20.0)


def run_point(dfreq, gain, **cfg):
    params = SystemParams.from_split(dfreq, gain)
    traj = integrate(params, default_initial_state(params), IntegrationConfig(**cfg))
    return params, traj


def logistic_series(n=10_000, r=3.99, x0=0.3):
    x = np.empty(n)
    x[0] = x0
    for i in range(1, n):
        x[i] = r * x[i - 1] * (1.0 - x[i - 1])
    return x
