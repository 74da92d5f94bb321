import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualbloch.analysis.chaos01 import (
    UndefinedKError,
    chaos01_k,
    k_statistic_for,
    mean_square_displacement,
    strobe_stride,
    zero_one_k,
)
from dualbloch.analysis.spectrum import InsufficientDataError
from dualbloch.integrator import Trajectory

from helpers import logistic_series


def msd_direct(p, ncut):
    n = p.size
    return np.array([np.mean((p[k:] - p[: n - k]) ** 2) for k in range(ncut + 1)])


@pytest.mark.parametrize("seed", range(3))
def test_fft_msd_matches_direct_sum(seed):
    p = np.cumsum(np.random.default_rng(seed).standard_normal(700))
    np.testing.assert_allclose(mean_square_displacement(p, 70), msd_direct(p, 70),
                               rtol=1e-9, atol=1e-9)


def test_sinusoid_is_regular():
    x = np.sin(0.37 * np.arange(10_000))
    assert zero_one_k(x) < 0.1


def test_logistic_map_is_chaotic():
    assert zero_one_k(logistic_series()) > 0.9


def test_k_statistic_for_diffusive_walk_is_near_one():
    phi = np.random.default_rng(1).standard_normal(5000)
    assert k_statistic_for(phi, 1.3) > 0.9


def test_constant_series_is_undefined():
    with pytest.raises(UndefinedKError):
        zero_one_k(np.full(1000, 2.0))


def test_short_series_rejected():
    with pytest.raises(InsufficientDataError):
        zero_one_k(np.arange(50.0))


def test_seeded_phase_draw_is_reproducible():
    x = logistic_series(3000)
    assert zero_one_k(x, seed=4) == zero_one_k(x, seed=4)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from(["noise", "walk", "tone", "mix"]))
def test_k_is_bounded(seed, kind):
    rng = np.random.default_rng(seed)
    n = 2000
    j = np.arange(n)
    x = {
        "noise": rng.standard_normal(n),
        "walk": np.cumsum(rng.standard_normal(n)),
        "tone": np.sin(rng.uniform(0.05, 3.0) * j + rng.uniform(0, 6)),
        "mix": np.sin(rng.uniform(0.05, 3.0) * j) + 0.3 * rng.standard_normal(n),
    }[kind]
    assert -0.2 <= zero_one_k(x, n_c=20, seed=seed) <= 1.2


def test_strobe_stride():
    assert strobe_stride(66_666.7, 2500.0, 1.5) == 18
    assert strobe_stride(100.0, 1000.0, 1.5) == 1


def test_trajectory_k_on_regular_and_chaotic_flows(limit_cycle_run, chaos_run):
    assert chaos01_k(limit_cycle_run[1]) < 0.1
    assert chaos01_k(chaos_run[1]) > 0.9


def test_trajectory_k_needs_enough_strobed_samples():
    t = np.arange(20_000) / 50_000.0
    mx = np.sin(2 * np.pi * 2500 * t)
    states = np.zeros((t.size, 6))
    states[:, 0] = mx
    with pytest.raises(InsufficientDataError):
        chaos01_k(Trajectory.from_states(0.0, 1 / 50_000.0, states))
