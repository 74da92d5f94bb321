import numpy as np
import pytest

from dualbloch.core import SystemParams
from dualbloch.integrator import IntegrationConfig
from dualbloch.robustness import q_curve, repeat_seed

SHORT = IntegrationConfig(t_total=1.0, t_transient=0.3)


def test_zero_sigma_gives_exactly_one():
    curve = q_curve(SystemParams.from_split(40.0, 16.0), [0.0, 5.0], repeats=3, cfg=SHORT)
    assert np.all(curve.q[0] == 1.0)
    assert curve.std[0] == 0.0
    assert np.all(curve.q[1] < 1.0)


def test_q_curve_is_seeded():
    p = SystemParams.from_split(40.0, 16.0)
    a = q_curve(p, [0.0, 5.0], repeats=3, cfg=SHORT, seed=11)
    b = q_curve(p, [0.0, 5.0], repeats=3, cfg=SHORT, seed=11)
    assert np.array_equal(a.q, b.q)


def test_repeat_seeds_are_distinct():
    seeds = {repeat_seed(0, p, s, r) for p in range(2) for s in range(5) for r in range(10)}
    assert len(seeds) == 100


def test_repeats_must_be_positive():
    with pytest.raises(ValueError):
        q_curve(SystemParams.from_split(40.0, 16.0), [0.0], repeats=0, cfg=SHORT)
