"""Acceptance criteria, one test per criterion, each reporting a single PASS/FAIL line.

Tolerances are the stated ones. Two lines are expected to be red at the
2500 Hz carrier (see the README section "Known acceptance failures"); they
are left failing rather than relaxed.
"""

import math
import time

import numpy as np
import pytest

from dualbloch.analysis.chaos01 import zero_one_k
from dualbloch.analysis.classify import Regime, classify_regime
from dualbloch.analysis.poincare import (
    correlation_dimension,
    curve_gaps,
    poincare_section,
    section_clusters,
)
from dualbloch.analysis.spectrum import robustness_q, spectrum
from dualbloch.core import TWO_PI, SystemParams, default_initial_state
from dualbloch.integrator import IntegrationConfig, convergence_order, integrate
from dualbloch.robustness import q_curve
from dualbloch.sweep import SweepGrid, run_sweep

from helpers import (
    ACCEPTANCE_LINES,
    CHAOS_NOMINAL,
    CHAOS_VERIFIED,
    LIMIT_CYCLE,
    QUASI_PERIODIC,
    logistic_series,
    run_point,
)


def report(number: int, ok: bool, detail: str) -> None:
    line = f"[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


# --- shared full sweeps (criteria 3 and 8) ---------------------------------

INTERRUPT_AFTER = 300


@pytest.fixture(scope="session")
def full_sweeps(tmp_path_factory):
    grid = SweepGrid()
    cfg = IntegrationConfig()
    start = time.perf_counter()
    parallel = run_sweep(grid, cfg, worker_count=8)
    t_parallel = time.perf_counter() - start

    ck = tmp_path_factory.mktemp("sweep") / "checkpoint.jsonl"
    partial = run_sweep(grid, cfg, worker_count=1, checkpoint=ck, max_new_points=INTERRUPT_AFTER)
    resumed = run_sweep(grid, cfg, worker_count=1, checkpoint=ck)
    return {"grid": grid, "parallel": parallel, "t_parallel": t_parallel,
            "partial": partial, "resumed": resumed}


# --- criterion 1 ------------------------------------------------------------

def test_criterion_1_regime_anchors():
    start = time.perf_counter()
    found = {}
    for name, point in (("limit cycle", LIMIT_CYCLE), ("quasi-periodic", QUASI_PERIODIC),
                        ("chaos", CHAOS_NOMINAL)):
        params, traj = run_point(*point)
        found[name] = classify_regime(traj, params)
    elapsed = time.perf_counter() - start
    chaos = found["chaos"]
    checks = {
        "40Hz/16 LimitCycle": found["limit cycle"].regime is Regime.LIMIT_CYCLE,
        "220Hz/16 QuasiPeriodic": found["quasi-periodic"].regime is Regime.QUASI_PERIODIC,
        "110Hz/20 Chaos K>0.9": chaos.regime is Regime.CHAOS and chaos.k_statistic > 0.9,
        "runtime<=60s": elapsed <= 60.0,
    }
    k = "n/a" if chaos.k_statistic is None else f"{chaos.k_statistic:.4f}"
    detail = "; ".join(f"{n}={'ok' if v else 'no'}" for n, v in checks.items())
    report(1, all(checks.values()),
           f"{detail} (labels {[str(v) for v in found.values()]}, chaos-anchor K={k}, {elapsed:.1f} s)")


# --- criterion 2 ------------------------------------------------------------

def test_criterion_2_subcritical_decay():
    worst = 0.0
    labels = set()
    for dfreq in (0.0, 40.0, 110.0, 220.0, 300.0):
        params, traj = run_point(dfreq, 0.5)
        lab = classify_regime(traj, params)
        labels.add(lab.regime)
        worst = max(worst, lab.rms / params.m0)
    ok = worst < 1e-4 and labels == {Regime.NO_SIGNAL}
    report(2, ok, f"max steady RMS(mx)/M0 = {worst:.3g} (< 1e-4), labels {sorted(map(str, labels))}")


# --- criterion 3 ------------------------------------------------------------

def test_criterion_3_synchronization_betweenness(full_sweeps):
    pd = full_sweeps["parallel"]
    grid = full_sweeps["grid"]
    total = outside = 0
    offenders = set()
    for i, j in grid.indices():
        if pd.labels[i, j] is not Regime.LIMIT_CYCLE:
            continue
        total += 1
        lo, hi = grid.params(i, j).larmor_band_hz
        f0 = pd.dominant_freq[i, j]
        if not lo <= f0 <= hi:
            outside += 1
            offenders.add(grid.dfreq_axis[i])
    inside = total - outside
    report(3, total > 0 and outside == 0,
           f"{inside}/{total} LimitCycle points inside [f2, f1] "
           f"({outside} outside, at dfreq {sorted(offenders)} Hz)")


# --- criterion 4 ------------------------------------------------------------

def test_criterion_4_poincare_signatures():
    _, lc = run_point(*LIMIT_CYCLE)
    sec = poincare_section(lc)
    link = 0.02 * sec.attractor_extent
    clusters = section_clusters(sec.points, link)
    lc_ok = clusters.count <= 2 and clusters.max_radius < link
    lc_radius = clusters.max_radius / sec.attractor_extent

    _, qp = run_point(*QUASI_PERIODIC)
    sec = poincare_section(qp)
    gaps = curve_gaps(sec.points)
    qp_ok = sec.crossing_count >= 500 and gaps.gap_ratio < 0.1

    params, ch = run_point(*CHAOS_VERIFIED)
    lab = classify_regime(ch, params)
    sec = poincare_section(ch)
    dim = correlation_dimension(sec.points, sec.attractor_extent)
    ch_ok = lab.regime is Regime.CHAOS and dim > 1.2

    _, nominal = run_point(*CHAOS_NOMINAL)
    nsec = poincare_section(nominal)
    ndim = correlation_dimension(nsec.points, nsec.attractor_extent)

    report(4, lc_ok and qp_ok and ch_ok,
           f"LC {clusters.count} cluster(s), max radius {lc_radius:.2%}"
           f" of extent; QP gap {gaps.gap_ratio:.3f} of curve length over {sec.crossing_count} crossings;"
           f" chaos (95 Hz/20, K={lab.k_statistic:.3f}) D2={dim:.3f} > 1.2"
           f" [110 Hz/20 section D2={ndim:.3f}, informational]")


# --- criterion 5 ------------------------------------------------------------

def test_criterion_5_zero_one_oracles():
    start = time.perf_counter()
    k_sin = zero_one_k(np.sin(0.37 * np.arange(10_000)))
    t_sin = time.perf_counter() - start
    series = logistic_series()
    start = time.perf_counter()
    k_log = zero_one_k(series)
    t_log = time.perf_counter() - start
    ok = k_sin < 0.1 and k_log > 0.9 and t_sin < 5 and t_log < 5
    report(5, ok, f"sinusoid K={k_sin:.4f} ({t_sin:.2f} s), logistic r=3.99 K={k_log:.4f} ({t_log:.2f} s)")


# --- criterion 6 ------------------------------------------------------------

def test_criterion_6_integrator_order():
    p = SystemParams.from_split(50.0, 0.0)
    est = convergence_order(p, default_initial_state(p), [4e-5, 2e-5, 1e-5])
    ok = 3.7 <= est.order <= 4.3 and not est.inconclusive
    report(6, ok, f"slope {est.order:.3f} in [3.7, 4.3]; errors {[f'{e:.2e}' for e in est.errors]}")


# --- criterion 7 ------------------------------------------------------------

# sigma unit: the limit-cycle splitting expressed as a field, times 10 so the noise perturbs visibly
Q_SIGMA_UNIT = TWO_PI * LIMIT_CYCLE[0] / (TWO_PI * 7.0) * 10.0
Q_FACTORS = (0.05, 0.1, 0.2, 0.4)
Q_REPEATS = 10


def test_criterion_7_q_metric():
    _, lc = run_point(*LIMIT_CYCLE)
    _, qp = run_point(*QUASI_PERIODIC)
    a, b = spectrum(lc), spectrum(qp)
    identity = abs(robustness_q(a, a) - 1.0) <= 1e-12 and abs(robustness_q(b, b) - 1.0) <= 1e-12
    symmetric = robustness_q(a, b) == robustness_q(b, a)

    sigmas = [f * Q_SIGMA_UNIT for f in Q_FACTORS]
    curves = {}
    for p, (name, point) in enumerate((("LC", LIMIT_CYCLE), ("QP", QUASI_PERIODIC))):
        params = SystemParams.from_split(*point)
        curves[name] = q_curve(params, sigmas, Q_REPEATS, independent=True, seed=0, point=p).mean
    lc_q, qp_q = curves["LC"], curves["QP"]
    monotone = all(np.all(np.diff(q) <= 0) for q in (lc_q, qp_q))
    dominates = bool(np.all(lc_q >= qp_q))
    ok = identity and symmetric and monotone and dominates
    fmt = lambda q: "[" + ", ".join(f"{v:.4f}" for v in q) + "]"  # noqa: E731
    report(7, ok, f"Q(a,a)=1 {identity}, symmetric {symmetric}; sigma_b="
           f"{[round(s, 3) for s in sigmas]} nT, {Q_REPEATS} repeats, per-cell noise: "
           f"LC {fmt(lc_q)} QP {fmt(qp_q)}; non-increasing {monotone}, LC>=QP {dominates}")


# --- criterion 8 ------------------------------------------------------------

def test_criterion_8_sweep_determinism_and_structure(full_sweeps):
    pd = full_sweeps["parallel"]
    grid = full_sweeps["grid"]
    elapsed = full_sweeps["t_parallel"]
    identical = full_sweeps["partial"] is None and pd.same_results(full_sweeps["resumed"])
    labels = {str(r) for r in pd.label_set()}
    four = {"NoSignal", "LimitCycle", "QuasiPeriodic", "Chaos"} <= labels
    column = {str(r) for r in pd.labels[grid.dfreq_axis.index(0.0)]}
    column_ok = column <= {"NoSignal", "LimitCycle"}
    ok = elapsed <= 600 and identical and four and column_ok
    report(8, ok, f"{grid.shape[0]}x{grid.shape[1]} sweep on 8 workers in {elapsed:.0f} s (<= 600); "
           f"8-worker vs 1-worker interrupted@{INTERRUPT_AFTER}+resumed identical {identical}; "
           f"labels {sorted(labels)}; dfreq=0 column {sorted(column)}")


# --- criterion 9 ------------------------------------------------------------

def test_criterion_9_conservation():
    # relaxation off, no feedback; 1e5 steps at dt*w ~ 8e-3
    base = SystemParams.from_split(40.0, 0.0)
    p = SystemParams(base.cells, 0.0, math.inf, math.inf, base.m0, base.gamma)
    init = default_initial_state(p, 0.3)
    cfg = IntegrationConfig(dt=5e-7, t_total=0.05, t_transient=0.0, sample_stride=1000)
    traj = integrate(p, init, cfg)
    m0 = np.array(init.magnitudes())
    mags = np.linalg.norm(traj.states.reshape(-1, 2, 3), axis=2)
    drift = float(np.max(np.abs(mags / m0 - 1.0)))
    phase = cfg.dt * max(abs(p.omega1), abs(p.omega2))
    report(9, cfg.n_steps >= 100_000 and drift < 1e-8,
           f"max relative |M_i| drift {drift:.3g} over {cfg.n_steps} steps at dt*w={phase:.4f} (< 1e-8)")
