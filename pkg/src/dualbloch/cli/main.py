"""``dualbloch`` command line: simulate | sweep | robustness | chaos-test.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from ..analysis.chaos01 import UndefinedKError, zero_one_k
from ..analysis.classify import classify_regime
from ..analysis.poincare import poincare_section
from ..analysis.spectrum import InsufficientDataError, detect_peaks, spectrum
from ..core import STATE_LABELS, default_initial_state
from ..integrator import NumericalBlowUp, StepSizeError, integrate_noisy
from ..robustness import q_curve
from ..sweep import StaleCheckpointError, boundary_extract, run_sweep
from . import config as cfgmod
from . import plots
from .tables import FLOAT_FMT, read_series, versions, write_table

log = logging.getLogger("dualbloch")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

CHECKPOINT_NAME = "sweep_checkpoint.jsonl"


class UsageError(Exception):
    pass


def _num(x):
    """JSON-friendly float with 9 significant digits; nan becomes null."""
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(FLOAT_FMT % x)


def _resolved_config(args) -> dict:
    overrides = list(args.override or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.config is None:
        return cfgmod.resolve({}, overrides)
    return cfgmod.load_config(args.config, overrides)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# --- simulate ---------------------------------------------------------------

def _trajectory_rows(traj) -> np.ndarray:
    return np.column_stack([traj.times, traj.states, traj.mx])


def cmd_simulate(args) -> int:
    cfg = _resolved_config(args)
    out = _out_dir(args)
    params = cfgmod.system_params(cfg)
    icfg = cfgmod.integration_config(cfg)
    noise = cfgmod.noise_config(cfg)
    th = cfgmod.thresholds(cfg)
    init = default_initial_state(params, cfg["system"]["tilt"])
    seed = int(cfg["seed"])
    traj_cols = ["t_s", *STATE_LABELS, "mx"]

    summary = {
        "command": "simulate",
        "version": __version__,
        "versions": versions(),
        "seed": seed,
        "config": cfg,
        "params": {
            "omega1_rad_s": _num(params.omega1),
            "omega2_rad_s": _num(params.omega2),
            "alpha_per_s": _num(params.alpha),
            "alpha_c_per_s": _num(params.alpha_c),
        },
    }
    try:
        traj = integrate_noisy(params, init, icfg, noise)
    except NumericalBlowUp as exc:
        log.error("numerical blow-up at t = %.9g s", exc.time)
        extra = {"status": f"PARTIAL numerical blow-up at t={exc.time:.9g} s"}
        if exc.partial is not None:
            write_table(out / "trajectory.tsv", "simulate", cfg, traj_cols,
                        _trajectory_rows(exc.partial), extra)
        summary.update(status="blow-up", blowup_time_s=_num(exc.time), label=None)
        _write_json(out / "summary.json", summary)
        return EXIT_NUMERIC

    label = classify_regime(traj, params, th, seed=seed)
    spec = spectrum(traj)
    peaks = detect_peaks(spec, th.peak_rel_threshold, th.min_separation_hz)
    try:
        section = poincare_section(traj, min_crossings=1)
        sec_rows = np.column_stack([section.times, section.points])
        extent = section.attractor_extent
    except InsufficientDataError:
        sec_rows = np.empty((0, 3))
        extent = None

    write_table(out / "trajectory.tsv", "simulate", cfg, traj_cols, _trajectory_rows(traj))
    write_table(out / "spectrum.tsv", "simulate", cfg, ["freq_hz", "amp"],
                np.column_stack([spec.freqs, spec.amps]),
                {"window": spec.window_id, "n_fft": spec.n_fft})
    write_table(out / "poincare.tsv", "simulate", cfg, ["t_s", "Mx_total", "Mz_total"], sec_rows,
                {"plane": "My1+My2=0, upward crossings"})
    summary.update(
        status="ok",
        label=label.regime.value,
        k_statistic=_num(label.k_statistic),
        dominant_freq_hz=_num(label.dominant_freq),
        rms=_num(label.rms),
        peaks=[{"freq_hz": _num(p.freq), "amp": _num(p.amp)} for p in peaks],
        section_crossings=int(sec_rows.shape[0]),
        attractor_extent=_num(extent),
    )
    _write_json(out / "summary.json", summary)
    plots.simulate_script(out / "plot_simulate.py")
    print(f"{label.regime.value}\tK={'-' if label.k_statistic is None else f'{label.k_statistic:.4f}'}"
          f"\tf0={label.dominant_freq:.3f} Hz")
    return EXIT_OK


# --- sweep ------------------------------------------------------------------

def cmd_sweep(args) -> int:
    cfg = _resolved_config(args)
    out = _out_dir(args)
    grid = cfgmod.sweep_grid(cfg)
    icfg = cfgmod.integration_config(cfg)
    th = cfgmod.thresholds(cfg)
    seed = int(cfg["seed"])
    total = grid.shape[0] * grid.shape[1]
    counter = {"n": 0}

    def progress(r):
        counter["n"] += 1
        log.info("[%d new] (%d,%d) %s", counter["n"], r.i, r.j, r.label.value)

    try:
        pd = run_sweep(grid, icfg, th, worker_count=args.workers, seed=seed,
                       checkpoint=out / CHECKPOINT_NAME, fresh=args.fresh,
                       max_new_points=args.max_new_points, progress=progress)
    except StaleCheckpointError as exc:
        raise UsageError(str(exc)) from exc
    if pd is None:
        print(f"sweep incomplete: checkpoint in {out / CHECKPOINT_NAME}; rerun to resume")
        return EXIT_OK

    rows = np.array([(df, a, lab.value, k, f0) for df, a, lab, k, f0 in pd.rows()], dtype=object)
    fmt = [FLOAT_FMT, FLOAT_FMT, "%s", FLOAT_FMT, FLOAT_FMT]
    write_table(out / "phase_diagram.tsv", "sweep", cfg,
                ["dfreq_hz", "alpha_ratio", "label", "K", "dominant_freq_hz"], rows,
                {"grid_shape": f"{grid.shape[0]}x{grid.shape[1]}"}, fmt=fmt)

    pairs = boundary_extract(pd)
    brows = np.array([
        (i, j, i2, j2, grid.dfreq_axis[i], grid.gain_axis[j], pd.labels[i, j].value,
         grid.dfreq_axis[i2], grid.gain_axis[j2], pd.labels[i2, j2].value)
        for (i, j), (i2, j2) in pairs
    ], dtype=object).reshape(-1, 10)
    write_table(out / "boundaries.tsv", "sweep", cfg,
                ["i", "j", "i2", "j2", "dfreq_hz", "alpha_ratio", "label",
                 "dfreq2_hz", "alpha_ratio2", "label2"], brows,
                fmt=["%d"] * 4 + [FLOAT_FMT, FLOAT_FMT, "%s", FLOAT_FMT, FLOAT_FMT, "%s"])
    plots.phase_diagram_script(out / "plot_phase_diagram.py")

    counts = {}
    for lab in pd.labels.flat:
        counts[lab.value] = counts.get(lab.value, 0) + 1
    print(f"{total} points: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    return EXIT_OK


# --- robustness -------------------------------------------------------------

def cmd_robustness(args) -> int:
    cfg = _resolved_config(args)
    out = _out_dir(args)
    rob = cfg["robustness"]
    icfg = cfgmod.integration_config(cfg)
    seed = int(cfg["seed"])
    sigmas = [float(s) for s in rob["sigma_b_nt"]]
    repeats = int(rob["repeats"])
    rows = []
    for p, point in enumerate(rob["points"]):
        params = cfgmod.system_params(cfg, point["dfreq_hz"], point["alpha_over_alpha_c"])
        init = default_initial_state(params, cfg["system"]["tilt"])
        try:
            curve = q_curve(params, sigmas, repeats, icfg,
                            independent=rob["mode"] == "independent",
                            seed=seed, point=p, init=init)
        except NumericalBlowUp as exc:
            log.error("%s: numerical blow-up at t = %.9g s", point["name"], exc.time)
            return EXIT_NUMERIC
        for s, m, sd in zip(curve.sigmas, curve.mean, curve.std):
            rows.append((point["name"], point["dfreq_hz"], point["alpha_over_alpha_c"],
                         s, m, sd, repeats))
            log.info("%s sigma=%.4g nT Q=%.4f +- %.4f", point["name"], s, m, sd)
    write_table(out / "q_vs_sigma.tsv", "robustness", cfg,
                ["name", "dfreq_hz", "alpha_ratio", "sigma_b_nt", "q_mean", "q_std", "repeats"],
                np.array(rows, dtype=object).reshape(-1, 7),
                {"noise_mode": rob["mode"]},
                fmt=["%s"] + [FLOAT_FMT] * 5 + ["%d"])
    plots.robustness_script(out / "plot_q_vs_sigma.py")
    print(f"wrote {out / 'q_vs_sigma.tsv'}")
    return EXIT_OK


# --- chaos-test -------------------------------------------------------------

def cmd_chaos_test(args) -> int:
    path = Path(args.input)
    if not path.is_file():
        raise UsageError(f"input table '{path}' not found")
    try:
        data = read_series(path)
    except ValueError as exc:
        raise UsageError(f"malformed table: {exc}") from exc
    series = data[:, -1]
    if args.downsample > 1:
        series = series[:: args.downsample]
    try:
        k = zero_one_k(series, n_c=args.phases, seed=args.seed or 0)
    except (InsufficientDataError, UndefinedKError) as exc:
        raise UsageError(f"{path}: {exc}") from exc
    print(f"{k:.4f}")
    return EXIT_OK


# --- parser -----------------------------------------------------------------

def _shared(p: argparse.ArgumentParser, default_out: str) -> None:
    p.add_argument("--config", metavar="PATH",
                   help="JSON config, or a table exported by a previous run")
    p.add_argument("--out", metavar="DIR", default=default_out, help="output directory")
    p.add_argument("--seed", type=_u64, help="override the config seed")
    p.add_argument("--workers", type=_positive, default=1, help="worker processes (sweep only)")
    p.add_argument("--fresh", action="store_true", help="discard an existing sweep checkpoint")
    p.add_argument("--override", action="append", metavar="KEY=VALUE",
                   help="dot-path override, e.g. system.dfreq_hz=220 (repeatable)")


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dualbloch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"dualbloch {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one parameter point and classify it")
    _shared(p, "out-simulate")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="phase diagram over (dfreq, gain)")
    _shared(p, "out-sweep")
    p.add_argument("--max-new-points", type=_positive, default=None,
                   help="stop after this many new points; rerun to resume")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("robustness", help="Q against field-noise strength")
    _shared(p, "out-robustness")
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("chaos-test", help="0-1 test K of a one- or two-column table")
    p.add_argument("input", help="table of values, or (t, value) rows")
    p.add_argument("--downsample", type=_positive, default=1, help="keep every n-th row")
    p.add_argument("--phases", type=_positive, default=100, help="number of random c values")
    p.add_argument("--seed", type=_u64, default=0)
    p.set_defaults(func=cmd_chaos_test)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, cfgmod.ConfigError, StepSizeError) as exc:
        print(f"dualbloch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientDataError as exc:
        print(f"dualbloch: error: {exc} (lengthen integration.t_total_s)", file=sys.stderr)
        return EXIT_USAGE
    except (UndefinedKError, NumericalBlowUp, FloatingPointError) as exc:
        print(f"dualbloch: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
