"""Phase diagram over (frequency splitting, feedback gain).

Every grid point is integrated from the default initial state and
classified independently, so the result does not depend on scheduling or
worker count. Results stream into an append-only JSON-lines checkpoint
whose header binds a hash of everything that determines the results;
an interrupted sweep resumes by skipping recorded points.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np

from . import __version__
from .analysis.chaos01 import UndefinedKError
from .analysis.classify import Regime, Thresholds, classify_regime
from .analysis.spectrum import InsufficientDataError
from .core import (
    DEFAULT_MEAN_LARMOR_HZ,
    PAPER_GAMMA,
    PAPER_M0,
    PAPER_T1,
    PAPER_T2,
    SystemParams,
    default_initial_state,
)
from .integrator import IntegrationConfig, NumericalBlowUp, integrate

log = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "dualbloch-sweep-checkpoint"
DEFAULT_DFREQ_AXIS = tuple(np.linspace(0.0, 300.0, 31).tolist())
DEFAULT_GAIN_AXIS = tuple(np.linspace(0.5, 24.0, 25).tolist())


class StaleCheckpointError(RuntimeError):
    """The checkpoint on disk belongs to a different sweep definition."""


@dataclass(frozen=True)
class SweepBase:
    """Everything but (dfreq, gain): the mean Larmor frequency stays fixed across the grid."""

    mean_larmor_hz: float = DEFAULT_MEAN_LARMOR_HZ
    t1: float = PAPER_T1
    t2: float = PAPER_T2
    m0: float = PAPER_M0
    gamma: float = PAPER_GAMMA
    tilt: float = 0.1


@dataclass(frozen=True)
class SweepGrid:
    dfreq_axis: tuple[float, ...] = DEFAULT_DFREQ_AXIS  # Hz
    gain_axis: tuple[float, ...] = DEFAULT_GAIN_AXIS    # multiples of alpha_c
    base: SweepBase = SweepBase()

    def __post_init__(self):
        for name in ("dfreq_axis", "gain_axis"):
            axis = tuple(float(v) for v in getattr(self, name))
            if not axis:
                raise ValueError(f"{name} is empty")
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise ValueError(f"{name} must be strictly increasing")
            object.__setattr__(self, name, axis)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.dfreq_axis), len(self.gain_axis)

    def params(self, i: int, j: int) -> SystemParams:
        b = self.base
        return SystemParams.from_split(
            self.dfreq_axis[i], self.gain_axis[j], b.mean_larmor_hz,
            t1=b.t1, t2=b.t2, m0=b.m0, gamma=b.gamma,
        )

    def indices(self) -> Iterable[tuple[int, int]]:
        n_i, n_j = self.shape
        return ((i, j) for i in range(n_i) for j in range(n_j))


@dataclass(frozen=True)
class PointResult:
    i: int
    j: int
    label: Regime
    k: Optional[float]
    peak_count: int
    dominant_freq: Optional[float]
    runtime: float
    note: str = ""

    def to_record(self) -> dict:
        return {
            "i": self.i, "j": self.j, "label": self.label.value, "k": self.k,
            "peak_count": self.peak_count, "dominant_freq_hz": self.dominant_freq,
            "runtime_s": self.runtime, "note": self.note,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "PointResult":
        return cls(int(rec["i"]), int(rec["j"]), Regime(rec["label"]), rec["k"],
                   int(rec["peak_count"]), rec["dominant_freq_hz"],
                   float(rec["runtime_s"]), rec.get("note", ""))


@dataclass(frozen=True)
class PhaseDiagram:
    """Labels indexed ``[i, j]`` with ``i`` over ``dfreq_axis`` and ``j`` over ``gain_axis``.

    ``runtime`` is wall-clock bookkeeping and is excluded from :meth:`same_results`.
    """

    grid: SweepGrid
    labels: np.ndarray       # object array of Regime
    k: np.ndarray            # nan where the 0-1 test was not needed
    peak_count: np.ndarray
    dominant_freq: np.ndarray  # Hz, nan without a line
    runtime: np.ndarray

    @classmethod
    def from_results(cls, grid: SweepGrid, results: Iterable[PointResult]) -> "PhaseDiagram":
        shape = grid.shape
        labels = np.empty(shape, dtype=object)
        k = np.full(shape, np.nan)
        peaks = np.zeros(shape, dtype=int)
        f0 = np.full(shape, np.nan)
        runtime = np.zeros(shape)
        for r in results:
            labels[r.i, r.j] = r.label
            k[r.i, r.j] = np.nan if r.k is None else r.k
            peaks[r.i, r.j] = r.peak_count
            f0[r.i, r.j] = np.nan if r.dominant_freq is None else r.dominant_freq
            runtime[r.i, r.j] = r.runtime
        if any(lbl is None for lbl in labels.flat):
            raise ValueError("missing grid points")
        return cls(grid, labels, k, peaks, f0, runtime)

    def same_results(self, other: "PhaseDiagram") -> bool:
        return (
            self.grid == other.grid
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.k, other.k, equal_nan=True)
            and np.array_equal(self.peak_count, other.peak_count)
            and np.array_equal(self.dominant_freq, other.dominant_freq, equal_nan=True)
        )

    def label_set(self) -> set[Regime]:
        return set(self.labels.flat)

    def rows(self):
        """(dfreq_hz, alpha_ratio, label, K, dominant_freq_hz) per point, row-major."""
        for i, j in self.grid.indices():
            yield (self.grid.dfreq_axis[i], self.grid.gain_axis[j], self.labels[i, j],
                   self.k[i, j], self.dominant_freq[i, j])


def point_seed(seed: int, i: int, j: int) -> int:
    return int(np.random.SeedSequence([int(seed), i, j]).generate_state(1, np.uint64)[0])


def evaluate_point(grid: SweepGrid, i: int, j: int, cfg: IntegrationConfig,
                   thresholds: Thresholds, seed: int) -> PointResult:
    start = time.perf_counter()
    params = grid.params(i, j)
    pseed = point_seed(seed, i, j)
    cfg = dataclasses.replace(cfg, seed=pseed)
    try:
        traj = integrate(params, default_initial_state(params, grid.base.tilt), cfg)
        lab = classify_regime(traj, params, thresholds, seed=pseed)
    except NumericalBlowUp as exc:
        return PointResult(i, j, Regime.FAILED, None, 0, None,
                           time.perf_counter() - start, f"blow-up at t={exc.time:.6g}")
    except (InsufficientDataError, UndefinedKError) as exc:
        return PointResult(i, j, Regime.FAILED, None, 0, None,
                           time.perf_counter() - start, str(exc))
    f0 = None if np.isnan(lab.dominant_freq) else lab.dominant_freq
    return PointResult(i, j, lab.regime, lab.k_statistic, lab.peak_count, f0,
                       time.perf_counter() - start)


def _jsonable(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (tuple, list)):
        return [_jsonable(v) for v in obj]
    return obj


def sweep_hash(grid: SweepGrid, cfg: IntegrationConfig, thresholds: Thresholds, seed: int) -> str:
    """Hash of every input that determines point results (worker count excluded)."""
    doc = {
        "grid": _jsonable(grid),
        "integration": _jsonable(dataclasses.replace(cfg, seed=0)),
        "thresholds": _jsonable(thresholds),
        "seed": int(seed),
        "version": __version__,
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def read_checkpoint(path: Path, expected_hash: str) -> dict[tuple[int, int], PointResult]:
    done: dict[tuple[int, int], PointResult] = {}
    with open(path) as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise StaleCheckpointError(f"{path}: unreadable checkpoint header") from exc
        if header.get("format") != CHECKPOINT_FORMAT or header.get("grid_hash") != expected_hash:
            raise StaleCheckpointError(
                f"{path} was written for a different sweep (hash mismatch); "
                "discard it with fresh=True (CLI: --fresh)"
            )
        for line in fh:
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                # torn final line from an interrupted write
                break
            r = PointResult.from_record(rec)
            done[(r.i, r.j)] = r
    return done


def run_sweep(
    grid: SweepGrid,
    int_cfg: IntegrationConfig = IntegrationConfig(),
    thresholds: Thresholds = Thresholds(),
    worker_count: int = 1,
    seed: int = 0,
    checkpoint: Optional[os.PathLike] = None,
    fresh: bool = False,
    max_new_points: Optional[int] = None,
    progress: Optional[Callable[[PointResult], None]] = None,
) -> Optional[PhaseDiagram]:
    """Classify every grid point; returns ``None`` if stopped early by ``max_new_points``.

    Blow-ups are recorded as ``Regime.FAILED`` and never abort the sweep.
    """
    if worker_count < 1:
        raise ValueError("worker_count must be >= 1")
    digest = sweep_hash(grid, int_cfg, thresholds, seed)
    done: dict[tuple[int, int], PointResult] = {}
    writer = None
    if checkpoint is not None:
        path = Path(checkpoint)
        if path.exists() and not fresh:
            done = read_checkpoint(path, digest)
            writer = open(path, "a")
        else:
            path.parent.mkdir(parents=True, exist_ok=True)
            writer = open(path, "w")
            header = {"format": CHECKPOINT_FORMAT, "grid_hash": digest,
                      "shape": list(grid.shape), "version": __version__}
            writer.write(json.dumps(header) + "\n")
            writer.flush()

    todo = [ij for ij in grid.indices() if ij not in done]
    if max_new_points is not None:
        todo = todo[:max_new_points]
    log.info("sweep %s: %d cached, %d to compute on %d workers",
             digest[:12], len(done), len(todo), worker_count)

    def record(r: PointResult):
        done[(r.i, r.j)] = r
        if writer is not None:
            writer.write(json.dumps(r.to_record()) + "\n")
            writer.flush()
        if progress is not None:
            progress(r)

    try:
        if worker_count == 1 or len(todo) <= 1:
            for i, j in todo:
                record(evaluate_point(grid, i, j, int_cfg, thresholds, seed))
        else:
            with ProcessPoolExecutor(max_workers=worker_count) as pool:
                futures = [pool.submit(evaluate_point, grid, i, j, int_cfg, thresholds, seed)
                           for i, j in todo]
                for fut in as_completed(futures):
                    record(fut.result())
    finally:
        if writer is not None:
            writer.close()

    if len(done) < grid.shape[0] * grid.shape[1]:
        return None
    return PhaseDiagram.from_results(grid, done.values())


def boundary_extract(pd: PhaseDiagram) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """All 4-neighbour pairs with different labels, sorted by index."""
    n_i, n_j = pd.labels.shape
    out = []
    for i in range(n_i):
        for j in range(n_j):
            if i + 1 < n_i and pd.labels[i, j] != pd.labels[i + 1, j]:
                out.append(((i, j), (i + 1, j)))
            if j + 1 < n_j and pd.labels[i, j] != pd.labels[i, j + 1]:
                out.append(((i, j), (i, j + 1)))
    return sorted(out)
