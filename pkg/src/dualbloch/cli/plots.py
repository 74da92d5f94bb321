"""Generated matplotlib scripts that render figures from exported tables.

The scripts only read the tables next to them; deleting a script loses no
data, and regenerating it gives the same bytes.
"""

from __future__ import annotations

from pathlib import Path

from .. import __version__

REGIME_COLORS = {
    "NoSignal": "#ffffff",
    "LimitCycle": "#1f5fbf",
    "QuasiPeriodic": "#7b3fa0",
    "Chaos": "#f28e1c",
    "Failed": "#9a9a9a",
}

_SIMULATE = '''\
# Generated by dualbloch {version}; renders trajectory, section and spectrum.
import json
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).resolve().parent
traj = np.loadtxt(here / "trajectory.tsv", comments="#", ndmin=2)
spec = np.loadtxt(here / "spectrum.tsv", comments="#", ndmin=2)
sec = np.loadtxt(here / "poincare.tsv", comments="#", ndmin=2)
summary = json.loads((here / "summary.json").read_text())

fig = plt.figure(figsize=(13, 4))
ax = fig.add_subplot(1, 3, 1, projection="3d")
tot = traj[:, 1:4] + traj[:, 4:7]
ax.plot(tot[:, 0], tot[:, 1], tot[:, 2], ".", ms=0.3, color="tab:blue")
if sec.size:
    ax.plot(sec[:, 1], np.zeros(len(sec)), sec[:, 2], ".", ms=2, color="red")
ax.set_xlabel("Mx"); ax.set_ylabel("My"); ax.set_zlabel("Mz")
ax.set_title(summary["label"])

ax = fig.add_subplot(1, 3, 2)
n = min(len(traj), 4000)
ax.plot(traj[:n, 0] * 1e3, traj[:n, 7], lw=0.6)
ax.set_xlabel("t (ms)"); ax.set_ylabel("Mx1 + Mx2")

ax = fig.add_subplot(1, 3, 3)
f0 = summary["dominant_freq_hz"] or spec[np.argmax(spec[1:, 1]) + 1, 0]
sel = np.abs(spec[:, 0] - f0) < 800
ax.semilogy(spec[sel, 0], np.maximum(spec[sel, 1], 1e-12), lw=0.7)
ax.set_xlabel("frequency (Hz)"); ax.set_ylabel("amplitude")
fig.tight_layout()
out = here / "simulate.png"
fig.savefig(out, dpi=150)
if "--show" in sys.argv:
    plt.show()
'''

_PHASE = '''\
# Generated by dualbloch {version}; renders the (dfreq, gain) phase diagram.
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import ListedColormap
from matplotlib.patches import Patch

COLORS = {colors!r}
ORDER = list(COLORS)

here = Path(__file__).resolve().parent
rows = np.genfromtxt(here / "phase_diagram.tsv", comments="#", dtype=None, encoding=None)
df = np.array([r[0] for r in rows], float)
gain = np.array([r[1] for r in rows], float)
labels = [str(r[2]) for r in rows]
xs, ys = np.unique(df), np.unique(gain)
grid = np.zeros((len(ys), len(xs)))
for x, y, lab in zip(df, gain, labels):
    grid[np.searchsorted(ys, y), np.searchsorted(xs, x)] = ORDER.index(lab)

fig, ax = plt.subplots(figsize=(6, 4.5))
cmap = ListedColormap([COLORS[k] for k in ORDER])
dx = (xs[1] - xs[0]) / 2 if len(xs) > 1 else 0.5
dy = (ys[1] - ys[0]) / 2 if len(ys) > 1 else 0.5
ax.imshow(grid, origin="lower", aspect="auto", cmap=cmap, vmin=-0.5, vmax=len(ORDER) - 0.5,
          extent=(xs[0] - dx, xs[-1] + dx, ys[0] - dy, ys[-1] + dy), interpolation="nearest")
ax.set_xlabel("frequency splitting (Hz)")
ax.set_ylabel("feedback gain / critical gain")
ax.legend(handles=[Patch(facecolor=COLORS[k], edgecolor="k", label=k) for k in ORDER],
          loc="upper right", fontsize=7)
fig.tight_layout()
fig.savefig(here / "phase_diagram.png", dpi=150)
if "--show" in sys.argv:
    plt.show()
'''

_ROBUSTNESS = '''\
# Generated by dualbloch {version}; renders Q against noise strength.
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

here = Path(__file__).resolve().parent
rows = np.genfromtxt(here / "q_vs_sigma.tsv", comments="#", dtype=None, encoding=None)
fig, ax = plt.subplots(figsize=(5, 4))
for name, color in (("limit_cycle", "tab:blue"), ("quasi_periodic", "tab:red")):
    sel = [r for r in rows if str(r[0]) == name]
    if sel:
        s = np.array([r[3] for r in sel], float)
        ax.errorbar(s, [r[4] for r in sel], yerr=[r[5] for r in sel], marker="o",
                    capsize=3, color=color, label=name)
for name in sorted({{str(r[0]) for r in rows}} - {{"limit_cycle", "quasi_periodic"}}):
    sel = [r for r in rows if str(r[0]) == name]
    ax.errorbar([r[3] for r in sel], [r[4] for r in sel], yerr=[r[5] for r in sel],
                marker="s", capsize=3, label=name)
ax.set_xlabel("field noise sigma_b (nT)")
ax.set_ylabel("Q")
ax.set_ylim(0, 1.05)
ax.legend()
fig.tight_layout()
fig.savefig(here / "q_vs_sigma.png", dpi=150)
if "--show" in sys.argv:
    plt.show()
'''


def _write(path: Path, text: str) -> Path:
    path = Path(path)
    path.write_text(text)
    return path


def simulate_script(path: Path) -> Path:
    return _write(path, _SIMULATE.format(version=__version__))


def phase_diagram_script(path: Path) -> Path:
    return _write(path, _PHASE.format(version=__version__, colors=REGIME_COLORS))


def robustness_script(path: Path) -> Path:
    return _write(path, _ROBUSTNESS.format(version=__version__))
