"""Poincaré sections on the plane M_y = 0 and simple geometry of the section points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components, minimum_spanning_tree
from scipy.spatial import Delaunay, QhullError, cKDTree
from scipy.spatial.distance import pdist, squareform

from ..integrator import Trajectory
from .spectrum import InsufficientDataError

_PLANES = {"total": (1, 4), "cell1": (1,), "cell2": (4,)}


@dataclass(frozen=True)
class PoincareSection:
    points: np.ndarray   # (n, 2): total Mx, total Mz at each crossing
    states: np.ndarray   # (n, 6): interpolated full state at each crossing
    times: np.ndarray
    attractor_extent: float  # bounding-box diagonal of the trajectory in the (Mx, Mz) plane

    @property
    def crossing_count(self) -> int:
        return int(self.points.shape[0])


def poincare_section(traj: Trajectory, plane: str = "total",
                     min_crossings: int = 50) -> PoincareSection:
    """Directed (negative to positive) crossings of M_y = 0, refined by cubic interpolation.

    ``plane`` selects the summed M_y of both cells or a single cell's M_y.
    """
    if plane not in _PLANES:
        raise ValueError(f"plane must be one of {sorted(_PLANES)}")
    s = traj.states
    my = s[:, list(_PLANES[plane])].sum(axis=1)
    k = np.nonzero((my[:-1] < 0.0) & (my[1:] >= 0.0))[0]
    if k.size < min_crossings:
        raise InsufficientDataError(
            f"{k.size} section crossings, need at least {min_crossings}"
        )
    frac, states = _cubic_crossings(s, my, k)
    points = np.column_stack([states[:, 0] + states[:, 3], states[:, 2] + states[:, 5]])
    totals = traj.totals
    box = np.ptp(totals[:, [0, 2]], axis=0)
    return PoincareSection(
        points=points,
        states=states,
        times=traj.t0 + (k + frac) * traj.dt_sample,
        attractor_extent=float(np.hypot(*box)),
    )


def _lagrange4(x):
    """Cubic Lagrange weights for nodes -1, 0, 1, 2 evaluated at ``x``; shape (len(x), 4)."""
    return np.column_stack([
        -x * (x - 1) * (x - 2) / 6,
        (x + 1) * (x - 1) * (x - 2) / 2,
        -(x + 1) * x * (x - 2) / 2,
        (x + 1) * x * (x - 1) / 6,
    ])


def _cubic_crossings(s: np.ndarray, my: np.ndarray, k: np.ndarray):
    """Crossing fraction in ``[k, k+1]`` and interpolated states, cubic through k-1..k+2.

    The cubic takes a negative value at 0 and a non-negative one at 1, so
    bisection always brackets a root. Crossings at the ends of the record
    fall back to linear interpolation.
    """
    frac = -my[k] / (my[k + 1] - my[k])
    states = s[k] + frac[:, None] * (s[k + 1] - s[k])
    inner = (k >= 1) & (k + 2 < my.size)
    if not inner.any():
        return frac, states
    ki = k[inner]
    nodes = ki[:, None] + np.arange(-1, 3)
    y = my[nodes]
    lo = np.zeros(ki.size)
    hi = np.ones(ki.size)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        neg = np.sum(_lagrange4(mid) * y, axis=1) < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    x = 0.5 * (lo + hi)
    w = _lagrange4(x)
    frac[inner] = x
    states[inner] = np.einsum("nj,njc->nc", w, s[nodes])
    return frac, states


def _subsample(points: np.ndarray, max_points: int) -> np.ndarray:
    if points.shape[0] <= max_points:
        return points
    idx = np.linspace(0, points.shape[0] - 1, max_points).round().astype(int)
    return points[idx]


@dataclass(frozen=True)
class ClusterSummary:
    count: int
    radii: tuple[float, ...]
    centers: np.ndarray

    @property
    def max_radius(self) -> float:
        return max(self.radii) if self.radii else 0.0


def section_clusters(points, link_distance: float, max_points: int = 2000) -> ClusterSummary:
    """Single-linkage clusters: points closer than ``link_distance`` share a cluster."""
    pts = _subsample(np.asarray(points, dtype=np.float64), max_points)
    n = pts.shape[0]
    pairs = cKDTree(pts).query_pairs(link_distance, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    count, labels = connected_components(graph, directed=False)
    centers, radii = [], []
    for c in range(count):
        members = pts[labels == c]
        center = members.mean(axis=0)
        centers.append(center)
        radii.append(float(np.max(np.linalg.norm(members - center, axis=1))))
    return ClusterSummary(count, tuple(radii), np.array(centers))


@dataclass(frozen=True)
class CurveGaps:
    length: float      # total Euclidean MST length, approximates the curve length
    max_gap: float     # longest MST edge
    closure_gap: float  # distance between the two ends of the MST's longest path

    @property
    def gap_ratio(self) -> float:
        return max(self.max_gap, self.closure_gap) / self.length if self.length > 0 else np.inf


def _emst(pts: np.ndarray):
    try:
        tri = Delaunay(pts)
        edges = set()
        for simplex in tri.simplices:
            a, b, c = sorted(simplex)
            edges.update(((a, b), (a, c), (b, c)))
        e = np.array(sorted(edges))
        w = np.linalg.norm(pts[e[:, 0]] - pts[e[:, 1]], axis=1)
        # zero-length edges would vanish from the sparse graph
        w = np.maximum(w, 1e-300)
        n = pts.shape[0]
        return minimum_spanning_tree(coo_matrix((w, (e[:, 0], e[:, 1])), shape=(n, n)))
    except (QhullError, ValueError):
        d = squareform(pdist(pts))
        return minimum_spanning_tree(np.maximum(d, 1e-300) * (1 - np.eye(len(pts))))


def curve_gaps(points, max_points: int = 4000) -> CurveGaps:
    """Gap structure of a point set that should sample one closed curve.

    A dense, connected, closed curve has a small longest MST edge and the two
    ends of the MST's longest path close together.
    """
    pts = _subsample(np.asarray(points, dtype=np.float64), max_points)
    mst = _emst(pts)
    weights = mst.data
    sym = mst + mst.T
    # tree diameter: farthest node from any node, then farthest from that one
    a = int(np.argmax(_tree_distances(sym, 0)))
    b = int(np.argmax(_tree_distances(sym, a)))
    return CurveGaps(
        length=float(weights.sum()),
        max_gap=float(weights.max()) if weights.size else 0.0,
        closure_gap=float(np.linalg.norm(pts[a] - pts[b])),
    )


def _tree_distances(sym, source: int) -> np.ndarray:
    order, pred = breadth_first_order(sym, source, directed=False, return_predecessors=True)
    dist = np.zeros(sym.shape[0])
    csr = sym.tocsr()
    for node in order[1:]:
        parent = pred[node]
        dist[node] = dist[parent] + csr[parent, node]
    return dist


def correlation_dimension(points, extent: float | None = None,
                          r_min_rel: float = 5e-3, r_max_rel: float = 0.1,
                          n_radii: int = 12, max_points: int = 3000) -> float:
    """Grassberger-Procaccia slope of log C(r) vs log r.

    Radii span ``[r_min_rel, r_max_rel] * extent``. ``extent`` defaults to
    the point set's bounding-box diagonal; pass the attractor extent to judge
    a collapsed section against the size of the whole orbit.
    """
    pts = _subsample(np.asarray(points, dtype=np.float64), max_points)
    if extent is None:
        extent = float(np.hypot(*np.ptp(pts, axis=0)))
    if extent <= 0.0:
        return 0.0
    d = pdist(pts)
    if d.size == 0 or d.max() <= r_min_rel * extent:
        return 0.0
    radii = np.geomspace(r_min_rel * extent, r_max_rel * extent, n_radii)
    d.sort()
    counts = np.searchsorted(d, radii, side="right") / d.size
    ok = counts > 0
    if ok.sum() < 2:
        return 0.0
    return float(np.polyfit(np.log(radii[ok]), np.log(counts[ok]), 1)[0])
