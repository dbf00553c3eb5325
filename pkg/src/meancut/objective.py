"""The MeanCut objective and its greedy degree-descent minimization.

For a cluster with indicator vector ``x`` (``m`` members out of ``n``)::

    MeanCut(x) = n / (n - m) * (x'Dx - x'Wx) / x'Dx

``x'Dx`` is the degree sum of the members and ``x'Wx`` the sum of ``w`` over
ordered member pairs (diagonal included), so ``x'Lx = x'Dx - x'Wx``. Both are
kept as running sums; nothing of size n x n is built per cluster.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .graphkernel import Kernel, SimilarityMatrix, degrees
from .pathsim import pathsim_pipeline

__all__ = [
    "ClusterState",
    "Labeling",
    "AssumptionReport",
    "meancut_value",
    "try_add",
    "greedy_cluster",
    "apply_noise_threshold",
    "check_assumptions",
    "monotone_trace",
    "meancut_cluster",
]


@dataclass
class ClusterState:
    """A growing cluster.

    ``link[j]`` caches the sum of ``w[i, j]`` over current members ``i`` so a
    candidate can be scored in O(1).
    """

    n: int
    members: list[int] = field(default_factory=list)
    in_cluster: np.ndarray | None = None
    m: int = 0
    sum_deg: float = 0.0
    sum_intra: float = 0.0
    link: np.ndarray | None = None

    def __post_init__(self):
        if self.in_cluster is None:
            self.in_cluster = np.zeros(self.n, dtype=bool)
        if self.link is None:
            self.link = np.zeros(self.n)

    @classmethod
    def seeded(cls, j: int, w: np.ndarray, deg: np.ndarray) -> "ClusterState":
        st = cls(n=len(deg))
        st.add(j, w, deg)
        return st

    def add(self, j: int, w: np.ndarray, deg: np.ndarray) -> None:
        if self.in_cluster[j]:
            raise ValueError(f"point {j} is already a member")
        self.sum_intra += 2.0 * self.link[j] + w[j, j]
        self.sum_deg += deg[j]
        self.m += 1
        self.members.append(j)
        self.in_cluster[j] = True
        self.link += w[j]


def _value(n: int, m: int, sum_deg: float, sum_intra: float) -> float:
    if m == n:
        return 0.0
    return n / (n - m) * (sum_deg - sum_intra) / sum_deg


def meancut_value(st: ClusterState) -> float:
    if st.m < 1:
        raise ValueError("MeanCut of an empty cluster is undefined")
    return _value(st.n, st.m, st.sum_deg, st.sum_intra)


def try_add(st: ClusterState, j: int, w, deg) -> tuple[float, float, float]:
    """Score ``st`` with point ``j`` added, without touching ``st``.

    Returns ``(value, delta_deg, delta_intra)``.
    """
    if st.in_cluster[j]:
        raise ValueError(f"point {j} is already a member")
    w = w.w if isinstance(w, SimilarityMatrix) else w
    d_deg = float(deg[j])
    d_intra = 2.0 * float(st.link[j]) + float(w[j, j])
    return _value(st.n, st.m + 1, st.sum_deg + d_deg, st.sum_intra + d_intra), d_deg, d_intra


@dataclass(frozen=True)
class Labeling:
    """Cluster id per point; ``-1`` marks noise."""

    label: np.ndarray

    @property
    def k(self) -> int:
        return int(self.label.max()) + 1 if np.any(self.label >= 0) else 0

    @property
    def n_noise(self) -> int:
        return int(np.sum(self.label < 0))

    def sizes(self) -> np.ndarray:
        return np.bincount(self.label[self.label >= 0], minlength=self.k)


def degree_order(deg: np.ndarray) -> np.ndarray:
    """Indices by degree descending, ties by ascending index."""
    return np.lexsort((np.arange(len(deg)), -np.asarray(deg)))


def greedy_cluster(s: SimilarityMatrix, deg=None) -> Labeling:
    """Grow clusters one at a time in degree-descending order.

    Each round seeds a cluster with the highest-degree unassigned point and
    sweeps the remaining unassigned points in the same order, keeping a
    point whenever MeanCut does not increase. Rejected points wait for a
    later round, so every point ends up labeled.
    """
    w = s.w if isinstance(s, SimilarityMatrix) else np.asarray(s)
    deg = degrees(SimilarityMatrix(w)) if deg is None else np.asarray(deg, dtype=np.float64)
    n = w.shape[0]
    if w.shape != (n, n) or deg.shape != (n,):
        raise ValueError(f"size mismatch: matrix {w.shape}, degrees {deg.shape}")

    label = np.full(n, -1, dtype=np.int64)
    pending = degree_order(deg)
    cluster = 0
    diag = np.diagonal(w)
    while len(pending):
        seed = int(pending[0])
        link = w[seed].copy()
        m = 1
        sum_deg = float(deg[seed])
        sum_intra = float(diag[seed])
        current = _value(n, m, sum_deg, sum_intra)
        label[seed] = cluster
        rest = []
        for j in pending[1:].tolist():
            cand_deg = sum_deg + deg[j]
            cand_intra = sum_intra + 2.0 * link[j] + diag[j]
            value = _value(n, m + 1, cand_deg, cand_intra)
            if value <= current:
                current = value
                m += 1
                sum_deg = cand_deg
                sum_intra = cand_intra
                link += w[j]
                label[j] = cluster
            else:
                rest.append(j)
        pending = np.asarray(rest, dtype=np.int64)
        cluster += 1
    return Labeling(label)


def apply_noise_threshold(lab: Labeling, t: int) -> Labeling:
    """Relabel clusters with fewer than ``t`` members as noise (-1)."""
    if t < 0:
        raise ValueError("noise threshold must be >= 0")
    label = lab.label
    if t == 0 or lab.k == 0:
        return Labeling(label.copy())
    sizes = lab.sizes()
    keep = sizes >= t
    remap = np.full(len(sizes), -1, dtype=np.int64)
    remap[keep] = np.arange(int(keep.sum()))
    out = np.full_like(label, -1)
    live = label >= 0
    out[live] = remap[label[live]]
    return Labeling(out)


@dataclass(frozen=True)
class AssumptionReport:
    a1_holds: bool
    a2_holds: bool
    a3_holds: bool
    worst_violation: tuple[float, float, float]

    @property
    def all_hold(self) -> bool:
        return self.a1_holds and self.a2_holds and self.a3_holds


def check_assumptions(s: SimilarityMatrix, deg, truth) -> AssumptionReport:
    """Exhaustively test the three cluster-structure inequalities.

    With ``r != s`` in one cluster and ``t`` elsewhere:

    1. ``w[r,s] >= max(w[r,t], w[s,t])``
    2. ``w[r,s] >= max(d[r], d[s]) / n``
    3. ``w[r,s] - d[r]/n >= w[r,t] - w[s,t]`` for every ``t`` in the same
       cluster (``t`` may coincide with ``r``).

    ``worst_violation`` holds the smallest margin per inequality; a margin of
    ``inf`` means the quantifier was empty.
    """
    w = s.w if isinstance(s, SimilarityMatrix) else np.asarray(s)
    deg = np.asarray(deg, dtype=np.float64)
    truth = np.asarray(truth.label if isinstance(truth, Labeling) else truth)
    n = w.shape[0]
    if deg.shape != (n,) or truth.shape != (n,):
        raise ValueError("size mismatch between matrix, degrees and truth")
    if np.any(truth < 0):
        raise ValueError("truth labeling must not contain noise")
    avg = deg / n
    m1 = m2 = m3 = np.inf
    for c in np.unique(truth):
        inside = np.flatnonzero(truth == c)
        outside = np.flatnonzero(truth != c)
        if len(inside) < 2:
            continue
        wc = w[np.ix_(inside, inside)]
        off = ~np.eye(len(inside), dtype=bool)
        if len(outside):
            best_out = w[np.ix_(inside, outside)].max(axis=1)
            need = np.maximum(best_out[:, None], best_out[None, :])
            m1 = min(m1, float((wc - need)[off].min()))
        need = np.maximum(avg[inside][:, None], avg[inside][None, :])
        m2 = min(m2, float((wc - need)[off].min()))
        for a, r in enumerate(inside):
            # min over t of (w[s,t] - w[r,t]) for every s
            spread = (wc - wc[a][None, :]).min(axis=1)
            margin = wc[a] - avg[r] + spread
            margin = np.delete(margin, a)
            m3 = min(m3, float(margin.min()))
    return AssumptionReport(m1 >= 0, m2 >= 0, m3 >= 0, (m1, m2, m3))


def monotone_trace(s: SimilarityMatrix, deg, truth, cluster_id: int) -> list[float]:
    """MeanCut after each addition of a true cluster's members, taken in
    degree-descending order."""
    w = s.w if isinstance(s, SimilarityMatrix) else np.asarray(s)
    deg = np.asarray(deg, dtype=np.float64)
    truth = np.asarray(truth.label if isinstance(truth, Labeling) else truth)
    members = np.flatnonzero(truth == cluster_id)
    if len(members) == 0:
        raise ValueError(f"cluster {cluster_id} not present in truth")
    members = members[degree_order(deg[members])]
    st = ClusterState(n=w.shape[0])
    trace = []
    for j in members.tolist():
        st.add(j, w, deg)
        trace.append(meancut_value(st))
    return trace


def meancut_cluster(d: Dataset, k: Kernel | None = None, ratio: float = 0.2,
                    noise_threshold: int = 0) -> Labeling:
    """Parameter-free MeanCut: FastMST path similarity, then greedy growth."""
    k = Kernel() if k is None else k
    s = pathsim_pipeline(d, k, ratio)
    lab = greedy_cluster(s, degrees(s))
    return apply_noise_threshold(lab, noise_threshold)
