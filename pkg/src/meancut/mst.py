"""Spanning trees of the complete Euclidean graph: plain Kruskal and FastMST.

Both kernels are strictly decreasing in distance, so the maximum spanning
tree in similarity is the minimum spanning tree in distance. Everything here
works with distances; similarities are attached to the final edges only.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numba
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .dataset import Dataset, mbr_diagonal
from .graphkernel import Kernel, check_dense, distance_rows, kernel_weight, pair_distances

__all__ = [
    "TreeEdge",
    "SpanningTree",
    "ComponentLabels",
    "DisjointSet",
    "kruskal_full",
    "eps_components",
    "fast_mst",
    "tree_total",
]

log = logging.getLogger(__name__)


class TreeEdge(NamedTuple):
    u: int
    v: int
    dist: float
    sim: float


@dataclass
class SpanningTree:
    """``n - 1`` edges stored column-wise, in construction order.

    FastMST fills the diagnostic fields: ``eps``, the sizes of the
    eps-components and the number of cross-component candidate edges sorted
    in the second phase.
    """

    n: int
    u: np.ndarray
    v: np.ndarray
    dist: np.ndarray
    sim: np.ndarray
    eps: float | None = None
    component_sizes: np.ndarray | None = field(default=None, repr=False)
    n_candidates: int = 0

    @property
    def edges(self) -> list[TreeEdge]:
        return [TreeEdge(int(a), int(b), float(c), float(s))
                for a, b, c, s in zip(self.u, self.v, self.dist, self.sim)]

    @property
    def n_subtrees(self) -> int:
        return 1 if self.component_sizes is None else len(self.component_sizes)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(min(a, b)), int(max(a, b))) for a, b in zip(self.u, self.v)}

    def is_spanning(self) -> bool:
        if len(self.u) != self.n - 1:
            return False
        ds = DisjointSet(self.n)
        for a, b in zip(self.u.tolist(), self.v.tolist()):
            if a == b or not ds.union(a, b):
                return False
        return ds.n_sets == 1

    def dump(self, path) -> None:
        """Write ``u,v,dist,sim`` lines in construction order."""
        with open(path, "w") as fh:
            for e in self.edges:
                fh.write(f"{e.u},{e.v},{e.dist!r},{e.sim!r}\n")


@dataclass(frozen=True)
class ComponentLabels:
    comp: np.ndarray
    sizes: np.ndarray

    @property
    def m(self) -> int:
        return len(self.sizes)


class DisjointSet:
    """Union-find with path halving and union by rank."""

    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)
        self.rank = np.zeros(n, dtype=np.int64)
        self.n_sets = n

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return int(a)

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of ``a`` and ``b``; False if already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        self.n_sets -= 1
        return True

    def scan(self, u: np.ndarray, v: np.ndarray, limit: int) -> np.ndarray:
        """Kruskal pass over pre-sorted edges; returns accepted positions."""
        if limit <= 0 or len(u) == 0:
            return np.empty(0, dtype=np.int64)
        taken = _kruskal_scan(np.ascontiguousarray(u, dtype=np.int64),
                              np.ascontiguousarray(v, dtype=np.int64),
                              self.parent, self.rank, limit)
        self.n_sets -= len(taken)
        return taken


@numba.njit(cache=True)
def _find(parent, a):
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


@numba.njit(cache=True)
def _kruskal_scan(u, v, parent, rank, limit):
    taken = np.empty(min(limit, len(u)), dtype=np.int64)
    k = 0
    for i in range(len(u)):
        ra = _find(parent, u[i])
        rb = _find(parent, v[i])
        if ra == rb:
            continue
        if rank[ra] < rank[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        if rank[ra] == rank[rb]:
            rank[ra] += 1
        taken[k] = i
        k += 1
        if k == limit:
            break
    return taken[:k]


def _sorted_by_distance(u, v, dist):
    """Order edges by (dist, u, v). Inputs must already be in (u, v) order."""
    order = np.argsort(dist)
    sd = dist[order]
    tied = sd[1:] == sd[:-1]
    if tied.any():
        # quicksort is not stable: restore input order inside runs of equal distance
        run = np.concatenate(([0], np.cumsum(~tied)))
        inside = np.concatenate(([False], tied)) | np.concatenate((tied, [False]))
        pos = np.flatnonzero(inside)
        order[pos] = order[pos][np.lexsort((order[pos], run[pos]))]
    return u[order], v[order], dist[order]


def _all_pairs(x: np.ndarray, comp: np.ndarray | None = None, chunk: int = 256):
    """Pairs i < j (optionally only across components) in lexicographic order."""
    n = x.shape[0]
    us, vs, ds = [], [], []
    cols = np.arange(n)
    for start in range(0, n - 1, chunk):
        rows = np.arange(start, min(start + chunk, n - 1))
        block = distance_rows(x, rows, cols[start + 1:])
        keep = cols[start + 1:][None, :] > rows[:, None]
        if comp is not None:
            keep &= comp[start + 1:][None, :] != comp[rows][:, None]
        r, c = np.nonzero(keep)
        us.append(rows[r])
        vs.append(c + start + 1)
        ds.append(block[r, c])
    if not us:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    return np.concatenate(us), np.concatenate(vs), np.concatenate(ds)


def _build(n, u, v, dist, k: Kernel, **info) -> SpanningTree:
    return SpanningTree(n, u.astype(np.int64), v.astype(np.int64), dist,
                        np.asarray(kernel_weight(k, dist), dtype=np.float64).reshape(-1), **info)


def kruskal_full(d: Dataset, k: Kernel, cap: int | None = None) -> SpanningTree:
    """Minimum spanning tree (by distance) of the complete graph."""
    check_dense(d.n, cap)
    u, v, dist = _sorted_by_distance(*_all_pairs(d.points))
    ds = DisjointSet(d.n)
    taken = ds.scan(u, v, d.n - 1)
    return _build(d.n, u[taken], v[taken], dist[taken], k)


def _pairs_within(x: np.ndarray, eps: float):
    """All pairs i < j with distance <= eps, in lexicographic order."""
    tree = cKDTree(x)
    # widen the query slightly and re-filter with our own distance bits
    pairs = tree.query_pairs(eps * (1 + 1e-9) + 1e-300, output_type="ndarray")
    if len(pairs) == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    pairs = pairs.astype(np.int64)
    n = x.shape[0]
    key = np.sort(np.minimum(pairs[:, 0], pairs[:, 1]) * n + np.maximum(pairs[:, 0], pairs[:, 1]))
    u, v = key // n, key % n
    dist = pair_distances(x, u, v)
    keep = dist <= eps
    return u[keep], v[keep], dist[keep]


def _label_components(n, u, v) -> ComponentLabels:
    graph = coo_matrix((np.ones(len(u)), (u, v)), shape=(n, n))
    _, raw = connected_components(graph, directed=False)
    # renumber so that ids follow the smallest member index
    first = np.full(raw.max() + 1, n, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(n))
    rank = np.empty_like(first)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    comp = rank[raw]
    return ComponentLabels(comp=comp, sizes=np.bincount(comp))


def eps_components(d: Dataset, eps: float) -> ComponentLabels:
    """Connected components of the graph linking points at distance <= eps.

    This is DBSCAN with ``minPts = 1``: every point is a core point and no
    point is noise.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    u, v, _ = _pairs_within(d.points, eps)
    return _label_components(d.n, u, v)


def fast_mst(d: Dataset, k: Kernel, ratio: float = 0.2) -> SpanningTree:
    """Two-phase Kruskal on eps-components.

    ``eps = ratio * mbr_diagonal(d)``. Phase 1 builds a sub-tree inside each
    eps-component from the edges no longer than ``eps``; phase 2 joins the
    sub-trees with Kruskal over all cross-component pairs. The edge set equals
    :func:`kruskal_full` (same tie-breaking).
    """
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    n = d.n
    if n == 1:
        empty = np.empty(0, dtype=np.int64)
        return SpanningTree(1, empty, empty, np.empty(0), np.empty(0), eps=0.0,
                            component_sizes=np.array([1]))
    x = d.points
    eps = mbr_diagonal(d) * ratio
    if eps > 0:
        pu, pv, pd = _pairs_within(x, eps)
    else:
        pu = pv = np.empty(0, dtype=np.int64)
        pd = np.empty(0)
    labels = _label_components(n, pu, pv)

    ds = DisjointSet(n)
    pu, pv, pd = _sorted_by_distance(pu, pv, pd)
    t1 = ds.scan(pu, pv, n - 1)
    u, v, dist = [pu[t1]], [pv[t1]], [pd[t1]]

    n_candidates = 0
    if labels.m > 1:
        cu, cv, cd = _sorted_by_distance(*_all_pairs(x, labels.comp))
        n_candidates = len(cu)
        t2 = ds.scan(cu, cv, labels.m - 1)
        u.append(cu[t2])
        v.append(cv[t2])
        dist.append(cd[t2])
    log.debug("fast_mst: eps=%g, %d sub-trees, %d phase-2 candidates", eps, labels.m, n_candidates)
    return _build(n, np.concatenate(u), np.concatenate(v), np.concatenate(dist), k,
                  eps=eps, component_sizes=labels.sizes, n_candidates=n_candidates)


def tree_total(t: SpanningTree) -> tuple[float, float]:
    return float(np.sum(t.dist)), float(np.sum(t.sim))
