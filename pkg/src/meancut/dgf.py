"""Density gradient factor (DGF) and the junction-aware MeanCut pipeline.

``density`` here is the mean distance to the K nearest neighbours, so a
*larger* value means a *sparser* neighbourhood. The DGF of a point averages
``(density[j] - density[i]) / dist(i, j)`` over its neighbours; points sitting
in a density saddle between clusters get strongly negative values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, dedup
from .graphkernel import Kernel, check_dense, distance_rows, degrees
from .objective import Labeling, apply_noise_threshold, greedy_cluster
from .pathsim import pathsim_pipeline

__all__ = [
    "KnnIndex",
    "DgfScores",
    "PointSplit",
    "knn",
    "density_scores",
    "dgf_scores",
    "split_junction",
    "junction_count",
    "assign_nearest",
    "improved_meancut",
    "Prepared",
    "prepare",
    "cluster_prepared",
]


@dataclass(frozen=True)
class KnnIndex:
    """Neighbour indices and distances, each row ascending by distance."""

    idx: np.ndarray
    dist: np.ndarray

    @property
    def K(self) -> int:
        return self.idx.shape[1]


@dataclass(frozen=True)
class DgfScores:
    density: np.ndarray
    dgf: np.ndarray


@dataclass(frozen=True)
class PointSplit:
    internal: np.ndarray
    junction: np.ndarray


def knn(d: Dataset, K: int, chunk: int = 256) -> KnnIndex:
    """Exact brute-force K nearest neighbours (self excluded).

    Ties in distance go to the smaller index.
    """
    n = d.n
    if not 1 <= K <= n - 1:
        raise ValueError(f"K must lie in [1, {n - 1}], got {K}")
    check_dense(n)
    idx = np.empty((n, K), dtype=np.int64)
    dist = np.empty((n, K))
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        block = distance_rows(d.points, rows)
        block[np.arange(len(rows)), rows] = np.inf
        order = np.argsort(block, axis=1, kind="stable")[:, :K]
        idx[rows] = order
        dist[rows] = np.take_along_axis(block, order, axis=1)
    return KnnIndex(idx, dist)


def density_scores(nn: KnnIndex) -> np.ndarray:
    """Mean distance to the K nearest neighbours."""
    return nn.dist.mean(axis=1)


def dgf_scores(nn: KnnIndex, density: np.ndarray | None = None) -> DgfScores:
    density = density_scores(nn) if density is None else np.asarray(density)
    if np.any(nn.dist <= 0):
        raise ValueError("zero distance to a neighbour; remove duplicate points first")
    grad = (density[nn.idx] - density[:, None]) / nn.dist
    return DgfScores(density=density, dgf=grad.mean(axis=1))


def junction_count(percentile: float, n: int) -> int:
    if not 0 <= percentile < 1:
        raise ValueError(f"percentile must lie in [0, 1), got {percentile}")
    # absorb representation error such as 0.29 * 100 = 28.999999999999996
    return int(math.floor(percentile * n + 1e-9))


def split_junction(s: DgfScores, percentile: float) -> PointSplit:
    """The ``floor(percentile * n)`` lowest-DGF points are junction points."""
    n = len(s.dgf)
    cut = junction_count(percentile, n)
    order = np.argsort(s.dgf, kind="stable")
    return PointSplit(internal=np.sort(order[cut:]), junction=np.sort(order[:cut]))


def assign_nearest(x: np.ndarray, targets: np.ndarray, sources: np.ndarray,
                   chunk: int = 512) -> np.ndarray:
    """For each ``targets`` row, the position in ``sources`` of its nearest
    point (ties to the smaller source index)."""
    out = np.empty(len(targets), dtype=np.int64)
    for start in range(0, len(targets), chunk):
        rows = targets[start:start + chunk]
        out[start:start + chunk] = np.argmin(distance_rows(x, rows, sources), axis=1)
    return out


@dataclass
class Prepared:
    """Everything up to the DGF scores, reusable across percentiles."""

    data: Dataset
    unique: Dataset
    dmap: object
    nn: KnnIndex
    scores: DgfScores


def prepare(d: Dataset, K: int) -> Prepared:
    unique, dmap = dedup(d)
    nn = knn(unique, K)
    return Prepared(d, unique, dmap, nn, dgf_scores(nn))


def cluster_prepared(p: Prepared, k: Kernel, ratio: float, percentile: float,
                     noise_threshold: int = 0) -> Labeling:
    split = split_junction(p.scores, percentile)
    if len(split.internal) < 2:
        raise ValueError(f"only {len(split.internal)} internal point(s) left; lower the percentile")
    x = p.unique.points
    core = p.unique.subset(split.internal)
    s = pathsim_pipeline(core, k, ratio)
    lab = apply_noise_threshold(greedy_cluster(s, degrees(s)), noise_threshold)
    label = np.empty(p.unique.n, dtype=np.int64)
    label[split.internal] = lab.label
    if len(split.junction):
        nearest = assign_nearest(x, split.junction, split.internal)
        label[split.junction] = lab.label[nearest]
    return Labeling(p.dmap.broadcast(label))


def improved_meancut(d: Dataset, k: Kernel | None = None, ratio: float = 0.2, K: int = 15,
                     percentile: float = 0.0, noise_threshold: int = 0) -> Labeling:
    """MeanCut with junction points set aside.

    Duplicates are collapsed, the lowest-DGF ``percentile`` of points is held
    out, the rest is clustered (FastMST path similarity + greedy growth +
    noise threshold), and each held-out point takes the label of its nearest
    clustered point. Duplicates receive their representative's label.
    """
    k = Kernel() if k is None else k
    return cluster_prepared(prepare(d, K), k, ratio, percentile, noise_threshold)
