"""Euclidean distances, kernel similarities and vertex degrees."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset

__all__ = [
    "Kernel",
    "SimilarityMatrix",
    "DENSE_CAP",
    "DenseCapError",
    "euclidean",
    "pair_distances",
    "distance_rows",
    "kernel_weight",
    "similarity_matrix",
    "degrees",
]

DENSE_CAP = 20_000


class DenseCapError(MemoryError):
    """Refusal to materialize an n x n matrix above the configured cap."""


def check_dense(n: int, cap: int | None = None) -> None:
    cap = DENSE_CAP if cap is None else cap
    if n > cap:
        raise DenseCapError(f"n={n} exceeds the dense matrix cap of {cap}")


@dataclass(frozen=True)
class Kernel:
    """Radial kernel mapping a distance to a similarity in (0, 1].

    ``gaussian``: exp(-d^2 / (2 sigma^2)); ``laplacian``: exp(-d / (2 sigma^2)).
    """

    kind: str = "laplacian"
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "laplacian"):
            raise ValueError(f"unknown kernel {self.kind!r}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def __call__(self, dist):
        return kernel_weight(self, dist)


@dataclass(frozen=True)
class SimilarityMatrix:
    w: np.ndarray
    pathbased: bool = False

    @property
    def n(self) -> int:
        return self.w.shape[0]


def euclidean(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    acc = 0.0
    for x, y in zip(a.tolist(), b.tolist()):
        acc += (x - y) * (x - y)
    return math.sqrt(acc)


def pair_distances(x: np.ndarray, u, v) -> np.ndarray:
    """Distances between rows ``x[u[i]]`` and ``x[v[i]]``.

    Squared differences are accumulated feature by feature in ascending
    order, so a given pair always yields the same bits no matter which batch
    it is computed in.
    """
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    acc = np.zeros(u.shape[0])
    for f in range(x.shape[1]):
        diff = x[u, f] - x[v, f]
        acc += diff * diff
    return np.sqrt(acc)


def distance_rows(x: np.ndarray, rows, cols=None) -> np.ndarray:
    """Block of distances ``len(rows) x len(cols)`` with the same
    accumulation order as :func:`pair_distances`."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.arange(x.shape[0]) if cols is None else np.asarray(cols, dtype=np.int64)
    acc = np.zeros((rows.shape[0], cols.shape[0]))
    for f in range(x.shape[1]):
        diff = x[rows, f][:, None] - x[cols, f][None, :]
        acc += diff * diff
    return np.sqrt(acc)


def kernel_weight(k: Kernel, dist):
    """Similarity for a distance (scalar or array)."""
    d = np.asarray(dist, dtype=np.float64)
    if np.any(d < 0):
        raise ValueError("distance must be non-negative")
    s2 = 2.0 * k.sigma * k.sigma
    out = np.exp(-(d * d) / s2) if k.kind == "gaussian" else np.exp(-d / s2)
    return float(out) if out.ndim == 0 else out


def similarity_matrix(d: Dataset, k: Kernel, cap: int | None = None,
                      chunk: int = 512) -> SimilarityMatrix:
    """Dense kernel matrix of the fully connected graph (unit diagonal)."""
    check_dense(d.n, cap)
    n = d.n
    w = np.empty((n, n))
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        w[rows] = kernel_weight(k, distance_rows(d.points, rows))
    # (a - b)^2 == (b - a)^2 bitwise, so the fill is exactly symmetric
    np.fill_diagonal(w, 1.0)
    return SimilarityMatrix(w, pathbased=False)


def degrees(s: SimilarityMatrix) -> np.ndarray:
    """Row sums of the weight matrix, self term included."""
    return s.w.sum(axis=1)
