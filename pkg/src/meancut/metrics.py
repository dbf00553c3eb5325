"""External validation: ACC (optimal label mapping), NMI and ARI.

Noise convention (pred label -1): for ACC noise points can never match, for
NMI and ARI all noise points together form one extra cluster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "ContingencyTable",
    "Assignment",
    "contingency",
    "hungarian",
    "acc",
    "nmi",
    "ari",
    "evaluate",
]


@dataclass(frozen=True)
class ContingencyTable:
    """``counts[i, j]`` = points with predicted cluster i and true class j."""

    counts: np.ndarray
    n: int

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)


@dataclass(frozen=True)
class Assignment:
    cols: np.ndarray
    cost: float


def _labels(x) -> np.ndarray:
    x = getattr(x, "label", x)
    return np.asarray(x, dtype=np.int64).ravel()


def contingency(truth, pred, drop_noise: bool = False) -> ContingencyTable:
    """Overlap counts between predicted clusters (rows) and classes (columns).

    Labels are compacted to dense ranges first. With ``drop_noise`` points
    whose predicted label is -1 are left out of the table.
    """
    truth, pred = _labels(truth), _labels(pred)
    if truth.shape != pred.shape:
        raise ValueError(f"length mismatch: {truth.shape[0]} vs {pred.shape[0]}")
    if drop_noise:
        keep = pred >= 0
        truth, pred = truth[keep], pred[keep]
    if truth.size == 0:
        raise ValueError("no points to compare")
    _, t = np.unique(truth, return_inverse=True)
    _, p = np.unique(pred, return_inverse=True)
    counts = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(counts, (p.ravel(), t.ravel()), 1)
    return ContingencyTable(counts, int(truth.size))


def hungarian(cost) -> Assignment:
    """Minimum-cost injective row-to-column assignment.

    Rectangular inputs are padded with zero-cost dummies to a square, so every
    real row gets a real column when ``rows <= cols``; ``cols[i] == -1`` marks
    a row left unmatched.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ValueError("cost must be a 2-D matrix")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix contains non-finite entries")
    r, c = cost.shape
    size = max(r, c)
    padded = np.zeros((size, size))
    padded[:r, :c] = cost
    rows, cols = linear_sum_assignment(padded)
    out = np.full(r, -1, dtype=np.int64)
    real = (rows < r) & (cols < c)
    out[rows[real]] = cols[real]
    return Assignment(out, float(cost[rows[real], cols[real]].sum()))


def acc(truth, pred) -> float:
    """Fraction of points matched under the best one-to-one label map."""
    truth, pred = _labels(truth), _labels(pred)
    n = truth.size
    if n == 0:
        raise ValueError("no points to compare")
    if np.all(pred < 0):
        return 0.0
    table = contingency(truth, pred, drop_noise=True)
    a = hungarian(-table.counts)
    return -a.cost / n


def _entropy(sizes: np.ndarray, n: int) -> float:
    p = sizes[sizes > 0] / n
    return float(-np.sum(p * np.log(p)))


def _same_partition(truth, pred) -> bool:
    table = contingency(truth, pred).counts
    return bool(np.all((table > 0).sum(axis=0) == 1) and np.all((table > 0).sum(axis=1) == 1))


def nmi(truth, pred) -> float:
    """Mutual information over the geometric mean of the two entropies."""
    table = contingency(truth, pred)
    n = table.n
    c = table.counts.astype(np.float64)
    a, b = table.row_sums, table.col_sums
    ha, hb = _entropy(a, n), _entropy(b, n)
    if ha == 0.0 or hb == 0.0:
        return 1.0 if _same_partition(truth, pred) else 0.0
    nz = c > 0
    outer = np.outer(a, b).astype(np.float64)
    mi = float(np.sum(c[nz] / n * np.log(n * c[nz] / outer[nz])))
    return max(0.0, min(1.0, mi / math.sqrt(ha * hb)))


def _comb2(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1) / 2.0


def ari(truth, pred) -> float:
    """Adjusted Rand index by pair counting (Hubert-Arabie form)."""
    table = contingency(truth, pred)
    index = float(_comb2(table.counts).sum())
    sa = float(_comb2(table.row_sums).sum())
    sb = float(_comb2(table.col_sums).sum())
    total = float(_comb2(table.n))
    expected = sa * sb / total if total > 0 else 0.0
    maximum = 0.5 * (sa + sb)
    if maximum == expected:
        return 1.0 if _same_partition(truth, pred) else 0.0
    return (index - expected) / (maximum - expected)


def evaluate(truth, pred) -> dict:
    """Metrics record with the fixed field order used for JSON output."""
    pred_l = _labels(pred)
    live = pred_l[pred_l >= 0]
    return {
        "acc": float(acc(truth, pred_l)),
        "nmi": float(nmi(truth, pred_l)),
        "ari": float(ari(truth, pred_l)),
        "k_pred": int(len(np.unique(live))),
        "n_noise": int(np.sum(pred_l < 0)),
    }
