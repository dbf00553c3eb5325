"""Point datasets: CSV ingest, min-max scaling, duplicate removal and synthetic presets."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Dataset",
    "DedupMap",
    "DatasetError",
    "load_csv",
    "minmax_normalize",
    "dedup",
    "mbr_diagonal",
    "gen_synthetic",
    "PRESETS",
]

# tags attached by the generators
TAG_CORE = 0
TAG_BRIDGE = 1
TAG_NOISE = -1


class DatasetError(ValueError):
    """Raised for malformed input files or invalid generator requests."""


@dataclass(frozen=True)
class Dataset:
    """``n`` points in ``dim`` dimensions with optional ground truth.

    ``tags`` is only set by :func:`gen_synthetic` and marks the role each row
    plays in the generated shape (core, bridge, noise).
    """

    points: np.ndarray
    truth: np.ndarray | None = None
    tags: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DatasetError(f"points must be a non-empty 2-D array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DatasetError("points contain NaN or Inf")
        object.__setattr__(self, "points", pts)
        if self.truth is not None:
            truth = np.asarray(self.truth, dtype=np.int64)
            if truth.shape != (pts.shape[0],):
                raise DatasetError(f"truth has length {truth.shape}, expected {pts.shape[0]}")
            object.__setattr__(self, "truth", truth)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(
            self.points[rows],
            None if self.truth is None else self.truth[rows],
            None if self.tags is None else self.tags[rows],
        )


@dataclass(frozen=True)
class DedupMap:
    """``kept[r]`` is the original row of representative ``r``;
    ``owner[i]`` is the original row representing row ``i``."""

    kept: np.ndarray
    owner: np.ndarray

    def broadcast(self, rep_labels) -> np.ndarray:
        """Expand a labeling of the representatives to all original rows."""
        rep_labels = np.asarray(rep_labels)
        slot = np.empty(self.owner.shape[0], dtype=np.int64)
        slot[self.kept] = np.arange(self.kept.shape[0])
        return rep_labels[slot[self.owner]]


def _parse_float(cell: str) -> float | None:
    try:
        value = float(cell)
    except ValueError:
        return None
    return value


def _resolve_column(selector, width: int) -> int:
    if selector == "last":
        return width - 1
    if selector == "first":
        return 0
    try:
        idx = int(selector)
    except (TypeError, ValueError):
        raise DatasetError(f"bad truth column selector {selector!r}") from None
    if not 0 <= idx < width:
        raise DatasetError(f"truth column {idx} out of range for {width} columns")
    return idx


def load_csv(path, truth_column=None) -> Dataset:
    """Read a comma-separated numeric file.

    A first row with any non-numeric cell is taken as a header. The truth
    column (``"last"``, ``"first"`` or a 0-based index) is dropped from the
    features and its values are mapped to 0..k-1 in order of first appearance.
    Truth cells may be arbitrary strings.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise DatasetError(f"{path}: empty file")

    width = len(rows[0])
    tcol = None if truth_column is None else _resolve_column(truth_column, width)

    first = rows[0]
    # the truth cell is exempt: class names are legitimately non-numeric
    if any(_parse_float(c) is None for i, c in enumerate(first) if i != tcol):
        rows = rows[1:]
        line_offset = 2
    else:
        line_offset = 1
    if not rows:
        raise DatasetError(f"{path}: no data rows")

    features = []
    raw_truth = []
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DatasetError(f"{path}: line {r + line_offset} has {len(row)} cells, expected {width}")
        values = []
        for c, cell in enumerate(row):
            if c == tcol:
                raw_truth.append(cell.strip())
                continue
            v = _parse_float(cell)
            if v is None or not math.isfinite(v):
                raise DatasetError(f"{path}: line {r + line_offset}, column {c}: cannot parse {cell!r}")
            values.append(v)
        features.append(values)

    if tcol is not None and width < 2:
        raise DatasetError(f"{path}: no feature columns left after removing truth")

    truth = None
    if tcol is not None:
        ids: dict[str, int] = {}
        truth = np.array([ids.setdefault(t, len(ids)) for t in raw_truth], dtype=np.int64)
    return Dataset(np.array(features, dtype=np.float64), truth)


def minmax_normalize(d: Dataset) -> Dataset:
    """Scale every column to [0, 1]; constant columns become 0."""
    x = d.points
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    out = np.zeros_like(x)
    live = span > 0
    out[:, live] = (x[:, live] - lo[live]) / span[live]
    # guard against 1 + ulp from the division
    np.clip(out, 0.0, 1.0, out=out)
    return Dataset(out, d.truth, d.tags)


def dedup(d: Dataset) -> tuple[Dataset, DedupMap]:
    """Keep the first occurrence of each bitwise-distinct feature vector."""
    x = d.points
    # bitwise view so that -0.0 and 0.0 stay distinct and no tolerance applies
    rows = np.ascontiguousarray(x).view(np.dtype((np.void, x.dtype.itemsize * x.shape[1]))).ravel()
    _, first, inverse = np.unique(rows, return_index=True, return_inverse=True)
    owner = first[inverse.ravel()]
    kept = np.sort(first)
    return d.subset(kept), DedupMap(kept=kept, owner=owner)


def mbr_diagonal(d: Dataset) -> float:
    """Length of the diagonal of the axis-aligned bounding box."""
    extent = d.points.max(axis=0) - d.points.min(axis=0)
    return float(math.sqrt(float(np.sum(extent * extent))))


# -- synthetic presets --------------------------------------------------------


def _split_counts(n: int, weights) -> list[int]:
    weights = np.asarray(weights, dtype=float)
    raw = n * weights / weights.sum()
    counts = np.floor(raw).astype(int)
    for i in np.argsort(-(raw - counts), kind="stable")[: n - counts.sum()]:
        counts[i] += 1
    return counts.tolist()


def _ring_centers(k: int, spacing: float) -> np.ndarray:
    if k == 1:
        return np.zeros((1, 2))
    radius = spacing / (2.0 * math.sin(math.pi / k))
    ang = 2.0 * math.pi * np.arange(k) / k
    return radius * np.column_stack([np.cos(ang), np.sin(ang)])


def _pad(points: np.ndarray, dim: int) -> np.ndarray:
    if dim <= points.shape[1]:
        return points[:, :dim]
    return np.hstack([points, np.zeros((points.shape[0], dim - points.shape[1]))])


def _blobs(rng, n, k=3, sep=10.0, sigma=1.0, dim=2):
    k = int(k)
    if n < 2 * k:
        raise DatasetError(f"blobs needs n >= {2 * k}")
    centers = _pad(_ring_centers(k, sep * sigma), dim)
    pts, truth = [], []
    for c, size in enumerate(_split_counts(n, [1] * k)):
        pts.append(centers[c] + sigma * rng.standard_normal((size, dim)))
        truth.append(np.full(size, c))
    pts = np.vstack(pts)
    return pts, np.concatenate(truth), np.zeros(n, dtype=np.int64)


def _noisy_blobs(rng, n, k=3, sep=10.0, sigma=1.0, dim=2, noise_frac=0.1):
    k = int(k)
    n_noise = int(round(n * noise_frac))
    core = n - n_noise
    if core < 2 * k:
        raise DatasetError(f"noisy_blobs needs at least {2 * k} non-noise points")
    pts, truth, _ = _blobs(rng, core, k=k, sep=sep, sigma=sigma, dim=dim)
    lo = pts.min(axis=0) - 3 * sigma
    hi = pts.max(axis=0) + 3 * sigma
    noise = lo + (hi - lo) * rng.random((n_noise, dim))
    tags = np.concatenate([np.zeros(core, dtype=np.int64), np.full(n_noise, TAG_NOISE)])
    return (
        np.vstack([pts, noise]),
        np.concatenate([truth, np.full(n_noise, -1)]),
        tags,
    )


def _ring_island(rng, n, islands=3, ring_radius=10.0, ring_width=0.3, island_radius=4.0,
                 island_sigma=0.6, ring_frac=0.55):
    islands = int(islands)
    if n < 2 * (islands + 1):
        raise DatasetError(f"ring_island needs n >= {2 * (islands + 1)}")
    sizes = _split_counts(n, [(1 - ring_frac) / islands] * islands + [ring_frac])
    pts, truth = [], []
    ang = 2.0 * math.pi * np.arange(islands) / islands + math.pi / 2
    for c in range(islands):
        center = island_radius * np.array([math.cos(ang[c]), math.sin(ang[c])])
        pts.append(center + island_sigma * rng.standard_normal((sizes[c], 2)))
        truth.append(np.full(sizes[c], c))
    m = sizes[-1]
    theta = 2.0 * math.pi * (np.arange(m) + rng.random(m)) / m
    r = ring_radius + ring_width * rng.standard_normal(m)
    pts.append(np.column_stack([r * np.cos(theta), r * np.sin(theta)]))
    truth.append(np.full(m, islands))
    return np.vstack(pts), np.concatenate(truth), np.zeros(n, dtype=np.int64)


def _path_chain(rng, n, blobs=4, sigma=0.5, path_width=0.15, path_frac=0.4):
    blobs = int(blobs)
    if n < 2 * (blobs + 1):
        raise DatasetError(f"path_chain needs n >= {2 * (blobs + 1)}")
    sizes = _split_counts(n, [(1 - path_frac) / blobs] * blobs + [path_frac])
    pts, truth = [], []
    for c in range(blobs):
        center = np.array([4.0 * c, 6.0 if c % 2 else -6.0])
        pts.append(center + sigma * rng.standard_normal((sizes[c], 2)))
        truth.append(np.full(sizes[c], c))
    m = sizes[-1]
    t = np.sort(rng.random(m)) * 4.0 * max(blobs - 1, 1)
    curve = np.column_stack([t, 1.5 * np.sin(t * math.pi / 4.0)])
    pts.append(curve + path_width * rng.standard_normal((m, 2)))
    truth.append(np.full(m, blobs))
    return np.vstack(pts), np.concatenate(truth), np.zeros(n, dtype=np.int64)


def _weak_bridge(rng, n, gap=10.0, sigma=1.0, bridge_frac=0.05, bridge_width=0.1):
    n_bridge = max(2, int(round(n * bridge_frac)))
    n_bridge += n_bridge % 2
    core = n - n_bridge
    if core < 4:
        raise DatasetError("weak_bridge needs n >= 8")
    sizes = _split_counts(core, [1, 1])
    half = gap / 2.0
    left = np.array([-half, 0.0]) + sigma * rng.standard_normal((sizes[0], 2))
    right = np.array([half, 0.0]) + sigma * rng.standard_normal((sizes[1], 2))
    # bridge spans the gap between the blob rims, symmetric about x = 0
    reach = half - 2.0 * sigma
    k = n_bridge // 2
    xs = reach * (np.arange(k) + 0.5) / k
    xs = np.concatenate([-xs[::-1], xs])
    bridge = np.column_stack([xs, bridge_width * rng.standard_normal(n_bridge)])
    truth = np.concatenate([np.zeros(sizes[0]), np.ones(sizes[1]), (xs > 0).astype(float)])
    tags = np.concatenate([np.zeros(core, dtype=np.int64), np.full(n_bridge, TAG_BRIDGE)])
    return np.vstack([left, right, bridge]), truth.astype(np.int64), tags


PRESETS = {
    "blobs": _blobs,
    "ring_island": _ring_island,
    "path_chain": _path_chain,
    "weak_bridge": _weak_bridge,
    "noisy_blobs": _noisy_blobs,
}


def gen_synthetic(preset: str, n: int, seed: int, **params) -> Dataset:
    """Generate one of the synthetic shape families.

    Parameters
    ----------
    preset : str
        ``blobs``, ``ring_island``, ``path_chain``, ``weak_bridge`` or
        ``noisy_blobs``.
    n : int
        Total number of points.
    seed : int
        Seed for :func:`numpy.random.default_rng`; output is a pure function
        of ``(preset, n, seed, params)``.
    **params
        Preset-specific shape parameters (``k``, ``sep``, ``sigma``,
        ``noise_frac``, ``bridge_frac`` ...).

    Returns
    -------
    Dataset
        Points with ``truth`` (noise rows are ``-1``) and ``tags``.
    """
    try:
        make = PRESETS[preset]
    except KeyError:
        raise DatasetError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}") from None
    rng = np.random.default_rng(seed)
    try:
        pts, truth, tags = make(rng, int(n), **params)
    except TypeError as exc:
        raise DatasetError(f"{preset}: {exc}") from None
    return Dataset(pts, truth, tags)
