"""Parameter sweeps, oracle equivalence checks and the MST ratio benchmark."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, gen_synthetic
from .dgf import cluster_prepared, prepare
from .graphkernel import Kernel, similarity_matrix
from .metrics import evaluate, hungarian
from .mst import eps_components, fast_mst, kruskal_full
from .objective import ClusterState, meancut_value, try_add
from .pathsim import floyd_warshall_maximin, tree_pathsim

__all__ = [
    "SweepSpec",
    "grid",
    "sweep",
    "random_points",
    "ORACLES",
    "run_oracle",
    "bench_mst",
    "bench_dataset",
]

SWEEP_FIELDS = ("K", "percentile", "acc", "nmi", "ari", "k_pred")


def grid(lo: float, hi: float, step: float, digits: int = 10) -> list[float]:
    """Inclusive arithmetic grid, built from integer multiples of ``step``."""
    if step <= 0:
        raise ValueError("step must be positive")
    count = int(np.floor((hi - lo) / step + 1e-9)) + 1
    if count < 1:
        raise ValueError(f"empty range {lo}..{hi}")
    return [round(lo + i * step, digits) for i in range(count)]


@dataclass(frozen=True)
class SweepSpec:
    k_values: tuple[int, ...]
    percentiles: tuple[float, ...]
    metric: str = "acc"

    def __post_init__(self):
        if not self.k_values or not self.percentiles:
            raise ValueError("sweep ranges must be non-empty")
        if self.metric not in ("acc", "nmi", "ari"):
            raise ValueError(f"unknown metric {self.metric!r}")


def sweep(d: Dataset, spec: SweepSpec, kernel: Kernel | None = None, ratio: float = 0.2,
          noise_threshold: int = 0) -> list[dict]:
    """Run the junction-aware pipeline over a (K, percentile) grid.

    Rows come back sorted by ``spec.metric`` descending; ties keep grid order.
    Grid points that leave fewer than two internal points are skipped.
    """
    if d.truth is None:
        raise ValueError("a sweep needs ground-truth labels")
    kernel = Kernel() if kernel is None else kernel
    rows = []
    for K in spec.k_values:
        prepared = prepare(d, K)
        for pct in spec.percentiles:
            try:
                lab = cluster_prepared(prepared, kernel, ratio, pct, noise_threshold)
            except ValueError:
                continue
            scores = evaluate(d.truth, lab.label)
            rows.append({"K": K, "percentile": pct, "acc": scores["acc"], "nmi": scores["nmi"],
                         "ari": scores["ari"], "k_pred": scores["k_pred"]})
    rows.sort(key=lambda r: -r[spec.metric])
    return rows


def random_points(rng: np.random.Generator, n: int, dim: int) -> Dataset:
    """Uniform points plus a tiny jitter; pairwise distances are distinct
    with probability one."""
    x = rng.random((n, dim)) + 1e-9 * rng.standard_normal((n, dim))
    return Dataset(x)


# each oracle returns None on success or a description of the first mismatch


def _oracle_pathsim(rng, n):
    d = random_points(rng, n, int(rng.choice([2, 8])))
    k = Kernel("laplacian", 1.0)
    fast = tree_pathsim(kruskal_full(d, k), n).w
    slow = floyd_warshall_maximin(similarity_matrix(d, k)).w
    if not np.array_equal(fast, slow):
        i, j = np.argwhere(fast != slow)[0]
        return f"pair ({i},{j}): tree {fast[i, j]!r} vs Floyd-Warshall {slow[i, j]!r}"
    return None


def _oracle_mst(rng, n):
    d = random_points(rng, n, int(rng.choice([2, 3, 5])))
    k = Kernel()
    ratio = float(rng.choice(grid(0.05, 0.95, 0.05)))
    ref = kruskal_full(d, k)
    t = fast_mst(d, k, ratio)
    if t.edge_set() != ref.edge_set():
        return f"ratio={ratio}: edge sets differ ({len(t.edge_set() ^ ref.edge_set())} edges)"
    sizes = eps_components(d, t.eps).sizes
    expected = (n * n - int(np.sum(sizes.astype(np.int64) ** 2))) // 2
    if t.n_candidates != expected:
        return f"ratio={ratio}: {t.n_candidates} cross candidates, expected {expected}"
    return None


def _oracle_hungarian(rng, n):
    cost = rng.integers(0, 100, size=(n, n)).astype(float)
    got = hungarian(cost).cost
    best = min(sum(cost[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))
    if got != best:
        return f"cost {got} vs brute force {best}\n{cost}"
    return None


def _oracle_meancut(rng, n):
    d = random_points(rng, n, 2)
    w = floyd_warshall_maximin(similarity_matrix(d, Kernel())).w
    deg = w.sum(axis=1)
    order = rng.permutation(n)
    st = ClusterState(n=n)
    st.add(int(order[0]), w, deg)
    for step, j in enumerate(order[1:].tolist(), start=2):
        value, _, _ = try_add(st, j, w, deg)
        x = np.zeros(n)
        x[order[:step]] = 1.0
        dxd = x @ (deg * x)
        lap = dxd - x @ w @ x
        dense = 0.0 if step == n else n / (n - step) * lap / dxd
        if abs(value - dense) > 1e-12 * max(1.0, abs(dense)):
            return f"step {step}: incremental {value!r} vs dense {dense!r}"
        st.add(j, w, deg)
        if abs(meancut_value(st) - value) > 1e-12 * max(1.0, abs(value)):
            return f"step {step}: committed value drifted"
    return None


ORACLES = {
    "pathsim": _oracle_pathsim,
    "mst": _oracle_mst,
    "hungarian": _oracle_hungarian,
    "meancut": _oracle_meancut,
}


def run_oracle(kind: str, n: int, trials: int, seed: int) -> tuple[int, str | None]:
    """Run ``trials`` random instances; returns (passed, first failure)."""
    check = ORACLES[kind]
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        failure = check(rng, n)
        if failure is not None:
            return trial, f"trial {trial}: {failure}"
    return trials, None


def _timed(fn, repeats: int):
    """Median wall-clock milliseconds over ``repeats`` calls, plus the first result."""
    times, first = [], None
    for r in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append((time.perf_counter() - t0) * 1000.0)
        if r == 0:
            first = out
    return float(np.median(times)), first


def bench_mst(d: Dataset, ratios, repeats: int = 3, kernel: Kernel | None = None) -> list[dict]:
    """Median FastMST runtime per ratio, plus a full-Kruskal baseline row
    (``ratio`` = ``"kruskal"``)."""
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    kernel = Kernel() if kernel is None else kernel
    # compile the union-find kernel before timing anything
    fast_mst(Dataset(d.points[:3]), kernel, 0.5)
    rows = []
    for ratio in ratios:
        ms, t = _timed(lambda: fast_mst(d, kernel, ratio), repeats)
        rows.append({"ratio": ratio, "subtree_count": t.n_subtrees, "median_runtime_ms": ms})
    ms, _ = _timed(lambda: kruskal_full(d, kernel), repeats)
    rows.append({"ratio": "kruskal", "subtree_count": 1, "median_runtime_ms": ms})
    return rows


def bench_dataset(n: int, seed: int) -> Dataset:
    """2-D blobs used by the MST benchmark."""
    return gen_synthetic("blobs", n, seed, k=5, sep=8.0, sigma=1.0)
