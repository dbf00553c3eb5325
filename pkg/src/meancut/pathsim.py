"""Maximin (path-based) similarity.

The path-based similarity of two points is the best, over all paths between
them, of the weakest edge on the path. On a complete graph the maximum
spanning tree carries every optimal path, so the value for a pair is the
weakest edge on its unique tree path.
"""

from __future__ import annotations

import numpy as np

from .dataset import Dataset
from .graphkernel import Kernel, SimilarityMatrix, check_dense
from .mst import SpanningTree, fast_mst

__all__ = ["ORACLE_CAP", "floyd_warshall_maximin", "tree_pathsim", "pathsim_pipeline"]

ORACLE_CAP = 1_000


def floyd_warshall_maximin(s: SimilarityMatrix, cap: int = ORACLE_CAP) -> SimilarityMatrix:
    """O(n^3) reference: relax every pair through each transition vertex."""
    if s.pathbased:
        raise ValueError("input is already a path-based matrix")
    n = s.n
    if n > cap:
        raise ValueError(f"n={n} exceeds the Floyd-Warshall oracle cap of {cap}")
    w = s.w.copy()
    for t in range(n):
        np.maximum(w, np.minimum(w[:, t:t + 1], w[t:t + 1, :]), out=w)
    np.fill_diagonal(w, 1.0)
    return SimilarityMatrix(w, pathbased=True)


def tree_pathsim(t: SpanningTree, n: int | None = None) -> SimilarityMatrix:
    """Path-based similarities from a maximum spanning tree.

    Tree edges are merged strongest first; when an edge of similarity ``s``
    joins two groups, ``s`` is the weakest link on the tree path of every
    cross pair, so the whole block is filled with it.
    """
    n = t.n if n is None else n
    if n != t.n or not t.is_spanning():
        raise ValueError(f"tree does not span {n} points")
    check_dense(n)
    w = np.empty((n, n))
    np.fill_diagonal(w, 1.0)
    members = [[i] for i in range(n)]
    group = np.arange(n)
    order = np.argsort(-t.sim, kind="stable")
    for e in order:
        a, b = group[t.u[e]], group[t.v[e]]
        ga, gb = members[a], members[b]
        if len(ga) < len(gb):
            a, b, ga, gb = b, a, gb, ga
        ia = np.asarray(ga)
        ib = np.asarray(gb)
        s = t.sim[e]
        w[np.ix_(ia, ib)] = s
        w[np.ix_(ib, ia)] = s
        group[ib] = a
        ga.extend(gb)
        members[b] = []
    return SimilarityMatrix(w, pathbased=True)


def pathsim_pipeline(d: Dataset, k: Kernel, ratio: float = 0.2) -> SimilarityMatrix:
    return tree_pathsim(fast_mst(d, k, ratio), d.n)
