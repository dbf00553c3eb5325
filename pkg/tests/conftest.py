"""Independent reference implementations used as test oracles.

None of these reuse package code paths: they are deliberately naive.
"""

import itertools
import math

import numpy as np
import pytest


def brute_dist(x):
    n = len(x)
    d = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            d[i, j] = math.sqrt(sum((a - b) ** 2 for a, b in zip(x[i], x[j])))
    return d


def prim_total(x):
    """O(n^2) Prim on the complete Euclidean graph; returns total length."""
    d = brute_dist(x)
    n = len(x)
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    best[0] = 0.0
    total = 0.0
    for _ in range(n):
        i = int(np.argmin(np.where(in_tree, np.inf, best)))
        in_tree[i] = True
        total += best[i]
        best = np.minimum(best, d[i])
    return total


def brute_knn(x, K):
    d = brute_dist(x)
    out = []
    for i in range(len(x)):
        cand = sorted((d[i, j], j) for j in range(len(x)) if j != i)
        out.append([j for _, j in cand[:K]])
    return np.array(out)


def dense_meancut(w, members):
    """MeanCut from explicit D, L and indicator matrices."""
    n = w.shape[0]
    x = np.zeros(n)
    x[list(members)] = 1.0
    D = np.diag(w.sum(axis=1))
    L = D - w
    m = len(members)
    if m == n:
        return 0.0
    return n / (n - m) * float(x @ L @ x) / float(x @ D @ x)


def tree_path_min(n, edges, a, b):
    """Weakest edge on the tree path a -> b, found by DFS."""
    adj = {i: [] for i in range(n)}
    for u, v, s in edges:
        adj[u].append((v, s))
        adj[v].append((u, s))
    stack = [(a, -1, math.inf)]
    while stack:
        node, parent, low = stack.pop()
        if node == b:
            return low
        for nxt, s in adj[node]:
            if nxt != parent:
                stack.append((nxt, node, min(low, s)))
    raise AssertionError("disconnected tree")


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def brute_assignment(cost):
    r, c = cost.shape
    best = math.inf
    for perm in itertools.permutations(range(c), r):
        best = min(best, sum(cost[i, perm[i]] for i in range(r)))
    return best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
