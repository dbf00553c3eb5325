import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import brute_assignment
from meancut.metrics import acc, ari, contingency, evaluate, hungarian, nmi

labelings = st.lists(st.integers(0, 4), min_size=2, max_size=60)


def test_contingency_examples():
    t = contingency([0, 0, 1, 2], [0, 0, 1, 2])
    np.testing.assert_array_equal(t.counts, np.diag([2, 1, 1]))
    t = contingency([0, 0, 0, 1, 1], [7, 7, 7, 7, 7])
    np.testing.assert_array_equal(t.counts, [[3, 2]])
    assert t.counts.sum() == t.n == 5
    with pytest.raises(ValueError):
        contingency([0, 1], [-1, -1], drop_noise=True)


def test_hungarian_examples():
    a = hungarian(np.array([[1, 2], [3, 1]]))
    np.testing.assert_array_equal(a.cols, [0, 1])
    assert a.cost == 2
    c = np.full((4, 4), 100.0)
    np.fill_diagonal(c, 0.0)
    np.testing.assert_array_equal(hungarian(c).cols, np.arange(4))


@pytest.mark.parametrize("n", range(1, 8))
def test_hungarian_matches_brute_force(n):
    rng = np.random.default_rng(n)
    for _ in range(20 if n < 7 else 5):
        cost = rng.integers(0, 50, size=(n, n)).astype(float)
        a = hungarian(cost)
        assert a.cost == brute_assignment(cost)
        assert len(set(a.cols.tolist())) == n


def test_hungarian_rectangular():
    cost = np.array([[4.0, 1.0, 3.0], [2.0, 0.0, 5.0]])
    a = hungarian(cost)
    assert a.cost == brute_assignment(cost) == 3.0
    tall = hungarian(cost.T)
    assert (tall.cols == -1).sum() == 1
    assert tall.cost == 3.0


def test_acc_examples():
    assert acc([0, 0, 1, 1], [0, 1, 1, 1]) == 0.75
    assert acc([0, 1, 2], [2, 0, 1]) == 1.0
    assert acc([0, 0, 1], [-1, -1, -1]) == 0.0
    # noise never matches
    assert acc([0, 0, 1, 1], [0, 0, -1, 1]) == 0.75


def test_nmi_examples():
    assert nmi([0, 0, 1, 1], [1, 1, 0, 0]) == pytest.approx(1.0, abs=1e-15)
    assert nmi([0, 0, 1, 1], [0, 0, 0, 0]) == 0.0
    assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0
    assert nmi([3, 3, 3], [5, 5, 5]) == 1.0


def test_ari_examples():
    assert ari([0, 1], [0, 0]) == 0.0
    assert ari([0, 0, 1, 1, 2], [4, 4, 1, 1, 0]) == 1.0
    assert ari([2, 2], [0, 0]) == 1.0


def test_ari_against_pair_counting(rng):
    for _ in range(10):
        a = rng.integers(0, 3, 25)
        b = rng.integers(0, 4, 25)
        pairs = [(i, j) for i in range(25) for j in range(i + 1, 25)]
        same_a = np.array([a[i] == a[j] for i, j in pairs])
        same_b = np.array([b[i] == b[j] for i, j in pairs])
        index = np.sum(same_a & same_b)
        expected = same_a.sum() * same_b.sum() / len(pairs)
        maximum = (same_a.sum() + same_b.sum()) / 2
        assert ari(a, b) == pytest.approx((index - expected) / (maximum - expected), rel=1e-12)


def test_nmi_against_direct_formula(rng):
    a = rng.integers(0, 3, 40)
    b = rng.integers(0, 4, 40)
    n = 40
    mi = 0.0
    for i in np.unique(b):
        for j in np.unique(a):
            nij = np.sum((b == i) & (a == j))
            if nij:
                mi += nij / n * math.log(n * nij / (np.sum(b == i) * np.sum(a == j)))
    h = lambda x: -sum(c / n * math.log(c / n) for c in np.bincount(x) if c)
    assert nmi(a, b) == pytest.approx(mi / math.sqrt(h(a) * h(b)), rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(labelings)
def test_identical_partitions_score_one(lab):
    assert acc(lab, lab) == 1.0
    assert nmi(lab, lab) == pytest.approx(1.0, abs=1e-12)
    assert ari(lab, lab) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(labelings, labelings, st.permutations(range(5)))
def test_relabeling_invariance(a, b, perm):
    n = min(len(a), len(b))
    a, b = np.array(a[:n]), np.array(b[:n])
    if n < 2:
        return
    pb = np.array(perm)[b]
    assert acc(a, pb) == pytest.approx(acc(a, b), abs=1e-12)
    assert nmi(a, pb) == pytest.approx(nmi(a, b), abs=1e-12)
    assert ari(a, pb) == pytest.approx(ari(a, b), abs=1e-12)
    assert 0.0 <= acc(a, b) <= 1.0 and 0.0 <= nmi(a, b) <= 1.0 and ari(a, b) <= 1.0


def test_evaluate_record():
    rec = evaluate([0, 0, 1, 1], [0, 0, 1, -1])
    assert list(rec) == ["acc", "nmi", "ari", "k_pred", "n_noise"]
    assert rec["k_pred"] == 2 and rec["n_noise"] == 1
    assert isinstance(rec["acc"], float) and isinstance(rec["k_pred"], int)


def test_length_mismatch():
    with pytest.raises(ValueError):
        acc([0, 1], [0])
