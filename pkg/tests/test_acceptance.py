"""End-to-end acceptance checks.

Each test prints one ``[criterion N] PASS|FAIL`` line (visible in ``pytest -v``
output) before asserting, so a failing criterion is still reported.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from conftest import brute_assignment
from meancut.cli import main
from meancut.dataset import gen_synthetic, load_csv, minmax_normalize
from meancut.experiments import SweepSpec, bench_dataset, bench_mst, grid, random_points, sweep
from meancut.graphkernel import Kernel, degrees, similarity_matrix
from meancut.metrics import acc, ari, hungarian, nmi
from meancut.mst import eps_components, fast_mst, kruskal_full
from meancut.objective import check_assumptions, meancut_cluster, monotone_trace
from meancut.pathsim import floyd_warshall_maximin, pathsim_pipeline, tree_pathsim

DATA = Path(__file__).resolve().parents[1] / "data"
RATIOS = grid(0.05, 0.95, 0.05)


@pytest.fixture
def report(capsys):
    def _report(crit, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {crit}] {'PASS' if ok else 'FAIL'}: {detail}")
    return _report


def test_c1_tree_pathsim_equals_floyd_warshall(report):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    mismatches = 0
    k = Kernel()
    for trial in range(100):
        d = random_points(rng, 64, 2 if trial % 2 == 0 else 8)
        fast = tree_pathsim(kruskal_full(d, k), d.n).w
        slow = floyd_warshall_maximin(similarity_matrix(d, k)).w
        mismatches += int(not np.array_equal(fast, slow))
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 60
    report(1, ok, f"100 datasets n=64, {mismatches} mismatching, {elapsed:.1f}s (limit 60s)")
    assert ok


def test_c2_fast_mst_equals_kruskal(report):
    rng = np.random.default_rng(7)
    sizes = np.unique(np.geomspace(20, 2000, 50).astype(int))
    sizes = np.concatenate([sizes, rng.integers(20, 400, 50 - len(sizes))])
    t0 = time.perf_counter()
    bad_edges = bad_counts = 0
    k = Kernel()
    for n in sizes.tolist():
        d = random_points(rng, n, int(rng.choice([2, 3, 5])))
        ref = kruskal_full(d, k).edge_set()
        for ratio in RATIOS:
            t = fast_mst(d, k, ratio)
            bad_edges += int(t.edge_set() != ref)
            a = eps_components(d, t.eps).sizes.astype(np.int64)
            bad_counts += int(2 * t.n_candidates != n * n - int(np.sum(a * a)))
    elapsed = time.perf_counter() - t0
    ok = bad_edges == 0 and bad_counts == 0 and elapsed < 300
    report(2, ok, f"{len(sizes)} datasets n<={sizes.max()} x {len(RATIOS)} ratios: "
                  f"{bad_edges} edge-set and {bad_counts} candidate-count mismatches, {elapsed:.1f}s (limit 300s)")
    assert ok


def test_c3_degree_descent_monotone(report):
    confirmed = violations = tried = 0
    seed = 0
    while confirmed < 50 and seed < 300:
        d = minmax_normalize(gen_synthetic("blobs", 60, seed, k=3, sep=20.0))
        seed += 1
        tried += 1
        s = pathsim_pipeline(d, Kernel())
        deg = degrees(s)
        if not check_assumptions(s, deg, d.truth).all_hold:
            continue
        confirmed += 1
        for c in np.unique(d.truth):
            trace = np.asarray(monotone_trace(s, deg, d.truth, int(c)))
            violations += int(np.any(np.diff(trace) > 1e-12))
    ok = confirmed >= 50 and violations == 0
    report(3, ok, f"{confirmed} of {tried} blob datasets satisfy all three assumptions, "
                  f"{violations} non-monotone traces")
    assert ok


# (file, ACC, NMI, ARI) means reported for the method
TARGETS = {
    "Iris": ("iris.csv", 0.9070, 0.7599, 0.7574),
    "Wine": ("wine.csv", 0.9567, 0.8495, 0.8699),
    "Seeds": ("seeds.csv", 0.9205, 0.7606, 0.7826),
    "Breast-Cancer": ("breast_cancer.csv", 0.9722, 0.8178, 0.8910),
}


@pytest.mark.parametrize("name", [
    "Iris", "Wine",
    pytest.param("Seeds", marks=pytest.mark.xfail(strict=True, raises=FileNotFoundError,
                                                   reason="Seeds data file not obtainable offline")),
    "Breast-Cancer",
])
def test_c4_real_data_sweep(name, report):
    fname, *target = TARGETS[name]
    path = DATA / fname
    if not path.exists():
        report(4, False, f"{name}: data file {fname} missing, sweep not run")
        raise FileNotFoundError(path)
    d = minmax_normalize(load_csv(path, "last"))
    t0 = time.perf_counter()
    rows = sweep(d, SweepSpec(tuple(range(10, 41)), tuple(grid(0.6, 0.99, 0.01))), Kernel(), 0.2)
    elapsed = time.perf_counter() - t0
    best = [max(r[m] for r in rows) for m in ("acc", "nmi", "ari")]
    ok = all(b >= t - 0.05 for b, t in zip(best, target)) and elapsed < 600
    detail = ", ".join(f"{m} {b:.4f} (need {t - 0.05:.4f})" for m, b, t in zip(("ACC", "NMI", "ARI"), best, target))
    report(4, ok, f"{name}: best {detail}, {elapsed:.1f}s")
    assert ok


def _best_ari(d, ks=range(10, 31, 5), pcts=grid(0.0, 0.9, 0.1)):
    return sweep(d, SweepSpec(tuple(ks), tuple(pcts), "ari"))[0]["ari"]


def test_c5_synthetic_shapes(report):
    wb = _best_ari(minmax_normalize(gen_synthetic("weak_bridge", 600, 0)))
    ri = _best_ari(minmax_normalize(gen_synthetic("ring_island", 600, 0)))
    raw = gen_synthetic("noisy_blobs", 600, 0, k=3, noise_frac=0.1)
    lab = meancut_cluster(minmax_normalize(raw), noise_threshold=20)
    real = raw.truth >= 0
    nb = ari(raw.truth[real], lab.label[real])
    noise_hit = float(np.mean(lab.label[~real] == -1))
    ok = wb >= 0.95 and ri >= 0.95 and nb >= 0.95 and lab.k == 3 and noise_hit > 0.5
    report(5, ok, f"weak_bridge ARI {wb:.4f}, ring_island ARI {ri:.4f}, noisy_blobs (threshold 20) "
                  f"{lab.k} clusters, non-noise ARI {nb:.4f}, {noise_hit:.0%} of noise labeled -1")
    assert ok


def test_c6_metric_laws(report):
    rng = np.random.default_rng(99)
    truth = rng.integers(0, 4, 200)
    identical = acc(truth, truth) == 1.0 and abs(nmi(truth, truth) - 1) < 1e-12 and abs(ari(truth, truth) - 1) < 1e-12

    pred = rng.integers(0, 5, 200)
    base = (acc(truth, pred), nmi(truth, pred), ari(truth, pred))
    perm_bad = 0
    for _ in range(1000):
        p = rng.permutation(5)[pred]
        got = (acc(truth, p), nmi(truth, p), ari(truth, p))
        perm_bad += int(any(abs(a - b) > 1e-12 for a, b in zip(got, base)))

    hung_bad = 0
    for n in range(1, 8):
        for _ in range(10 if n < 7 else 3):
            cost = rng.integers(0, 100, size=(n, n)).astype(float)
            hung_bad += int(hungarian(cost).cost != brute_assignment(cost))

    truth = rng.integers(0, 5, 1000)
    mean_ari = float(np.mean([ari(truth, np.random.default_rng(s).integers(0, 5, 1000)) for s in range(100)]))
    ok = identical and perm_bad == 0 and hung_bad == 0 and abs(mean_ari) < 0.05
    report(6, ok, f"identity {'ok' if identical else 'broken'}, {perm_bad}/1000 relabelings changed a score, "
                  f"{hung_bad} Hungarian mismatches up to 7x7, random-prediction mean ARI {mean_ari:+.4f}")
    assert ok


def test_c7_benchmark_shape(report):
    rows = bench_mst(bench_dataset(5000, 0), RATIOS, repeats=3)
    sweep_rows = rows[:-1]
    kruskal_ms = rows[-1]["median_runtime_ms"]
    first_one = next(i for i, r in enumerate(sweep_rows) if r["subtree_count"] == 1)
    fastest = int(np.argmin([r["median_runtime_ms"] for r in sweep_rows]))
    at_02 = next(r for r in sweep_rows if r["ratio"] == 0.2)["median_runtime_ms"]
    shape_ok = abs(fastest - first_one) <= 1 and sweep_rows[fastest]["subtree_count"] == 1
    speed_ok = at_02 <= 1.2 * kruskal_ms
    report(7, shape_ok and speed_ok,
           f"fastest ratio {sweep_rows[fastest]['ratio']} (first single-tree ratio "
           f"{sweep_rows[first_one]['ratio']}); ratio 0.2 {at_02:.0f} ms vs Kruskal {kruskal_ms:.0f} ms")
    assert shape_ok and speed_ok


def _outputs(d, capsys):
    """Run every command with identical flags; returns stdout and file contents."""
    d.mkdir(exist_ok=True)
    for f in d.iterdir():
        f.unlink()
    iris = DATA / "iris.csv"
    runs = {
        "gen": ["gen", "ring_island", "--n", "300", "--seed", "5", "--out", d / "gen.csv"],
        "cluster": ["cluster", "--input", iris, "--truth-col", "last", "--k", "15", "--percentile", "0.7",
                    "--out-labels", d / "l.csv", "--out-metrics", d / "m.json", "--out-scores", d / "s.csv"],
        "sweep": ["sweep", "--input", iris, "--truth-col", "last", "--k-min", "10", "--k-max", "14",
                  "--pct-min", "0.6", "--pct-max", "0.7", "--pct-step", "0.05", "--out", d / "sweep.csv"],
        "oracle": ["oracle", "mst", "--n", "200", "--trials", "5", "--seed", "3"],
        "bench": ["bench", "mst", "--n", "500", "--ratio-min", "0.1", "--ratio-max", "0.5", "--ratio-step", "0.2",
                  "--repeats", "1", "--out", d / "bench.csv"],
    }
    out = {}
    for name, argv in runs.items():
        capsys.readouterr()
        code = main([str(a) for a in argv])
        out[name + ":stdout"] = (code, capsys.readouterr().out)
    for f in sorted(d.iterdir()):
        text = f.read_text()
        if f.name == "bench.csv":
            # wall-clock medians legitimately differ between runs
            text = "\n".join(",".join(line.split(",")[:2]) for line in text.splitlines())
        out[f.name] = text
    return out


def test_c8_cli_determinism(tmp_path, capsys, report):
    a = _outputs(tmp_path / "run", capsys)
    b = _outputs(tmp_path / "run", capsys)
    differing = sorted(k for k in a if a[k] != b[k])
    codes_ok = all(a[k][0] == 0 for k in a if k.endswith(":stdout"))
    ok = not differing and codes_ok and len(a) == 11
    report(8, ok, f"{len(a)} outputs compared across gen/cluster/sweep/oracle/bench reruns "
                  f"(bench timing column excluded); differing: {differing or 'none'}")
    assert ok
