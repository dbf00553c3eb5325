"""Command-line front end: ``cluster``, ``sweep``, ``gen``, ``oracle`` and ``bench``.

Exit status is 0 on success, 1 on usage, validation or I/O errors and 2 when
an oracle check finds a counterexample. Every output file is rendered in
memory first and only written once the whole command has succeeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .dataset import DatasetError, dedup, gen_synthetic, load_csv, minmax_normalize
from .dgf import cluster_prepared, prepare, split_junction
from .experiments import ORACLES, SweepSpec, bench_dataset, bench_mst, grid, run_oracle, sweep
from .graphkernel import Kernel
from .metrics import evaluate
from .pathsim import ORACLE_CAP

log = logging.getLogger("meancut")

EXIT_OK, EXIT_ERROR, EXIT_ORACLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which would collide with oracle failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _num(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv(header, rows) -> str:
    lines = [",".join(header)] if header else []
    lines += [",".join(_num(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _commit(outputs: dict) -> None:
    """Write all rendered outputs; each file appears atomically via rename."""
    staged = []
    try:
        for path, text in outputs.items():
            path = Path(path)
            fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except OSError:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


def _check_parents(*paths) -> None:
    for p in paths:
        if p is not None and not Path(p).resolve().parent.is_dir():
            raise UsageError(f"output directory does not exist: {Path(p).parent}")


def _validate(args) -> None:
    if not 0 < args.ratio < 1:
        raise UsageError(f"--ratio must lie in (0, 1), got {args.ratio}")
    if "percentile" in args and not 0 <= args.percentile < 1:
        raise UsageError(f"--percentile must lie in [0, 1), got {args.percentile}")
    if "k" in args and args.k < 1:
        raise UsageError(f"--k must be >= 1, got {args.k}")
    if args.noise_threshold < 0:
        raise UsageError(f"--noise-threshold must be >= 0, got {args.noise_threshold}")
    if not args.sigma > 0:
        raise UsageError(f"--sigma must be positive, got {args.sigma}")


def _load(args):
    if not Path(args.input).is_file():
        raise UsageError(f"input file not found: {args.input}")
    truth_col = None if args.truth_col == "none" else args.truth_col
    d = load_csv(args.input, truth_col)
    return d if args.no_normalize else minmax_normalize(d)


def _check_k(k: int, n_unique: int) -> None:
    if k > n_unique - 1:
        raise UsageError(f"--k {k} needs at least {k + 1} distinct points, got {n_unique}")


def cmd_cluster(args) -> int:
    _validate(args)
    _check_parents(args.out_labels, args.out_metrics, args.out_scores)
    d = _load(args)
    kernel = Kernel(args.kernel, args.sigma)
    log.info("loaded %d points in %d dimensions", d.n, d.dim)

    p = prepare(d, args.k)
    _check_k(args.k, p.unique.n)
    lab = cluster_prepared(p, kernel, args.ratio, args.percentile, args.noise_threshold)

    outputs = {args.out_labels: "".join(f"{v}\n" for v in lab.label.tolist())}
    metrics = None
    if d.truth is not None:
        metrics = evaluate(d.truth, lab.label)
        if args.out_metrics:
            outputs[args.out_metrics] = json.dumps(metrics, indent=2) + "\n"
    elif args.out_metrics:
        raise UsageError("--out-metrics needs ground truth (--truth-col)")
    if args.out_scores:
        split = split_junction(p.scores, args.percentile)
        junction = np.zeros(p.unique.n, dtype=np.int64)
        junction[split.junction] = 1
        dens = p.dmap.broadcast(p.scores.density)
        dgf = p.dmap.broadcast(p.scores.dgf)
        flag = p.dmap.broadcast(junction)
        rows = zip(range(d.n), dens.tolist(), dgf.tolist(), flag.tolist())
        outputs[args.out_scores] = _csv(("point_index", "density", "dgf", "is_junction"), rows)
    _commit(outputs)

    print(f"clusters={lab.k} noise={lab.n_noise} labels={args.out_labels}")
    if metrics is not None:
        print(" ".join(f"{key}={_num(val)}" for key, val in metrics.items()))
        print("note: noise points count as mismatches for acc and as one extra cluster for nmi/ari")
    return EXIT_OK


def cmd_sweep(args) -> int:
    _validate(args)
    _check_parents(args.out)
    d = _load(args)
    if d.truth is None:
        raise UsageError("sweep needs ground truth (--truth-col)")
    try:
        ks = [int(round(v)) for v in grid(args.k_min, args.k_max, args.k_step)]
        pcts = grid(args.pct_min, args.pct_max, args.pct_step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if min(ks) < 1 or not all(0 <= p < 1 for p in pcts):
        raise UsageError("K values must be >= 1 and percentiles in [0, 1)")
    spec = SweepSpec(tuple(ks), tuple(pcts), args.metric)
    _check_k(max(ks), dedup(d)[0].n)
    rows = sweep(d, spec, Kernel(args.kernel, args.sigma), args.ratio, args.noise_threshold)
    if not rows:
        raise UsageError("no grid point left enough internal points to cluster")
    fields = ("K", "percentile", "acc", "nmi", "ari", "k_pred")
    _commit({args.out: _csv(fields, ([r[f] for f in fields] for r in rows))})
    best = rows[0]
    print("best: " + " ".join(f"{f}={_num(best[f])}" for f in fields))
    return EXIT_OK


def cmd_gen(args) -> int:
    _check_parents(args.out)
    params = {}
    for item in args.param:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise UsageError(f"--param {key}: not a number: {value!r}") from None
    d = gen_synthetic(args.preset, args.n, args.seed, **params)
    header = [f"x{i}" for i in range(d.dim)] + ["label"]
    rows = (list(p) + [t] for p, t in zip(d.points.tolist(), d.truth.tolist()))
    _commit({args.out: _csv(header, rows)})
    print(f"wrote {d.n} points of {args.preset} to {args.out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    caps = {"pathsim": ORACLE_CAP, "mst": 2000, "hungarian": 9, "meancut": ORACLE_CAP}
    if not 2 <= args.n <= caps[args.kind]:
        raise UsageError(f"--n for {args.kind} must lie in [2, {caps[args.kind]}]")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    passed, failure = run_oracle(args.kind, args.n, args.trials, args.seed)
    if failure is not None:
        print(f"oracle {args.kind}: FAIL after {passed} passing trials")
        print(failure)
        return EXIT_ORACLE
    print(f"oracle {args.kind}: {passed}/{args.trials} trials passed")
    return EXIT_OK


def cmd_bench(args) -> int:
    _check_parents(args.out)
    if args.repeats < 1:
        raise UsageError("--repeats must be >= 1")
    try:
        ratios = grid(args.ratio_min, args.ratio_max, args.ratio_step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not all(0 < r < 1 for r in ratios):
        raise UsageError("ratios must lie in (0, 1)")
    if args.repeats == 1:
        print("warning: repeats=1, every runtime is a single sample", file=sys.stderr)
    d = bench_dataset(args.n, args.seed)
    rows = bench_mst(d, ratios, args.repeats, Kernel(args.kernel, args.sigma))
    fields = ("ratio", "subtree_count", "median_runtime_ms")
    text = _csv(fields, ([r[f] for f in fields] for r in rows))
    if args.out:
        _commit({args.out: text})
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_model_flags(p, need_k=True):
    p.add_argument("--input", required=True, help="CSV file, one point per row")
    p.add_argument("--truth-col", default="none",
                   help="ground-truth column: last, first, a 0-based index or none (default)")
    p.add_argument("--kernel", choices=("laplacian", "gaussian"), default="laplacian")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--ratio", type=float, default=0.2, help="FastMST eps as a fraction of the MBR diagonal")
    if need_k:
        p.add_argument("--k", type=int, default=15, help="neighbours for density and DGF")
        p.add_argument("--percentile", type=float, default=0.0, help="fraction of points held out as junctions")
    p.add_argument("--noise-threshold", type=int, default=0,
                   help="clusters smaller than this become noise (-1)")
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; clustering is deterministic")
    p.add_argument("--no-normalize", action="store_true", help="skip min-max scaling")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="meancut", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cluster", help="cluster one dataset")
    _add_model_flags(p)
    p.add_argument("--out-labels", required=True)
    p.add_argument("--out-metrics")
    p.add_argument("--out-scores", help="per-point density, DGF and junction flag")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("sweep", help="grid search over K and percentile")
    _add_model_flags(p, need_k=False)
    p.add_argument("--k-min", type=int, default=10)
    p.add_argument("--k-max", type=int, default=40)
    p.add_argument("--k-step", type=int, default=1)
    p.add_argument("--pct-min", type=float, default=0.6)
    p.add_argument("--pct-max", type=float, default=0.99)
    p.add_argument("--pct-step", type=float, default=0.01)
    p.add_argument("--metric", choices=("acc", "nmi", "ari"), default="acc")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="write a synthetic dataset")
    p.add_argument("preset")
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="preset shape parameter, repeatable")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="randomized equivalence checks")
    p.add_argument("kind", choices=sorted(ORACLES))
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="FastMST runtime over a ratio sweep")
    p.add_argument("task", choices=("mst",))
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--ratio-min", type=float, default=0.05)
    p.add_argument("--ratio-max", type=float, default=0.95)
    p.add_argument("--ratio-step", type=float, default=0.05)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kernel", choices=("laplacian", "gaussian"), default="laplacian")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, DatasetError, ValueError, MemoryError, OSError) as exc:
        print(f"meancut {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
