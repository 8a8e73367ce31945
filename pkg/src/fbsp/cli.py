"""Command-line front end.

Subcommands: ``gen`` (write a graph file), ``sssp`` (run shortest-path
trials), ``verify`` (check the tree a run produces), ``apsp`` (all-pairs
run, optional binary matrix dump), ``sample`` (tree/pertinence sampling),
and ``bench`` (scan-scaling and verifier-comparison experiments).

Every experiment derives one seed per trial from the master ``--seed`` via
:func:`seed_derivation`, so reruns with the same arguments produce identical
counters and CSV bytes; wall-clock fields live only in the JSON summaries.
Relative output paths are placed under ``$FBSP_OUT_DIR`` when it is set.
Exit codes: 0 success, 1 invalid arguments or inputs, 2 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import struct
import sys
import time
from typing import List, Optional

import numpy as np

from . import oracle
from .apsp import ApspConfig, apsp
from .graph import (EXPONENTIAL, UNIFORM, WEIBULL, GraphError, SortedDigraph,
                    WeightModel, gen_complete, load, save)
from .pq import BinaryHeapQueue
from .sssp import FbConfig, dijkstra, fb_sssp, spira
from .verify import (VerifyError, verify_fb, verify_forward_only, verify_full)

_MASK = (1 << 64) - 1
_MAGIC = b"FBSPAPSP"


def seed_derivation(master_seed: int, trial_index: int) -> int:
    """Per-trial seed: SplitMix64 of master_seed + (trial_index+1)*golden.

    Injective in trial_index for a fixed master seed (odd multiplier, then a
    bijective finalizer), and identical on every platform.
    """
    x = (master_seed + 0x9E3779B97F4A7C15 * (trial_index + 1)) & _MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


class CliError(Exception):
    """Bad arguments or inputs; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _out_path(path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    base = os.environ.get("FBSP_OUT_DIR")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _atomic_write(path: str, data: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _atomic_write_bytes(path: str, data: bytes) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    raise TypeError(f"not JSON serializable: {type(x)}")


def _write_json(path: Optional[str], payload: dict) -> None:
    if path:
        _atomic_write(_out_path(path), json.dumps(payload, indent=2,
                                                  default=_json_default) + "\n")


def _write_csv(path: Optional[str], header: List[str], rows: List[list]) -> None:
    if not path:
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(_out_path(path), buf.getvalue())


def _aggregate(rows: List[dict], keys: List[str]) -> dict:
    agg = {}
    for key in keys:
        vals = np.array([r[key] for r in rows if r[key] is not None],
                        dtype=np.float64)
        if vals.size == 0:
            agg[key] = None
            continue
        se = float(vals.std(ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        agg[key] = {"mean": float(vals.mean()), "se": se,
                    "min": float(vals.min()), "max": float(vals.max())}
    return agg


def _model_from_args(args) -> WeightModel:
    kind = {"exp": EXPONENTIAL, "uniform": UNIFORM, "weibull": WEIBULL}[args.dist]
    shape = getattr(args, "shape", None)
    if kind != WEIBULL and shape is not None:
        raise CliError("--shape only applies to --dist weibull")
    if kind == WEIBULL and shape is None:
        raise CliError("--dist weibull requires --shape")
    return WeightModel(kind, seed=args.seed, shape=shape)


def _fb_config(args) -> FbConfig:
    pq = getattr(args, "pq", "bucket")
    nb = getattr(args, "bucket_b", None)
    w = getattr(args, "bucket_w", None)
    if pq != "bucket" and (nb is not None or w is not None):
        raise CliError("--bucket-b/--bucket-w require --pq bucket")
    return FbConfig(pq=pq, nbuckets=nb, width=w)


def _add_model_flags(p, with_n=True):
    if with_n:
        p.add_argument("--n", type=int, required=True, help="vertex count")
    p.add_argument("--dist", choices=["exp", "uniform", "weibull"],
                   default="exp", help="edge cost distribution")
    p.add_argument("--shape", type=float, default=None,
                   help="power for weibull costs (cost = Exp(1)**shape)")
    p.add_argument("--undirected", action="store_true")
    p.add_argument("--seed", type=int, default=0, help="master seed")


def _check_trials(args) -> None:
    if getattr(args, "trials", 1) < 1:
        raise CliError("--trials must be at least 1")


def _run_algo(algo: str, graph: SortedDigraph, source: int, fb_cfg: FbConfig):
    if algo == "dijkstra":
        t0 = time.perf_counter_ns()
        tree = dijkstra(graph, source)
        return tree, None, time.perf_counter_ns() - t0
    if algo == "spira":
        t0 = time.perf_counter_ns()
        tree, stats = spira(graph, source, queue_factory=BinaryHeapQueue)
        return tree, stats, time.perf_counter_ns() - t0
    if algo == "fb":
        t0 = time.perf_counter_ns()
        tree, stats = fb_sssp(graph, source, config=fb_cfg)
        return tree, stats, time.perf_counter_ns() - t0
    raise CliError(f"unknown algorithm {algo!r}")


_SSSP_COUNTERS = ["forward_scans", "backward_scans", "p_inserts", "p_extracts",
                  "q_inserts", "q_extracts", "requests", "urgent_requests"]

_SSSP_CSV = (["trial", "seed", "algo", "n", "model", "shape", "directed",
              "pq", "source"] + _SSSP_COUNTERS + ["median", "size_at_median"])


def _cmd_gen(args) -> int:
    model = _model_from_args(args)
    g = gen_complete(args.n, model, directed=not args.undirected)
    save(g, _out_path(args.out))
    print(f"wrote {g!r} to {args.out}")
    return 0


def _cmd_sssp(args) -> int:
    _check_trials(args)
    fb_cfg = _fb_config(args)
    if args.graph is None and args.n is None:
        raise CliError("either --n or --graph is required")
    model_echo = {"dist": args.dist, "shape": args.shape,
                  "directed": not args.undirected}
    rows = []
    csv_rows = []
    t_all = time.perf_counter_ns()
    base_graph = load(args.graph) if args.graph else None
    for t in range(args.trials):
        seed = seed_derivation(args.seed, t)
        if base_graph is not None:
            graph = base_graph
        else:
            model = WeightModel(_model_from_args(args).kind, seed=seed,
                                shape=args.shape)
            graph = gen_complete(args.n, model, directed=not args.undirected)
        tree, stats, ns = _run_algo(args.algo, graph, args.source, fb_cfg)
        row = {"trial": t, "seed": seed, "algo": args.algo, "n": graph.n,
               **model_echo, "pq": args.pq, "source": args.source,
               "wall_time_ns": ns}
        if stats is not None:
            row.update(stats.as_dict())
        else:
            row.update({k: None for k in _SSSP_COUNTERS})
            row.update({"median": None, "size_at_median": None})
        rows.append(row)
        csv_rows.append([t, seed, args.algo, graph.n, args.dist, args.shape,
                         int(not args.undirected), args.pq, args.source]
                        + [row[k] for k in _SSSP_COUNTERS]
                        + [row["median"], row["size_at_median"]])
        print(f"trial {t}: " + (f"scans={stats.total_scans} "
                                f"p={stats.p_inserts}/{stats.p_extracts} "
                                f"q={stats.q_inserts}/{stats.q_extracts}"
                                if stats else
                                f"dist_max={float(np.max(tree.dist)):.6g}"))
    payload = {
        "config": {"command": "sssp", "algo": args.algo, "n": args.n,
                   "trials": args.trials, "master_seed": args.seed,
                   "pq": args.pq, "csv_schema": 1, **model_echo},
        "rows": rows,
        "aggregate": _aggregate(rows, _SSSP_COUNTERS),
        "wall_time_ns": time.perf_counter_ns() - t_all,
    }
    _write_json(args.json, payload)
    _write_csv(args.csv, _SSSP_CSV, csv_rows)
    return 0


def _cmd_verify(args) -> int:
    fb_cfg = _fb_config(args)
    seed = seed_derivation(args.seed, 0)
    if args.graph:
        graph = load(args.graph)
    else:
        model = WeightModel(_model_from_args(args).kind, seed=seed,
                            shape=args.shape)
        graph = gen_complete(args.n, model, directed=not args.undirected)
    tree, _, _ = _run_algo(args.algo, graph, args.source, fb_cfg)
    checker = {"full": verify_full, "forward": verify_forward_only,
               "fb": verify_fb}[args.mode]
    report = checker(graph, tree)
    payload = {"config": {"command": "verify", "mode": args.mode,
                          "algo": args.algo, "n": graph.n,
                          "master_seed": args.seed},
               "report": report.as_dict()}
    _write_json(args.json, payload)
    print(f"{'ACCEPTED' if report.accepted else 'REJECTED'} "
          f"(examined {report.edges_examined} edges)")
    return 0 if report.accepted else 1


def _cmd_apsp(args) -> int:
    fb_cfg = _fb_config(args)
    seed = seed_derivation(args.seed, 0)
    model = WeightModel(_model_from_args(args).kind, seed=seed,
                        shape=args.shape)
    graph = gen_complete(args.n, model, directed=not args.undirected)
    cfg = ApspConfig(fb=fb_cfg, threads=args.threads, model=model,
                     directed=not args.undirected)
    result = apsp(graph, cfg)
    if args.dump:
        blob = _MAGIC + struct.pack("<Q", graph.n) + result.dist.tobytes()
        _atomic_write_bytes(_out_path(args.dump), blob)
    per_source = [s.as_dict() for s in result.per_source_stats]
    payload = {
        "config": {"command": "apsp", "n": args.n, "master_seed": args.seed,
                   "threads": args.threads, "dist": args.dist,
                   "shape": args.shape, "directed": not args.undirected},
        "total_scans": result.total_scans,
        "scans_per_n2": result.total_scans / (args.n ** 2),
        "preprocess_time": result.preprocess_time,
        "total_time": result.total_time,
        "aggregate": _aggregate(per_source, _SSSP_COUNTERS),
    }
    _write_json(args.json, payload)
    print(f"apsp n={args.n}: total scans {result.total_scans} "
          f"({result.total_scans / args.n ** 2:.3f} per vertex pair), "
          f"{result.total_time:.2f}s")
    return 0


_SAMPLE_CSV = ["trial", "seed", "n", "directed", "out_spt", "in_spt",
               "out_non_spt", "in_non_spt", "total", "lambda_in", "lambda_out"]


def _cmd_sample(args) -> int:
    _check_trials(args)
    rows = []
    csv_rows = []
    directed = not args.undirected
    tail_hits = 0
    for t in range(args.trials):
        seed = seed_derivation(args.seed, t)
        s = oracle.sample_spt(args.n, seed)
        rates = oracle.pertinence_rates(s)
        counts = oracle.sample_pertinence_counts(
            s, np.random.default_rng((seed, 1)), directed=directed)
        if args.tail_threshold is not None and \
                counts.total >= args.tail_threshold * args.n:
            tail_hits += 1
        row = {"trial": t, "seed": seed, "n": args.n, "directed": directed,
               **counts.as_dict(), "lambda_in": rates.lambda_in,
               "lambda_out": rates.lambda_out}
        rows.append(row)
        csv_rows.append([row[k] if k != "directed" else int(row[k])
                         for k in _SAMPLE_CSV])
    keys = ["out_spt", "in_spt", "out_non_spt", "in_non_spt", "total",
            "lambda_in", "lambda_out"]
    payload = {
        "config": {"command": "sample", "n": args.n, "trials": args.trials,
                   "master_seed": args.seed, "directed": directed,
                   "csv_schema": 1},
        "aggregate": _aggregate(rows, keys),
    }
    if args.tail_threshold is not None:
        payload["tail"] = {"threshold_multiple": args.tail_threshold,
                           "fraction": tail_hits / args.trials}
    _write_json(args.json, payload)
    _write_csv(args.csv, _SAMPLE_CSV, csv_rows)
    agg = payload["aggregate"]
    print(f"sampled {args.trials} trees at n={args.n}: "
          f"mean pertinent edges/n = {agg['total']['mean'] / args.n:.4f}")
    if args.tail_threshold is not None:
        print(f"tail fraction at {args.tail_threshold}n: "
              f"{payload['tail']['fraction']:.6f}")
    return 0


def _parse_n_list(text: str) -> List[int]:
    try:
        ns = [int(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise CliError(f"bad n list: {text!r}") from exc
    if not ns or any(n < 1 for n in ns):
        raise CliError(f"bad n list: {text!r}")
    return ns


def _cmd_bench_scan_scaling(args) -> int:
    _check_trials(args)
    fb_cfg = _fb_config(args)
    sizes = _parse_n_list(args.n)
    directed = not args.undirected
    table = []
    csv_rows = []
    for n in sizes:
        per_n = []
        for t in range(args.trials):
            seed = seed_derivation(args.seed, t)
            model = WeightModel(_model_from_args(args).kind, seed=seed,
                                shape=args.shape)
            graph = gen_complete(n, model, directed=directed)
            _, stats, _ = _run_algo(args.algo, graph, 0, fb_cfg)
            per_n.append(stats.total_scans)
            csv_rows.append([n, t, seed, stats.forward_scans,
                             stats.backward_scans, stats.total_scans])
        mean = sum(per_n) / len(per_n)
        table.append({"n": n, "mean_total_scans": mean,
                      "mean_scans_per_n": mean / n})
    print(f"{'n':>8} {'scans':>12} {'scans/n':>10}")
    for row in table:
        print(f"{row['n']:>8} {row['mean_total_scans']:>12.1f} "
              f"{row['mean_scans_per_n']:>10.3f}")
    payload = {"config": {"command": "bench scan-scaling", "algo": args.algo,
                          "n": sizes, "trials": args.trials,
                          "master_seed": args.seed, "dist": args.dist,
                          "directed": directed, "csv_schema": 1},
               "table": table}
    _write_json(args.json, payload)
    _write_csv(args.csv, ["n", "trial", "seed", "forward_scans",
                          "backward_scans", "total_scans"], csv_rows)
    return 0


def _cmd_bench_verify_compare(args) -> int:
    _check_trials(args)
    n = args.n_single
    directed = not args.undirected
    rows = []
    for t in range(args.trials):
        seed = seed_derivation(args.seed, t)
        model = WeightModel(EXPONENTIAL, seed=seed)
        graph = gen_complete(n, model, directed=directed)
        tree = dijkstra(graph, 0)
        fwd = verify_forward_only(graph, tree)
        fb = verify_fb(graph, tree)
        assert fwd.accepted and fb.accepted, "true tree rejected"
        rows.append({"trial": t, "seed": seed,
                     "forward_only_examined": fwd.edges_examined,
                     "fb_examined": fb.edges_examined})
    nlogn = n * math.log(n)
    mean_fwd = sum(r["forward_only_examined"] for r in rows) / len(rows)
    mean_fb = sum(r["fb_examined"] for r in rows) / len(rows)
    summary = {"n": n, "trials": args.trials,
               "forward_only_mean": mean_fwd,
               "forward_only_per_nlogn": mean_fwd / nlogn,
               "fb_mean": mean_fb, "fb_per_n": mean_fb / n}
    print(f"n={n}: forward-only {mean_fwd:.0f} edges "
          f"({mean_fwd / nlogn:.3f} n ln n), "
          f"fb {mean_fb:.0f} edges ({mean_fb / n:.3f} n)")
    payload = {"config": {"command": "bench verify-compare", "n": n,
                          "trials": args.trials, "master_seed": args.seed,
                          "csv_schema": 1},
               "rows": rows, "summary": summary}
    _write_json(args.json, payload)
    _write_csv(args.csv, ["trial", "seed", "forward_only_examined",
                          "fb_examined"],
               [[r["trial"], r["seed"], r["forward_only_examined"],
                 r["fb_examined"]] for r in rows])
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="fbsp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random complete graph file")
    _add_model_flags(p)
    p.add_argument("--out", required=True, help="output graph file")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("sssp", help="run shortest-path trials")
    p.add_argument("--n", type=int, default=None, help="vertex count "
                   "(required unless --graph is given)")
    _add_model_flags(p, with_n=False)
    p.add_argument("--graph", default=None, help="load this graph file "
                   "instead of generating one per trial")
    p.add_argument("--algo", choices=["dijkstra", "spira", "fb"], default="fb")
    p.add_argument("--pq", choices=["bucket", "binheap"], default="bucket")
    p.add_argument("--bucket-b", type=int, default=None, help="bucket count")
    p.add_argument("--bucket-w", type=float, default=None, help="bucket width")
    p.add_argument("--source", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--json", default=None, help="write JSON report here")
    p.add_argument("--csv", default=None, help="write per-trial CSV here")
    p.set_defaults(func=_cmd_sssp)

    p = sub.add_parser("verify", help="verify the tree an algorithm returns")
    p.add_argument("--n", type=int, default=None, help="vertex count "
                   "(required unless --graph is given)")
    _add_model_flags(p, with_n=False)
    p.add_argument("--graph", default=None)
    p.add_argument("--mode", choices=["full", "forward", "fb"], default="fb")
    p.add_argument("--algo", choices=["dijkstra", "spira", "fb"], default="fb")
    p.add_argument("--pq", choices=["bucket", "binheap"], default="bucket")
    p.add_argument("--bucket-b", type=int, default=None)
    p.add_argument("--bucket-w", type=float, default=None)
    p.add_argument("--source", type=int, default=0)
    p.add_argument("--json", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("apsp", help="all-pairs shortest paths")
    _add_model_flags(p)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--pq", choices=["bucket", "binheap"], default="bucket")
    p.add_argument("--bucket-b", type=int, default=None)
    p.add_argument("--bucket-w", type=float, default=None)
    p.add_argument("--dump", default=None,
                   help="write the distance matrix here (16-byte header: "
                        "8-byte magic + little-endian uint64 n; then "
                        "row-major float64)")
    p.add_argument("--json", default=None)
    p.set_defaults(func=_cmd_apsp)

    p = sub.add_parser("sample", help="sample random trees and pertinence counts")
    _add_model_flags(p)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--tail-threshold", type=float, default=None,
                   help="also report Pr[pertinent edges >= threshold*n]")
    p.add_argument("--json", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("bench", help="scaling experiments")
    bench_sub = p.add_subparsers(dest="bench_command", required=True)

    b = bench_sub.add_parser("scan-scaling", help="mean scans/n across sizes")
    b.add_argument("--n", required=True, help="comma-separated sizes")
    b.add_argument("--dist", choices=["exp", "uniform", "weibull"],
                   default="exp")
    b.add_argument("--shape", type=float, default=None)
    b.add_argument("--undirected", action="store_true")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--algo", choices=["spira", "fb"], default="fb")
    b.add_argument("--pq", choices=["bucket", "binheap"], default="bucket")
    b.add_argument("--bucket-b", type=int, default=None)
    b.add_argument("--bucket-w", type=float, default=None)
    b.add_argument("--trials", type=int, default=5)
    b.add_argument("--json", default=None)
    b.add_argument("--csv", default=None)
    b.set_defaults(func=_cmd_bench_scan_scaling)

    b = bench_sub.add_parser("verify-compare",
                             help="forward-only vs forward-backward verifier")
    b.add_argument("--n", dest="n_single", type=int, required=True)
    b.add_argument("--undirected", action="store_true")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--trials", type=int, default=5)
    b.add_argument("--json", default=None)
    b.add_argument("--csv", default=None)
    b.set_defaults(func=_cmd_bench_verify_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (CliError, GraphError, VerifyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
