"""Command line entry point: ``lart generate | detect | evaluate | bench``.

Exit codes: 0 success, 1 usage error, 2 data or I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._accel import backend
from .bench import ALGORITHMS, CSV_HEADER, CSV_VERSION, FAILED, format_row, run_bench, summary_csv
from .cluster import best_level, run_lart
from .core import MultiplexFormatError, read_multiplex, write_multiplex
from .metrics import fowlkes_mallows, nmi
from .synthgen import (SCENARIOS, ScenarioConfig, format_labels, generate, parse_labels,
                       write_manifest, write_truth)
from .walk import dump_matrix_csv

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

log = logging.getLogger("lart")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _scenario(value):
    s = value.strip().upper()
    if s not in SCENARIOS:
        raise argparse.ArgumentTypeError(f"unknown scenario {value!r} (choose from {', '.join(SCENARIOS)})")
    return s


def _scenarios(value):
    if value.strip().lower() == "all":
        return list(SCENARIOS)
    return [_scenario(v) for v in value.split(",") if v.strip()]


def _algorithms(value):
    algs = [v.strip().lower() for v in value.split(",") if v.strip()]
    bad = [a for a in algs if a not in ALGORITHMS]
    if bad or not algs:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {bad} (choose from {', '.join(ALGORITHMS)})")
    return algs


def _sibling(path, suffix):
    p = Path(path)
    return p.with_name(p.stem + suffix)


def cmd_generate(args):
    cfg = ScenarioConfig(args.scenario, args.seed, p_noise=args.p_noise,
                         community_size=args.community_size)
    m, truth = generate(cfg)
    truth_out = args.truth_out or _sibling(args.out, ".truth.txt")
    manifest_out = args.manifest_out or _sibling(args.out, ".manifest.json")
    write_multiplex(m, args.out)
    write_truth(truth, truth_out)
    write_manifest(truth, manifest_out)
    print(f"wrote {args.out} {truth_out} {manifest_out} (N={m.num_nodes}, L={m.num_layers})")
    return EXIT_OK


def cmd_detect(args):
    if args.t is not None and args.t < 1:
        raise UsageError(f"--t must be >= 1, got {args.t}")
    if not 0.0 < args.eps <= 1.0:
        raise UsageError(f"--eps must lie in (0, 1], got {args.eps}")
    if args.gamma <= 0:
        raise UsageError(f"--gamma must be > 0, got {args.gamma}")
    if args.fixed_omega is not None and args.fixed_omega < 0:
        raise UsageError(f"--fixed-omega must be >= 0, got {args.fixed_omega}")
    m = read_multiplex(args.input)
    res = run_lart(m, t=args.t, epsilon=args.eps, gamma=args.gamma, fixed_omega=args.fixed_omega)
    part, dend = res.partition, res.dendrogram
    out = args.out
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_labels(part.labels, m.num_nodes, m.num_layers))
    payload = {
        "num_nodes": m.num_nodes,
        "num_layers": m.num_layers,
        "params": res.params,
        "num_communities": part.num_communities,
        "selected_level": best_level(dend),
        "q_m": res.q_m,
        "q_curve": [float(q) for q in dend.q_scores],
        "merges": [list(mg) for mg in dend.merges],
        "partition": part.labels.tolist(),
        "timings_ms": res.timings,
        "backend": backend(),
    }
    json_out = args.json_out or _sibling(out, ".json")
    with open(json_out, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh)
        fh.write("\n")
    if args.dump_walk:
        dump_matrix_csv(res.walk.matrix, args.dump_walk)
    if args.dump_dissim:
        dump_matrix_csv(res.dissimilarity.values, args.dump_dissim)
    print(f"communities={part.num_communities} q_m={res.q_m:.6f} -> {out}")
    return EXIT_OK


def _read_labels(path):
    with open(path, encoding="utf-8") as fh:
        return parse_labels(fh, path=os.fspath(path))


def cmd_evaluate(args):
    truth, tn, tl = _read_labels(args.truth)
    pred, pn, pl = _read_labels(args.pred)
    if (tn, tl) != (pn, pl):
        raise MultiplexFormatError(
            f"truth covers {tl} layers x {tn} nodes but prediction covers {pl} x {pn}")
    result = {}
    if args.metric in ("nmi", "both"):
        result["nmi"] = nmi(truth, pred)
    if args.metric in ("fm", "both"):
        result["fm"] = fowlkes_mallows(truth, pred)
    print(" ".join(f"{k}={v:.6f}" for k, v in result.items()))
    print(json.dumps(result))
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(result, fh)
            fh.write("\n")
    return EXIT_OK


def cmd_bench(args):
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    out_csv = args.out_csv
    fh = open(out_csv, "w", encoding="utf-8", newline="") if out_csv else sys.stdout
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    fh.flush()
    timing_rows = []

    def flush(rows):
        for r in rows:
            writer.writerow(format_row(r, args.timing))
            timing_rows.append({"scenario": r.scenario, "seed": r.seed, "algorithm": r.algorithm,
                                "runtime_ms": r.runtime_ms, **r.timings})
        fh.flush()

    try:
        report = run_bench(args.scenario, args.runs, args.seed, args.algorithms,
                           fixed_omega=args.fixed_omega, jobs=args.jobs, on_rows=flush,
                           p_noise=args.p_noise, community_size=args.community_size)
    except Exception:
        writer.writerow([FAILED] + [""] * (len(CSV_HEADER) - 1))
        fh.flush()
        raise
    finally:
        if out_csv:
            fh.close()
    if out_csv:
        summary = _sibling(out_csv, "_summary.csv")
        summary.write_text(summary_csv(report), encoding="utf-8")
        if args.timing:
            _sibling(out_csv, "_timing.json").write_text(
                json.dumps({"csv_version": CSV_VERSION, "runs": timing_rows}, indent=1) + "\n",
                encoding="utf-8")
    out = sys.stderr if not out_csv else sys.stdout
    for a in report.aggregate():
        print(f"{a['scenario']} {a['algorithm']:5s} runs={a['runs']} "
              f"nmi={a['nmi_mean']:.2f}±{a['nmi_std']:.2f} fm={a['fm_mean']:.2f}±{a['fm_std']:.2f}",
              file=out)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="lart", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"lart {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="draw a synthetic multiplex with planted communities")
    g.add_argument("--scenario", type=_scenario, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True, help="multiplex edge-list path")
    g.add_argument("--truth-out", help="ground truth path (default <out>.truth.txt)")
    g.add_argument("--manifest-out", help="manifest JSON path (default <out>.manifest.json)")
    g.add_argument("--p-noise", type=float, default=ScenarioConfig.p_noise)
    g.add_argument("--community-size", type=int, default=ScenarioConfig.community_size)
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("detect", help="run LART on a multiplex file")
    d.add_argument("input")
    d.add_argument("--t", type=int, default=None, help="walk length (default 3L)")
    d.add_argument("--eps", type=float, default=1.0)
    d.add_argument("--gamma", type=float, default=1.0)
    d.add_argument("--fixed-omega", type=float, default=None,
                   help="use this constant inter-layer weight instead of adaptive ones")
    d.add_argument("--out", required=True, help="partition output path")
    d.add_argument("--json-out", help="JSON report path (default <out>.json)")
    d.add_argument("--dump-walk", metavar="CSV", help="write P^t as dense CSV")
    d.add_argument("--dump-dissim", metavar="CSV", help="write S(t) as dense CSV")
    d.set_defaults(func=cmd_detect)

    e = sub.add_parser("evaluate", help="compare a partition with ground truth")
    e.add_argument("--truth", required=True)
    e.add_argument("--pred", required=True)
    e.add_argument("--metric", choices=("nmi", "fm", "both"), default="both")
    e.add_argument("--json-out")
    e.set_defaults(func=cmd_evaluate)

    b = sub.add_parser("bench", help="seeded benchmark over scenarios")
    b.add_argument("--scenario", type=_scenarios, required=True,
                   help="scenario, comma list, or 'all'")
    b.add_argument("--runs", type=int, default=20)
    b.add_argument("--seed", type=int, default=0, help="master seed")
    b.add_argument("--algorithms", type=_algorithms, default=["lart"],
                   help="comma list from: " + ", ".join(ALGORITHMS))
    b.add_argument("--fixed-omega", type=float, default=1.0)
    b.add_argument("--out-csv", help="per-run CSV (default stdout)")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--timing", action="store_true",
                   help="fill runtime_ms (makes the CSV non-reproducible) and write <csv>_timing.json")
    b.add_argument("--p-noise", type=float, default=ScenarioConfig.p_noise)
    b.add_argument("--community-size", type=int, default=ScenarioConfig.community_size)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lart {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MultiplexFormatError, ValueError, OSError) as exc:
        print(f"lart {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
