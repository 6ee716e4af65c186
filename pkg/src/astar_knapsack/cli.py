"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .experiment import (
    BASELINES,
    DEFAULT_EPSILONS,
    FULL_METRICS_CAP,
    SweepConfig,
    emit_csv,
    emit_plot_data,
    format_ratio,
    run_sweep,
    sweep_records,
)
from .heuristics import as_epsilon, h_epsilon, h_star, h_zero
from .knapsack import (
    INSTANCE_TYPES,
    GeneratorConfig,
    InstanceFormatError,
    KnapsackSpace,
    generate_instance,
    load_instance,
    members,
    serialize_instance,
)
from .metrics import PopulationTooLarge, Sampled, compute_metrics
from .search import astar, breadth_first

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _epsilon(text):
    try:
        return as_epsilon(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _add_generator_flags(p, many=False):
    nargs = "+" if many else None
    p.add_argument("--type", dest="types", nargs=nargs, choices=INSTANCE_TYPES + ("all",),
                   help="instance type")
    p.add_argument("--n", type=int, help="item count")
    p.add_argument("--R", type=int, default=1000, help="data range (default 1000)")
    p.add_argument("--seed", dest="seeds", type=int, nargs=nargs, help="generator seed")
    p.add_argument("--t", type=int, default=None, help="fix the capacity ratio numerator")


def _add_heuristic_flags(p, bfs=True):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--epsilon", type=_epsilon, help="use h_eps with this eps")
    g.add_argument("--exact", action="store_true", help="use the exact heuristic h*")
    g.add_argument("--zero", action="store_true", help="use h = 0")
    if bfs:
        g.add_argument("--bfs", action="store_true", help="FIFO breadth-first search")


def _heuristic(args, inst):
    if args.epsilon is not None:
        return h_epsilon(inst, args.epsilon)
    if args.exact:
        return h_star(inst)
    return h_zero(inst)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="astar-knapsack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    _add_generator_flags(p)
    p.add_argument("-o", "--output", help="write here instead of stdout")

    p = sub.add_parser("solve", help="run one search on an instance file")
    p.add_argument("instance")
    _add_heuristic_flags(p)
    p.add_argument("--time-limit", type=float, default=None, help="seconds")

    p = sub.add_parser("metrics", help="ARS/ARN/INR/WI of one heuristic")
    p.add_argument("instance")
    _add_heuristic_flags(p, bfs=False)
    p.add_argument("--mode", choices=("full", "sampled"), default="full")
    p.add_argument("--sample-size", type=int)
    p.add_argument("--seed", type=int, help="sampling seed (sampled mode)")
    p.add_argument("--cap", type=int, default=FULL_METRICS_CAP, help="largest n for full mode")

    p = sub.add_parser("sweep", help="A*(h_eps) over an eps grid plus a baseline")
    p.add_argument("instance", nargs="*", help="instance files (or use generator flags)")
    _add_generator_flags(p, many=True)
    p.add_argument("--epsilons", type=_epsilon, nargs="+", default=list(DEFAULT_EPSILONS))
    p.add_argument("--no-bfs", action="store_true", help="omit the baseline row")
    p.add_argument("--baseline", choices=BASELINES, default="uniform-cost")
    p.add_argument("--metrics", choices=("full", "sampled", "skip"), default="full")
    p.add_argument("--sample-size", type=int)
    p.add_argument("--metrics-seed", type=int)
    p.add_argument("--metrics-cap", type=int, default=FULL_METRICS_CAP)
    p.add_argument("--time-budget", type=float, default=None, help="seconds per row")
    p.add_argument("--csv", help="CSV output path (default stdout)")
    p.add_argument("--plot-data", help="write averaged per-eps series as JSON")

    p = sub.add_parser("verify", help="run the property suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_gen(args, out):
    if args.types is None or args.n is None or args.seeds is None:
        raise UsageError("gen needs --type, --n and --seed")
    if args.types == "all":
        raise UsageError("gen writes one instance; pick a single --type")
    inst = generate_instance(GeneratorConfig(args.types, args.n, args.R, args.seeds, args.t))
    text = serialize_instance(inst)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def _cmd_solve(args, out):
    inst = load_instance(args.instance)
    space = KnapsackSpace(inst)
    t0 = time.perf_counter()
    if args.bfs:
        res, label = breadth_first(space, time_limit=args.time_limit), "bfs"
    else:
        h = _heuristic(args, inst)
        res, label = astar(space, h, time_limit=args.time_limit), h.name
    elapsed = time.perf_counter() - t0
    record = {
        "heuristic": label,
        "found": res.found,
        "timed_out": res.timed_out,
        "solution_cost": res.solution_cost,
        "goal": members(res.goal_state) if res.goal_state else None,
        "expansions": res.expansions,
        "reopens": res.reopens,
        "wall_time_ms": round(elapsed * 1000, 1),
    }
    if args.bfs:
        record["optimal_claimed"] = False
    out.write(json.dumps(record) + "\n")
    return EXIT_OK


def _sampled(size, seed, what):
    if size is None or seed is None:
        raise UsageError(f"sampled {what} needs --sample-size and a seed")
    return Sampled(size, seed)


def _cmd_metrics(args, out):
    inst = load_instance(args.instance)
    mode = _sampled(args.sample_size, args.seed, "metrics") if args.mode == "sampled" else "full"
    h = _heuristic(args, inst)
    rep = compute_metrics(h, inst, mode, cap=args.cap)
    record = {
        "heuristic": h.name,
        "mode": rep.mode,
        "ars": format_ratio(rep.ars),
        "arn": format_ratio(rep.arn),
        "inr": format_ratio(rep.inr),
        "wi": format_ratio(rep.wi),
        "nodes_total": rep.nodes_total,
        "nodes_sampled": rep.nodes_sampled,
        "edges_counted": rep.edges_counted,
        "excluded_dead_ends": rep.excluded_dead_ends,
    }
    if rep.mode == "sampled":
        record.update(sample_size=rep.sample_size, seed=rep.seed)
    out.write(json.dumps(record) + "\n")
    return EXIT_OK


def _sweep_sources(args):
    sources = [load_instance(path) for path in args.instance]
    if args.types or args.seeds or args.n:
        if not (args.types and args.seeds and args.n):
            raise UsageError("generated sweeps need --type, --n and --seed")
        types = INSTANCE_TYPES if "all" in args.types else args.types
        for kind in types:
            for seed in args.seeds:
                sources.append(GeneratorConfig(kind, args.n, args.R, seed, args.t))
    if not sources:
        raise UsageError("give instance files or generator flags")
    return sources


def _cmd_sweep(args, out, log):
    if args.metrics == "sampled":
        metrics = _sampled(args.sample_size, args.metrics_seed, "metrics")
    else:
        metrics = args.metrics
    sweeps = []
    for src in _sweep_sources(args):
        cfg = SweepConfig(
            src, args.epsilons, include_bfs=not args.no_bfs, metrics=metrics,
            metrics_cap=args.metrics_cap, baseline=args.baseline, time_budget=args.time_budget,
        )
        sweep = run_sweep(cfg)
        sweeps.append(sweep)
        meta = sweep.instance.meta_dict()
        for rec in sweep_records(sweep):
            log(f"{meta.get('type', 'file')} seed={meta.get('seed', '')} eps={rec['epsilon']}: "
                f"{rec['node_expansions']} expansions ({rec['status']})")
    if args.csv:
        emit_csv(sweeps, args.csv)
    else:
        import csv
        from .experiment import CSV_COLUMNS
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for s in sweeps:
            writer.writerows(sweep_records(s))
    if args.plot_data:
        emit_plot_data(sweeps, args.plot_data)
    return EXIT_OK


def _cmd_verify(args, out, log):
    from .verify import run_verify

    report = run_verify(args.level, seed=args.seed, log=log)
    for name, count in sorted(report.counts.items()):
        bad = sum(1 for f in report.failures if f.check == name)
        out.write(f"{'FAIL' if bad else 'PASS'} {name}: {count} checks, {bad} failures\n")
    for failure in report.failures[:20]:
        out.write(failure.dump() + "\n")
    out.write(f"{'PASS' if report.ok else 'FAIL'} verify level={report.level} "
              f"in {report.seconds:.1f}s\n")
    return EXIT_OK if report.ok else EXIT_FAIL


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    def log(msg):
        err.write(msg + "\n")

    try:
        if args.command == "gen":
            return _cmd_gen(args, out)
        if args.command == "solve":
            return _cmd_solve(args, out)
        if args.command == "metrics":
            return _cmd_metrics(args, out)
        if args.command == "sweep":
            return _cmd_sweep(args, out, log)
        return _cmd_verify(args, out, log)
    except (UsageError, PopulationTooLarge) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except InstanceFormatError as exc:
        err.write(f"error: malformed instance: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_IO
    except ValueError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
