"""Command-line entry point: ``geoad <subcommand> ...``.

Exit codes: 0 on success, 1 on bad input, 2 when a property suite finds
violations, 3 when a search times out (or the exact solver refuses an
oversized instance) and ``--force`` was not given.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import jsonschema

from . import bench, io
from .exceptions import (EnumerationLimitExceeded, GeoAdError, SearchBudgetExceeded,
                         SearchTimeout)
from .instances import MAX_WALK_LENGTH, GenConfig, generate_instance
from .mechanism import run_mechanism
from .model import social_welfare, vtrs
from .solvers import SOLVERS, SolveOptions, get_solver
from .verify import PROPERTIES, run_suite

log = logging.getLogger("geoad")

EXIT_OK, EXIT_INPUT, EXIT_PROPERTY, EXIT_TIMEOUT = 0, 1, 2, 3
DEFAULT_MAX_SPACE_LOG10 = 160.0


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--instance", type=Path, help="instance JSON file")
    p.add_argument("--out", type=Path, help="write the result here instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="seed (first seed for sweeps)")
    p.add_argument("--timeout-s", type=float, default=None,
                   help="wall-clock limit per solve (sweeps default to 1200)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--force", action="store_true",
                   help="run oversized exact searches; on timeout print the incumbent")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="geoad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a grid-world instance",
                       description="Random walks on a 10x10 grid with 30 shops.  With --paths K, "
                       "K walks leave the same cell with lengths uniform on 1..20 and path "
                       "probabilities drawn uniformly, then normalized.")
    g.add_argument("--ads", type=int, default=30)
    g.add_argument("--lambda", dest="lam", type=float, default=0.5)
    g.add_argument("--nodes", type=int, default=20, help="walk length for single-path instances")
    g.add_argument("--paths", type=int, default=1)
    g.add_argument("--max-path-length", type=int, default=MAX_WALK_LENGTH)

    sub.add_parser("dump-tree", parents=[common], help="print the path tree of an instance")

    s = sub.add_parser("solve", parents=[common], help="run one allocation algorithm")
    s.add_argument("--algorithm", required=True, choices=sorted(SOLVERS))
    s.add_argument("--mbar", type=int)
    s.add_argument("--budget", type=int, help="branch-and-bound expansion cap")
    s.add_argument("--max-space-log10", type=float, default=DEFAULT_MAX_SPACE_LOG10,
                   help="refuse exact tree search beyond 10^X node-to-ad maps without --force")

    m = sub.add_parser("mechanism", parents=[common], help="allocation plus VCG transfers")
    m.add_argument("--algorithm", required=True, choices=sorted(SOLVERS))
    m.add_argument("--reports", type=Path, help="JSON list of reported rewards")
    m.add_argument("--mbar", type=int)
    m.add_argument("--fast", action="store_true", help="skip marginal solves for unused ads")

    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("--property", required=True, choices=PROPERTIES + ("all",))
    v.add_argument("--seeds", type=int, default=100, help="number of seeded instances")
    v.add_argument("--algorithms", nargs="+", choices=sorted(SOLVERS))
    v.add_argument("--mbar", type=int, default=2)

    b1 = sub.add_parser("bench-single", parents=[common], help="single-path sweep")
    b1.add_argument("--cell", action="append", metavar="LAMBDA:N",
                    help="sweep cell, repeatable (default: 0.5 with N=10..50, 0.8 with N=10..30)")
    b1.add_argument("--seeds", type=int, default=50)
    b1.add_argument("--mbars", type=int, nargs="*", default=[1, 2, 3])
    b1.add_argument("--ads", type=int, default=30)
    b1.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")

    b2 = sub.add_parser("bench-multi", parents=[common], help="multi-path sweep")
    b2.add_argument("--paths", type=int, nargs="*", default=list(range(1, 11)))
    b2.add_argument("--lambda", dest="lam", type=float, default=0.5)
    b2.add_argument("--seeds", type=int, default=50)
    b2.add_argument("--mbars", type=int, nargs="*", default=[1, 2, 3])
    b2.add_argument("--ads", type=int, default=30)
    b2.add_argument("--budget", type=int, help="branch-and-bound expansion cap per run")
    b2.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
    return parser


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
    if args.out:
        args.out.write_text(text + "\n")
    else:
        print(text)


def _load(args):
    if args.instance is None:
        raise ValueError("--instance is required")
    return io.load_instance(args.instance)


def _deadline(args):
    return None if args.timeout_s is None else time.monotonic() + args.timeout_s


def _plan_payload(instance, plan, algorithm, suboptimal=False):
    shares = vtrs(instance, plan)
    return {
        "algorithm": algorithm,
        "plan": io.plan_to_dict(plan),
        "sw": social_welfare(instance, plan),
        "vtrs": {str(a): v for a, v in shares.items()},
        "suboptimal": suboptimal,
    }


def cmd_gen(args) -> int:
    cfg = GenConfig(seed=args.seed, num_ads=args.ads, lam=args.lam, num_nodes=args.nodes,
                    num_paths=args.paths, max_path_length=args.max_path_length)
    _emit(args, io.dumps_instance(generate_instance(cfg)))
    return EXIT_OK


def cmd_dump_tree(args) -> int:
    tree = _load(args).tree
    lines = [f"{'id':>4} {'vertex':>8} {'alpha':>10} {'depth':>5}  children"]
    for nd in tree.nodes:
        kids = ",".join(map(str, nd.children)) or "-"
        lines.append(f"{nd.id:>4} {str(nd.vertex):>8} {nd.alpha:>10.6f} {nd.depth:>5}  {kids}")
    lines.append(f"# {len(tree)} nodes, {tree.num_paths} paths")
    _emit(args, "\n".join(lines))
    return EXIT_OK


def cmd_solve(args) -> int:
    instance = _load(args)
    opts = SolveOptions(mbar=args.mbar, deadline=_deadline(args), budget=args.budget,
                        force=args.force, max_space_log10=args.max_space_log10)
    try:
        plan = get_solver(args.algorithm).run(instance, opts)
    except SearchBudgetExceeded as exc:
        log.warning("%s", exc)
        _emit(args, _plan_payload(instance, exc.result.plan, args.algorithm, suboptimal=True))
        return EXIT_OK
    except SearchTimeout as exc:
        if args.force and exc.result is not None:
            log.warning("%s; printing the incumbent", exc)
            _emit(args, _plan_payload(instance, exc.result.plan, args.algorithm, suboptimal=True))
            return EXIT_OK
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    except EnumerationLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    _emit(args, _plan_payload(instance, plan, args.algorithm))
    return EXIT_OK


def cmd_mechanism(args) -> int:
    instance = _load(args)
    reports = None
    if args.reports:
        reports = json.loads(args.reports.read_text())
    opts = SolveOptions(mbar=args.mbar, deadline=_deadline(args), force=args.force)
    try:
        outcome = run_mechanism(instance, reports, args.algorithm, opts=opts, fast=args.fast)
    except (SearchTimeout, SearchBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TIMEOUT
    _emit(args, outcome.to_dict())
    return EXIT_OK


def cmd_verify(args) -> int:
    props = PROPERTIES if args.property == "all" else (args.property,)
    seeds = range(args.seed, args.seed + args.seeds)
    lines, failed = [], False
    for prop in props:
        rep = run_suite(prop, seeds, args.algorithms, mbar=args.mbar)
        status = "PASS" if rep.passed else "FAIL"
        failed |= not rep.passed
        lines.append(f"{prop}: {status} checked={rep.checked} skipped={rep.skipped} "
                     f"violations={len(rep.violations)}")
        for v in rep.violations[:10]:
            lines.append(f"  {v.algorithm} seed={v.seed}: {v.detail}")
    _emit(args, "\n".join(lines))
    return EXIT_PROPERTY if failed else EXIT_OK


def _parse_cells(cells):
    if not cells:
        return bench.SingleSweep().cells
    out = []
    for c in cells:
        lam, _, n = c.partition(":")
        out.append((float(lam), int(n)))
    return tuple(out)


def _finish_bench(args, rows, title) -> int:
    out = args.out or Path(f"{title}.csv")
    path, agg = bench.write_csv(rows, out)
    if args.gnuplot:
        agg.with_suffix(".gp").write_text(bench.gnuplot_script(agg, title))
    print(f"wrote {path} and {agg}", file=sys.stderr)
    return EXIT_OK


def cmd_bench_single(args) -> int:
    sweep = bench.SingleSweep(
        cells=_parse_cells(args.cell), seeds=tuple(range(args.seed, args.seed + args.seeds)),
        mbars=tuple(args.mbars), num_ads=args.ads,
        timeout_s=args.timeout_s or bench.DEFAULT_TIMEOUT_S)
    return _finish_bench(args, bench.bench_single_path(sweep, args.jobs), "bench_single")


def cmd_bench_multi(args) -> int:
    sweep = bench.MultiSweep(
        path_counts=tuple(args.paths), lam=args.lam,
        seeds=tuple(range(args.seed, args.seed + args.seeds)), mbars=tuple(args.mbars),
        num_ads=args.ads, timeout_s=args.timeout_s or bench.DEFAULT_TIMEOUT_S, budget=args.budget)
    return _finish_bench(args, bench.bench_multi_path(sweep, args.jobs), "bench_multi")


COMMANDS = {
    "gen": cmd_gen, "dump-tree": cmd_dump_tree, "solve": cmd_solve, "mechanism": cmd_mechanism,
    "verify": cmd_verify, "bench-single": cmd_bench_single, "bench-multi": cmd_bench_multi,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except jsonschema.ValidationError as exc:
        print(f"error: invalid instance: {exc.message}", file=sys.stderr)
        return EXIT_INPUT
    except (GeoAdError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
