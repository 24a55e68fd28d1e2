"""Command line front end.

Subcommands: solve, irse, gen, verify-family, search, dyn. Input instances
come from a file or standard input; output goes to standard output unless
--out is given. Exit codes: 0 success, 2 input error, 3 resource
exhaustion, 4 internal invariant violation (including family verification
mismatches).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import formats
from .core import Instance, is_nash, loads, potential
from .dynamics import DynamicsConfig, simulate
from .generators import family_witnesses, lower_bound_family
from .search import InvariantViolationError, SearchSpace, render_csv, run_search
from .solvers import (
    ResourceExhaustedError,
    optimal_makespan,
    potential_optimum,
)

__all__ = ["main"]


def _read_instance(args: argparse.Namespace) -> Instance:
    if getattr(args, "stdin", False):
        text = sys.stdin.read()
    elif getattr(args, "instance", None):
        with open(args.instance, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        raise ValueError("provide an instance via --instance FILE or --stdin")
    return formats.load_instance_document(text)


def _emit(args: argparse.Namespace, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_solve(args: argparse.Namespace) -> int:
    instance = _read_instance(args)
    if args.objective == "makespan":
        opt_value, witness = optimal_makespan(instance, node_limit=args.node_limit)
        doc = {
            "format_version": formats.FORMAT_VERSION,
            "objective": "makespan",
            "instance": {"m": instance.m, "weights": list(instance.weights)},
            "opt_makespan": opt_value,
            "opt_witness": list(witness.assignment),
        }
        _emit(args, formats.dumps_document(doc))
        return 0
    report = potential_optimum(instance, node_limit=args.node_limit)
    _emit(args, formats.dumps_document(formats.solve_report_document(report, args.objective)))
    return 0


def _cmd_irse(args: argparse.Namespace) -> int:
    instance = _read_instance(args)
    report = potential_optimum(instance, node_limit=args.node_limit)
    sys.stdout.write(formats.format_ratio(report.irse()) + "\n")
    _emit(args, formats.dumps_document(formats.solve_report_document(report, "both")))
    return 0


def _cmd_gen(args: argparse.Namespace) -> int:
    fam = lower_bound_family(args.k)
    predictions = {
        "k": fam.k,
        "scale": fam.scale,
        "opt_makespan": fam.opt_makespan,
        "worst_po_makespan": fam.worst_po_makespan,
        "irse": formats.format_ratio(fam.irse),
    }
    _emit(args, formats.dumps_document(formats.instance_document(fam.instance, predictions)))
    return 0


def _cmd_verify_family(args: argparse.Namespace) -> int:
    fam = lower_bound_family(args.k)
    report = potential_optimum(fam.instance, node_limit=args.node_limit)
    worst_po_alloc, optimal_alloc = family_witnesses(args.k)
    inst = fam.instance
    checks = [
        ("opt_makespan", fam.opt_makespan, report.opt_makespan),
        ("worst_po_makespan", fam.worst_po_makespan, report.worst_po_makespan),
        ("irse", formats.format_ratio(fam.irse), formats.format_ratio(report.irse())),
        (
            "witness_potentials_equal",
            potential(loads(inst, worst_po_alloc)),
            potential(loads(inst, optimal_alloc)),
        ),
        ("worst_po_witness_potential", report.min_potential, potential(loads(inst, worst_po_alloc))),
        ("optimal_witness_makespan", fam.opt_makespan, max(loads(inst, optimal_alloc).loads)),
        ("worst_po_witness_is_nash", True, is_nash(inst, worst_po_alloc)),
        ("optimal_witness_is_nash", True, is_nash(inst, optimal_alloc)),
    ]
    ok = True
    lines = [f"family k={fam.k} m={inst.m} scale={fam.scale} weights={list(inst.weights)}"]
    for name, expected, got in checks:
        good = expected == got
        ok = ok and good
        status = "ok" if good else "MISMATCH"
        lines.append(f"  {name}: {status} (expected {expected}, got {got})")
    lines.append("PASS" if ok else "FAIL")
    _emit(args, "\n".join(lines) + "\n")
    return 0 if ok else 4


def _cmd_search(args: argparse.Namespace) -> int:
    space = SearchSpace(
        n_range=(args.n_min, args.n_max),
        m_range=(args.m_min, args.m_max),
        w_max=args.w_max,
        mode=args.mode,
        count=args.count,
        seed=args.seed,
    )
    import time

    started = time.monotonic()
    result = run_search(space, workers=args.workers, node_limit=args.node_limit)
    summary = dict(result.summary)
    if args.timing:
        # wall time is inherently run-dependent; opt in to keep default
        # output byte-identical across runs
        summary["wall_time_s"] = round(time.monotonic() - started, 3)
    csv_text = render_csv(result.records if args.full else result.hits)
    sys.stdout.write(formats.dumps_document(summary))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


def _cmd_dyn(args: argparse.Namespace) -> int:
    instance = _read_instance(args)
    if args.initial == "random":
        initial = "random"
    else:
        from .core import Allocation

        initial = Allocation(tuple(int(x) for x in args.initial.split(",")))
    config = DynamicsConfig(
        beta=Fraction(args.beta), steps=args.steps, seed=args.seed, initial=initial
    )
    stats = simulate(instance, config)
    _emit(args, formats.dumps_document(formats.trace_document(stats)))
    return 0


def _add_instance_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--instance", help="path to an instance JSON file")
    sub.add_argument("--stdin", action="store_true", help="read the instance from stdin")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lbgames",
        description="Exact load balancing game toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("solve", help="optimal makespan and/or potential optimum")
    _add_instance_args(p)
    p.add_argument("--objective", choices=["makespan", "potential", "both"], default="both")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_solve)

    p = subs.add_parser("irse", help="worst potential-optimal makespan over optimum")
    _add_instance_args(p)
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_irse)

    p = subs.add_parser("gen", help="emit a lower-bound family instance")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gen)

    p = subs.add_parser("verify-family", help="solve a family instance against its predictions")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_family)

    p = subs.add_parser("search", help="sweep an instance space for high ratios")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--m-min", type=int, default=1)
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--w-max", type=int, required=True)
    p.add_argument("--mode", choices=["exhaustive", "random"], default="exhaustive")
    p.add_argument("--count", type=int, default=None, help="sample count for random mode")
    p.add_argument("--seed", type=int, default=None, help="seed for random mode")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--full", action="store_true", help="CSV of all records, not just ratios > 1")
    p.add_argument("--timing", action="store_true", help="include wall time in the summary")
    p.add_argument("--out", help="write the CSV report to this file")
    p.set_defaults(func=_cmd_search)

    p = subs.add_parser("dyn", help="simulate noisy best-response dynamics")
    _add_instance_args(p)
    p.add_argument("--beta", required=True, help="inverse temperature, rational like 3 or 1/2")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--initial", default="random", help="'random' or comma-joined machine indices")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_dyn)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolationError as exc:
        print(f"INVARIANT VIOLATION: {exc}", file=sys.stderr)
        return 4
    except ResourceExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
