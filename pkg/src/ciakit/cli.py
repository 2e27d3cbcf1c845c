"""Command-line front end.

Subcommands: parse, compose, refine, metrics, generate, experiment, regress,
dot.  Exit codes: 0 success, 1 usage error, 2 data error, 3 experiment run
dominated by refinement timeouts (at least one timed-out row).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .compose import IoSets, compose, compose_pairwise_reduce, default_io_sets
from .core import Automaton
from .dot import export_dot
from .errors import CiaError
from .experiment import (
    reduction_report,
    rows_from_csv,
    rows_to_csv,
    run_experiment,
)
from .fmt import parse_automata, serialize_automaton
from .generate import GenParams, generate_corpus, write_corpus
from .metrics import metrics_record
from .refine import partition_refine, quotient
from .regress import classify, fit_logistic, threshold_x


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_automata(paths: list[str]) -> list[Automaton]:
    automata = []
    for path in paths:
        automata.extend(parse_automata(Path(path).read_text(encoding="utf-8")))
    return automata


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _split_actions(value: str | None) -> frozenset[str]:
    if not value:
        return frozenset()
    return frozenset(tok for tok in value.split(",") if tok)


def _io_from_args(args, components) -> IoSets:
    if args.provided is not None or args.required is not None:
        return IoSets(_split_actions(args.provided), _split_actions(args.required))
    if args.io == "closed":
        return IoSets.closed()
    return default_io_sets(components)


def _metrics_row(automaton: Automaton) -> dict:
    rec = metrics_record(automaton)
    return {
        "name": automaton.name,
        "states": rec.states,
        "transitions": rec.transitions,
        "internal": rec.internal_transitions,
        "beta": rec.beta,
        "gini_in": rec.gini_in,
        "gini_out": rec.gini_out,
    }


def _metrics_csv(rows: list[dict]) -> str:
    def cell(value):
        if value is None:
            return "NA"
        if isinstance(value, float):
            return format(value, ".12g")
        return str(value)

    header = ["name", "states", "transitions", "internal", "beta", "gini_in", "gini_out"]
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell(row[col]) for col in header))
    return "\n".join(lines) + "\n"


def _parse_states_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("..")
    return (int(lo), int(hi or lo))


def _parse_mix(text: str) -> tuple[float, float, float]:
    parts = tuple(float(p) for p in text.split(","))
    if len(parts) != 3:
        raise ValueError("expected three comma-separated proportions")
    return parts


def _cmd_parse(args) -> int:
    automata = _read_automata(args.files)
    _emit("".join(serialize_automaton(a) for a in automata), args.out)
    return 0


def _cmd_compose(args) -> int:
    components = _read_automata(args.files)
    io_sets = _io_from_args(args, components)
    if args.pairwise:
        result = compose_pairwise_reduce(
            components, io_sets, timeout=args.timeout, strict_internal=args.strict_internal
        )
    else:
        result = compose(components, io_sets)
    _emit(serialize_automaton(result), args.out)
    return 0


def _cmd_refine(args) -> int:
    out = []
    for automaton in _read_automata(args.files):
        partition = partition_refine(
            automaton, timeout=args.timeout, strict_internal=args.strict_internal
        )
        out.append(serialize_automaton(quotient(automaton, partition)))
    _emit("".join(out), args.out)
    return 0


def _cmd_metrics(args) -> int:
    rows = [_metrics_row(a) for a in _read_automata(args.files)]
    if args.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", args.out)
    else:
        _emit(_metrics_csv(rows), args.out)
    return 0


def _cmd_generate(args) -> int:
    params = GenParams(
        state_count_range=args.states,
        target_beta=args.beta,
        alphabet_size=args.alphabet_size,
        kind_mix=args.kind_mix,
        clique_bias=args.clique_bias,
        pa_strength=args.pa_strength,
        seed=args.seed,
        avoid_deadlocks=args.avoid_deadlocks,
    )
    pairs = generate_corpus(params, args.pairs, disjoint_alphabets=args.disjoint_alphabets)
    written = write_corpus(pairs, args.out)
    sys.stderr.write(f"wrote {len(written)} pair files to {args.out}\n")
    return 0


def _cmd_experiment(args) -> int:
    if args.report:
        rows = rows_from_csv(Path(args.report).read_text(encoding="utf-8"))
        _emit(json.dumps(reduction_report(rows), indent=2) + "\n", args.out)
        return 0
    if not args.corpus:
        raise CiaError("experiment needs --corpus DIR (or --report CSV)")
    io_policy: str | IoSets = args.io
    if args.provided is not None or args.required is not None:
        io_policy = IoSets(_split_actions(args.provided), _split_actions(args.required))
    rows = run_experiment(
        args.corpus,
        io_policy=io_policy,
        timeout=args.timeout,
        workers=args.workers,
        deterministic_timing=args.deterministic_timing,
        strict_internal=args.strict_internal,
    )
    if args.format == "json":
        _emit(json.dumps([row.__dict__ for row in rows], indent=2) + "\n", args.out)
    else:
        _emit(rows_to_csv(rows), args.out)
    return 3 if any(row.timed_out for row in rows) else 0


def _cmd_regress(args) -> int:
    rows = rows_from_csv(Path(args.csv).read_text(encoding="utf-8"))
    xs, ys = [], []
    for row in rows:
        if row.status != "ok" and not (args.y == "over5min" and row.status == "timeout"):
            continue
        x = getattr(row, args.x)
        if x is None:
            continue
        if args.y == "success":
            y = row.success
        elif args.over_ms is not None:
            y = 1 if row.elapsed_ms > args.over_ms else 0
        else:
            y = row.over_5min
        xs.append(float(x))
        ys.append(int(y))
    fit = fit_logistic(xs, ys)
    report = classify(fit, xs, ys, cutoff=args.cutoff)
    payload = {
        "n": len(xs),
        "x": args.x,
        "y": args.y,
        "a": fit.a,
        "b": fit.b,
        "se_a": fit.se_a,
        "se_b": fit.se_b,
        "chi2": fit.chi2,
        "p": fit.p_value,
        "converged": fit.converged,
        "sensitivity": report.sensitivity,
        "specificity": report.specificity,
        f"threshold_x@{args.cutoff:g}": threshold_x(fit, args.cutoff) if fit.b != 0 else None,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def _cmd_dot(args) -> int:
    _emit("".join(export_dot(a) for a in _read_automata(args.files)), args.out)
    return 0


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--timeout", type=float, default=7200.0, help="refinement budget, seconds")
    common.add_argument("--workers", type=int, default=1, help="parallel workers")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (default stdout)")

    io_opts = argparse.ArgumentParser(add_help=False)
    io_opts.add_argument("--io", choices=("open", "closed"), default="open")
    io_opts.add_argument("--provided", help="comma-separated provided actions (overrides --io)")
    io_opts.add_argument("--required", help="comma-separated required actions (overrides --io)")

    parser = _Parser(prog="ciakit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="validate and canonicalize documents")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("compose", parents=[common, io_opts], help="product composition")
    p.add_argument("files", nargs="+")
    p.add_argument("--pairwise", action="store_true", help="fold pairwise, reducing each step")
    p.add_argument("--strict-internal", action="store_true")
    p.set_defaults(func=_cmd_compose)

    p = sub.add_parser("refine", parents=[common], help="weak-bisimulation reduction")
    p.add_argument("files", nargs="+")
    p.add_argument("--strict-internal", action="store_true",
                   help="match internal moves by exact label instead of silent closure")
    p.set_defaults(func=_cmd_refine)

    p = sub.add_parser("metrics", parents=[common], help="structural metrics per automaton")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("generate", parents=[common], help="write a seeded corpus of pairs")
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--beta", type=float, default=1.36, help="target scaling exponent")
    p.add_argument("--states", type=_parse_states_range, default=(4, 24),
                   help="state count range MIN..MAX")
    p.add_argument("--clique-bias", type=float, default=0.3)
    p.add_argument("--alphabet-size", type=int, default=4)
    p.add_argument("--pa-strength", type=float, default=1.0)
    p.add_argument("--kind-mix", type=_parse_mix, default=(0.4, 0.4, 0.2),
                   help="input,output,internal proportions")
    p.add_argument("--disjoint-alphabets", action="store_true")
    p.add_argument("--avoid-deadlocks", action="store_true",
                   help="route extra edges out of terminal states first")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("experiment", parents=[common, io_opts],
                       help="compose/refine every corpus pair into CSV rows")
    p.add_argument("--corpus", help="directory of pair .cia files")
    p.add_argument("--report", metavar="CSV",
                   help="summarize an existing experiment CSV instead of running")
    p.add_argument("--deterministic-timing", action="store_true",
                   help="record refinement work units instead of wall-clock ms")
    p.add_argument("--strict-internal", action="store_true")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("regress", parents=[common], help="logistic model over experiment CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--x", required=True, choices=("beta", "states", "gini_in", "gini_out"))
    p.add_argument("--y", required=True, choices=("success", "over5min"))
    p.add_argument("--cutoff", type=float, default=0.5)
    p.add_argument("--over-ms", type=int, default=None,
                   help="custom elapsed_ms threshold for the over5min response")
    p.set_defaults(func=_cmd_regress)

    p = sub.add_parser("dot", parents=[common], help="Graphviz DOT export")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=_cmd_dot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CiaError, OSError, ValueError) as exc:
        sys.stderr.write(f"ciakit: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
