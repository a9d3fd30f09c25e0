"""Command-line front end: ``framekit <subcommand> [options]``.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error.
Every report is a single JSON object ``{"config", "results", "version"}``
or a CSV table with a header row. Output bytes depend only on the
arguments, input files and seed, never on the worker count.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import __version__, walk
from .circuit import CircuitError, parse_circuit
from .clifford import clifford1, clifford1_name
from .frame_rules import (
    TClass,
    c_minus_indices,
    classify_t_input_by_matrix,
    count_good_pairs,
    good_pairs,
    verify_relations,
)
from .protocols import (
    DEFAULT_MAX_STEPS,
    BufferModel,
    cnot_summary,
    default_inverse_precorrection,
    run_cnot_protocol,
    run_pauli_frame_protocol,
    run_t_walk,
    run_t_walk_symbolic,
    walk_success_within,
)
from .stabilizer import appendix_a_report

FORMAT_VERSION = 1
BUFFER_ASSUMPTION = "buffer Cliffords drawn independently per qubit from the stated model; uniform means uniform over the 24 single-qubit Cliffords"


class UsageError(Exception):
    pass


# --- argument types ------------------------------------------------------


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"probability {value} outside [0, 1]")
    return value


def _open_unit(text: str) -> float:
    value = _probability(text)
    if value in (0.0, 1.0):
        raise argparse.ArgumentTypeError(f"{value} must lie strictly between 0 and 1")
    return value


def _count(minimum: int):
    def parse(text: str) -> int:
        try:
            value = int(float(text)) if "e" in text.lower() else int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"{value} is below the minimum {minimum}")
        return value

    return parse


def _model(text: str) -> str:
    try:
        BufferModel.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


# --- output ----------------------------------------------------------------


def _clean(obj):
    """Make floats JSON-safe (NaN and inf become null)."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def emit_report(config: dict, results, fmt: str, table=None) -> bytes:
    """Serialise a report; ``table`` is ``(header, rows)`` for CSV output."""
    if fmt == "csv":
        if table is None:
            raise UsageError("this subcommand has no CSV form; use --format json")
        header, rows = table
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue().encode()
    doc = {"config": _clean(config), "results": _clean(results), "version": FORMAT_VERSION}
    return (json.dumps(doc, indent=2, allow_nan=False) + "\n").encode()


def _write(data: bytes, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        Path(out).write_bytes(data)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from None


def _config(args, **extra) -> dict:
    skip = {"func", "out", "format"}
    cfg = {"subcommand": args.command}
    cfg.update({k: v for k, v in sorted(vars(args).items()) if k not in skip and k != "command"})
    cfg.update(extra)
    cfg["package_version"] = __version__
    return cfg


def _histogram_table(stats):
    rows = []
    for name in sorted(stats.histograms):
        h = stats.histograms[name]
        rows.extend([name, k, h[k]] for k in sorted(h))
    return ["histogram", "value", "count"], rows


# --- subcommands ---------------------------------------------------------


def cmd_counts(args):
    good = count_good_pairs()
    minus = sorted(c_minus_indices())
    by_matrix = sorted(i for i in range(24) if classify_t_input_by_matrix(clifford1(i)) is TClass.C_MINUS)
    results = {
        "good_pairs": good,
        "total_pairs": 24 * 24,
        "c_minus": len(minus),
        "c_plus": 24 - len(minus),
        "c_minus_by_matrix": len(by_matrix),
        "c_minus_cliffords": [clifford1_name(i) for i in minus],
        "good_pair_list": [[clifford1_name(i), clifford1_name(j)] for i, j in good_pairs()],
    }
    ok = good == 64 and len(minus) == 8 and by_matrix == minus
    table = (["quantity", "value"], [[k, results[k]] for k in ("good_pairs", "total_pairs", "c_minus", "c_plus")])
    return results, ok, table


def cmd_relations(args):
    rows = verify_relations(args.tol)
    ok = all(r["holds"] for r in rows)
    return {"relations": rows, "all_hold": ok}, ok, (["relation", "holds"], [[r["relation"], r["holds"]] for r in rows])


def cmd_walk_analytic(args):
    p, n = args.p, args.n
    results = {
        "termination_probability": walk.termination_probability(p),
        "cutoff_probability": walk.cutoff_probability(p, n),
        "cutoff_probability_direct": walk.cutoff_probability_direct(p, n),
        "tail_probability": walk.tail_probability(p, n),
        "hyp2f1": walk.hyp2f1_special(n, 4 * p * (1 - p)),
        "hyp2f1_at_least_2p_plus_1": walk.hyp2f1_lower_bound_holds(p, n),
    }
    ok = True
    if n >= 1:
        results["upper_bound"] = walk.upper_bound(p, n)
        results["upper_bound_holds"] = walk.upper_bound_check(p, n)
        ok = results["upper_bound_holds"]
    if args.q is not None:
        try:
            results["min_steps_for_q"] = walk.min_steps_for_target(p, args.q)
        except walk.UnattainableTarget as exc:
            results["min_steps_for_q"] = None
            results["note"] = str(exc)
    table = (["quantity", "value"], [[k, v] for k, v in results.items()])
    return results, ok, table


def _p_grid(args):
    count = int(round((args.p_max - args.p_min) / args.p_step)) + 1
    return [round(args.p_min + k * args.p_step, 12) for k in range(count)]


def cmd_fig6(args):
    ps = _p_grid(args)
    rows = walk.fig6_rows(ps, tuple(args.q))
    skipped = [[q, p] for q in args.q for p in ps if q >= walk.termination_probability(p)]
    results = {"rows": [{"q": q, "p": p, "n": n} for q, p, n in rows], "skipped_unattainable": skipped}
    return results, True, (["q", "p", "n"], [[q, p, n] for q, p, n in rows])


def cmd_t_walk(args):
    runner = run_t_walk_symbolic if args.symbolic else run_t_walk
    stats = runner(args.p, args.trials, args.seed, args.max_steps)
    within = []
    for n in range(args.report_n + 1):
        within.append(
            {
                "n": n,
                "empirical": walk_success_within(stats, 2 * n + 1),
                "analytic": walk.cutoff_probability(args.p, n),
            }
        )
    results = {
        "stats": stats.to_dict(),
        "success_fraction": stats.successes / stats.trials if stats.trials else None,
        "capped_fraction": stats.capped / stats.trials if stats.trials else None,
        "success_within": within,
    }
    return results, True, _histogram_table(stats)


def cmd_cnot_mc(args):
    model = BufferModel.parse(args.model, args.latency_rounds)
    inverse = {"auto": None, "on": True, "off": False}[args.inverse_precorrection]
    resolved = default_inverse_precorrection(model) if inverse is None else inverse
    stats = run_cnot_protocol(model, args.trials, args.seed, args.max_rounds, resolved)
    results = {"stats": stats.to_dict(), "summary": cnot_summary(stats)}
    cfg_extra = {"inverse_precorrection_resolved": resolved, "buffer_assumption": BUFFER_ASSUMPTION}
    return results, True, _histogram_table(stats), cfg_extra


def cmd_simulate(args):
    try:
        circuit = parse_circuit(Path(args.file).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc}") from None
    except CircuitError as exc:
        raise UsageError(f"{args.file}: {exc}") from None
    model = BufferModel.parse(args.model, args.latency_rounds)
    try:
        stats = run_pauli_frame_protocol(circuit, model, args.trials, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    results = {
        "qubits": circuit.n,
        "gates": len(circuit.gates),
        "t_gates": circuit.t_count,
        "stats": stats.to_dict(),
        "pauli_at_every_checkpoint": stats.violations == 0,
    }
    return results, stats.violations == 0, _histogram_table(stats)


def cmd_appendix_a(args):
    report = appendix_a_report(args.errors, args.seed, args.tol, args.entangling)
    rows = []
    for e in report["errors"]:
        for s in e["syndromes"]:
            rows.append([e["error"], s["syndrome"], s["probability"], s["logical_clifford"], s["pass"]])
    table = (["error", "syndrome", "probability", "logical_clifford", "pass"], rows)
    return report, report["all_pass"], table


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="framekit", description="Clifford-frame buffer protocols: checks, analytics and simulations.", formatter_class=fmt
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, func, help_text, default_format="json"):
        p = sub.add_parser(name, help=help_text, description=help_text, formatter_class=fmt)
        p.add_argument("--out", default=None, help="output path (stdout when omitted)")
        p.add_argument("--format", choices=("json", "csv"), default=default_format, help="output format")
        p.set_defaults(func=func)
        return p

    add("counts", cmd_counts, "count good CNOT input pairs and the C-/C+ split")
    p = add("relations", cmd_relations, "verify the CNOT/single-qubit Clifford identities")
    p.add_argument("--tol", type=float, default=1e-9, help="matrix comparison tolerance")

    p = add("walk-analytic", cmd_walk_analytic, "closed-form T-walk quantities at one (p, n)")
    p.add_argument("--p", type=_probability, required=True, help="probability of a C+ buffer Clifford")
    p.add_argument("--n", type=_count(0), default=0, help="cutoff: success within 2n+1 T gates")
    p.add_argument("--q", type=_open_unit, default=None, help="target success probability")

    p = add("fig6", cmd_fig6, "minimum cutoff n(p) for target success probabilities", default_format="csv")
    p.add_argument("--q", type=_open_unit, nargs="+", default=list(walk.FIG6_TARGETS), help="targets")
    p.add_argument("--p-min", type=_probability, default=0.01, help="smallest p on the grid")
    p.add_argument("--p-max", type=_probability, default=0.99, help="largest p on the grid")
    p.add_argument("--p-step", type=float, default=0.01, help="grid spacing in p")

    p = add("t-walk", cmd_t_walk, "Monte Carlo of the T-gate correction walk")
    p.add_argument("--p", type=_probability, required=True, help="probability of a C+ buffer Clifford")
    p.add_argument("--trials", type=_count(1), default=100_000, help="Monte Carlo trials")
    p.add_argument("--seed", type=_count(0), default=0, help="RNG seed")
    p.add_argument("--max-steps", type=_count(1), default=DEFAULT_MAX_STEPS, help="T-gate cap per trial")
    p.add_argument("--symbolic", action="store_true", help="track explicit Clifford words")
    p.add_argument("--report-n", type=_count(0), default=20, help="largest n in the success-within table")

    p = add("cnot-mc", cmd_cnot_mc, "Monte Carlo of the CNOT retry protocol")
    p.add_argument("--trials", type=_count(1), default=500_000, help="Monte Carlo trials")
    p.add_argument("--seed", type=_count(0), default=0, help="RNG seed")
    p.add_argument("--model", type=_model, default="uniform", help="uniform | biased:EPS | pauli:EPS")
    p.add_argument("--max-rounds", type=_count(1), default=1000, help="retry cap per trial")
    p.add_argument("--latency-rounds", type=_count(1), default=1, help="error-correction rounds per buffer")
    p.add_argument(
        "--inverse-precorrection",
        choices=("auto", "on", "off"),
        default="auto",
        help="undo the input frame on the first retry (auto: on for pauli:EPS only)",
    )

    p = add("simulate", cmd_simulate, "run the Pauli-frame protocol on a circuit file")
    p.add_argument("file", help="circuit text file")
    p.add_argument("--model", type=_model, default="uniform", help="uniform | biased:EPS")
    p.add_argument("--trials", type=_count(1), default=10_000, help="Monte Carlo trials")
    p.add_argument("--seed", type=_count(0), default=0, help="RNG seed")
    p.add_argument("--latency-rounds", type=_count(1), default=1, help="error-correction rounds per buffer")

    p = add("appendix-a", cmd_appendix_a, "check that Clifford errors act as logical Cliffords on the 5-qubit code")
    p.add_argument("--code", choices=("five-qubit",), default="five-qubit", help="stabilizer code")
    p.add_argument("--errors", type=_count(1), default=200, help="number of random Clifford errors")
    p.add_argument("--seed", type=_count(0), default=0, help="RNG seed")
    p.add_argument("--tol", type=float, default=1e-9, help="signed-permutation tolerance")
    p.add_argument("--entangling", action="store_true", help="random entangling Cliffords instead of transversal ones")
    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = args.func(args)
        results, ok, table = out[:3]
        extra = out[3] if len(out) > 3 else {}
        _write(emit_report(_config(args, **extra), results, args.format, table), args.out)
    except (UsageError, ValueError) as exc:
        print(f"framekit {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0 if ok else 1


def main() -> None:
    sys.exit(dispatch())
