"""One test per acceptance criterion; each records a PASS/FAIL line in the summary."""

import csv
import io
import itertools
import json
import math
import os
import subprocess
import sys
import time

import numpy as np

from framekit import clifford, walk
from framekit.circuit import random_circuit
from framekit.clifford import clifford1
from framekit.frame_rules import (
    TClass,
    c_minus_indices,
    classify_t_input_by_matrix,
    count_good_pairs,
    good_table,
    verify_relations,
)

P_GRID = [round(0.05 * k, 2) for k in range(1, 20)]


def run_cli(args, tmp_path, name="out.json", threads=None):
    """Run ``python -m framekit`` in a subprocess; return (output bytes, seconds)."""
    out = tmp_path / name
    env = dict(os.environ)
    if threads is not None:
        env["FRAMEKIT_THREADS"] = str(threads)
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "framekit", *args, "--out", str(out)], env=env, capture_output=True
    )
    elapsed = time.perf_counter() - start
    assert proc.returncode == 0, proc.stderr.decode()
    return out.read_bytes(), elapsed


def test_criterion_01_good_pair_count(criterion):
    clifford._table.cache_clear()
    good_table.cache_clear()
    start = time.perf_counter()
    count = count_good_pairs()
    elapsed = time.perf_counter() - start
    ok = count == 64 and elapsed < 1.0
    assert criterion(1, ok, f"good pairs {count} of 576 (want 64), {elapsed:.3f}s (limit 1s)")


def test_criterion_02_c_minus(criterion):
    c_minus_indices.cache_clear()
    start = time.perf_counter()
    group = c_minus_indices()
    by_matrix = {i for i in range(24) if classify_t_input_by_matrix(clifford1(i)) is TClass.C_MINUS}
    elapsed = time.perf_counter() - start
    ok = len(group) == 8 and set(group) == by_matrix and 24 - len(by_matrix) == 16 and elapsed < 1.0
    assert criterion(
        2,
        ok,
        f"|C-| group {len(group)}, matrix {len(by_matrix)}, |C+| {24 - len(by_matrix)}, {elapsed:.3f}s",
    )


def test_criterion_03_relations(criterion):
    start = time.perf_counter()
    rows = verify_relations(1e-10)
    elapsed = time.perf_counter() - start
    failed = [r["relation"] for r in rows if not r["holds"]]
    ok = not failed and len(rows) == 5 and elapsed < 1.0
    assert criterion(3, ok, f"{len(rows) - len(failed)}/{len(rows)} relations hold at 1e-10, {elapsed:.3f}s")


def test_criterion_04_cnot_monte_carlo(tmp_path, criterion):
    data, elapsed = run_cli(["cnot-mc", "--trials", "500000", "--model", "uniform"], tmp_path)
    summary = json.loads(data)["results"]["summary"]
    target = 1 / 12
    rates = {int(r): v for r, v in summary["per_round_transition_frequency"].items() if v is not None}
    aggregate = summary["transition_frequency"]
    first = summary["first_round_transition_frequency"]
    mean = summary["mean_total_cnots"]
    ok = (
        abs(aggregate - target) <= 0.002
        and abs(first - target) <= 0.002
        and abs(mean - 13) <= 0.15
        and elapsed < 60
    )
    assert criterion(
        4,
        ok,
        f"transition rate aggregate {aggregate:.5f}, round 1 {first:.5f}, round 2 {rates.get(2, float('nan')):.5f} "
        f"(want 0.08333 +- 0.002); mean CNOTs {mean:.3f} all trials, "
        f"{summary['mean_total_cnots_given_bad']:.3f} given Bad (want 13 +- 0.15); {elapsed:.1f}s",
    )


def test_criterion_05_t_walk(tmp_path, criterion):
    details = []
    ok = True
    total = 0.0
    for p in (0.1, 1 / 3):
        data, elapsed = run_cli(
            ["t-walk", "--p", repr(p), "--trials", "100000", "--max-steps", "10000", "--report-n", "20"],
            tmp_path,
        )
        total += elapsed
        worst = 0.0
        for row in json.loads(data)["results"]["success_within"]:
            f = row["analytic"]
            sigma = math.sqrt(max(f * (1 - f), 1e-300) / 100000)
            dev = abs(row["empirical"] - f)
            # A zero-variance point must match exactly.
            within = dev <= 3 * sigma if f * (1 - f) > 0 else dev == 0
            ok = ok and within
            worst = max(worst, dev / sigma if sigma > 1e-150 else 0.0)
        details.append(f"p={p:.4f} worst {worst:.2f} sigma")
    data, elapsed = run_cli(
        ["t-walk", "--p", repr(2 / 3), "--trials", "100000", "--max-steps", "10000"], tmp_path
    )
    total += elapsed
    capped = json.loads(data)["results"]["capped_fraction"]
    ok = ok and abs(capped - 0.5) <= 0.01 and total < 120
    details.append(f"p=2/3 capped {capped:.4f} (want 0.5 +- 0.01)")
    assert criterion(5, ok, "; ".join(details) + f"; {total:.1f}s")


def _enumerated_cutoff(p, n):
    """Exact F(p, n) by summing over all 2^(2n+1) step sequences."""
    steps = 2 * n + 1
    seqs = np.array(list(itertools.product((1, -1), repeat=steps)), dtype=np.int64)
    dist = 1 + np.cumsum(seqs, axis=1)
    hit = (dist == 0).any(axis=1)
    ups = (seqs == 1).sum(axis=1)
    # Each full sequence carries its own weight, so absorbed prefixes are counted once in total.
    weights = p**ups * (1 - p) ** (steps - ups)
    return float(weights[hit].sum())


def test_criterion_06_analytic_identity(criterion):
    worst_direct = max(
        abs(walk.cutoff_probability(p, n) - walk.cutoff_probability_direct(p, n))
        for p in P_GRID
        for n in range(101)
    )
    worst_enum = max(
        abs(walk.cutoff_probability(p, n) - _enumerated_cutoff(p, n)) for p in P_GRID for n in range(9)
    )
    ok = worst_direct <= 1e-9 and worst_enum <= 1e-12
    assert criterion(
        6, ok, f"max |F - partial sum| {worst_direct:.2e} (limit 1e-9); max |F - enumeration| {worst_enum:.2e} (limit 1e-12)"
    )


def test_criterion_07_bounds(criterion):
    bad = [(p, n) for p in P_GRID for n in range(1, 101) if not walk.upper_bound_check(p, n)]
    assert criterion(7, not bad, f"{len(P_GRID) * 100 - len(bad)}/{len(P_GRID) * 100} grid points satisfy both bounds")


def _sufficient_n(p, q):
    # f(p, n) <= (1-p) (4x)^(n+1) / (1 - 4x) since K_k <= 4^k, so this n already has F > q.
    x4 = 4 * p * (1 - p)
    level = math.log((1 - p) / ((1 - x4) * (1 - q))) / -math.log(x4)
    return max(0, math.floor(level))


def test_criterion_08_fig6(tmp_path, criterion):
    data, _ = run_cli(["fig6", "--format", "csv"], tmp_path, "fig6.csv")
    rows = list(csv.DictReader(io.StringIO(data.decode())))
    table = {(float(r["q"]), float(r["p"])): int(r["n"]) for r in rows}
    qs = (0.9, 0.99, 0.999)
    problems = []
    for (q, p), n in table.items():
        if not walk.cutoff_probability(p, n) > q:
            problems.append(f"F({p},{n}) <= {q}")
        if n > 0 and not walk.cutoff_probability(p, n - 1) <= q:
            problems.append(f"F({p},{n - 1}) > {q}")
    ps = sorted({p for _, p in table})
    for p in ps:
        ns = [table[(q, p)] for q in qs if (q, p) in table]
        if ns != sorted(ns):
            problems.append(f"n not monotone in q at p={p}")
    worst_ratio = 0.0
    for p in [p for p in ps if p < 0.5]:
        for q in qs:
            n = table[(q, p)]
            if n > _sufficient_n(p, q):
                problems.append(f"n={n} above logarithmic bound at p={p}, q={q}")
            worst_ratio = max(worst_ratio, (n / abs(math.log(1 - q))) * -math.log(4 * p * (1 - p)))
    ok = not problems and set(qs) == {q for q, _ in table}
    detail = f"{len(table)} points; n/|log(1-q)| <= {worst_ratio:.3f}/|log 4p(1-p)| for p < 1/2"
    assert criterion(8, ok, detail + ("; " + "; ".join(problems[:3]) if problems else ""))


def test_criterion_09_appendix_a(tmp_path, criterion):
    data, elapsed = run_cli(["appendix-a", "--errors", "200", "--tol", "1e-9"], tmp_path)
    res = json.loads(data)["results"]
    errors = res["errors"]
    syndromes = [s for e in errors for s in e["syndromes"]]
    worst_sum = max(abs(e["probability_sum"] - 1) for e in errors)
    ok = (
        len(errors) == 200
        and res["error_class"] == "transversal"
        and all(s["pass"] and s["logical_clifford"] in range(24) for s in syndromes)
        and worst_sum <= 1e-10
        and elapsed < 120
    )
    passed = sum(e["pass"] for e in errors)
    assert criterion(
        9, ok, f"{passed}/200 errors, {len(syndromes)} syndromes; max |sum p - 1| {worst_sum:.1e}; {elapsed:.1f}s"
    )


def test_criterion_10_pauli_frame_invariant(tmp_path, criterion):
    circuit = random_circuit(4, 20, seed=7)
    assert circuit.t_count > 0
    path = tmp_path / "circuit.txt"
    path.write_text(circuit.to_text())
    data, _ = run_cli(["simulate", str(path), "--trials", "10000"], tmp_path)
    stats = json.loads(data)["results"]["stats"]
    ok = stats["trials"] == 10000 and stats["checkpoints"] > 0 and stats["violations"] == 0
    assert criterion(
        10,
        ok,
        f"{stats['checkpoints'] - stats['violations']}/{stats['checkpoints']} checkpoints Pauli "
        f"({circuit.t_count} T gates, 10000 trials)",
    )


def test_criterion_11_determinism(tmp_path, criterion):
    circuit = tmp_path / "circuit.txt"
    circuit.write_text(random_circuit(3, 12, seed=3).to_text())
    commands = {
        "t-walk": ["t-walk", "--p", "0.3", "--trials", "40000", "--max-steps", "500"],
        "t-walk --symbolic": ["t-walk", "--p", "0.3", "--trials", "3000", "--max-steps", "200", "--symbolic"],
        "cnot-mc": ["cnot-mc", "--trials", "40000"],
        "cnot-mc pauli": ["cnot-mc", "--trials", "40000", "--model", "pauli:0.1"],
        "simulate": ["simulate", str(circuit), "--trials", "3000", "--model", "biased:0.05"],
        "appendix-a": ["appendix-a", "--errors", "5"],
    }
    differing = []
    for label, args in commands.items():
        one, _ = run_cli(args, tmp_path, "one.json", threads=1)
        eight, _ = run_cli(args, tmp_path, "eight.json", threads=8)
        if one != eight:
            differing.append(label)
    ok = not differing
    assert criterion(
        11, ok, f"{len(commands) - len(differing)}/{len(commands)} subcommands byte-identical at 1 vs 8 workers"
    )
