"""Logical circuits and their plain-text format.

One gate per line, ``GATE idx [idx2]``; ``#`` starts a comment; blank lines
are ignored. An optional ``qubits N`` line fixes the register size,
otherwise it is one more than the largest index used.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import CounterRNG

SINGLE_QUBIT_GATES = ("I", "X", "Y", "Z", "H", "S", "SDG", "T", "TDG")
TWO_QUBIT_GATES = ("CNOT",)
NON_CLIFFORD = ("T", "TDG")


class CircuitError(ValueError):
    """Malformed circuit text; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]

    def __str__(self) -> str:
        return " ".join([self.name, *map(str, self.qubits)])


@dataclass(frozen=True)
class LogicalCircuit:
    n: int
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.n < 1:
            raise CircuitError("a circuit needs at least one qubit")
        for g in self.gates:
            _check_gate(g, self.n)

    @property
    def t_count(self) -> int:
        return sum(g.name in NON_CLIFFORD for g in self.gates)

    def to_text(self) -> str:
        return "\n".join([f"qubits {self.n}", *map(str, self.gates)]) + "\n"


def _check_gate(g: Gate, n: int, line: int | None = None) -> None:
    arity = 1 if g.name in SINGLE_QUBIT_GATES else 2 if g.name in TWO_QUBIT_GATES else None
    if arity is None:
        raise CircuitError(f"unknown gate {g.name!r}", line)
    if len(g.qubits) != arity:
        raise CircuitError(f"{g.name} takes {arity} qubit index(es), got {len(g.qubits)}", line)
    for q in g.qubits:
        if not 0 <= q < n:
            raise CircuitError(f"qubit index {q} out of range for {n} qubits", line)
    if arity == 2 and g.qubits[0] == g.qubits[1]:
        raise CircuitError(f"{g.name} control and target must differ", line)


def parse_circuit(text: str) -> LogicalCircuit:
    declared = None
    parsed: list[tuple[int, Gate]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens = body.split()
        if not tokens:
            continue
        col = body.index(tokens[0]) + 1
        head = tokens[0].upper()
        if head == "QUBITS":
            if declared is not None or parsed:
                raise CircuitError("'qubits' header must come first and only once", lineno, col)
            if len(tokens) != 2 or not tokens[1].isdigit() or int(tokens[1]) < 1:
                raise CircuitError("expected 'qubits N' with N >= 1", lineno, col)
            declared = int(tokens[1])
            continue
        if head not in SINGLE_QUBIT_GATES and head not in TWO_QUBIT_GATES:
            raise CircuitError(f"unknown gate {tokens[0]!r}", lineno, col)
        qubits = []
        for tok in tokens[1:]:
            if not tok.isdigit():
                raise CircuitError(f"bad qubit index {tok!r}", lineno, body.index(tok) + 1)
            qubits.append(int(tok))
        gate = Gate(head, tuple(qubits))
        _check_gate(gate, 1 << 30, lineno)
        parsed.append((lineno, gate))
    if declared is None:
        used = [q for _, g in parsed for q in g.qubits]
        if not used:
            raise CircuitError("circuit has no gates and no 'qubits' header")
        n = max(used) + 1
    else:
        n = declared
    for lineno, g in parsed:
        _check_gate(g, n, lineno)
    return LogicalCircuit(n, tuple(g for _, g in parsed))


def random_circuit(n: int, length: int, seed: int, t_fraction: float = 0.3) -> LogicalCircuit:
    """Random circuit over {H, S, X, Y, Z, T, CNOT}, deterministic in ``seed``."""
    if n < 2:
        raise ValueError("random circuits need at least two qubits")
    rng = CounterRNG(seed)
    cliffords = ("H", "S", "X", "Y", "Z")
    gates = []
    for k in range(length):
        u = rng.uniform("circuit", k, np.arange(4))
        if u[0] < t_fraction:
            gates.append(Gate("T", (int(u[1] * n),)))
        elif u[0] < t_fraction + (1 - t_fraction) / 3:
            a = int(u[1] * n)
            b = (a + 1 + int(u[2] * (n - 1))) % n
            gates.append(Gate("CNOT", (a, b)))
        else:
            gates.append(Gate(cliffords[int(u[3] * len(cliffords))], (int(u[1] * n),)))
    return LogicalCircuit(n, tuple(gates))
