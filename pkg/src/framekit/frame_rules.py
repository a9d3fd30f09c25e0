"""Propagation and classification rules for Clifford frames.

* Through a CNOT (control = qubit 0): an input frame ``C1 (x) C2`` is *good*
  when ``CNOT (C1 (x) C2) CNOT`` is again a tensor product of single-qubit
  Cliffords, *bad* otherwise.
* Through a T gate: a single-qubit frame is in C- when ``T C T^dag`` is still
  Clifford (exactly the group generated by S and X), in C+ otherwise.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cache

import numpy as np

from . import dense
from .clifford import (
    C_S,
    C_X,
    CNOT,
    Clifford,
    clifford1,
    clifford1_index,
    clifford1_matrix,
    enumerate_cliffords1,
    factor_tensor,
    tensor,
)
from .pauli import PauliOperator


class CnotTag(enum.Enum):
    GOOD = "good"
    BAD = "bad"


class TClass(enum.Enum):
    C_MINUS = "C-"
    C_PLUS = "C+"


@dataclass(frozen=True)
class CnotClass:
    tag: CnotTag
    factors: tuple[Clifford, Clifford] | None = None

    @property
    def good(self) -> bool:
        return self.tag is CnotTag.GOOD


# --- relations between CNOT and single-qubit Cliffords -------------------


def _relations():
    cx = dense.CNOT
    cy = dense.controlled_u_matrix(dense.Y)
    cz = dense.controlled_u_matrix(dense.Z)
    i2 = dense.I2
    u_x = 0.5 * np.kron(i2 + dense.X, i2) + 0.5 * np.kron(i2 - dense.X, dense.X)
    u_f = 0.5 * np.kron(i2 + 1j * dense.Y, i2) + 0.5 * np.kron(i2 - 1j * dense.Y, dense.X)
    si = np.kron(dense.S, i2)
    is_ = np.kron(i2, dense.S)
    ih = np.kron(i2, dense.H)
    hi = np.kron(dense.H, i2)
    return [
        ("(S x I) CX = CX (S x I)", si @ cx, cx @ si),
        ("(I x S) CX = CY (I x S)", is_ @ cx, cy @ is_),
        ("(I x H) CX = CZ (I x H)", ih @ cx, cz @ ih),
        ("(H x I) CX = U_X (H x I)", hi @ cx, u_x @ hi),
        ("CX (H x I) = U_f (H x I) CX", cx @ hi, u_f @ hi @ cx),
    ]


def verify_relations(tol: float = dense.TOL) -> list[dict]:
    """Check each CNOT propagation identity by dense matrices, up to global phase."""
    out = []
    for name, lhs, rhs in _relations():
        out.append({"relation": name, "holds": bool(dense.equal_up_to_phase(lhs, rhs, tol))})
    return out


# --- CNOT classification --------------------------------------------------


def classify_cnot_pair(c1: Clifford, c2: Clifford) -> CnotClass:
    conj = CNOT @ tensor(c1, c2) @ CNOT
    parts = factor_tensor(conj)
    if parts is None:
        return CnotClass(CnotTag.BAD)
    return CnotClass(CnotTag.GOOD, parts)


@cache
def good_table() -> np.ndarray:
    """24 x 24 boolean table, ``[i, j]`` True when (clifford1(i), clifford1(j)) is good."""
    els = enumerate_cliffords1()
    out = np.zeros((24, 24), dtype=bool)
    for i, a in enumerate(els):
        for j, b in enumerate(els):
            out[i, j] = classify_cnot_pair(a, b).good
    out.setflags(write=False)
    return out


def good_pairs() -> list[tuple[int, int]]:
    t = good_table()
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(t))]


def count_good_pairs() -> int:
    return int(good_table().sum())


# --- T classification -----------------------------------------------------


@cache
def c_minus_indices() -> frozenset[int]:
    """Indices of the closure of {S, X} under composition."""
    found = {clifford1_index(Clifford.identity(1))}
    frontier = list(found)
    while frontier:
        nxt = []
        for i in frontier:
            for g in (C_S, C_X):
                j = clifford1_index(g @ clifford1(i))
                if j not in found:
                    found.add(j)
                    nxt.append(j)
        frontier = nxt
    return frozenset(found)


def _t_conjugate_matrix(i: int) -> np.ndarray:
    return dense.T @ clifford1_matrix(i) @ dense.TDG


def classify_t_input_by_matrix(c: Clifford) -> TClass:
    u = _t_conjugate_matrix(clifford1_index(c))
    return TClass.C_MINUS if dense.is_clifford(u) else TClass.C_PLUS


def classify_t_input(c: Clifford) -> TClass:
    return TClass.C_MINUS if clifford1_index(c) in c_minus_indices() else TClass.C_PLUS


@cache
def t_conjugation_table() -> dict[int, int]:
    """Map C- index -> index of ``T C T^dag``."""
    return {
        i: clifford1_index(Clifford.from_unitary(_t_conjugate_matrix(i)))
        for i in sorted(c_minus_indices())
    }


def conjugate_by_t(c: Clifford) -> Clifford:
    """The Clifford equal to ``T c T^dag`` up to phase; only defined on C-."""
    i = clifford1_index(c)
    table = t_conjugation_table()
    if i not in table:
        raise ValueError("T C T^dag is not Clifford for C in C+")
    return clifford1(table[i])


def pauli_through_t_then_ec(p: PauliOperator) -> tuple[Clifford, PauliOperator]:
    """Split ``T p`` as ``C P2 T``, C a Clifford and P2 a Pauli.

    Uses ``P2 = p`` and ``C = T p T^dag p`` (a power of S).
    """
    if p.n != 1:
        raise ValueError("pauli_through_t_then_ec expects a single-qubit Pauli")
    pm = p.to_matrix()
    c = Clifford.from_unitary(dense.T @ pm @ dense.TDG @ dense.dagger(pm))
    return c, p
