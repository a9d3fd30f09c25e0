"""Dense complex-matrix backend.

Used as an independent cross-check of the tableau algebra, and for the few
places that need explicit unitaries (the T gate, controlled-U gates, the
code-space simulation).
"""
from __future__ import annotations

import itertools
from functools import reduce

import numpy as np

from .pauli import PauliOperator

TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j])
SDG = S.conj().T
T = np.diag([1, np.exp(1j * np.pi / 4)])
TDG = T.conj().T
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

GATES = {"I": I2, "X": X, "Y": Y, "Z": Z, "H": H, "S": S, "SDG": SDG, "T": T, "TDG": TDG}


def kron(*ms) -> np.ndarray:
    return reduce(np.kron, ms, np.eye(1, dtype=complex))


def dagger(u: np.ndarray) -> np.ndarray:
    return u.conj().T


def is_unitary(u: np.ndarray, tol: float = TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return np.abs(u @ dagger(u) - np.eye(u.shape[0])).max() <= tol


def _check_unitary(u: np.ndarray, tol: float = TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u, tol):
        raise ValueError("matrix is not unitary")
    return u


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, tol: float = TOL) -> bool:
    """True iff ``a == exp(i theta) * b`` for some real theta (max-entry norm)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[k]) <= tol:
        return np.abs(a).max() <= tol
    ratio = a[k] / b[k]
    if abs(abs(ratio) - 1) > tol:
        return False
    return np.abs(a - ratio * b).max() <= tol


def controlled_u_matrix(u: np.ndarray) -> np.ndarray:
    """``|0><0| (x) I + |1><1| (x) U`` with the first qubit as control."""
    u = _check_unitary(u)
    if u.shape != (2, 2):
        raise ValueError("controlled_u_matrix expects a single-qubit unitary")
    return 0.5 * np.kron(I2 + Z, I2) + 0.5 * np.kron(I2 - Z, u)


def num_qubits(u: np.ndarray) -> int:
    d = np.asarray(u).shape[0]
    n = d.bit_length() - 1
    if 1 << n != d:
        raise ValueError(f"dimension {d} is not a power of two")
    return n


def pauli_decompose(m: np.ndarray, tol: float = TOL) -> PauliOperator | None:
    """Return the Pauli ``P`` with ``m == P`` exactly (including phase), or None.

    Only multiples ``i^k`` of a Pauli string are recognised.
    """
    n = num_qubits(m)
    d = 1 << n
    for letters in itertools.product("IXYZ", repeat=n):
        p = PauliOperator.from_label("".join(letters))
        c = np.trace(p.to_matrix().conj().T @ m) / d
        if abs(c) <= tol:
            continue
        for k in range(4):
            if abs(c - 1j**k) <= tol:
                cand = p.times_i(k)
                if np.abs(cand.to_matrix() - m).max() <= tol:
                    return cand
        return None
    return None


def conjugation_images(u: np.ndarray, tol: float = TOL):
    """Images ``u P u^dagger`` of X_k and Z_k, or None if any is not a Pauli."""
    u = _check_unitary(u, tol)
    n = num_qubits(u)
    xs, zs = [], []
    for k in range(n):
        for letter, out in (("X", xs), ("Z", zs)):
            p = PauliOperator.single(n, k, letter).to_matrix()
            img = pauli_decompose(u @ p @ dagger(u), tol)
            if img is None:
                return None
            out.append(img)
    return tuple(xs), tuple(zs)


def is_clifford(u: np.ndarray, tol: float = TOL) -> bool:
    """True iff ``u`` maps every Pauli generator to a Pauli under conjugation (n <= 2)."""
    n = num_qubits(u)
    if n == 0 or n > 2:
        raise ValueError(f"unsupported dimension {1 << n}; is_clifford handles 1 or 2 qubits")
    return conjugation_images(u, tol) is not None


def word_matrix(word, gates=GATES) -> np.ndarray:
    """Matrix of a gate word given in time order (first letter applied first)."""
    out = np.eye(2, dtype=complex)
    for g in word:
        out = gates[g] @ out
    return out
