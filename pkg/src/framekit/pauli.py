"""n-qubit Pauli operators with exact phase tracking.

An operator is stored as ``i**phase * X^x Z^z`` where ``x`` and ``z`` are
bitmasks (bit ``k`` refers to qubit ``k``) and ``X^x Z^z`` means the product
of all X factors followed by all Z factors. With this convention the
Hermitian operator ``Y`` on one qubit is ``i * X Z``, i.e. phase 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_LETTERS = "IXZY"  # indexed by x + 2*z


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("bit vectors exceed qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    # --- construction -----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def from_bits(cls, x_bits, z_bits, phase: int = 0) -> "PauliOperator":
        if len(x_bits) != len(z_bits):
            raise ValueError("x_bits and z_bits must have equal length")
        x = sum(int(b) << k for k, b in enumerate(x_bits))
        z = sum(int(b) << k for k, b in enumerate(z_bits))
        return cls(len(x_bits), x, z, phase)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse a Hermitian label such as ``"XZZXI"`` or ``"-iY"``.

        Character ``k`` of the label acts on qubit ``k``.
        """
        phase = 0
        body = label.strip()
        if body.startswith("+"):
            body = body[1:]
        elif body.startswith("-"):
            phase, body = 2, body[1:]
        if body.startswith("i"):
            phase, body = phase + 1, body[1:]
        x = z = 0
        for k, ch in enumerate(body):
            if ch not in "IXYZ":
                raise ValueError(f"bad Pauli letter {ch!r} in {label!r}")
            if ch in "XY":
                x |= 1 << k
            if ch in "ZY":
                z |= 1 << k
            if ch == "Y":
                phase += 1
        return cls(len(body), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliOperator":
        label = ["I"] * n
        label[qubit] = letter
        return cls.from_label("".join(label))

    # --- views ------------------------------------------------------------
    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> k) & 1 for k in range(self.n))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> k) & 1 for k in range(self.n))

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def num_y(self) -> int:
        return _popcount(self.x & self.z)

    @property
    def is_hermitian(self) -> bool:
        return (self.phase - self.num_y) % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for a Hermitian operator relative to its letter string."""
        if not self.is_hermitian:
            raise ValueError(f"{self!r} is not Hermitian")
        return 1 if (self.phase - self.num_y) % 4 == 0 else -1

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def letters(self) -> str:
        return "".join(
            _LETTERS[((self.x >> k) & 1) + 2 * ((self.z >> k) & 1)] for k in range(self.n)
        )

    def unsigned(self) -> "PauliOperator":
        """Same letters with the Hermitian (+1) phase."""
        return PauliOperator(self.n, self.x, self.z, self.num_y)

    def __str__(self) -> str:
        rel = (self.phase - self.num_y) % 4
        return ("+", "+i", "-", "-i")[rel] + self.letters()

    # --- algebra ----------------------------------------------------------
    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        if not isinstance(other, PauliOperator):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("qubit count mismatch")
        # Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
        extra = 2 * _popcount(self.z & other.x)
        return PauliOperator(
            self.n, self.x ^ other.x, self.z ^ other.z, self.phase + other.phase + extra
        )

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def times_i(self, power: int = 1) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + power)

    def commutes(self, other: "PauliOperator") -> bool:
        return symplectic_product(self, other) == 0

    def equal_up_to_phase(self, other: "PauliOperator") -> bool:
        return self.n == other.n and self.x == other.x and self.z == other.z

    def restrict(self, qubit: int) -> "PauliOperator":
        """Single-qubit factor on ``qubit`` (Hermitian phase)."""
        p = PauliOperator(1, (self.x >> qubit) & 1, (self.z >> qubit) & 1)
        return p.unsigned()

    def to_matrix(self) -> np.ndarray:
        """Dense matrix; qubit 0 is the leftmost tensor factor."""
        xm = np.array([[0, 1], [1, 0]], dtype=complex)
        zm = np.diag([1, -1]).astype(complex)
        out = np.eye(1, dtype=complex)
        for k in range(self.n):
            f = np.eye(2, dtype=complex)
            if (self.x >> k) & 1:
                f = f @ xm
            if (self.z >> k) & 1:
                f = f @ zm
            out = np.kron(out, f)
        return (1j ** self.phase) * out


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    """0 if ``a`` and ``b`` commute, 1 if they anticommute."""
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) % 2


def single_qubit_paulis() -> list[PauliOperator]:
    """Hermitian I, X, Y, Z in that order."""
    return [PauliOperator.from_label(c) for c in "IXYZ"]


def embed(p: PauliOperator, n: int, qubits) -> PauliOperator:
    """Place ``p`` (acting on ``len(qubits)`` qubits) onto the given qubits of an n-qubit register."""
    qubits = list(qubits)
    if len(qubits) != p.n:
        raise ValueError("qubit list length must match operator size")
    x = z = 0
    for k, q in enumerate(qubits):
        x |= ((p.x >> k) & 1) << q
        z |= ((p.z >> k) & 1) << q
    return PauliOperator(n, x, z, p.phase)


def extract(p: PauliOperator, qubits) -> PauliOperator:
    """Factor of ``p`` on the listed qubits, carrying the Y-phase contributions of those qubits only."""
    qubits = list(qubits)
    x = z = 0
    for k, q in enumerate(qubits):
        x |= ((p.x >> q) & 1) << k
        z |= ((p.z >> q) & 1) << k
    return PauliOperator(len(qubits), x, z).unsigned()
