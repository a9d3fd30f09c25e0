"""Clifford gates in tableau form (conjugation images of X_k and Z_k, with signs).

Global phases are quotiented out: two unitaries that differ by a phase have
the same tableau. Single-qubit Cliffords are indexed 0..23 in a canonical
order (breadth-first closure of {H, S} starting from I, each BFS layer sorted
by tableau encoding).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cache

import numpy as np

from . import dense, gf2
from .pauli import PauliOperator, embed, symplectic_product


@dataclass(frozen=True)
class Clifford:
    """Clifford on ``n`` qubits given by ``C X_k C^dag`` and ``C Z_k C^dag``."""

    xs: tuple[PauliOperator, ...]
    zs: tuple[PauliOperator, ...]

    @property
    def n(self) -> int:
        return len(self.xs)

    @classmethod
    def identity(cls, n: int) -> "Clifford":
        return cls(
            tuple(PauliOperator.single(n, k, "X") for k in range(n)),
            tuple(PauliOperator.single(n, k, "Z") for k in range(n)),
        )

    @classmethod
    def from_labels(cls, xs, zs) -> "Clifford":
        return cls(
            tuple(PauliOperator.from_label(s) for s in xs),
            tuple(PauliOperator.from_label(s) for s in zs),
        )

    @classmethod
    def from_unitary(cls, u, tol: float = dense.TOL) -> "Clifford":
        images = dense.conjugation_images(u, tol)
        if images is None:
            raise ValueError("unitary is not a Clifford")
        return cls(*images)

    # --- action -----------------------------------------------------------
    def conjugate(self, p: PauliOperator) -> PauliOperator:
        """``C p C^dag``, sign included."""
        if p.n != self.n:
            raise ValueError(f"qubit count mismatch: Clifford on {self.n}, Pauli on {p.n}")
        out = PauliOperator(self.n, 0, 0, p.phase)
        for k in range(self.n):
            if (p.x >> k) & 1:
                out = out * self.xs[k]
        for k in range(self.n):
            if (p.z >> k) & 1:
                out = out * self.zs[k]
        return out

    def __matmul__(self, other: "Clifford") -> "Clifford":
        """Operator product ``self * other``: apply ``other`` first."""
        if other.n != self.n:
            raise ValueError("qubit count mismatch")
        return Clifford(
            tuple(self.conjugate(p) for p in other.xs),
            tuple(self.conjugate(p) for p in other.zs),
        )

    def symplectic(self) -> np.ndarray:
        """2n x 2n GF(2) matrix; column j is the image of generator j (X_0..X_{n-1}, Z_0..)."""
        n = self.n
        cols = []
        for p in self.xs + self.zs:
            cols.append([(p.x >> k) & 1 for k in range(n)] + [(p.z >> k) & 1 for k in range(n)])
        return np.array(cols, dtype=np.uint8).T

    def inverse(self) -> "Clifford":
        n = self.n
        m = self.symplectic()
        gens = [PauliOperator.single(n, k, "X") for k in range(n)] + [
            PauliOperator.single(n, k, "Z") for k in range(n)
        ]
        pre = []
        for g in gens:
            target = [(g.x >> k) & 1 for k in range(n)] + [(g.z >> k) & 1 for k in range(n)]
            v = gf2.solve(m, target)
            if v is None:
                raise ValueError("tableau is not invertible")
            q = PauliOperator(n)
            for j, bit in enumerate(v):
                if bit:
                    q = q * gens[j]
            img = self.conjugate(q)
            q = q.times_i(g.phase - img.phase)
            pre.append(q)
        return Clifford(tuple(pre[:n]), tuple(pre[n:]))

    def is_valid(self) -> bool:
        gens = self.xs + self.zs
        n = self.n
        for i, a in enumerate(gens):
            if not a.is_hermitian or a.is_identity:
                return False
            for j, b in enumerate(gens):
                expected = 1 if abs(i - j) == n else 0
                if symplectic_product(a, b) != expected:
                    return False
        return True

    def is_pauli(self) -> bool:
        """True iff every generator maps to plus or minus itself."""
        n = self.n
        return all(
            img.equal_up_to_phase(PauliOperator.single(n, k, letter))
            for k in range(n)
            for img, letter in ((self.xs[k], "X"), (self.zs[k], "Z"))
        )

    def key(self) -> tuple:
        return tuple((p.x, p.z, p.phase) for p in self.xs + self.zs)

    def __str__(self) -> str:
        parts = [f"X{k}->{p}" for k, p in enumerate(self.xs)]
        parts += [f"Z{k}->{p}" for k, p in enumerate(self.zs)]
        return "Clifford(" + ", ".join(parts) + ")"


# Hand-written generator tableaux; everything else is derived by composition.
C_I = Clifford.from_labels(["X"], ["Z"])
C_H = Clifford.from_labels(["Z"], ["X"])
C_S = Clifford.from_labels(["Y"], ["Z"])
C_X = Clifford.from_labels(["X"], ["-Z"])
C_Y = Clifford.from_labels(["-X"], ["-Z"])
C_Z = Clifford.from_labels(["-X"], ["Z"])
C_SDG = Clifford.from_labels(["-Y"], ["Z"])
CNOT = Clifford.from_labels(["XX", "IX"], ["ZI", "ZZ"])

NAMED = {"I": C_I, "X": C_X, "Y": C_Y, "Z": C_Z, "H": C_H, "S": C_S, "SDG": C_SDG}


@dataclass(frozen=True)
class _Table:
    elements: tuple[Clifford, ...]
    words: tuple[str, ...]
    index: dict
    compose: np.ndarray
    inverse: np.ndarray


@cache
def _table() -> _Table:
    gens = (("H", C_H), ("S", C_S))
    seen = {C_I.key(): ""}
    order = [C_I]
    layer = [C_I]
    while layer:
        nxt = {}
        for c in layer:
            for letter, g in gens:
                new = g @ c
                k = new.key()
                if k not in seen and k not in nxt:
                    nxt[k] = (new, seen[c.key()] + letter)
        layer = []
        for k in sorted(nxt):
            new, word = nxt[k]
            seen[k] = word
            order.append(new)
            layer.append(new)
    index = {c.key(): i for i, c in enumerate(order)}
    words = tuple(seen[c.key()] for c in order)
    m = len(order)
    comp = np.empty((m, m), dtype=np.int16)
    for i, a in enumerate(order):
        for j, b in enumerate(order):
            comp[i, j] = index[(a @ b).key()]
    inv = np.array([int(np.nonzero(comp[i] == 0)[0][0]) for i in range(m)], dtype=np.int16)
    return _Table(tuple(order), words, index, comp, inv)


def enumerate_cliffords1() -> list[Clifford]:
    """The 24 single-qubit Cliffords (mod phase) in canonical order."""
    return list(_table().elements)


def clifford1_index(c: Clifford) -> int:
    if c.n != 1:
        raise ValueError("not a single-qubit Clifford")
    return _table().index[c.key()]


def clifford1(i: int) -> Clifford:
    return _table().elements[i]


def compose_table() -> np.ndarray:
    """``compose_table()[a, b]`` is the index of ``clifford1(a) @ clifford1(b)``."""
    return _table().compose


def inverse_table() -> np.ndarray:
    return _table().inverse


def generator_word(i: int) -> str:
    """Word over {H, S} in time order (first letter applied first); "I" for the identity."""
    return _table().words[i] or "I"


def clifford1_name(i: int) -> str:
    c = clifford1(i)
    for name, g in NAMED.items():
        if g == c:
            return name
    return generator_word(i)


def clifford1_matrix(i: int) -> np.ndarray:
    word = _table().words[i]
    return dense.word_matrix(word)


def compose(a: Clifford, b: Clifford) -> Clifford:
    """Apply ``b`` then ``a``."""
    return a @ b


def conjugate_pauli(c: Clifford, p: PauliOperator) -> PauliOperator:
    return c.conjugate(p)


def tensor(c1: Clifford, c2: Clifford) -> Clifford:
    if c1.n != 1 or c2.n != 1:
        raise ValueError("tensor expects two single-qubit Cliffords")
    return Clifford(
        (embed(c1.xs[0], 2, [0]), embed(c2.xs[0], 2, [1])),
        (embed(c1.zs[0], 2, [0]), embed(c2.zs[0], 2, [1])),
    )


def _single_support(p: PauliOperator, q: int) -> PauliOperator | None:
    mask = 1 << q
    if (p.x | p.z) & ~mask:
        return None
    return PauliOperator(1, (p.x >> q) & 1, (p.z >> q) & 1, p.phase)


def factor_tensor(t: Clifford) -> tuple[Clifford, Clifford] | None:
    """``(c1, c2)`` with ``tensor(c1, c2) == t``, or None when ``t`` entangles."""
    if t.n != 2:
        raise ValueError("factor_tensor expects a two-qubit tableau")
    parts = []
    for q in (0, 1):
        x = _single_support(t.xs[q], q)
        z = _single_support(t.zs[q], q)
        if x is None or z is None:
            return None
        parts.append(Clifford((x,), (z,)))
    return parts[0], parts[1]


def apply_local(c: Clifford, p: PauliOperator, qubit: int) -> PauliOperator:
    """Conjugate an n-qubit Pauli by a single-qubit Clifford acting on ``qubit``."""
    local = PauliOperator(1, (p.x >> qubit) & 1, (p.z >> qubit) & 1)
    img = c.conjugate(local)
    mask = ~(1 << qubit)
    # X^a Z^b on one qubit commutes past the other qubits' factors, so the
    # phase of p carries through unchanged.
    return PauliOperator(
        p.n,
        (p.x & mask) | (img.x << qubit),
        (p.z & mask) | (img.z << qubit),
        p.phase + img.phase,
    )


def apply_cnot(p: PauliOperator, control: int, target: int) -> PauliOperator:
    """``CNOT p CNOT`` for an n-qubit Pauli."""
    local = PauliOperator(
        2,
        ((p.x >> control) & 1) | (((p.x >> target) & 1) << 1),
        ((p.z >> control) & 1) | (((p.z >> target) & 1) << 1),
    )
    img = CNOT.conjugate(local)
    mask = ~((1 << control) | (1 << target))
    x = (p.x & mask) | ((img.x & 1) << control) | (((img.x >> 1) & 1) << target)
    z = (p.z & mask) | ((img.z & 1) << control) | (((img.z >> 1) & 1) << target)
    return PauliOperator(p.n, x, z, p.phase + img.phase)
