"""Two-qubit Clifford frames modulo Paulis, as 4x4 symplectic matrices over GF(2).

Whether a two-qubit Clifford frame is a tensor product of single-qubit
Cliffords depends only on its symplectic part, so the CNOT retry protocol
can be simulated on the 720-element group Sp(4, 2) with lookup tables.
Rows and columns are ordered (x0, x1, z0, z1).
"""
from __future__ import annotations

from functools import cache

import numpy as np

from .clifford import CNOT, clifford1, tensor

ORDER = 720
_Q0 = [0, 2]
_Q1 = [1, 3]


def _code(m: np.ndarray) -> int:
    return int(np.dot(m.reshape(-1).astype(np.int64), 1 << np.arange(16)))


def _decode(c: int) -> np.ndarray:
    return ((c >> np.arange(16)) & 1).reshape(4, 4).astype(np.int64)


def is_local_matrix(m: np.ndarray) -> bool:
    return not (m[np.ix_(_Q0, _Q1)].any() or m[np.ix_(_Q1, _Q0)].any())


class FrameTables:
    """Group elements, multiplication table and the frames used by the protocols."""

    def __init__(self):
        pair_mats = {}
        for i in range(24):
            for j in range(24):
                pair_mats[(i, j)] = tensor(clifford1(i), clifford1(j)).symplectic().astype(np.int64)
        cnot = CNOT.symplectic().astype(np.int64)

        gens = {_code(m): m for m in pair_mats.values()}
        gens[_code(cnot)] = cnot
        ident = np.eye(4, dtype=np.int64)
        elements = {_code(ident): ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for f in frontier:
                for g in gens.values():
                    m = (g @ f) % 2
                    c = _code(m)
                    if c not in elements:
                        elements[c] = m
                        nxt.append(m)
            frontier = nxt
        codes = sorted(elements)
        if len(codes) != ORDER:
            raise AssertionError(f"expected {ORDER} symplectic frames, found {len(codes)}")
        self.index = {c: k for k, c in enumerate(codes)}
        self.matrices = np.stack([elements[c] for c in codes])

        mats = self.matrices
        prod = np.einsum("aij,bjk->abik", mats, mats) % 2
        weights = 1 << np.arange(16)
        prod_codes = (prod.reshape(ORDER, ORDER, 16) * weights).sum(axis=-1)
        lookup = np.full(1 << 16, -1, dtype=np.int64)
        lookup[codes] = np.arange(ORDER)
        self.mul = lookup[prod_codes].astype(np.int16)  # mul[a, b] = a @ b
        self.identity = self.index[_code(ident)]
        self.cnot = self.index[_code(cnot)]
        self.is_local = np.array([is_local_matrix(m) for m in mats])
        self.pair = np.empty((24, 24), dtype=np.int16)
        for (i, j), m in pair_mats.items():
            self.pair[i, j] = self.index[_code(m)]
        inv = np.empty(ORDER, dtype=np.int16)
        for a in range(ORDER):
            inv[a] = int(np.nonzero(self.mul[a] == self.identity)[0][0])
        self.inverse = inv
        for arr in (self.matrices, self.mul, self.is_local, self.pair, self.inverse):
            arr.setflags(write=False)

    def compose(self, *frames):
        """Product ``frames[0] @ frames[1] @ ...`` (the last one acts first); broadcasts."""
        out = frames[-1]
        for f in reversed(frames[:-1]):
            out = self.mul[f, out]
        return out


@cache
def frame_tables() -> FrameTables:
    return FrameTables()
