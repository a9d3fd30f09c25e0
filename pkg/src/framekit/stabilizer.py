"""Effective logical channel of a Clifford error on a stabilizer code.

A physical Clifford error, followed by a syndrome projection and the pure
error for that syndrome, acts on the encoded qubit as a logical Clifford.
This module checks that numerically on the 5-qubit code: the post-correction
state of an encoded Bell pair (one reference qubit plus the code block) is
decoded to a two-qubit Choi state, converted to a 4x4 process matrix and
tested for being a signed permutation.

Qubit 0 of the (n + 1)-qubit register is the reference; code qubit k is
register qubit k + 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cache

import numpy as np

from . import dense, gf2
from .clifford import Clifford, clifford1_index, clifford1_matrix
from .pauli import PauliOperator, single_qubit_paulis, symplectic_product
from .rng import CounterRNG

PROBABILITY_FLOOR = 1e-12


class ZeroProbabilitySyndrome(ValueError):
    """The requested syndrome cannot occur for this error."""


def _vec(p: PauliOperator) -> np.ndarray:
    n = p.n
    return np.array([(p.x >> k) & 1 for k in range(n)] + [(p.z >> k) & 1 for k in range(n)], dtype=np.uint8)


def _from_vec(v, n: int) -> PauliOperator:
    x = sum(int(v[k]) << k for k in range(n))
    z = sum(int(v[n + k]) << k for k in range(n))
    return PauliOperator(n, x, z).unsigned()


def _commutation_rows(ops) -> np.ndarray:
    """Rows ``r`` with ``r . v = <op, P(v)>`` for the symplectic form."""
    rows = []
    for p in ops:
        v = _vec(p)
        n = p.n
        rows.append(np.concatenate([v[n:], v[:n]]))
    return np.array(rows, dtype=np.uint8)


@dataclass(frozen=True)
class StabilizerCode:
    n: int
    generators: tuple[PauliOperator, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    pure_errors: tuple[PauliOperator, ...]  # indexed by syndrome integer
    name: str = "code"

    @property
    def num_syndromes(self) -> int:
        return 1 << len(self.generators)

    def syndrome(self, p: PauliOperator) -> int:
        """Bit ``i`` is set when ``p`` anticommutes with generator ``i``."""
        return sum(symplectic_product(g, p) << i for i, g in enumerate(self.generators))

    def syndrome_bits(self, s: int) -> str:
        return "".join(str((s >> i) & 1) for i in range(len(self.generators)))

    def metadata(self) -> dict:
        return {
            "code": self.name,
            "n": self.n,
            "generators": [p.letters() for p in self.generators],
            "logical_x": str(self.logical_x),
            "logical_z": str(self.logical_z),
            "reference_qubit": 0,
            "syndrome_bit_order": "bit i <-> generator i",
        }

    def validate(self) -> None:
        gens = self.generators
        for a in gens:
            for b in gens:
                if not a.commutes(b):
                    raise ValueError("stabilizer generators do not commute")
            for lg in (self.logical_x, self.logical_z):
                if not a.commutes(lg):
                    raise ValueError("logical operator does not commute with the stabilizer")
        if self.logical_x.commutes(self.logical_z):
            raise ValueError("logical X and Z must anticommute")
        if gf2.rank(np.array([_vec(g) for g in gens])) != len(gens):
            raise ValueError("generators are not independent")
        for s, t in enumerate(self.pure_errors):
            if self.syndrome(t) != s:
                raise ValueError(f"pure error for syndrome {s} has the wrong syndrome")
            if not (t.commutes(self.logical_x) and t.commutes(self.logical_z)):
                raise ValueError(f"pure error for syndrome {s} does not commute with the logicals")
            for u in self.pure_errors:
                if not t.commutes(u):
                    raise ValueError("pure errors do not commute")

    # --- dense operators ---------------------------------------------------
    @property
    def _dense(self):
        return _dense_ops(self)

    def codespace_projector(self) -> np.ndarray:
        return self._dense["projector"]

    def logical_basis(self) -> tuple[np.ndarray, np.ndarray]:
        return self._dense["zero"], self._dense["one"]


def _pure_error_table(n, generators, logicals) -> tuple[PauliOperator, ...]:
    """Mutually commuting pure errors: T_i for each generator, products for the rest."""
    basis = []
    for i in range(len(generators)):
        constraints = list(generators) + list(logicals) + basis
        target = [1 if j == i else 0 for j in range(len(generators))] + [0] * (len(logicals) + len(basis))
        v = gf2.solve(_commutation_rows(constraints), target)
        if v is None:
            raise ValueError(f"no pure error for generator {i}")
        basis.append(_from_vec(v, n))
    table = []
    for s in range(1 << len(generators)):
        t = PauliOperator.identity(n)
        for i, b in enumerate(basis):
            if (s >> i) & 1:
                t = t * b
        table.append(t.unsigned())
    return tuple(table)


def build_five_qubit_code() -> StabilizerCode:
    """[[5,1,3]] code with generators XZZXI and its cyclic shifts; X_L = XXXXX, Z_L = ZZZZZ."""
    base = "XZZXI"
    gens = tuple(PauliOperator.from_label(base[-k:] + base[:-k]) for k in range(4))
    lx = PauliOperator.from_label("XXXXX")
    lz = PauliOperator.from_label("ZZZZZ")
    code = StabilizerCode(5, gens, lx, lz, _pure_error_table(5, gens, (lx, lz)), name="five-qubit")
    code.validate()
    return code


@cache
def _dense_ops(code: StabilizerCode) -> dict:
    dim = 1 << code.n
    proj = np.eye(dim, dtype=complex)
    for g in code.generators:
        proj = proj @ (np.eye(dim) + g.to_matrix()) / 2
    zero_proj = proj @ (np.eye(dim) + code.logical_z.to_matrix()) / 2
    col = int(np.argmax(np.linalg.norm(zero_proj, axis=0)))
    zero = zero_proj[:, col] / np.linalg.norm(zero_proj[:, col])
    one = code.logical_x.to_matrix() @ zero
    return {"projector": proj, "zero": zero, "one": one}


# --- recovery decomposition --------------------------------------------------


def decompose_recovery(code: StabilizerCode, r: PauliOperator):
    """Split a Pauli ``r`` as ``L T G`` (up to phase).

    ``L`` is one of I, X_L, Z_L, X_L Z_L; ``T`` the pure error of r's syndrome;
    ``G`` a product of stabilizer generators.
    """
    if r.n != code.n:
        raise ValueError("recovery acts on the wrong number of qubits")
    t = code.pure_errors[code.syndrome(r)]
    rest = r * t
    logical = PauliOperator.identity(code.n)
    if not rest.commutes(code.logical_z):
        logical = logical * code.logical_x
    if not rest.commutes(code.logical_x):
        logical = logical * code.logical_z
    stab = rest * logical
    rows = np.array([_vec(g) for g in code.generators], dtype=np.uint8).T
    v = gf2.solve(rows, _vec(stab))
    if v is None:
        raise AssertionError("remainder is not in the stabilizer group")
    g = PauliOperator.identity(code.n)
    for i, bit in enumerate(v):
        if bit:
            g = g * code.generators[i]
    return logical.unsigned(), t, g.unsigned()


# --- states and channels ---------------------------------------------------


def encoded_bell_half(code: StabilizerCode) -> np.ndarray:
    """``(|0>|0_L> + |1>|1_L>)/sqrt(2)`` with the reference qubit first."""
    zero, one = code.logical_basis()
    return (np.kron([1, 0], zero) + np.kron([0, 1], one)) / np.sqrt(2)


def apply_to_code(state: np.ndarray, op: np.ndarray) -> np.ndarray:
    """Apply an operator on the code block, leaving the reference qubit alone."""
    dim = op.shape[0]
    return (state.reshape(-1, dim) @ op.T).reshape(-1)


def project_and_correct(state: np.ndarray, code: StabilizerCode, error: np.ndarray, s: int):
    """Apply ``error``, project onto syndrome ``s`` and apply its pure error.

    Returns the renormalised state and the probability of syndrome ``s``.
    Raises ZeroProbabilitySyndrome when that probability is below 1e-12.
    """
    t = code.pure_errors[s].to_matrix()
    proj_s = t @ code.codespace_projector() @ t
    psi = apply_to_code(apply_to_code(state, error), proj_s)
    prob = float(np.vdot(psi, psi).real)
    if prob < PROBABILITY_FLOOR:
        raise ZeroProbabilitySyndrome(f"syndrome {code.syndrome_bits(s)} has probability {prob:.3g}")
    return apply_to_code(psi, t) / np.sqrt(prob), prob


def syndrome_probabilities(code: StabilizerCode, error: np.ndarray) -> np.ndarray:
    state = apply_to_code(encoded_bell_half(code), error)
    probs = np.empty(code.num_syndromes)
    proj = code.codespace_projector()
    for s, t in enumerate(code.pure_errors):
        tm = t.to_matrix()
        psi = apply_to_code(state, tm @ proj @ tm)
        probs[s] = np.vdot(psi, psi).real
    return probs


def decode_to_choi(code: StabilizerCode, state: np.ndarray) -> np.ndarray:
    """Two-qubit (reference, logical) density matrix of a code-space state."""
    zero, one = code.logical_basis()
    basis = np.stack([zero, one])  # rows are logical basis vectors
    amps = state.reshape(2, -1) @ basis.conj().T  # amps[r, i] = <r, i_L | state>
    chi = amps.reshape(4)
    return np.outer(chi, chi.conj())


_PAULI_MATS = [p.to_matrix() for p in single_qubit_paulis()]  # I, X, Y, Z


def choi_to_process_matrix(choi: np.ndarray) -> np.ndarray:
    """``Lambda[i, j] = Tr[E(P_i) P_j]`` up to normalisation, from ``(I x E)`` of a Bell state."""
    lam = np.empty((4, 4))
    for i, pi in enumerate(_PAULI_MATS):
        for j, pj in enumerate(_PAULI_MATS):
            lam[i, j] = np.trace(choi @ np.kron(pi.T, pj)).real
    return lam / lam[0, 0]


def process_matrix_from_unitary(u: np.ndarray) -> np.ndarray:
    """Process matrix of ``rho -> u rho u^dag`` on one qubit."""
    lam = np.empty((4, 4))
    for i, pi in enumerate(_PAULI_MATS):
        for j, pj in enumerate(_PAULI_MATS):
            lam[i, j] = np.trace(u @ pi @ dense.dagger(u) @ pj).real / 2
    return lam


def effective_process_matrix(code: StabilizerCode, error: np.ndarray, s: int) -> np.ndarray:
    state, _ = project_and_correct(encoded_bell_half(code), code, error, s)
    return choi_to_process_matrix(decode_to_choi(code, state))


# --- signed permutations ---------------------------------------------------

_LETTERS = "IXYZ"


@dataclass(frozen=True)
class PermutationCheck:
    clifford: Clifford | None
    index: int | None
    pattern: tuple[tuple[int, int], ...] = ()  # (column, sign) per row
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.clifford is not None


def is_signed_permutation(m: np.ndarray, tol: float = 1e-9) -> PermutationCheck:
    """Identify a signed-permutation process matrix with a single-qubit Clifford.

    Rows X and Z fix the Clifford; row Y and the identity row must agree with
    it. Entries strictly between ``tol`` and ``1 - tol`` in magnitude are
    reported in ``diagnostics``.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise ValueError("process matrix must be 4 x 4")
    diags = []
    mag = np.abs(m)
    for i, j in zip(*np.nonzero((mag > tol) & (np.abs(mag - 1) > tol))):
        diags.append(f"entry ({_LETTERS[i]},{_LETTERS[j]}) = {m[i, j]:.6g} is neither 0 nor +-1")
    unit = np.abs(mag - 1) <= tol
    if not diags:
        for axis, what in ((1, "row"), (0, "column")):
            counts = unit.sum(axis=axis)
            for k in np.nonzero(counts != 1)[0]:
                diags.append(f"{what} {_LETTERS[k]} has {counts[k]} entries of magnitude 1")
    if diags:
        return PermutationCheck(None, None, (), tuple(diags))
    pattern = tuple((int(np.argmax(unit[i])), int(np.sign(m[i, np.argmax(unit[i])]))) for i in range(4))
    if pattern[0] != (0, 1):
        return PermutationCheck(None, None, pattern, ("identity row is not (1, 0, 0, 0)",))
    labels = []
    for row in (1, 3):
        col, sign = pattern[row]
        if col == 0:
            return PermutationCheck(None, None, pattern, (f"{_LETTERS[row]} maps to the identity",))
        labels.append(("-" if sign < 0 else "") + _LETTERS[col])
    c = Clifford.from_labels([labels[0]], [labels[1]])
    if not c.is_valid():
        return PermutationCheck(None, None, pattern, ("images of X and Z commute",))
    col, sign = pattern[2]
    y_img = c.conjugate(PauliOperator.from_label("Y"))
    expected = PauliOperator.from_label(("-" if sign < 0 else "") + _LETTERS[col]) if col else None
    if expected is None or y_img != expected:
        return PermutationCheck(None, None, pattern, ("row Y is inconsistent with rows X and Z",))
    return PermutationCheck(c, clifford1_index(c), pattern, ())


# --- Clifford-error verification run ----------------------------------------


def random_transversal_clifford(code: StabilizerCode, rng: CounterRNG, trial: int):
    """``(indices, dense unitary)`` for a random product of single-qubit Cliffords."""
    idx = rng.integers("error", trial, np.arange(code.n), 24)
    return [int(i) for i in idx], dense.kron(*[clifford1_matrix(int(i)) for i in idx])


def random_entangling_clifford(code: StabilizerCode, rng: CounterRNG, trial: int, depth: int = 40):
    """``(gate list, dense unitary)`` for a random H/S/CNOT circuit on the code block."""
    n = code.n
    u = rng.uniform("error", trial, np.arange(3 * depth)).reshape(depth, 3)
    total = np.eye(1 << n, dtype=complex)
    gates = []
    for a, b, c in u:
        q = int(b * n)
        if a < 1 / 3:
            g = ("H", q)
            op = _embed1(dense.H, q, n)
        elif a < 2 / 3:
            g = ("S", q)
            op = _embed1(dense.S, q, n)
        else:
            t = (q + 1 + int(c * (n - 1))) % n
            g = ("CNOT", q, t)
            op = _embed_cnot(q, t, n)
        gates.append(g)
        total = op @ total
    return gates, total


def _embed1(u, q, n):
    ops = [dense.I2] * n
    ops[q] = u
    return dense.kron(*ops)


def _embed_cnot(c, t, n):
    p0 = [dense.I2] * n
    p1 = [dense.I2] * n
    p0[c] = np.diag([1, 0]).astype(complex)
    p1[c] = np.diag([0, 1]).astype(complex)
    p1[t] = dense.X
    return dense.kron(*p0) + dense.kron(*p1)


def check_error(code: StabilizerCode, error: np.ndarray, tol: float = 1e-9) -> dict:
    """Per-syndrome process matrices and their Clifford identification for one error."""
    probs = syndrome_probabilities(code, error)
    rows = []
    passed = abs(probs.sum() - 1) <= 1e-10
    for s, prob in enumerate(probs):
        if prob < PROBABILITY_FLOOR:
            continue
        lam = effective_process_matrix(code, error, s)
        check = is_signed_permutation(lam, tol)
        passed = passed and bool(check)
        rows.append(
            {
                "syndrome": code.syndrome_bits(s),
                "probability": float(prob),
                "pattern": [list(p) for p in check.pattern],
                "logical_clifford": check.index,
                "diagnostics": list(check.diagnostics),
                "pass": bool(check),
            }
        )
    return {"probability_sum": float(probs.sum()), "syndromes": rows, "pass": bool(passed)}


def appendix_a_report(errors: int, seed: int, tol: float = 1e-9, entangling: bool = False) -> dict:
    code = build_five_qubit_code()
    rng = CounterRNG(seed)
    results = []
    for k in range(errors):
        if entangling:
            desc, u = random_entangling_clifford(code, rng, k)
            label = {"entangling_circuit": [list(g) for g in desc]}
        else:
            idx, u = random_transversal_clifford(code, rng, k)
            label = {"transversal_cliffords": idx}
        results.append({"error": k, **label, **check_error(code, u, tol)})
    return {
        "code": code.metadata(),
        "error_class": "entangling" if entangling else "transversal",
        "errors": results,
        "all_pass": all(r["pass"] for r in results),
    }
