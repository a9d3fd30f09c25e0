"""Monte Carlo simulation of the buffer protocols.

* ``run_pauli_frame_protocol``: Pauli-frame computation where each T gate
  leaves a known Clifford correction that is undone after a buffer.
* ``run_cnot_protocol``: random single-qubit Clifford frames propagated
  through a CNOT, retried with CNOT corrections until the frame factorises.
* ``run_t_walk`` / ``run_t_walk_symbolic``: the random walk of T-gate
  corrections, abstractly and with explicit Clifford words.

All randomness comes from :class:`framekit.rng.CounterRNG`, keyed by trial
index, so results do not depend on how trials are split across workers.
"""
from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cache, partial

import numpy as np

from . import dense
from .circuit import LogicalCircuit
from .clifford import (
    C_X,
    C_Y,
    C_Z,
    NAMED,
    Clifford,
    apply_cnot,
    apply_local,
    clifford1,
    clifford1_index,
    clifford1_matrix,
    compose_table,
)
from .frame_rules import (
    TClass,
    c_minus_indices,
    classify_t_input_by_matrix,
    conjugate_by_t,
    pauli_through_t_then_ec,
)
from .pauli import PauliOperator, embed, single_qubit_paulis
from .rng import CounterRNG, bernoulli_threshold, to_uniform
from .twoqubit import frame_tables

CHUNK_TRIALS = 1 << 14
# Per-trial Python loops use smaller chunks so modest runs still spread across workers.
LOOP_CHUNK_TRIALS = 1 << 10
DEFAULT_MAX_STEPS = 10_000
_WALK_BLOCK = 256


class ProtocolViolation(RuntimeError):
    """A frame that should be Pauli (or a symbolic/abstract mismatch) was found."""


# --- buffer models ----------------------------------------------------------


@dataclass(frozen=True)
class BufferModel:
    """Distribution of the net Clifford correction a buffer introduces.

    ``uniform``: each qubit gets a uniformly random single-qubit Clifford.
    ``biased``: identity with probability ``1 - epsilon``, otherwise uniform
    over the non-identity pairs.
    ``pauli``: a uniformly random Pauli pair with probability ``1 - epsilon``,
    otherwise uniform over the pairs that are not Pauli on both qubits.
    """

    kind: str = "uniform"
    epsilon: float = 0.0
    latency_rounds: int = 1

    def __post_init__(self):
        if self.kind not in ("uniform", "biased", "pauli"):
            raise ValueError(f"unknown buffer model {self.kind!r}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon={self.epsilon} outside [0, 1]")
        if self.latency_rounds < 1:
            raise ValueError("latency_rounds must be at least 1")

    @classmethod
    def parse(cls, spec: str, latency_rounds: int = 1) -> "BufferModel":
        """Parse ``uniform``, ``biased:EPS`` or ``pauli:EPS``."""
        kind, _, eps = spec.partition(":")
        if kind == "uniform":
            if eps:
                raise ValueError("the uniform model takes no epsilon")
            return cls("uniform", 0.0, latency_rounds)
        if not eps:
            raise ValueError(f"model {kind!r} needs an epsilon, e.g. {kind}:0.1")
        try:
            value = float(eps)
        except ValueError:
            raise ValueError(f"bad epsilon {eps!r}") from None
        return cls(kind, value, latency_rounds)

    def __str__(self) -> str:
        return self.kind if self.kind == "uniform" else f"{self.kind}:{self.epsilon:g}"


@cache
def _pauli_indices() -> np.ndarray:
    return np.array([clifford1_index(c) for c in (NAMED["I"], C_X, C_Y, C_Z)])


@cache
def _pair_lists():
    paulis = set(_pauli_indices().tolist())
    pauli_pairs = [(i, j) for i in sorted(paulis) for j in sorted(paulis)]
    other = [(i, j) for i in range(24) for j in range(24) if not (i in paulis and j in paulis)]
    return np.array(pauli_pairs), np.array(other)


def sample_buffer_pairs(model: BufferModel, rng: CounterRNG, trials, round_index: int):
    """Single-qubit Clifford index pairs ``(c3, c4)`` for the buffer after retry ``round_index``."""
    base = 3 * round_index
    trials = np.asarray(trials)
    if model.kind == "uniform":
        return (
            rng.integers("buffer", trials, base, 24),
            rng.integers("buffer", trials, base + 1, 24),
        )
    hit = rng.uniform("buffer", trials, base) < model.epsilon
    if model.kind == "biased":
        k = np.where(hit, 1 + rng.integers("buffer", trials, base + 1, 575), 0)
        return k // 24, k % 24
    pauli_pairs, other = _pair_lists()
    pick_other = other[rng.integers("buffer", trials, base + 1, len(other))]
    pick_pauli = pauli_pairs[rng.integers("buffer", trials, base + 2, len(pauli_pairs))]
    chosen = np.where(hit[:, None], pick_other, pick_pauli)
    return chosen[:, 0], chosen[:, 1]


# --- statistics ----------------------------------------------------------------


@dataclass
class SimStats:
    """Mergeable counts from a batch of trials.

    ``histograms`` maps a name to a ``{value: count}`` table; ``rounds``
    holds per-round ``[attempts, successes]`` for the CNOT protocol.
    """

    trials: int = 0
    successes: int = 0
    capped: int = 0
    cnot_corrections: int = 0
    t_corrections: int = 0
    clifford_corrections: int = 0
    buffer_rounds: int = 0
    checkpoints: int = 0
    violations: int = 0
    histograms: dict[str, Counter] = field(default_factory=dict)
    rounds: dict[int, list[int]] = field(default_factory=dict)

    def add_histogram(self, name: str, values) -> None:
        h = self.histograms.setdefault(name, Counter())
        vals, counts = np.unique(np.asarray(values, dtype=np.int64), return_counts=True)
        for v, c in zip(vals.tolist(), counts.tolist()):
            h[v] += c

    def merge(self, other: "SimStats") -> "SimStats":
        out = SimStats()
        for name in (
            "trials",
            "successes",
            "capped",
            "cnot_corrections",
            "t_corrections",
            "clifford_corrections",
            "buffer_rounds",
            "checkpoints",
            "violations",
        ):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        for src in (self, other):
            for name, h in src.histograms.items():
                out.histograms.setdefault(name, Counter()).update(h)
            for r, (a, s) in src.rounds.items():
                cur = out.rounds.setdefault(r, [0, 0])
                cur[0] += a
                cur[1] += s
        return out

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "capped": self.capped,
            "cnot_corrections": self.cnot_corrections,
            "t_corrections": self.t_corrections,
            "clifford_corrections": self.clifford_corrections,
            "buffer_rounds": self.buffer_rounds,
            "checkpoints": self.checkpoints,
            "violations": self.violations,
            "histograms": {
                name: {str(k): int(h[k]) for k in sorted(h)} for name, h in sorted(self.histograms.items())
            },
            "rounds": {str(r): list(self.rounds[r]) for r in sorted(self.rounds)},
        }


# --- deterministic parallel driver -----------------------------------------


def worker_count(requested: int | None = None) -> int:
    """Workers to use: ``requested``, else ``FRAMEKIT_THREADS``; 0 means one per CPU."""
    if requested is None:
        env = os.environ.get("FRAMEKIT_THREADS", "0").strip() or "0"
        try:
            requested = int(env)
        except ValueError:
            raise ValueError(f"FRAMEKIT_THREADS={env!r} is not an integer") from None
    if requested < 0:
        raise ValueError("worker count must be non-negative")
    return requested or (os.cpu_count() or 1)


def _run_chunks(fn, trials: int, workers: int | None, chunk: int = CHUNK_TRIALS) -> SimStats:
    if trials < 0:
        raise ValueError("trials must be non-negative")
    bounds = [(a, min(a + chunk, trials)) for a in range(0, trials, chunk)]
    nworkers = min(worker_count(workers), max(1, len(bounds)))
    if nworkers == 1:
        parts = [fn(a, b) for a, b in bounds]
    else:
        with ProcessPoolExecutor(max_workers=nworkers) as ex:
            parts = list(ex.map(fn, *zip(*bounds)))
    out = SimStats()
    for part in parts:  # trial-index order
        out = out.merge(part)
    return out


# --- CNOT retry protocol ----------------------------------------------------


def _cnot_chunk(model, seed, max_rounds, inverse_first, start, stop) -> SimStats:
    tb = frame_tables()
    rng = CounterRNG(seed)
    trials = np.arange(start, stop)
    c1 = rng.integers("input", trials, 0, 24)
    c2 = rng.integers("input", trials, 1, 24)
    inputs = tb.pair[c1, c2]
    cx = tb.cnot
    frame = tb.compose(cx, inputs, cx)
    rounds_used = np.zeros(len(trials), dtype=np.int64)
    cnots = np.ones(len(trials), dtype=np.int64)
    active = ~tb.is_local[frame]
    stats = SimStats(trials=len(trials))
    for r in range(1, max_rounds + 1):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        b3, b4 = sample_buffer_pairs(model, rng, trials[idx], r)
        buf = tb.pair[b3, b4]
        if inverse_first and r == 1:
            # Undo the faulty CNOT, remove the known input frame, redo the CNOT.
            undo = tb.inverse[inputs[idx]]
            frame[idx] = tb.compose(cx, undo, cx, buf, frame[idx])
            cnots[idx] += 2
        else:
            frame[idx] = tb.compose(cx, buf, frame[idx])
            cnots[idx] += 1
        rounds_used[idx] = r
        ok = tb.is_local[frame[idx]]
        stats.rounds[r] = [int(idx.size), int(ok.sum())]
        active[idx[ok]] = False
    done = ~active
    stats.successes = int(done.sum())
    stats.capped = int(active.sum())
    stats.cnot_corrections = int((cnots[done] - 1).sum())
    stats.buffer_rounds = int(rounds_used.sum()) * model.latency_rounds
    stats.add_histogram("rounds", rounds_used[done])
    stats.add_histogram("total_cnots", cnots[done])
    stats.add_histogram("total_cnots_given_bad", cnots[done & (rounds_used > 0)])
    return stats


def default_inverse_precorrection(model: BufferModel) -> bool:
    return model.kind == "pauli"


def run_cnot_protocol(
    model: BufferModel,
    trials: int,
    seed: int,
    max_rounds: int = 1000,
    inverse_precorrection: bool | None = None,
    workers: int | None = None,
) -> SimStats:
    """Simulate the CNOT retry protocol on two-qubit frames modulo Paulis.

    Each trial draws an input frame ``C1 (x) C2``; the frame after the
    algorithm's CNOT is ``CNOT (C1 (x) C2) CNOT``. While it does not factorise,
    a buffer multiplies it by ``C3 (x) C4`` and a CNOT correction follows:
    ``F <- CNOT (C3 (x) C4) F``. With ``inverse_precorrection`` the first
    retry instead applies ``CNOT (C1 (x) C2)^dag CNOT`` after the buffer, so
    a trivial buffer always leads to a good frame.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be at least 1")
    if inverse_precorrection is None:
        inverse_precorrection = default_inverse_precorrection(model)
    fn = partial(_cnot_chunk, model, int(seed), int(max_rounds), bool(inverse_precorrection))
    return _run_chunks(fn, trials, workers)


def cnot_summary(stats: SimStats) -> dict:
    """Derived CNOT-protocol rates; capped trials are excluded from the means."""
    attempts = sum(a for a, _ in stats.rounds.values())
    wins = sum(s for _, s in stats.rounds.values())
    hist = stats.histograms.get("total_cnots", Counter())
    hist_bad = stats.histograms.get("total_cnots_given_bad", Counter())
    first = stats.rounds.get(1, [0, 0])
    initial_good = stats.histograms.get("rounds", Counter()).get(0, 0)

    def mean(h):
        n = sum(h.values())
        return sum(k * v for k, v in h.items()) / n if n else float("nan")

    return {
        "initial_good_fraction": initial_good / stats.trials if stats.trials else float("nan"),
        "transition_frequency": wins / attempts if attempts else float("nan"),
        "first_round_transition_frequency": first[1] / first[0] if first[0] else float("nan"),
        "per_round_transition_frequency": {
            str(r): (s / a if a else None) for r, (a, s) in sorted(stats.rounds.items())
        },
        "mean_total_cnots": mean(hist),
        "mean_total_cnots_given_bad": mean(hist_bad),
        "capped_fraction": stats.capped / stats.trials if stats.trials else float("nan"),
    }


# --- T-gate random walk -----------------------------------------------------


def _check_walk_args(p: float, max_steps: int) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p={p} outside [0, 1]")
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")


def _walk_chunk(p, seed, max_steps, start, stop) -> SimStats:
    # Distance d to the absorbing state starts at 1; a C+ buffer (probability p)
    # moves it up, a C- buffer down. Step s uses counter s - 1 of stream "step".
    rng = CounterRNG(seed)
    trials = np.arange(start, stop)
    keys = rng.keys("step", trials)
    thresh = bernoulli_threshold(p)
    dist = np.ones(len(trials), dtype=np.int64)
    alive = np.arange(len(trials))
    done_steps = np.zeros(len(trials), dtype=np.int64)
    step = 0
    while alive.size and step < max_steps:
        width = min(_WALK_BLOCK, max_steps - step)
        counters = np.arange(step, step + width, dtype=np.uint64)
        words = CounterRNG.words_from_keys(keys[alive, None], counters[None, :])
        up = (words >> np.uint64(11)) < thresh
        path = dist[alive, None] + np.cumsum(np.where(up, 1, -1), axis=1)
        hit = path == 0
        finished = hit.any(axis=1)
        first = np.argmax(hit, axis=1)
        done_steps[alive[finished]] = step + first[finished] + 1
        dist[alive] = path[:, -1]
        step += width
        keep = ~finished & (dist[alive] <= max_steps - step)  # others cannot return in time
        alive = alive[keep]
    ok = done_steps > 0
    stats = SimStats(trials=len(trials), successes=int(ok.sum()))
    stats.capped = stats.trials - stats.successes
    stats.t_corrections = int((done_steps[ok] - 1).sum())
    stats.buffer_rounds = int(done_steps[ok].sum())
    stats.add_histogram("steps", done_steps[ok])
    return stats


def run_t_walk(p: float, trials: int, seed: int, max_steps: int = DEFAULT_MAX_STEPS, workers=None) -> SimStats:
    """Abstract walk; the ``steps`` histogram counts T gates applied until success."""
    _check_walk_args(p, max_steps)
    return _run_chunks(partial(_walk_chunk, float(p), int(seed), int(max_steps)), trials, workers)


@cache
def _symbolic_tables():
    """Dense-matrix checked facts used by the symbolic walk."""
    minus = sorted(c_minus_indices())
    plus = [i for i in range(24) if i not in c_minus_indices()]
    t_class = {i: classify_t_input_by_matrix(clifford1(i)) for i in range(24)}
    tilde = {}
    for b in minus:
        bt = clifford1_index(conjugate_by_t(clifford1(b)))
        if not dense.equal_up_to_phase(dense.T @ clifford1_matrix(b), clifford1_matrix(bt) @ dense.T):
            raise ProtocolViolation(f"T C != C~ T for Clifford {b}")
        tilde[b] = bt
    for b in plus:
        if dense.is_clifford(dense.T @ clifford1_matrix(b) @ dense.TDG):
            raise ProtocolViolation(f"T C T^dag is Clifford for C+ element {b}")
    s_idx = clifford1_index(NAMED["S"])
    comp = compose_table()
    collapse = {}
    for b in minus:
        for top in plus:
            lead = int(comp[comp[tilde[b], s_idx], top])
            word = dense.T @ clifford1_matrix(b) @ dense.T @ clifford1_matrix(top)
            if not dense.equal_up_to_phase(word, clifford1_matrix(lead)):
                raise ProtocolViolation(f"T C T C' is not the Clifford {lead}")
            collapse[(b, top)] = lead
    return np.array(minus), np.array(plus), t_class, tilde, collapse


def _symbolic_trial(p, rng: CounterRNG, trial: int, max_steps: int, thresh, tables):
    minus, plus, t_class, tilde, collapse = tables
    key_step = rng.keys("step", trial)
    key_elem = rng.keys("element", trial)
    counters = np.arange(max_steps, dtype=np.uint64)
    up = (CounterRNG.words_from_keys(key_step, counters) >> np.uint64(11)) < thresh
    picks = to_uniform(CounterRNG.words_from_keys(key_elem, counters))
    stack: list[int] = []
    dist = 1
    for s in range(max_steps):
        if up[s]:
            b = int(plus[int(picks[s] * len(plus))])
            expected = TClass.C_PLUS
        else:
            b = int(minus[int(picks[s] * len(minus))])
            expected = TClass.C_MINUS
        if t_class[b] is not expected:
            raise ProtocolViolation(f"sampled Clifford {b} is not in {expected.value}")
        dist += 1 if up[s] else -1
        if expected is TClass.C_PLUS:
            stack.append(b)  # the word grows by T b
        elif stack:
            collapse[(b, stack.pop())]  # T b T top is Clifford; pre-correct by its inverse
        else:
            word_clifford = tilde[b]  # T b = b~ T: logical T realised up to a Clifford
            if dist != 0:
                raise ProtocolViolation("symbolic success without abstract success")
            return s + 1, word_clifford
        if len(stack) + 1 != dist:
            raise ProtocolViolation("symbolic level disagrees with the abstract walk")
    return 0, None


def _symbolic_chunk(p, seed, max_steps, start, stop) -> SimStats:
    rng = CounterRNG(seed)
    tables = _symbolic_tables()
    thresh = bernoulli_threshold(p)
    steps = []
    for trial in range(start, stop):
        s, _ = _symbolic_trial(p, rng, trial, max_steps, thresh, tables)
        steps.append(s)
    steps = np.array(steps, dtype=np.int64)
    ok = steps > 0
    stats = SimStats(trials=stop - start, successes=int(ok.sum()))
    stats.capped = stats.trials - stats.successes
    stats.t_corrections = int((steps[ok] - 1).sum())
    stats.buffer_rounds = int(steps[ok].sum())
    stats.add_histogram("steps", steps[ok])
    return stats


def run_t_walk_symbolic(p: float, trials: int, seed: int, max_steps: int = DEFAULT_MAX_STEPS, workers=None) -> SimStats:
    """Walk over explicit Clifford words, sharing the abstract walk's step draws.

    Buffer Cliffords are drawn from C- or C+ according to the same draw that
    moves the abstract walk, so both produce identical step counts per trial.
    Every collapse ``T b T c = b~ S c`` and success ``T b = b~ T`` is backed by
    a dense-matrix check.
    """
    _check_walk_args(p, max_steps)
    fn = partial(_symbolic_chunk, float(p), int(seed), int(max_steps))
    return _run_chunks(fn, trials, workers, LOOP_CHUNK_TRIALS)


def symbolic_walk_trial(p: float, seed: int, trial: int, max_steps: int = DEFAULT_MAX_STEPS):
    """``(steps, clifford_index)`` of one trial; ``(0, None)`` when capped."""
    _check_walk_args(p, max_steps)
    return _symbolic_trial(p, CounterRNG(seed), trial, max_steps, bernoulli_threshold(p), _symbolic_tables())


def walk_success_within(stats: SimStats, max_t_gates: int) -> float:
    """Fraction of trials that succeeded using at most ``max_t_gates`` T gates."""
    h = stats.histograms.get("steps", Counter())
    return sum(v for k, v in h.items() if k <= max_t_gates) / stats.trials


# --- Pauli-frame protocol ---------------------------------------------------

_PAULIS1 = single_qubit_paulis()  # I, X, Y, Z


def _noise_pauli(model: BufferModel, u1: float, u2: float) -> PauliOperator:
    if model.kind == "uniform":
        return _PAULIS1[min(int(u1 * 4), 3)]
    if u1 < model.epsilon:
        return _PAULIS1[1 + min(int(u2 * 3), 2)]
    return _PAULIS1[0]


@cache
def _t_like_correction(name: str, p: PauliOperator) -> Clifford:
    if name == "T":
        return pauli_through_t_then_ec(p)[0]
    pm = p.to_matrix()
    return Clifford.from_unitary(dense.TDG @ pm @ dense.T @ dense.dagger(pm))


@cache
def _inverse(c: Clifford) -> Clifford:
    return c.inverse()


@dataclass
class _Pending:
    learned: PauliOperator  # single-qubit frame before the T gate
    gate: str
    clifford: Clifford  # tracked correction, updated by later Clifford gates
    later: list  # Clifford gates applied since the T gate


class PauliFrameTrial:
    """One trial of the Pauli-frame protocol.

    The physical state is ``(prod_q C_q) P`` times the ideal state, where ``P``
    is an n-qubit Pauli and ``C_q`` the pending correction on qubit q. When
    ``trace`` is a list, every physical operation is appended to it as
    ``("gate", name, qubits)``, ``("pauli", PauliOperator)`` or
    ``("clifford", qubit, Clifford)`` for replay against dense matrices.
    """

    def __init__(self, circuit: LogicalCircuit, model: BufferModel, uniforms: np.ndarray, trace=None):
        self.circuit = circuit
        self.model = model
        self.uniforms = uniforms
        self.cursor = 0
        self.trace = trace
        self.frame = PauliOperator.identity(circuit.n)
        self.pending: dict[int, _Pending] = {}
        self.buffers = 0
        self.rounds = 0
        self.restores = 0
        self.checkpoints = 0

    def _emit(self, *op):
        if self.trace is not None:
            self.trace.append(op)

    def _noise(self, qubit: int) -> None:
        u1, u2 = self.uniforms[self.cursor]
        self.cursor += 1
        e = _noise_pauli(self.model, u1, u2)
        if e.is_identity:
            return
        e_full = embed(e, self.circuit.n, [qubit])
        self._emit("pauli", e_full)
        pend = self.pending.get(qubit)
        if pend is not None:
            # E C P = C (C^dag E C) P
            e_full = embed(_inverse(pend.clifford).conjugate(e), self.circuit.n, [qubit])
        self.frame = e_full * self.frame

    def _buffer_and_restore(self, qubit: int) -> None:
        pend = self.pending.pop(qubit)
        self.buffers += 1
        for _ in range(self.model.latency_rounds):
            self.rounds += 1
            self.pending[qubit] = pend
            self._noise(qubit)
            del self.pending[qubit]
        # The buffer reveals the pre-T frame; rebuild the correction from it.
        restore = _t_like_correction(pend.gate, pend.learned)
        for g in pend.later:
            restore = g @ restore @ _inverse(g)
        undo = _inverse(restore)
        self._emit("clifford", qubit, undo)
        if not restore.is_pauli():
            self.restores += 1
        self.checkpoints += 1
        if not (undo @ pend.clifford).is_pauli():
            raise ProtocolViolation(f"frame on qubit {qubit} is not Pauli after restore")
        # Absorb the Pauli remainder (undo C) into the frame.
        rest = undo @ pend.clifford
        self.frame = _apply_pauli_clifford((rest.xs[0], rest.zs[0]), self.frame, qubit)

    def run(self) -> PauliOperator:
        n = self.circuit.n
        for q in range(n):
            self._noise(q)
        for gate in self.circuit.gates:
            qs = gate.qubits
            if gate.name in ("T", "TDG") or len(qs) == 2:
                for q in qs:
                    if q in self.pending:
                        self._buffer_and_restore(q)
            self._emit("gate", gate.name, qs)
            if gate.name == "CNOT":
                self.frame = apply_cnot(self.frame, qs[0], qs[1])
            elif gate.name in ("T", "TDG"):
                q = qs[0]
                learned = self.frame.restrict(q)
                c = _t_like_correction(gate.name, learned)
                self.pending[q] = _Pending(learned, gate.name, c, [])
            elif gate.name != "I":
                q = qs[0]
                g = NAMED[gate.name]
                self.frame = apply_local(g, self.frame, q)
                pend = self.pending.get(q)
                if pend is not None:
                    pend.clifford = g @ pend.clifford @ _inverse(g)
                    pend.later.append(g)
            for q in qs:
                self._noise(q)
        for q in sorted(self.pending):
            self._buffer_and_restore(q)
        return self.frame


def _apply_pauli_clifford(images, frame: PauliOperator, qubit: int) -> PauliOperator:
    """Multiply ``frame`` on the left by the Pauli whose conjugation images are ``images``."""
    img_x, img_z = images
    # A Pauli Q maps X -> (-1)^a X and Z -> (-1)^b Z with a = [Q anticommutes with X].
    a = img_x.phase == 2
    b = img_z.phase == 2
    letter = {(False, False): "I", (False, True): "X", (True, True): "Y", (True, False): "Z"}[(a, b)]
    if letter == "I":
        return frame
    return embed(PauliOperator.from_label(letter), frame.n, [qubit]) * frame


def draws_needed(circuit: LogicalCircuit, model: BufferModel) -> int:
    ec = circuit.n + sum(len(g.qubits) for g in circuit.gates)
    return ec + circuit.t_count * model.latency_rounds


def _pauli_chunk(circuit, model, seed, start, stop) -> SimStats:
    rng = CounterRNG(seed)
    k = draws_needed(circuit, model)
    trials = np.arange(start, stop)
    u = rng.uniform("noise", trials[:, None], np.arange(2 * k)[None, :]).reshape(len(trials), k, 2)
    stats = SimStats(trials=len(trials))
    buffers = []
    for row in u:
        sim = PauliFrameTrial(circuit, model, row)
        try:
            sim.run()
        except ProtocolViolation:
            stats.violations += 1
            buffers.append(sim.buffers)
            continue
        stats.successes += 1
        stats.checkpoints += sim.checkpoints
        stats.clifford_corrections += sim.restores
        stats.buffer_rounds += sim.rounds
        buffers.append(sim.buffers)
    stats.add_histogram("buffers", buffers)
    return stats


def run_pauli_frame_protocol(
    circuit: LogicalCircuit, model: BufferModel, trials: int, seed: int, workers=None
) -> SimStats:
    """Run the Pauli-frame protocol; a trial succeeds when every checkpoint is Pauli.

    Each gate is followed by one error-correction round on its qubits that
    multiplies the frame by a sampled Pauli. A buffer of ``latency_rounds``
    rounds is inserted before any T or two-qubit gate on a qubit whose last
    T correction is still pending, after which the inverse correction is applied.
    """
    if model.kind == "pauli" and model.epsilon > 0:
        raise ValueError("pauli:EPS injects non-Pauli errors; the Pauli-frame protocol takes uniform or biased:EPS")
    return _run_chunks(partial(_pauli_chunk, circuit, model, int(seed)), trials, workers, LOOP_CHUNK_TRIALS)


def pauli_frame_trial(circuit: LogicalCircuit, model: BufferModel, seed: int, trial: int, trace=None):
    """Run a single trial and return ``(PauliFrameTrial, final frame)``."""
    k = draws_needed(circuit, model)
    u = CounterRNG(seed).uniform("noise", trial, np.arange(2 * k)).reshape(k, 2)
    sim = PauliFrameTrial(circuit, model, u, trace)
    return sim, sim.run()
