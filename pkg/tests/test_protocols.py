import numpy as np
import pytest

from framekit import dense
from framekit.circuit import parse_circuit, random_circuit
from framekit.clifford import C_S, clifford1, clifford1_index, tensor
from framekit.frame_rules import good_table
from framekit.protocols import (
    BufferModel,
    cnot_summary,
    pauli_frame_trial,
    run_cnot_protocol,
    run_pauli_frame_protocol,
    run_t_walk,
    run_t_walk_symbolic,
    symbolic_walk_trial,
    walk_success_within,
)
from framekit.twoqubit import frame_tables
from framekit.walk import cutoff_probability, return_probability


def _embed_gate(u, qubits, n):
    """Dense operator of a one- or two-qubit gate on an n-qubit register (qubit 0 leftmost)."""
    if len(qubits) == 1:
        ops = [dense.I2] * n
        ops[qubits[0]] = u
        return dense.kron(*ops)
    a, b = qubits
    p0 = np.diag([1, 0]).astype(complex)
    p1 = np.diag([0, 1]).astype(complex)
    left = [dense.I2] * n
    left[a] = p0
    right = [dense.I2] * n
    right[a] = p1
    right[b] = dense.X
    return dense.kron(*left) + dense.kron(*right)


def _clifford_matrix(c):
    return dense.word_matrix(_word(c))


def _word(c):
    from framekit.clifford import generator_word

    w = generator_word(clifford1_index(c))
    return "" if w == "I" else w


def _replay(trace, n):
    u = np.eye(2**n, dtype=complex)
    for op in trace:
        if op[0] == "gate":
            _, name, qs = op
            m = dense.GATES[name] if name in dense.GATES else None
            u = _embed_gate(m, qs, n) @ u if name != "CNOT" else _embed_gate(None, qs, n) @ u
        elif op[0] == "pauli":
            u = op[1].to_matrix() @ u
        else:
            _, q, c = op
            u = _embed_gate(_clifford_matrix(c), (q,), n) @ u
    return u


def _ideal(circuit):
    v = np.eye(2**circuit.n, dtype=complex)
    for g in circuit.gates:
        m = dense.GATES.get(g.name)
        v = _embed_gate(m, g.qubits, circuit.n) @ v
    return v


@pytest.mark.parametrize("seed", range(6))
def test_pauli_frame_tracking_matches_dense_replay(seed):
    circuit = random_circuit(3, 15, seed)
    model = BufferModel.parse("uniform", latency_rounds=2)
    for trial in range(5):
        trace = []
        _, frame = pauli_frame_trial(circuit, model, seed, trial, trace)
        physical = _replay(trace, circuit.n)
        assert dense.equal_up_to_phase(physical, frame.to_matrix() @ _ideal(circuit))


def test_tdg_tracking_matches_dense_replay():
    circuit = parse_circuit("H 0\nTDG 0\nCNOT 0 1\nT 1\nS 1\nTDG 1\nH 0")
    model = BufferModel.parse("uniform")
    for trial in range(20):
        trace = []
        _, frame = pauli_frame_trial(circuit, model, 1, trial, trace)
        assert dense.equal_up_to_phase(_replay(trace, 2), frame.to_matrix() @ _ideal(circuit))


def test_clifford_only_circuit_inserts_no_buffers():
    circuit = parse_circuit("H 0\nCNOT 0 1\nS 1\nX 0")
    stats = run_pauli_frame_protocol(circuit, BufferModel.parse("uniform"), 200, 0)
    assert stats.buffer_rounds == 0
    assert stats.histograms["buffers"] == {0: 200}
    assert stats.violations == 0


@pytest.mark.parametrize("letter,expect_s", [("X", True), ("Y", True), ("Z", False), ("I", False)])
def test_single_t_correction_depends_on_input_frame(letter, expect_s):
    from framekit.pauli import PauliOperator
    from framekit.protocols import PauliFrameTrial

    circuit = parse_circuit("T 0")
    sim = PauliFrameTrial(circuit, BufferModel.parse("biased:0"), np.zeros((8, 2)))
    sim.frame = PauliOperator.from_label(letter)
    trace = []
    sim.trace = trace
    # Run gate by gate so the injected input frame is kept.
    sim.cursor = 1  # skip the initial error-correction draw
    frame = _run_without_initial_noise(sim)
    restores = [op for op in trace if op[0] == "clifford"]
    assert len(restores) == 1
    undo = restores[0][2]
    if expect_s:
        assert undo == C_S.inverse()
    else:
        assert undo.is_pauli()
    assert frame.equal_up_to_phase(PauliOperator.from_label(letter))


def _run_without_initial_noise(sim):
    n = sim.circuit.n
    saved = sim._noise
    calls = {"k": 0}

    def noise(q):
        calls["k"] += 1
        if calls["k"] > n:
            saved(q)

    sim._noise = noise
    return sim.run()


def test_pauli_model_rejected_for_pauli_frame_protocol():
    with pytest.raises(ValueError):
        run_pauli_frame_protocol(parse_circuit("T 0"), BufferModel.parse("pauli:0.1"), 10, 0)


def test_pauli_frame_protocol_deterministic_and_worker_independent():
    circuit = random_circuit(4, 20, 3)
    model = BufferModel.parse("biased:0.3")
    a = run_pauli_frame_protocol(circuit, model, 300, 5, workers=1)
    b = run_pauli_frame_protocol(circuit, model, 300, 5, workers=1)
    assert a.to_dict() == b.to_dict()
    assert a.violations == 0 and a.checkpoints > 0


# --- CNOT protocol --------------------------------------------------------


def test_cnot_initial_good_fraction_matches_exhaustive_count():
    stats = run_cnot_protocol(BufferModel.parse("uniform"), 60000, 1)
    frac = cnot_summary(stats)["initial_good_fraction"]
    sigma = np.sqrt(64 / 576 * (1 - 64 / 576) / 60000)
    assert abs(frac - 64 / 576) < 4 * sigma


def test_frame_tables_agree_with_tableau_classification():
    tb = frame_tables()
    good = good_table()
    for i in range(24):
        for j in range(24):
            f = tb.compose(tb.cnot, tb.pair[i, j], tb.cnot)
            assert bool(tb.is_local[f]) == bool(good[i, j])


def test_frame_tables_group_structure():
    tb = frame_tables()
    assert tb.matrices.shape == (720, 4, 4)
    a = np.arange(720)
    assert np.all(tb.mul[a, tb.inverse[a]] == tb.identity)
    # associativity on a sample
    rng = np.random.default_rng(0)
    x, y, z = rng.integers(0, 720, (3, 500))
    assert np.all(tb.mul[tb.mul[x, y], z] == tb.mul[x, tb.mul[y, z]])
    # local pairs form a 36-element subgroup
    assert len(set(tb.pair.ravel().tolist())) == 36
    assert tb.is_local.sum() == 36


def _first_round_exact(model_pairs, inverse):
    """Exact first-retry Good probability by enumeration over tableau symplectic matrices."""
    from framekit.clifford import CNOT
    from framekit.twoqubit import is_local_matrix

    sym = {
        (i, j): tensor(clifford1(i), clifford1(j)).symplectic().astype(np.int64)
        for i in range(24)
        for j in range(24)
    }
    cx = CNOT.symplectic().astype(np.int64)
    bufs = np.stack([sym[pair] for pair, _ in model_pairs])
    weights = np.array([w for _, w in model_pairs])
    num = den = 0.0
    for (i, j), inp in sym.items():
        if good_table()[i, j]:
            continue
        frame = cx @ inp @ cx % 2
        if inverse:
            # undo the CNOT, remove the known input frame, redo the CNOT
            inv = tensor(clifford1(i), clifford1(j)).inverse().symplectic().astype(np.int64)
            lead = cx @ inv @ cx
        else:
            lead = cx
        new = np.einsum("ij,bjk,kl->bil", lead, bufs, frame) % 2
        local = np.array([is_local_matrix(m) for m in new])
        num += weights[local].sum()
        den += weights.sum()
    return num / den


def test_cnot_first_round_frequency_matches_enumeration():
    pairs = [((a, b), 1.0) for a in range(24) for b in range(24)]
    exact = _first_round_exact(pairs, inverse=False)
    assert exact == pytest.approx(1 / 18)
    stats = run_cnot_protocol(BufferModel.parse("uniform"), 100000, 2, inverse_precorrection=False)
    first = cnot_summary(stats)["first_round_transition_frequency"]
    n = stats.rounds[1][0]
    assert abs(first - exact) < 4 * np.sqrt(exact * (1 - exact) / n)


def test_cnot_pauli_biased_inverse_precorrection_matches_enumeration():
    from framekit.protocols import _pair_lists

    eps = 0.1
    pauli_pairs, other = _pair_lists()
    pairs = [((int(a), int(b)), (1 - eps) / len(pauli_pairs)) for a, b in pauli_pairs]
    pairs += [((int(a), int(b)), eps / len(other)) for a, b in other]
    exact = _first_round_exact(pairs, inverse=True)
    assert exact == pytest.approx(1 - eps * 32 / 35)
    stats = run_cnot_protocol(BufferModel.parse("pauli:0.1"), 100000, 3)
    first = cnot_summary(stats)["first_round_transition_frequency"]
    n = stats.rounds[1][0]
    assert abs(first - exact) < 4 * np.sqrt(exact * (1 - exact) / n)


def test_cnot_biased_zero_epsilon_with_inverse_always_succeeds_first_retry():
    stats = run_cnot_protocol(BufferModel.parse("biased:0"), 5000, 0, inverse_precorrection=True)
    assert stats.rounds[1][0] == stats.rounds[1][1]
    assert stats.capped == 0


def test_cnot_cap_counts_trials():
    stats = run_cnot_protocol(BufferModel.parse("uniform"), 5000, 0, max_rounds=1)
    assert stats.successes + stats.capped == stats.trials
    assert stats.capped > 0


def test_cnot_invalid_rounds():
    with pytest.raises(ValueError):
        run_cnot_protocol(BufferModel.parse("uniform"), 10, 0, max_rounds=0)


@pytest.mark.parametrize("bad", ["biased", "pauli:2", "foo:0.1", "uniform:0.1", "biased:x"])
def test_buffer_model_parse_errors(bad):
    with pytest.raises(ValueError):
        BufferModel.parse(bad)


# --- T walk ---------------------------------------------------------------


def test_walk_p_zero_succeeds_in_one_step():
    stats = run_t_walk(0.0, 1000, 0, 10)
    assert stats.histograms["steps"] == {1: 1000}


def test_walk_p_one_never_succeeds():
    stats = run_t_walk(1.0, 100, 0, 50)
    assert stats.capped == 100 and stats.successes == 0


@pytest.mark.parametrize("p", [0.2, 0.45])
def test_walk_first_return_distribution(p):
    trials = 100000
    stats = run_t_walk(p, trials, 11, 2000)
    h = stats.histograms["steps"]
    assert all(k % 2 == 1 for k in h)
    for j in range(7):
        expect = return_probability(p, j)
        got = h.get(2 * j + 1, 0) / trials
        assert abs(got - expect) < 3 * np.sqrt(expect * (1 - expect) / trials) + 1e-12


def test_walk_success_within_matches_cutoff_probability():
    trials = 50000
    stats = run_t_walk(0.25, trials, 4, 1000)
    for n in range(0, 10):
        f = cutoff_probability(0.25, n)
        got = walk_success_within(stats, 2 * n + 1)
        assert abs(got - f) < 3 * np.sqrt(f * (1 - f) / trials) + 1e-12


def test_walk_brute_force_small_step_distribution():
    # Exhaustively enumerate all 2**7 step sequences at p = 0.3.
    p, steps = 0.3, 7
    probs = {}
    for mask in range(1 << steps):
        d, weight, hit = 1, 1.0, None
        for s in range(steps):
            up = (mask >> s) & 1
            weight *= p if up else 1 - p
            d += 1 if up else -1
            if d == 0 and hit is None:
                hit = s + 1
        if hit is not None:
            probs[hit] = probs.get(hit, 0.0) + weight
    for j in range(4):
        assert probs[2 * j + 1] == pytest.approx(return_probability(p, j), abs=1e-12)


def test_symbolic_walk_matches_abstract_walk():
    a = run_t_walk(0.4, 3000, 9, 400)
    b = run_t_walk_symbolic(0.4, 3000, 9, 400)
    assert a.to_dict() == b.to_dict()


def test_symbolic_walk_all_c_minus_succeeds_after_one_t():
    steps, cliff = symbolic_walk_trial(0.0, 0, 0, 10)
    assert steps == 1
    assert cliff is not None


def test_walk_argument_validation():
    with pytest.raises(ValueError):
        run_t_walk(1.5, 10, 0)
    with pytest.raises(ValueError):
        run_t_walk(0.5, 10, 0, max_steps=0)


def test_walk_worker_independence():
    a = run_t_walk(0.3, 40000, 1, 200, workers=1)
    b = run_t_walk(0.3, 40000, 1, 200, workers=2)
    assert a.to_dict() == b.to_dict()
