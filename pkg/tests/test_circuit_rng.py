import numpy as np
import pytest

from framekit.circuit import (
    CircuitError,
    Gate,
    LogicalCircuit,
    parse_circuit,
    random_circuit,
)
from framekit.rng import CounterRNG, bernoulli_threshold, mix64


def test_parse_basic():
    c = parse_circuit("T 0\nCNOT 0 1")
    assert c.n == 2
    assert [g.name for g in c.gates] == ["T", "CNOT"]


def test_parse_header_comments_and_case():
    c = parse_circuit("# header\nqubits 4\n\nh 1  # trailing\n cnot 3 0\n")
    assert c.n == 4
    assert c.gates == (Gate("H", (1,)), Gate("CNOT", (3, 0)))


def test_cnot_equal_indices_reports_line():
    with pytest.raises(CircuitError) as err:
        parse_circuit("CNOT 0 0")
    assert err.value.line == 1


def test_index_out_of_range_with_header():
    with pytest.raises(CircuitError) as err:
        parse_circuit("qubits 2\n# comment\nH 3")
    assert err.value.line == 3 and "out of range" in str(err.value)


@pytest.mark.parametrize(
    "text,line",
    [("H 0\nFOO 1", 2), ("CNOT 0", 1), ("H x", 1), ("H 0\nqubits 2", 2), ("T 0 1", 1)],
)
def test_parse_errors(text, line):
    with pytest.raises(CircuitError) as err:
        parse_circuit(text)
    assert err.value.line == line


def test_round_trip_text():
    c = random_circuit(3, 25, 4)
    assert parse_circuit(c.to_text()) == c


def test_random_circuit_deterministic_and_valid():
    a = random_circuit(4, 20, 1)
    assert a == random_circuit(4, 20, 1)
    assert a != random_circuit(4, 20, 2)
    assert len(a.gates) == 20


def test_logical_circuit_validation():
    with pytest.raises(CircuitError):
        LogicalCircuit(2, (Gate("CNOT", (0, 2)),))


def test_rng_deterministic_and_broadcast():
    r = CounterRNG(5)
    a = r.uniform("step", np.arange(10)[:, None], np.arange(3)[None, :])
    b = np.array([[r.uniform("step", t, c) for c in range(3)] for t in range(10)])
    assert a.shape == (10, 3)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, CounterRNG(6).uniform("step", np.arange(10)[:, None], np.arange(3)[None, :]))
    assert not np.array_equal(r.uniform("step", 0, 0), r.uniform("buffer", 0, 0))


def test_rng_uniform_moments():
    u = CounterRNG(0).uniform("input", np.arange(200000), 0)
    assert np.all((u >= 0) & (u < 1))
    assert abs(u.mean() - 0.5) < 4 * np.sqrt(1 / 12 / u.size)
    k = CounterRNG(0).integers("input", np.arange(240000), 1, 24)
    counts = np.bincount(k, minlength=24)
    chi2 = ((counts - 10000) ** 2 / 10000).sum()
    assert chi2 < 60  # 23 degrees of freedom


def test_bernoulli_threshold_extremes():
    assert bernoulli_threshold(0.0) == 0
    assert bernoulli_threshold(1.0) == 1 << 53


def test_mix64_known_value():
    # SplitMix64 finaliser of 0x9E3779B97F4A7C15 (the first SplitMix64 output for seed 0).
    assert int(mix64(np.uint64(0x9E3779B97F4A7C15))) == 0xE220A8397B1DCDAF
