import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from hubsim.circuit import (Barrier, Circuit, Gate, GateKind, Prep, Reset, circuit_unitary, format_instruction, gate,
                            gate_matrix, make_circuit, rx, rz)
from hubsim.densmat import SX, SY, SZ, embed, is_unitary

angles = st.floats(-4 * np.pi, 4 * np.pi, allow_nan=False)


def test_rz_matches_half_angle_exponential():
    eps = 0.2
    assert np.allclose(gate_matrix(gate("RZ", 0, params=2 * eps)), np.diag([np.exp(-1j * eps), np.exp(1j * eps)]))


def test_rzz_diagonal():
    u = 0.4
    a, b = np.exp(-1j * u / 2), np.exp(1j * u / 2)
    assert np.allclose(gate_matrix(gate("RZZ", 0, 1, params=u)), np.diag([a, b, b, a]))


def test_rx_zero_is_identity():
    assert np.array_equal(gate_matrix(gate("RX", 0, params=0.0)), np.eye(2))


@pytest.mark.parametrize("kind,pauli", [("RX", SX), ("RY", SY), ("RZ", SZ)])
def test_rotations_match_expm(kind, pauli):
    for lam in (0.1, -1.3, 2.9):
        assert np.allclose(gate_matrix(gate(kind, 0, params=lam)), expm(-0.5j * lam * pauli), atol=1e-14)


def test_cnot_and_cry_control_first():
    cnot = gate_matrix(gate("CNOT", 0, 1))
    assert np.array_equal(cnot, np.eye(4)[[0, 1, 3, 2]])
    cry = gate_matrix(gate("CRY", 0, 1, params=0.7))
    assert np.allclose(cry[:2, :2], np.eye(2)) and np.allclose(cry[2:, 2:], expm(-0.35j * SY))


@settings(max_examples=1000, deadline=None)
@given(kind=st.sampled_from([k for k in GateKind if k.num_params]), lam=angles)
def test_gate_matrices_unitary(kind, lam):
    g = Gate(kind, tuple(range(kind.num_targets)), (lam,))
    m = gate_matrix(g)
    assert np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= 1e-12


@pytest.mark.parametrize("kind,targets,params", [
    ("RX", (0, 1), (0.1,)), ("CNOT", (0,), ()), ("RZ", (0,), ()), ("CNOT", (1, 1), ()), ("X", (0,), (0.3,)),
])
def test_gate_arity_errors(kind, targets, params):
    with pytest.raises(ValueError):
        Gate(GateKind(kind), targets, params)


def test_circuit_targets_checked():
    with pytest.raises(ValueError):
        Circuit(1, (gate("CNOT", 0, 1),))


def test_mixed_reset_requires_valid_state():
    with pytest.raises(ValueError):
        Reset(0, Prep.MIXED)
    with pytest.raises(ValueError):
        Reset(0, Prep.MIXED, np.eye(2))
    assert np.allclose(Reset(0, Prep.PLUS).density(), 0.5)


def test_empty_circuit_is_identity():
    assert np.array_equal(circuit_unitary(Circuit(2)), np.eye(4))


def test_instruction_order_is_time_order():
    c = make_circuit(1, [gate("RX", 0, params=0.3), gate("RZ", 0, params=1.1)])
    assert np.allclose(circuit_unitary(c), rz(1.1) @ rx(0.3))


def test_one_electron_step_product():
    c = make_circuit(1, [gate("RX", 0, params=0.2), gate("RZ", 0, params=0.4)])
    ref = expm(-1j * 0.2 * SZ) @ expm(-1j * 0.1 * SX)
    assert np.allclose(circuit_unitary(c), ref, atol=1e-14)


def test_circuit_unitary_rejects_reset():
    with pytest.raises(ValueError):
        circuit_unitary(Circuit(1, (Reset(0),)))


def _random_circuit(draw_seed, n, length):
    rng = np.random.default_rng(draw_seed)
    ins = []
    for _ in range(length):
        kind = rng.choice(list(GateKind))
        targets = tuple(int(q) for q in rng.permutation(n)[: kind.num_targets])
        params = tuple(rng.uniform(-np.pi, np.pi, kind.num_params))
        ins.append(Gate(kind, targets, params))
    return Circuit(n, tuple(ins))


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 4), la=st.integers(0, 6), lb=st.integers(0, 6))
def test_concatenation_is_matrix_product(seed, n, la, lb):
    a = _random_circuit(seed, n, la)
    b = _random_circuit(seed + 1, n, lb)
    ua, ub = circuit_unitary(a), circuit_unitary(b)
    assert np.max(np.abs(circuit_unitary(a + b) - ub @ ua)) <= 1e-12
    assert is_unitary(ua)


def test_circuit_unitary_matches_embedding():
    c = Circuit(3, (gate("CNOT", 2, 0), gate("RY", 1, params=0.5)))
    ref = embed(gate_matrix(gate("RY", 0, params=0.5)), [1], 3) @ embed(gate_matrix(gate("CNOT", 0, 1)), [2, 0], 3)
    assert np.allclose(circuit_unitary(c), ref)


def test_format_and_dump():
    assert format_instruction(gate("RX", 0, params=0.2)) == "RX(0.2) q0"
    assert format_instruction(Reset(2, Prep.PLUS)) == "RESET q2 PLUS"
    assert format_instruction(Barrier()) == "BARRIER"
    c = Circuit(2, (gate("CNOT", 0, 1), Barrier()))
    assert c.dump().splitlines()[-2:] == ["CNOT q0 q1", "BARRIER"]
    assert len(c.gates) == 1 and c.widened(3).num_qubits == 3
