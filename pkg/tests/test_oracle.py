import math

import numpy as np
import pytest

from transvec import oracle
from transvec.circuit import CNOT, H, HY, PHASE, RZ, Circuit, Gate
from transvec.errors import CapacityError
from transvec.pauli import PhasedPauli


def test_single_qubit_gates_are_unitary():
    for g in (oracle.H, oracle.HY, oracle.rz(0.3)):
        assert oracle.is_unitary(g)


def test_hy_swaps_y_and_z():
    assert np.allclose(oracle.HY @ oracle.Y @ oracle.HY.conj().T, oracle.Z)


def test_phase_gate_is_rz_half_pi_up_to_phase():
    assert oracle.equal_up_to_phase(oracle.gate_matrix(PHASE(0)), np.diag([1, 1j]))


def test_cnot_control_is_first_qubit():
    u = oracle.dense_gate(CNOT(0, 1), 2)
    # qubit 0 is the most significant tensor factor
    assert np.allclose(u @ np.array([0, 0, 1, 0]), [0, 0, 0, 1])


def test_embed_operator_orders_qubits():
    zx = oracle.dense_pauli(PhasedPauli.parse("X1 Z3", 3))
    assert np.allclose(zx, np.kron(np.kron(oracle.X, oracle.I2), oracle.Z))
    rev = oracle.dense_gate(CNOT(2, 0), 3)
    xs = oracle.dense_pauli(PhasedPauli.parse("X3", 3))
    assert np.allclose(oracle.conjugate(rev, xs), oracle.dense_pauli(PhasedPauli.parse("X1 X3", 3)))


def test_dense_circuit_order():
    c = Circuit(1, (H(0), PHASE(0)))
    assert np.allclose(oracle.dense_circuit(c), oracle.gate_matrix(PHASE(0)) @ oracle.H)


def test_dense_trotter_matches_exponential():
    p = PhasedPauli.parse("X1 Y2", 2)
    m = oracle.dense_pauli(p)
    w, v = np.linalg.eigh(m)
    expect = v @ np.diag(np.exp(-0.5j * 0.8 * w)) @ v.conj().T
    assert np.allclose(oracle.dense_trotter(p, 0.8), expect)


def test_equal_up_to_phase_detects_difference():
    a = np.eye(2)
    assert oracle.equal_up_to_phase(1j * a, a)
    assert not oracle.equal_up_to_phase(oracle.Z, a)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        oracle.dense_pauli(PhasedPauli.identity(oracle.MAX_QUBITS + 1))
