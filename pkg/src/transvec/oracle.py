"""Dense state-vector-free matrix oracle for small registers (n <= 10).

Independent ground truth for phases and conjugations. Kronecker order puts
qubit 0 as the leftmost factor. Nothing here is used on the synthesis or
simulation paths.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .errors import CapacityError, InvalidArgumentError

MAX_QUBITS = 10
ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
HY = np.array([[1, -1j], [1j, -1]], dtype=complex) / np.sqrt(2)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _check(n: int) -> None:
    if n > MAX_QUBITS:
        raise CapacityError(f"dense oracle limited to {MAX_QUBITS} qubits, got {n}")


def kron_all(factors) -> np.ndarray:
    return reduce(np.kron, factors, np.eye(1, dtype=complex))


def dense_pauli(p) -> np.ndarray:
    """Matrix of ``i**kappa * E(a, b)`` built factor by factor."""
    _check(p.n)
    factors = []
    ab = 0
    for q in range(p.n):
        a = (p.x >> q) & 1
        b = (p.z >> q) & 1
        ab += a * b
        factors.append((X if a else I2) @ (Z if b else I2))
    return (1j ** ((p.kappa + ab) % 4)) * kron_all(factors)


def embed_operator(n: int, qubits, op: np.ndarray) -> np.ndarray:
    """Lift a 1- or 2-qubit matrix acting on ``qubits`` (in that order) to n qubits."""
    _check(n)
    qubits = list(qubits)
    k = len(qubits)
    if op.shape != (2**k, 2**k):
        raise InvalidArgumentError("operator shape does not match qubit count")
    rest = [q for q in range(n) if q not in qubits]
    full = np.kron(op, np.eye(2 ** len(rest), dtype=complex))
    # full acts on ordering qubits + rest; permute axes back to 0..n-1
    order = qubits + rest
    perm = [order.index(q) for q in range(n)]
    t = full.reshape([2] * (2 * n))
    t = t.transpose(perm + [n + i for i in perm])
    return t.reshape(2**n, 2**n)


def gate_matrix(gate) -> np.ndarray:
    kind = gate.kind
    if kind == "H":
        return H
    if kind == "HY":
        return HY
    if kind == "P":
        return rz(np.pi / 2)
    if kind == "RZ":
        return rz(gate.angle)
    if kind == "CNOT":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    raise InvalidArgumentError(f"unknown gate kind {kind!r}")


def dense_gate(gate, n: int) -> np.ndarray:
    return embed_operator(n, gate.qubits, gate_matrix(gate))


def dense_circuit(circuit) -> np.ndarray:
    """U = g_last ... g_first."""
    _check(circuit.n)
    u = np.eye(2**circuit.n, dtype=complex)
    for g in circuit.gates:
        u = dense_gate(g, circuit.n) @ u
    return u


def dense_trotter(p, theta: float) -> np.ndarray:
    """exp(-i theta/2 P) = cos(theta/2) I - i sin(theta/2) P for Hermitian P."""
    m = dense_pauli(p)
    return np.cos(theta / 2) * np.eye(m.shape[0]) - 1j * np.sin(theta / 2) * m


def dense_pauli_sum(terms, theta: float | None = None) -> np.ndarray:
    """Expand ``[(coefficient, PhasedPauli), ...]`` into a matrix."""
    terms = list(terms)
    if not terms:
        raise InvalidArgumentError("empty sum")
    return sum(complex(c) * dense_pauli(p) for c, p in terms)


def conjugate(u: np.ndarray, m: np.ndarray) -> np.ndarray:
    return u @ m @ u.conj().T


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = ATOL) -> bool:
    """Compare after aligning the global phase on b's largest-magnitude entry."""
    if a.shape != b.shape:
        return False
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < atol:
        return bool(np.allclose(a, b, atol=atol))
    if abs(a[idx]) < atol:
        return False
    phase = a[idx] / b[idx]
    phase /= abs(phase)
    return bool(np.allclose(a, phase * b, atol=atol))


def is_unitary(u: np.ndarray, atol: float = 1e-12) -> bool:
    return bool(np.allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=atol))
