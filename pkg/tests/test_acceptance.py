"""Acceptance suite: one test, hence one PASSED/FAILED line, per criterion.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import itertools
import math
import os
import time

import numpy as np
import pytest

from transvec import oracle
from transvec.circuit import reduce_weight, synthesize_trotter, transvection_from_sets
from transvec.code import builtin_833, lift, load_code, logical_effect, syndrome, validate
from transvec.decoder import DecoderConfig, LookupDecoder, decode
from transvec.f2 import BitVec
from transvec.noise import pseudothreshold, sweep
from transvec.pauli import PhasedPauli, commutes, parse_pauli
from transvec.propagate import conjugate_circuit, lemma1_image

LITERAL = "Z2 X4 Y5 Y6 Z7 X8"
MC_PS = [1e-3, 2e-3, 3e-3, 5e-3, 7e-3, 1e-2]
MC_SHOTS = 100_000
MC_SEED = 20240601
# logical qubit 2 (0-based 1): the kernel acts on it as Z-bar, so only
# decoding failures flip it
MC_TARGET = 1
# frozen crossing of the Monte Carlo curve with rate = p; None because the
# first computation found no crossing (see the ledger)
GOLDEN_CROSSING = None

TABLE = [
    "X1 X2 X3 X4 X5 X6 X7 X8",
    "Z1 Z2 Z3 Z4 Z5 Z6 Z7 Z8",
    "Z3 Y4 X5 Z6 Y7 X8",
    "Z2 X3 X5 Y6 Z7 Y8",
    "X2 Z4 Z5 X6 Y7 Y8",
    "X4 X5 X7 X8",
    "X3 Z4 Z5 X6",
    "Z1 Z2 X6 X7",
    "Z2 X3 Z5 X8",
    "Z1 Z5 Z6 Z7",
    "Z1 Z2 Z4 Z7",
]


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


def _random_pauli(rng, n):
    while True:
        p = PhasedPauli(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)))
        if not p.is_identity:
            return p


def test_acceptance_01_code_table():
    with Budget(1):
        code = builtin_833()
        ops = list(code.stabilizers) + list(code.logical_x) + list(code.logical_z)
        assert ops == [parse_pauli(s, 8) for s in TABLE]
        assert validate(code) == []


def test_acceptance_02_logical_mappings():
    with Budget(1):
        expected = {
            ("X", 1): "X1", ("Z", 1): "-Y1 Z2 X3",
            ("X", 2): "X1 Y2 X3", ("Z", 2): "Z2",
            ("X", 3): "X3", ("Z", 3): "-X1 Z2 Y3",
        }  # fmt: skip
        for (basis, q), dst in expected.items():
            assert lemma1_image(3, {1, 3}, set(), {2}, q, basis) == parse_pauli(dst, 3)


def test_acceptance_03_physical_constraint_images():
    with Budget(1):
        code = builtin_833()
        circuit = synthesize_trotter(parse_pauli(LITERAL, 8), math.pi / 2)
        golden = [
            "X4 X5 X7 X8",
            "-Z2 X3 Y4 X5 Z6 Z7 X8",
            "Z1 Z2 X6 X7",
            "X3 X4 X5 Y6 Z7",
            "Z1 Z5 Z6 Z7",
            "-Z1 Y4 Y5 Y6 X8",
        ]
        for op, dst in zip(list(code.logical_x) + list(code.logical_z), golden):
            img = conjugate_circuit(op, circuit)
            assert img.is_single and img.terms[0].pauli == parse_pauli(dst, 8)


def test_acceptance_04_weight_reduction():
    with Budget(1):
        code = builtin_833()
        start = parse_pauli(LITERAL, 8)
        reduced = reduce_weight(start, code, "exhaustive")
        assert reduced.unsigned() == parse_pauli("X3 X4 Z5 Z8", 8)
        assert reduced.same_operator_up_to_phase(start * code.stabilizers[3])


def test_acceptance_05_non_clifford_propagation():
    with Budget(1):
        code = builtin_833()
        rng = np.random.default_rng(5)
        for theta in rng.uniform(0.01, math.pi - 0.01, size=10):
            img = conjugate_circuit(code.logical_z[0], synthesize_trotter(parse_pauli(LITERAL, 8), float(theta)))
            assert img.theta == theta
            assert [t.tag for t in img.terms] == ["cos", "sin"]
            assert img.term("cos").pauli == parse_pauli("Z2 X3 Z5 X8", 8)
            assert img.term("sin").pauli == parse_pauli("X3 X4 X5 Y6 Z7", 8)


def test_acceptance_06_stabilizer_centralization():
    with Budget(1):
        code = builtin_833()
        rng = np.random.default_rng(6)
        thetas = [math.pi / 2] + [float(t) for t in rng.uniform(-math.pi, math.pi, size=5)]
        for theta in thetas:
            circuit = synthesize_trotter(parse_pauli(LITERAL, 8), theta)
            for s in code.stabilizers:
                img = conjugate_circuit(s, circuit)
                assert img.is_single and img.terms[0].pauli == s


def test_acceptance_07_oracle_certification():
    with Budget(60):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(1, 6))
            p = _random_pauli(rng, n)
            theta = float(rng.uniform(-math.pi, math.pi))
            circuit = synthesize_trotter(p, theta)
            u = oracle.dense_circuit(circuit)
            assert oracle.equal_up_to_phase(u, oracle.dense_trotter(p, theta), atol=1e-10)
            q = _random_pauli(rng, n)
            dense = oracle.conjugate(u, oracle.dense_pauli(q))
            engine = oracle.dense_pauli_sum(conjugate_circuit(q, circuit).expanded())
            assert np.allclose(dense, engine, atol=1e-10)
        for k in range(1, 5):
            for labels in itertools.product("hye", repeat=k):
                sets = [{i + 1 for i, l in enumerate(labels) if l == c} for c in "hye"]
                u = oracle.dense_circuit(synthesize_trotter(transvection_from_sets(k, *sets), math.pi / 2))
                for q, basis in itertools.product(range(1, k + 1), "XZ"):
                    src = oracle.dense_pauli(PhasedPauli.single(k, q - 1, basis))
                    got = oracle.dense_pauli(lemma1_image(k, *sets, q, basis))
                    assert np.allclose(got, oracle.conjugate(u, src), atol=1e-10)


def test_acceptance_08_double_angle_relation():
    with Budget(10):
        rng = np.random.default_rng(8)
        done = 0
        while done < 50:
            n = int(rng.integers(1, 5))
            p, q = _random_pauli(rng, n), _random_pauli(rng, n)
            if commutes(p, q):
                continue
            theta = float(rng.uniform(-math.pi, math.pi))
            u = oracle.dense_trotter(p, theta)
            qm = oracle.dense_pauli(q)
            lhs = qm @ oracle.conjugate(u, qm)
            rhs = math.cos(theta) * np.eye(1 << n) + 1j * math.sin(theta) * oracle.dense_pauli(p)
            assert np.allclose(lhs, rhs, atol=1e-10)
            assert np.allclose(lhs, oracle.dense_trotter(p, -2 * theta), atol=1e-10)
            done += 1


def test_acceptance_09_decoder_validity():
    with Budget(5):
        code = builtin_833()
        for cfg in (DecoderConfig("lookup"), DecoderConfig("bp_osd", prior_p=0.01)):
            for s in range(32):
                assert syndrome(code, decode(code, BitVec(5, s), cfg)).bits == s
        lookup = LookupDecoder(code)
        for q, letter in itertools.product(range(8), "XYZ"):
            e = PhasedPauli.single(8, q, letter)
            assert logical_effect(code, e * lookup.decode(syndrome(code, e))).kind == "trivial"


def test_acceptance_10_monte_carlo_sanity():
    with Budget(300):
        code = builtin_833()
        phys = reduce_weight(lift(code, PhasedPauli.parse("X1 Z2 X3", 3)), code, "exhaustive")
        assert phys.weight == 4
        circuit = synthesize_trotter(phys, math.pi / 2)
        results = sweep(code, circuit, MC_PS, MC_SHOTS, MC_SEED, failure_scope=MC_TARGET)
        rates = [r.rate for r in results]
        curve = ", ".join(f"{p:g}:{r:.4g}" for p, r in zip(MC_PS, rates))
        for a, b in zip(results, results[1:]):
            assert a.rate <= b.rate or a.wilson_ci[0] <= b.wilson_ci[1], f"not monotone: {curve}"
        crossing = pseudothreshold(MC_PS, rates)
        assert crossing is not None and 1e-4 <= crossing <= 1e-2, (
            f"no crossing with rate = p in [1e-4, 1e-2]; curve {curve}; rate/p "
            + ", ".join(f"{r / p:.2f}" for p, r in zip(MC_PS, rates))
        )
        assert GOLDEN_CROSSING is not None, f"crossing {crossing:.4g} computed but not frozen"
        assert crossing == pytest.approx(GOLDEN_CROSSING, rel=0.2)


LP_CODE = os.environ.get("TRANSVEC_LP_CODE")
LP_PAULI = os.environ.get("TRANSVEC_LP_PAULI")


@pytest.mark.skipif(
    not (LP_CODE and LP_PAULI),
    reason="waived: set TRANSVEC_LP_CODE (code file) and TRANSVEC_LP_PAULI (physical Pauli) to run",
)
def test_acceptance_11_large_code_reproduction():
    with Budget(1800):
        code = load_code(LP_CODE)
        target = os.environ.get("TRANSVEC_LP_TARGET")
        scope = int(target) - 1 if target else "any_logical"
        circuit = synthesize_trotter(parse_pauli(LP_PAULI, code.n), math.pi / 2)
        ps = [0.003, 0.004, 0.005]
        reference = [0.023, 0.11, 0.28]
        results = sweep(code, circuit, ps, 30_000, MC_SEED, failure_scope=scope, decoder=DecoderConfig("bp_osd"))
        for r, want in zip(results, reference):
            assert want / 2 <= r.rate <= want * 2, f"p={r.p}: rate {r.rate:.4g} vs {want}"
        crossing = pseudothreshold(ps, [r.rate for r in results])
        assert crossing is not None and 1.5e-3 <= crossing <= 4e-3
