import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from transvec.circuit import CNOT, H, HY, PHASE, RZ, Circuit, reduce_weight, synthesize_trotter
from transvec.code import lift, logical_effect, syndrome, trivial_code
from transvec.decoder import DecoderConfig, LookupDecoder
from transvec.errors import InvalidArgumentError, UnsupportedCircuitError
from transvec.noise import (
    NoiseModel,
    SimResult,
    _compile,
    evaluate_frames,
    format_csv,
    pseudothreshold,
    propagate_frame,
    read_csv,
    reference_rate,
    run_monte_carlo,
    sample_frames,
    sweep,
    unencoded_reference_circuit,
    wilson_interval,
)
from transvec.pauli import PhasedPauli
from transvec.propagate import conjugate_circuit


@pytest.fixture(scope="module")
def reduced_kernel(code833):
    phys = reduce_weight(lift(code833, PhasedPauli.parse("X1 Z2 X3", 3)), code833)
    return synthesize_trotter(phys, math.pi / 2)


def _frames(p: PhasedPauli):
    n = p.n
    fx = np.array([[(p.x >> j) & 1 for j in range(n)]], dtype=bool)
    fz = np.array([[(p.z >> j) & 1 for j in range(n)]], dtype=bool)
    return fx, fz


def test_zero_noise_never_fails(code833, reduced_kernel):
    r = run_monte_carlo(code833, reduced_kernel, NoiseModel(0.0), 5000, seed=1)
    assert r.failures == 0 and r.rate == 0.0


def test_same_seed_gives_identical_csv(code833, reduced_kernel):
    a = format_csv(sweep(code833, reduced_kernel, [2e-3, 8e-3], 3000, seed=9))
    b = format_csv(sweep(code833, reduced_kernel, [2e-3, 8e-3], 3000, seed=9))
    c = format_csv(sweep(code833, reduced_kernel, [2e-3, 8e-3], 3000, seed=10))
    assert a == b and a != c


def test_empty_sweep(code833, reduced_kernel):
    assert sweep(code833, reduced_kernel, [], 100, seed=0) == []
    assert format_csv([]) == "p,shots,failures,rate,ci_lo,ci_hi,seed\n"


def test_csv_round_trip(code833, reduced_kernel):
    rows = read_csv(format_csv(sweep(code833, reduced_kernel, [5e-3], 2000, seed=3)))
    assert rows[0]["shots"] == 2000 and rows[0]["seed"] == 3
    assert rows[0]["ci_lo"] <= rows[0]["rate"] <= rows[0]["ci_hi"]


def test_invalid_arguments(code833, reduced_kernel):
    with pytest.raises(InvalidArgumentError):
        run_monte_carlo(code833, reduced_kernel, NoiseModel(0.01), 0, seed=0)
    with pytest.raises(InvalidArgumentError):
        NoiseModel(1.5)
    with pytest.raises(InvalidArgumentError):
        run_monte_carlo(code833, Circuit(3, (H(0),)), NoiseModel(0.01), 10, seed=0)
    with pytest.raises(InvalidArgumentError):
        run_monte_carlo(code833, reduced_kernel, NoiseModel(0.01), 10, seed=0, failure_scope=3)
    with pytest.raises(InvalidArgumentError):
        run_monte_carlo(code833, reduced_kernel, NoiseModel(0.01), 10, seed=0, failure_scope="all")


def test_non_clifford_circuit_is_rejected(code833):
    c = synthesize_trotter(lift(code833, PhasedPauli.parse("X1", 3)), 0.3)
    with pytest.raises(UnsupportedCircuitError):
        run_monte_carlo(code833, c, NoiseModel(0.01), 10, seed=0)


@st.composite
def clifford_circuits(draw, n=4, max_len=15):
    gates = []
    for _ in range(draw(st.integers(1, max_len))):
        kind = draw(st.sampled_from(["H", "HY", "P", "RZ", "CNOT"]))
        if kind == "CNOT":
            c, t = draw(st.permutations(range(n)))[:2]
            gates.append(CNOT(c, t))
        elif kind == "RZ":
            gates.append(RZ(draw(st.integers(0, n - 1)), draw(st.integers(-3, 3)) * math.pi / 2))
        else:
            gates.append({"H": H, "HY": HY, "P": PHASE}[kind](draw(st.integers(0, n - 1))))
    return Circuit(n, tuple(gates))


@settings(max_examples=1000, deadline=None)
@given(clifford_circuits(), st.data())
def test_frame_updates_agree_with_conjugation(circuit, data):
    start = data.draw(st.integers(0, len(circuit)))
    fault = PhasedPauli(4, data.draw(st.integers(0, 15)), data.draw(st.integers(0, 15)))
    fx, fz = _frames(fault)
    propagate_frame(circuit, fx[0], fz[0], start)
    tail = Circuit(4, circuit.gates[start:])
    image = conjugate_circuit(fault, tail).terms[0].pauli
    assert (fx[0].tolist(), fz[0].tolist()) == (
        [bool((image.x >> j) & 1) for j in range(4)],
        [bool((image.z >> j) & 1) for j in range(4)],
    )


def test_trailing_stabilizer_fault_is_not_a_failure(code833):
    dec = LookupDecoder(code833)
    for s in code833.stabilizers:
        fx, fz = _frames(s)
        assert not evaluate_frames(code833, dec, fx, fz).any()
    fx, fz = _frames(code833.logical_z[0])
    assert not evaluate_frames(code833, dec, fx, fz).any()
    fx, fz = _frames(code833.logical_x[1])
    assert evaluate_frames(code833, dec, fx, fz).tolist() == [True]
    assert evaluate_frames(code833, dec, fx, fz, target=0).tolist() == [False]


def test_failure_matches_logical_effect(code833):
    dec = LookupDecoder(code833)
    rng = np.random.default_rng(4)
    for _ in range(300):
        e = PhasedPauli(8, int(rng.integers(0, 256)), int(rng.integers(0, 256)))
        fx, fz = _frames(e)
        failed = evaluate_frames(code833, dec, fx, fz)[0]
        eff = logical_effect(code833, e * dec.decode(syndrome(code833, e)))
        assert failed == eff.has_x_component


def test_layer_idle_bookkeeping():
    c = Circuit(3, (H(0), CNOT(0, 1), H(0)))
    layers = _compile(c)
    assert [l.idle for l in layers] == [(1, 2), (2,), (1, 2)]
    assert [l.cnots for l in layers] == [(), ((0, 1),), ()]


def test_two_qubit_fault_is_uniform_over_fifteen():
    c = Circuit(2, (CNOT(0, 1),))
    rng = np.random.default_rng(0)
    fx, fz = sample_frames(_compile(c), 2, NoiseModel(1.0), 60_000, rng)
    codes = fx[:, 0] + 2 * fz[:, 0] + 4 * fx[:, 1] + 8 * fz[:, 1]
    counts = np.bincount(codes, minlength=16)
    assert counts[0] == 0
    assert np.all(np.abs(counts[1:] / 60_000 - 1 / 15) < 0.006)


def test_single_qubit_gates_are_noiseless_by_default():
    c = Circuit(1, (H(0), H(0)))
    rng = np.random.default_rng(0)
    fx, fz = sample_frames(_compile(c), 1, NoiseModel(1.0), 100, rng)
    assert not fx.any() and not fz.any()
    one = Circuit(1, (H(0),))
    fx, fz = sample_frames(_compile(one), 1, NoiseModel(1.0, single_qubit_gate_noise=True), 100, rng)
    assert (fx | fz).all()


def test_unencoded_reference_rate():
    r = run_monte_carlo(
        trivial_code(1), unencoded_reference_circuit(), NoiseModel(0.01, single_qubit_gate_noise=True), 200_000, seed=2
    )
    lo, hi = r.wilson_ci
    assert lo <= 2 * 0.01 / 3 <= hi
    assert reference_rate(0.004) == 0.004


def test_rate_grows_with_p(code833, reduced_kernel):
    res = sweep(code833, reduced_kernel, [1e-3, 1e-2], 20_000, seed=5)
    assert res[0].wilson_ci[1] < res[1].wilson_ci[0]


def test_bp_osd_sweep_runs(code833, reduced_kernel):
    res = sweep(code833, reduced_kernel, [5e-3], 2000, seed=1, decoder=DecoderConfig("bp_osd"))
    assert res[0].config["decoder"]["prior_p"] == 5e-3
    assert 0 < res[0].failures < 2000


def test_wilson_interval():
    lo, hi = wilson_interval(0, 100)
    assert lo == pytest.approx(0, abs=1e-12) and hi == pytest.approx(0.0370, abs=1e-4)
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-4) and hi == pytest.approx(0.5962, abs=1e-4)
    r = SimResult(0.01, 1000, 30, 0)
    assert r.wilson_ci[0] < r.rate < r.wilson_ci[1]
    assert r.csv_row() == ["0.01", "1000", "30", "0.03", "0.0210937", "0.0425034", "0"]


def test_pseudothreshold_interpolates_crossing():
    ps = [1e-3, 3e-3, 1e-2, 3e-2]
    rates = [100 * p * p for p in ps]
    assert pseudothreshold(ps, rates) == pytest.approx(0.01)
    ps = [1e-3, 2e-3, 4e-3]
    assert pseudothreshold(ps, [50 * p * p for p in ps]) == pytest.approx(0.02)


def test_pseudothreshold_gives_up_far_from_data():
    ps = [1e-3, 2e-3, 4e-3]
    assert pseudothreshold(ps, [10 * p for p in ps]) is None
    assert pseudothreshold([], []) is None
    assert pseudothreshold([1e-3], [0.0]) is None
