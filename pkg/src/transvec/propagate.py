"""Exact Heisenberg-picture propagation of Paulis through Trotter circuits.

Clifford gates map a Pauli to a single Pauli with an exact phase. A generic
``Rz(theta)`` splits a Pauli that is X or Y on the rotated qubit into a
``cos`` part (unchanged) and a ``sin`` part (conjugated by the Phase gate).
Coefficients are kept symbolic: each term carries a tag in
``{"one", "cos", "sin"}`` plus a :class:`PhasedPauli` whose ``kappa`` holds
the sign, and the sum carries the single angle the tags refer to. Angles
are stored non-negative; a negative rotation is folded into the sign of the
``sin`` term so that equal operators always have equal representations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuit import Circuit, Gate, quarter_turns, synthesize_trotter, trotter_angle
from .code import StabilizerCode, lift
from .errors import InvalidArgumentError, UnsupportedCircuitError
from .f2 import bit_indices
from .pauli import PhasedPauli, commutes, embed, format_pauli, parse_pauli, pauli_mul

TAGS = ("one", "cos", "sin")


@dataclass(frozen=True)
class Term:
    tag: str
    pauli: PhasedPauli

    def coefficient(self, theta: float | None) -> complex:
        """Numeric weight including the Pauli's own i-power."""
        base = {"one": 1.0}.get(self.tag)
        if base is None:
            base = math.cos(theta) if self.tag == "cos" else math.sin(theta)
        return base * (1j ** self.pauli.kappa)

    def __str__(self) -> str:
        body = format_pauli(self.pauli)
        return body if self.tag == "one" else f"{self.tag}(theta)*({body})"


@dataclass(frozen=True)
class PauliSum:
    terms: tuple[Term, ...]
    theta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted(self.terms, key=lambda t: TAGS.index(t.tag))))
        seen = {(t.pauli.x, t.pauli.z) for t in self.terms}
        if len(seen) != len(self.terms):
            raise UnsupportedCircuitError("two terms share a Pauli; sum is not in canonical form")

    @classmethod
    def single(cls, p: PhasedPauli) -> PauliSum:
        return cls((Term("one", p),))

    @property
    def is_single(self) -> bool:
        return len(self.terms) == 1 and self.terms[0].tag == "one"

    def term(self, tag: str) -> Term | None:
        return next((t for t in self.terms if t.tag == tag), None)

    def expanded(self) -> list[tuple[complex, PhasedPauli]]:
        """``[(coefficient, E)]`` with each E carrying kappa 0."""
        return [(t.coefficient(self.theta), t.pauli.unsigned()) for t in self.terms]

    def norm_squared(self) -> float:
        return sum(abs(c) ** 2 for c, _ in self.expanded())

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.terms)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "terms": [{"coefficient": t.tag, "pauli": format_pauli(t.pauli)} for t in self.terms],
        }


# single-gate images ---------------------------------------------------------------

def _local(n: int, spec: str) -> PhasedPauli:
    return parse_pauli(spec, n)


# images of (X_q, Z_q) for one-qubit Cliffords; keyed by quarter turns for Rz
_ONE_QUBIT = {
    "H": ("Z", "X"),
    "HY": ("-X", "Y"),
    "P": ("Y", "Z"),
    0: ("X", "Z"),
    1: ("Y", "Z"),
    2: ("-X", "Z"),
    3: ("-Y", "Z"),
}
# CNOT on (control, target): images of X_c, Z_c, X_t, Z_t
_CNOT = ("XX", "ZI", "IX", "ZZ")


def _clifford_images(key, qubits: tuple[int, ...], n: int) -> tuple[list[PhasedPauli], list[PhasedPauli]]:
    if len(qubits) == 1:
        ix, iz = (embed(_local(1, s), n, qubits) for s in _ONE_QUBIT[key])
        return [ix], [iz]
    xc, zc, xt, zt = (embed(_local(2, s), n, qubits) for s in _CNOT)
    return [xc, xt], [zc, zt]


def _apply_clifford(p: PhasedPauli, qubits: tuple[int, ...], images) -> PhasedPauli:
    local = 0
    for q in qubits:
        local |= 1 << q
    if not (p.support_mask & local):
        return p
    img_x, img_z = images
    ax, bz = p.x & ~local, p.z & ~local
    # i^(k + a.b) X^aR Z^bR X^aQ Z^bQ, with X^aR Z^bR = i^-(aR.bR) E(aR, bR)
    kappa = p.kappa + (p.x & p.z).bit_count() - (ax & bz).bit_count()
    out = PhasedPauli(p.n, ax, bz, kappa)
    for idx, q in enumerate(qubits):
        if (p.x >> q) & 1:
            out = pauli_mul(out, img_x[idx])
    for idx, q in enumerate(qubits):
        if (p.z >> q) & 1:
            out = pauli_mul(out, img_z[idx])
    return out


def conjugate_clifford(p: PhasedPauli, gate: Gate) -> PhasedPauli:
    """``g p g^dagger`` for a Clifford gate (RZ only at multiples of pi/2)."""
    key = gate.kind
    if gate.kind == "RZ":
        key = quarter_turns(gate.angle)
        if key is None:
            raise UnsupportedCircuitError(f"RZ({gate.angle}) is not Clifford")
    elif gate.kind == "CNOT":
        key = "CNOT"
    return _apply_clifford(p, gate.qubits, _clifford_images(key, gate.qubits, p.n))


def _check_gate(p: PhasedPauli, gate: Gate) -> None:
    if max(gate.qubits) >= p.n:
        raise InvalidArgumentError(f"gate {gate.to_text()} outside {p.n} qubits")


def _split(p: PhasedPauli, gate: Gate) -> tuple[float, PhasedPauli, PhasedPauli]:
    """cos/sin parts of Rz(theta) p Rz^dagger for p anticommuting with Z_q."""
    phase_img = conjugate_clifford(p, Gate("P", gate.qubits))
    angle = gate.angle
    if angle < 0:
        return -angle, p, -phase_img
    return angle, p, phase_img


def conjugate_gate(p: PhasedPauli, gate: Gate) -> PauliSum:
    _check_gate(p, gate)
    return _conjugate_sum(PauliSum.single(p), gate)


def _conjugate_sum(s: PauliSum, gate: Gate) -> PauliSum:
    generic = gate.kind == "RZ" and quarter_turns(gate.angle) is None
    if not generic:
        return PauliSum(tuple(Term(t.tag, conjugate_clifford(t.pauli, gate)) for t in s.terms), s.theta)
    q = gate.qubits[0]
    out: list[Term] = []
    theta = s.theta
    for t in s.terms:
        if t.pauli.local(q) in "IZ":
            out.append(t)
            continue
        if t.tag != "one":
            raise UnsupportedCircuitError("a second non-Clifford rotation would exceed two terms")
        angle, cos_part, sin_part = _split(t.pauli, gate)
        if theta is not None and not math.isclose(theta, angle, rel_tol=0, abs_tol=1e-15):
            raise UnsupportedCircuitError("rotations with different generic angles")
        theta = angle
        out += [Term("cos", cos_part), Term("sin", sin_part)]
    return PauliSum(tuple(out), theta)


def conjugate_circuit(p: PhasedPauli, circuit: Circuit) -> PauliSum:
    """Left-to-right conjugation ``U p U^dagger`` with ``U = g_last ... g_first``."""
    if p.n != circuit.n:
        raise InvalidArgumentError(f"Pauli on {p.n} qubits, circuit on {circuit.n}")
    s = PauliSum.single(p)
    for g in circuit.gates:
        s = _conjugate_sum(s, g)
    return s


def propagation_trace(p: PhasedPauli, circuit: Circuit) -> list[PauliSum]:
    """The propagated operator after each gate (index i = after gate i)."""
    s = PauliSum.single(p)
    out = []
    for g in circuit.gates:
        s = _conjugate_sum(s, g)
        out.append(s)
    return out


def _hermitian(p: PhasedPauli) -> PhasedPauli:
    return p.with_kappa(2 if p.kappa in (2, 3) else 0)


def conjugate_trotter(q: PhasedPauli, p: PhasedPauli, theta: float) -> PauliSum:
    """Closed form of ``U q U^dagger`` for ``U = exp(-i theta/2 p)``.

    ``q`` itself if the two commute, otherwise ``cos(theta) q + sin(theta) i q p``.
    ``p`` is read the same way as by the compiler (see ``trotter_angle``).
    """
    if q.n != p.n:
        raise InvalidArgumentError(f"qubit count mismatch: {q.n} vs {p.n}")
    if commutes(q, p):
        return PauliSum.single(q)
    flipped = pauli_mul(q, _hermitian(p)).times_i(1)
    turns = quarter_turns(theta)
    if turns is not None:
        return PauliSum.single({0: q, 1: flipped, 2: -q, 3: -flipped}[turns])
    if theta < 0:
        return PauliSum((Term("cos", q), Term("sin", -flipped)), -theta)
    return PauliSum((Term("cos", q), Term("sin", flipped)), theta)


def double_angle_product(q: PhasedPauli, p: PhasedPauli, theta: float) -> PauliSum:
    """``q . (U q U^dagger)``; equals ``cos(theta) I + i sin(theta) p``, i.e. U_p(-2 theta)."""
    if commutes(q, p):
        raise InvalidArgumentError("q commutes with p; the product is trivially q^2")
    image = conjugate_trotter(q, p, theta)
    return PauliSum(tuple(Term(t.tag, pauli_mul(q, t.pauli)) for t in image.terms), image.theta)


# closed forms of the logical Clifford kernel ------------------------------------------


def lemma1_image(k: int, hadamard, hadamard_y, untouched, qubit: int, basis: str) -> PhasedPauli:
    """Image of ``X_i`` or ``Z_i`` (1-based ``qubit``) under the Clifford Trotter
    kernel with H on ``hadamard``, Hy on ``hadamard_y`` and nothing on ``untouched``."""
    ih, ihy = set(hadamard), set(hadamard_y)
    ie = set(range(1, k + 1)) - ih - ihy if untouched is None else set(untouched)
    if ih & ihy or ih & ie or ihy & ie or (ih | ihy | ie) != set(range(1, k + 1)):
        raise InvalidArgumentError(f"index sets must partition 1..{k}")
    if not 1 <= qubit <= k:
        raise InvalidArgumentError(f"qubit {qubit} outside 1..{k}")
    if basis not in ("X", "Z"):
        raise InvalidArgumentError("basis must be 'X' or 'Z'")
    i = qubit

    def build(xs, ys, zs, negative=False):
        x = sum(1 << (j - 1) for j in xs | ys)
        z = sum(1 << (j - 1) for j in ys | zs)
        return PhasedPauli(k, x, z, 2 if negative else 0)

    single_x = build({i}, set(), set())
    single_z = build(set(), set(), {i})
    if i in ie:
        if basis == "X":
            return build(ih, ihy | {i}, ie - {i})
        return single_z
    if i in ih:
        if basis == "X":
            return single_x
        return build(ih - {i}, ihy | {i}, ie, negative=True)
    if basis == "X":
        return build(ih, ihy - {i}, ie | {i}, negative=True)
    return build(ih | {i}, ihy - {i}, ie)


# verification suites ------------------------------------------------------------------


@dataclass
class ConstraintCheck:
    name: str
    input: PhasedPauli
    expected: PauliSum
    actual: PauliSum
    passed: bool
    witnesses: dict = field(default_factory=dict)
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "input": format_pauli(self.input),
            "expected": self.expected.to_dict(),
            "actual": self.actual.to_dict(),
            "passed": self.passed,
            "witnesses": {tag: bit_indices(c) for tag, c in self.witnesses.items()},
            "message": self.message,
        }


@dataclass
class VerificationReport:
    kind: str
    theta: float
    physical: PhasedPauli
    circuit: Circuit
    checks: list[ConstraintCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[ConstraintCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "theta": self.theta,
            "physical": format_pauli(self.physical),
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }


def _match_up_to_stabilizers(code: StabilizerCode, expected: PauliSum, actual: PauliSum):
    if [t.tag for t in expected.terms] != [t.tag for t in actual.terms]:
        return False, {}, "term structure differs"
    if expected.theta is not None and actual.theta is not None and not math.isclose(
        expected.theta, actual.theta, rel_tol=0, abs_tol=1e-12
    ):
        return False, {}, "rotation angles differ"
    witnesses = {}
    for te, ta in zip(expected.terms, actual.terms):
        ratio = pauli_mul(ta.pauli, te.pauli.inverse())
        w = code.stabilizer_witness(ratio)
        if w is None:
            reason = "phase" if code.in_stabilizer_span(ratio) else "coset"
            return False, witnesses, f"{te.tag} term differs by {format_pauli(ratio)} ({reason})"
        witnesses[te.tag] = w
    return True, witnesses, ""


def verify_logical_action(
    code: StabilizerCode,
    logical: PhasedPauli,
    theta: float,
    reduce: str | None = None,
    circuit: Circuit | None = None,
    reference: PhasedPauli | None = None,
) -> VerificationReport:
    """Check every logical generator against the logical Trotter rotation.

    The physical kernel is synthesized from ``lift(logical)`` (weight-reduced
    with ``reduce`` if given) unless ``circuit`` is supplied. ``reference``
    overrides the logical Pauli the images are compared against.
    """
    from .circuit import reduce_weight

    phys = lift(code, logical)
    if reduce:
        phys = reduce_weight(phys, code, reduce)
    if circuit is None:
        circuit = synthesize_trotter(phys, theta)
    target = logical if reference is None else reference
    checks = []
    for tag, ops in (("X", code.logical_x), ("Z", code.logical_z)):
        for i in range(code.k):
            g = PhasedPauli.single(code.k, i, tag)
            logical_image = conjugate_trotter(g, target, theta)
            expected = PauliSum(
                tuple(Term(t.tag, lift(code, t.pauli)) for t in logical_image.terms), logical_image.theta
            )
            actual = conjugate_circuit(ops[i], circuit)
            ok, wit, msg = _match_up_to_stabilizers(code, expected, actual)
            checks.append(ConstraintCheck(f"{tag}{i + 1}", ops[i], expected, actual, ok, wit, msg))
    return VerificationReport("logical-action", theta, phys, circuit, checks)


def verify_stabilizer_centralization(
    code: StabilizerCode, physical: PhasedPauli, theta: float, circuit: Circuit | None = None
) -> VerificationReport:
    """Every generator must come back exactly as itself through the kernel."""
    if circuit is None:
        circuit = synthesize_trotter(physical, theta)
    checks = []
    for i, s in enumerate(code.stabilizers):
        actual = conjugate_circuit(s, circuit)
        ok = actual.is_single and actual.terms[0].pauli == s
        msg = "" if ok else f"image {actual}"
        checks.append(ConstraintCheck(f"S{i + 1}", s, PauliSum.single(s), actual, ok, {}, msg))
    return VerificationReport("stabilizer-centralization", theta, physical, circuit, checks)


@dataclass(frozen=True)
class ResidualAnalysis:
    action: str  # "unchanged" | "trotter-correction"
    correction_angle: float | None = None
    correction_pauli: PhasedPauli | None = None
    clifford: bool = False

    @property
    def label(self) -> str:
        if self.action == "unchanged":
            return "error unchanged"
        kind = "logical Clifford Trotter correction" if self.clifford else "Trotter correction"
        return f"{kind} U({self.correction_angle:.6g})"


def residual_error_analysis(e: PhasedPauli, physical: PhasedPauli, theta: float) -> ResidualAnalysis:
    """How an input error ``e`` leaves the kernel for exp(-i theta/2 physical).

    A commuting error passes through untouched; an anticommuting one comes out
    as ``e . U(-2 theta)``, so the decoder's estimate must be followed by a
    Trotter correction with angle ``-2 theta`` on the same Pauli.
    """
    if e.n != physical.n:
        raise InvalidArgumentError(f"qubit count mismatch: {e.n} vs {physical.n}")
    if commutes(e, physical):
        return ResidualAnalysis("unchanged")
    angle = -2.0 * theta
    return ResidualAnalysis("trotter-correction", angle, physical, quarter_turns(angle) is not None)
