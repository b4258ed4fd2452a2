"""Gate-level IR and the Trotter-circuit compiler.

The compiler turns a Pauli ``P`` and an angle into the standard Trotter
kernel for ``exp(-i theta/2 P)``: basis changes, a CNOT star into the
highest-index support qubit, a central ``Rz``, and the mirror image.

Text format, one gate per line, 0-based qubits::

    qubits 8
    H 3
    HY 5
    CNOT 2 7
    P 7
    RZ 7 1.57079633
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CapacityError, InvalidArgumentError, ParseError
from .f2 import mask, popcount
from .pauli import PhasedPauli, pauli_mul

GATE_KINDS = ("H", "HY", "CNOT", "P", "RZ")
_ARITY = {"H": 1, "HY": 1, "P": 1, "RZ": 1, "CNOT": 2}
HALF_PI = math.pi / 2
CLIFFORD_ATOL = 1e-12


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise InvalidArgumentError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != _ARITY[self.kind]:
            raise InvalidArgumentError(f"{self.kind} takes {_ARITY[self.kind]} qubit(s)")
        if self.kind == "CNOT" and self.qubits[0] == self.qubits[1]:
            raise InvalidArgumentError("CNOT control and target must differ")
        if any(q < 0 for q in self.qubits):
            raise InvalidArgumentError("negative qubit index")
        if self.kind == "RZ":
            if self.angle is None or not math.isfinite(self.angle):
                raise InvalidArgumentError("RZ needs a finite angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise InvalidArgumentError(f"{self.kind} takes no angle")

    @property
    def rotation_angle(self) -> float | None:
        """Z-rotation angle for P and RZ gates, else None."""
        if self.kind == "P":
            return HALF_PI
        return self.angle

    def to_text(self) -> str:
        body = f"{self.kind} " + " ".join(map(str, self.qubits))
        if self.kind == "RZ":
            body += f" {self.angle!r}"
        return body

    def to_dict(self) -> dict:
        d = {"gate": self.kind, "qubits": list(self.qubits)}
        if self.kind == "RZ":
            d["angle"] = self.angle
        return d


def H(q: int) -> Gate:
    return Gate("H", (q,))


def HY(q: int) -> Gate:
    return Gate("HY", (q,))


def CNOT(c: int, t: int) -> Gate:
    return Gate("CNOT", (c, t))


def PHASE(q: int) -> Gate:
    return Gate("P", (q,))


def RZ(q: int, angle: float) -> Gate:
    return Gate("RZ", (q,), angle)


def quarter_turns(angle: float) -> int | None:
    """``angle / (pi/2)`` as an int mod 4 when it is a multiple, else None."""
    turns = angle / HALF_PI
    r = round(turns)
    if abs(turns - r) <= CLIFFORD_ATOL * max(1.0, abs(turns)):
        return r % 4
    return None


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.n:
                raise InvalidArgumentError(f"gate {g.to_text()} outside {self.n} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        if self.n != other.n:
            raise InvalidArgumentError("cannot concatenate circuits on different registers")
        return Circuit(self.n, self.gates + other.gates)

    def count(self, kind: str) -> int:
        return sum(g.kind == kind for g in self.gates)

    def is_clifford(self) -> bool:
        return all(g.kind != "RZ" or quarter_turns(g.angle) is not None for g in self.gates)

    def layers(self) -> list[list[Gate]]:
        """Greedy ASAP schedule: each gate lands one layer after its latest qubit."""
        last = [0] * self.n
        out: list[list[Gate]] = []
        for g in self.gates:
            layer = max(last[q] for q in g.qubits)
            if layer == len(out):
                out.append([])
            out[layer].append(g)
            for q in g.qubits:
                last[q] = layer + 1
        return out

    def depth(self) -> int:
        return len(self.layers())

    def to_text(self) -> str:
        return "\n".join([f"qubits {self.n}"] + [g.to_text() for g in self.gates]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Circuit:
        n = None
        gates = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].split()
            if not line:
                continue
            head = line[0].upper()
            if head == "QUBITS":
                if n is not None or len(line) != 2:
                    raise ParseError("bad 'qubits' line", line=lineno)
                n = _int(line[1], lineno)
                continue
            if n is None:
                raise ParseError("circuit text must start with 'qubits <n>'", line=lineno)
            if head not in GATE_KINDS:
                raise ParseError(f"unknown gate {line[0]!r}", line=lineno)
            arity = _ARITY[head]
            want = arity + (1 if head == "RZ" else 0)
            if len(line) - 1 != want:
                raise ParseError(f"{head} takes {want} argument(s)", line=lineno)
            qubits = tuple(_int(tok, lineno) for tok in line[1 : 1 + arity])
            angle = None
            if head == "RZ":
                try:
                    angle = float(line[-1])
                except ValueError:
                    raise ParseError(f"bad angle {line[-1]!r}", line=lineno) from None
            try:
                gates.append(Gate(head, qubits, angle))
            except InvalidArgumentError as exc:
                raise ParseError(str(exc), line=lineno) from None
        if n is None:
            raise ParseError("empty circuit text")
        return cls(n, tuple(gates))

    def to_dict(self) -> dict:
        return {"n": self.n, "gates": [g.to_dict() for g in self.gates]}

    @classmethod
    def from_dict(cls, data: dict) -> Circuit:
        try:
            gates = [Gate(d["gate"], tuple(d["qubits"]), d.get("angle")) for d in data["gates"]]
            return cls(int(data["n"]), tuple(gates))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed circuit object: {exc}") from None

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad JSON: {exc.msg}", line=exc.lineno) from None


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer, got {tok!r}", line=lineno) from None


# synthesis ------------------------------------------------------------------


def transvection_from_sets(
    k: int,
    hadamard: Iterable[int],
    hadamard_y: Iterable[int],
    untouched: Iterable[int] | None = None,
) -> PhasedPauli:
    """``i * prod X_j (j in hadamard) * prod Y_j (hadamard_y) * prod Z_j (untouched)``.

    Index sets are 1-based and must partition ``{1..k}``; ``untouched`` may be
    omitted and is then the complement of the other two.
    """
    ih, ihy = set(hadamard), set(hadamard_y)
    ie = set(range(1, k + 1)) - ih - ihy if untouched is None else set(untouched)
    if ih & ihy or ih & ie or ihy & ie:
        raise InvalidArgumentError("index sets overlap")
    if ih | ihy | ie != set(range(1, k + 1)):
        raise InvalidArgumentError(f"index sets must cover 1..{k}")
    x = sum(1 << (j - 1) for j in ih | ihy)
    z = sum(1 << (j - 1) for j in ihy | ie)
    # distinct-qubit Hermitian factors multiply to E(a, b) exactly
    return PhasedPauli(k, x, z, 1)


def trotter_angle(p: PhasedPauli, theta: float) -> float:
    """Rotation angle the kernel must apply so that it realizes exp(-i theta/2 p).

    ``p`` with kappa 2 or 3 is the negative of a Hermitian ``E``; the angle is
    flipped. An odd kappa (the leading ``i`` of a transvection) is dropped.
    """
    return -theta if p.kappa in (2, 3) else theta


def synthesize_trotter(p: PhasedPauli, theta: float) -> Circuit:
    """Trotter kernel for exp(-i theta/2 p) on the support of ``p``."""
    if p.is_identity:
        raise InvalidArgumentError("cannot synthesize a Trotter circuit for the identity")
    support = p.support
    target = support[-1]
    basis = []
    for q in support:
        letter = p.local(q)
        if letter == "X":
            basis.append(H(q))
        elif letter == "Y":
            basis.append(HY(q))
    fan_in = [CNOT(q, target) for q in support if q != target]
    angle = trotter_angle(p, theta)
    centre = PHASE(target) if angle == HALF_PI else RZ(target, angle)
    gates = basis + fan_in + [centre] + fan_in[::-1] + basis[::-1]
    return Circuit(p.n, tuple(gates))


def trotter_center(circuit: Circuit) -> int:
    """Index of the central rotation gate of a kernel built by synthesize_trotter."""
    idx = [i for i, g in enumerate(circuit.gates) if g.kind in ("P", "RZ")]
    if len(idx) != 1:
        raise InvalidArgumentError("circuit is not a single Trotter kernel")
    return idx[0]


# weight reduction --------------------------------------------------------------

EXHAUSTIVE_LIMIT = 24


def _weight(bits: int, n: int) -> int:
    return popcount((bits & mask(n)) | (bits >> n))


def _lex_key(bits: int, length: int) -> int:
    # position 0 most significant, so smaller key == lexicographically smaller
    return int(format(bits, f"0{length}b")[::-1], 2) if length else 0


def reduce_weight(h: PhasedPauli, code, strategy: str = "exhaustive") -> PhasedPauli:
    """Lowest-weight representative ``h * S`` over the stabilizer group.

    ``exhaustive`` walks all 2^(n-k) group elements in Gray-code order. Among
    equal weights it prefers the fewest generator factors, then the
    lexicographically smallest ``[x|z]`` (position 0 first).
    ``greedy`` repeatedly applies the generator with the largest weight drop
    (lowest index among equals) until nothing improves.
    """
    if h.n != code.n:
        raise InvalidArgumentError(f"Pauli acts on {h.n} qubits, code has n={code.n}")
    gens = [s.bits for s in code.stabilizers]
    if strategy == "exhaustive":
        coeffs = _exhaustive(h.bits, gens, h.n)
    elif strategy == "greedy":
        coeffs = _greedy(h.bits, gens, h.n)
    else:
        raise InvalidArgumentError(f"unknown strategy {strategy!r}")
    return pauli_mul(h, code.stabilizer_element(coeffs))


def _exhaustive(start: int, gens: Sequence[int], n: int) -> int:
    m = len(gens)
    if m > EXHAUSTIVE_LIMIT:
        raise CapacityError(f"exhaustive reduction needs n-k <= {EXHAUSTIVE_LIMIT}, got {m}")
    lo = mask(n)
    cur, coeffs = start, 0
    best = (popcount((cur & lo) | (cur >> n)), 0, _lex_key(cur, 2 * n))
    best_coeffs = 0
    for i in range(1, 1 << m):
        j = (i & -i).bit_length() - 1
        cur ^= gens[j]
        coeffs ^= 1 << j
        w = popcount((cur & lo) | (cur >> n))
        if w > best[0]:
            continue
        rank = (w, coeffs.bit_count(), _lex_key(cur, 2 * n))
        if rank < best:
            best, best_coeffs = rank, coeffs
    return best_coeffs


def _greedy(start: int, gens: Sequence[int], n: int) -> int:
    cur, coeffs = start, 0
    w = _weight(cur, n)
    while True:
        best_gain, best_j = 0, None
        for j, g in enumerate(gens):
            gain = w - _weight(cur ^ g, n)
            if gain > best_gain:
                best_gain, best_j = gain, j
        if best_j is None:
            return coeffs
        cur ^= gens[best_j]
        coeffs ^= 1 << best_j
        w -= best_gain


# product formula -----------------------------------------------------------------


def trotterize(terms: Sequence[tuple[float, PhasedPauli]], time: float, steps: int) -> list[tuple[PhasedPauli, float]]:
    """First-order product formula: ``steps`` repetitions of the term list,
    each term ``(alpha, E)`` becoming a kernel with angle ``2 alpha t / T``."""
    if steps < 1:
        raise InvalidArgumentError("need at least one Trotter step")
    one_step = [(p, 2.0 * alpha * time / steps) for alpha, p in terms]
    return one_step * steps


def product_formula_circuit(terms, time: float, steps: int, n: int | None = None) -> Circuit:
    """Concatenated kernels for :func:`trotterize`; identity terms are skipped."""
    kernels = trotterize(terms, time, steps)
    if n is None:
        if not kernels:
            raise InvalidArgumentError("cannot infer register size from an empty term list")
        n = kernels[0][0].n
    out = Circuit(n)
    for p, theta in kernels:
        if not p.is_identity:
            out = out + synthesize_trotter(p, theta)
    return out
