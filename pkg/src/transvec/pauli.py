"""Phased Pauli operators in binary symplectic form.

A :class:`PhasedPauli` ``p`` stands for ``i**p.kappa * E(a, b)`` with
``a = p.x``, ``b = p.z`` and

    E(a, b) = i**(a.b mod 4) * X**a1 Z**b1 (x) ... (x) X**an Z**bn

so ``E`` is always Hermitian (``E([1|1]) = Y``) and the whole global phase
lives in ``kappa``. Qubit ``j`` (0-based) is bit ``j`` of ``x`` and ``z``.

Text grammar (1-based qubit labels, shared by the CLI and code files)::

    pauli   := [phase] body
    phase   := "+" | "-" | "+i" | "-i" | "i"
    body    := dense | sparse
    dense   := one of I X Y Z per qubit, exactly n letters ("XZX")
    sparse  := factor (" " factor)*      factor := X|Y|Z followed by an index
                                                   ("Z2 X4 Y5")

The phase token may be glued to the body ("-Z2 X3") or separated by spaces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InvalidArgumentError, ParseError
from .f2 import BitVec, bit_indices, mask, popcount, symplectic_form

_LETTERS = "IXZY"  # index = x + 2 z
_PHASE_TOKENS = {"": 0, "+": 0, "+i": 1, "i": 1, "-": 2, "-i": 3}
_PHASE_TEXT = {0: "", 1: "+i", 2: "-", 3: "-i"}


@dataclass(frozen=True)
class PhasedPauli:
    n: int
    x: int = 0
    z: int = 0
    kappa: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise InvalidArgumentError("qubit count must be non-negative")
        m = mask(self.n)
        if self.x & ~m or self.z & ~m or self.x < 0 or self.z < 0:
            raise InvalidArgumentError(f"bits outside {self.n} qubits")
        object.__setattr__(self, "kappa", self.kappa % 4)

    # constructors -----------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> PhasedPauli:
        return cls(n)

    @classmethod
    def from_symplectic(cls, h: BitVec, kappa: int = 0) -> PhasedPauli:
        a, b = h.split()
        return cls(a.length, a.bits, b.bits, kappa)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PhasedPauli:
        if not 0 <= qubit < n:
            raise InvalidArgumentError(f"qubit {qubit} out of range for n={n}")
        code = _LETTERS.index(letter)
        return cls(n, (code & 1) << qubit, (code >> 1) << qubit)

    @classmethod
    def parse(cls, text: str, n: int) -> PhasedPauli:
        return parse_pauli(text, n)

    # views ------------------------------------------------------------------

    @property
    def symplectic(self) -> BitVec:
        return BitVec(2 * self.n, self.x | (self.z << self.n))

    @property
    def bits(self) -> int:
        """Packed ``[x|z]`` as an int (2n bits)."""
        return self.x | (self.z << self.n)

    @property
    def support_mask(self) -> int:
        return self.x | self.z

    @property
    def support(self) -> list[int]:
        return bit_indices(self.x | self.z)

    @property
    def weight(self) -> int:
        return popcount(self.x | self.z)

    @property
    def is_identity(self) -> bool:
        return not (self.x or self.z)

    @property
    def is_hermitian(self) -> bool:
        return self.kappa % 2 == 0

    def local(self, qubit: int) -> str:
        return _LETTERS[((self.x >> qubit) & 1) | (((self.z >> qubit) & 1) << 1)]

    def with_kappa(self, kappa: int) -> PhasedPauli:
        return PhasedPauli(self.n, self.x, self.z, kappa)

    def unsigned(self) -> PhasedPauli:
        return PhasedPauli(self.n, self.x, self.z, 0)

    def times_i(self, power: int = 1) -> PhasedPauli:
        return PhasedPauli(self.n, self.x, self.z, self.kappa + power)

    def __neg__(self) -> PhasedPauli:
        return self.times_i(2)

    def inverse(self) -> PhasedPauli:
        # E(a,b) squares to I, so (i^k E)^-1 = i^-k E
        return PhasedPauli(self.n, self.x, self.z, -self.kappa)

    def same_operator_up_to_phase(self, other: PhasedPauli) -> bool:
        return self.n == other.n and self.x == other.x and self.z == other.z

    def __mul__(self, other: PhasedPauli) -> PhasedPauli:
        return pauli_mul(self, other)

    def commutes(self, other: PhasedPauli) -> bool:
        return commutes(self, other)

    def __str__(self) -> str:
        return format_pauli(self)


def _check_sizes(p: PhasedPauli, q: PhasedPauli) -> None:
    if p.n != q.n:
        raise InvalidArgumentError(f"qubit count mismatch: {p.n} vs {q.n}")


def pauli_mul(p: PhasedPauli, q: PhasedPauli) -> PhasedPauli:
    """Operator product ``p @ q`` with exact phase.

    Expanding both factors into ``i**(k + a.b) X**a Z**b`` form, moving
    ``Z**b1`` past ``X**a2`` costs ``(-1)**(b1.a2)``, and the merged
    ``X**a Z**b`` is re-expressed as ``i**-(a.b) E(a, b)``.
    """
    _check_sizes(p, q)
    x = p.x ^ q.x
    z = p.z ^ q.z
    kappa = (
        p.kappa
        + q.kappa
        + popcount(p.x & p.z)
        + popcount(q.x & q.z)
        + 2 * popcount(p.z & q.x)
        - popcount(x & z)
    )
    return PhasedPauli(p.n, x, z, kappa)


def commutes(p: PhasedPauli, q: PhasedPauli) -> bool:
    _check_sizes(p, q)
    return symplectic_form(p.bits, q.bits, p.n) == 0


def product(paulis, n: int) -> PhasedPauli:
    """Ordered product ``paulis[0] @ paulis[1] @ ...`` (identity when empty)."""
    acc = PhasedPauli.identity(n)
    for p in paulis:
        acc = pauli_mul(acc, p)
    return acc


def embed(p: PhasedPauli, n: int, positions) -> PhasedPauli:
    """Place the qubits of ``p`` at ``positions`` inside an ``n``-qubit register."""
    positions = list(positions)
    if len(positions) != p.n or len(set(positions)) != p.n:
        raise InvalidArgumentError("positions must be distinct and match p.n")
    x = z = 0
    for src, dst in enumerate(positions):
        if not 0 <= dst < n:
            raise InvalidArgumentError(f"position {dst} out of range for n={n}")
        x |= ((p.x >> src) & 1) << dst
        z |= ((p.z >> src) & 1) << dst
    return PhasedPauli(n, x, z, p.kappa)


# text -----------------------------------------------------------------------

_PHASE_RE = re.compile(r"^\s*([+-]?i?)(?![a-z])")
_SPARSE_TOKEN = re.compile(r"([IXYZ])(\d+)$")


def parse_pauli(text: str, n: int) -> PhasedPauli:
    """Parse the dense or sparse grammar described in the module docstring."""
    m = _PHASE_RE.match(text)
    sign = m.group(1) if m else ""
    kappa = _PHASE_TOKENS[sign]
    start = m.end() if m else 0
    body = text[start:]
    if not body.strip():
        raise ParseError("empty Pauli body", position=start + 1)
    if any(ch.isdigit() for ch in body):
        return _parse_sparse(body, n, kappa, offset=start)
    return _parse_dense(body, n, kappa, offset=start)


def _parse_dense(body: str, n: int, kappa: int, offset: int) -> PhasedPauli:
    x = z = 0
    q = 0
    for i, ch in enumerate(body):
        if ch.isspace():
            continue
        if ch not in _LETTERS:
            raise ParseError(f"bad character {ch!r}", position=offset + i + 1)
        if q >= n:
            raise ParseError(f"more than {n} letters in dense Pauli", position=offset + i + 1)
        code = _LETTERS.index(ch)
        x |= (code & 1) << q
        z |= (code >> 1) << q
        q += 1
    if q != n:
        raise ParseError(f"dense Pauli has {q} letters, expected {n}")
    return PhasedPauli(n, x, z, kappa)


def _parse_sparse(body: str, n: int, kappa: int, offset: int) -> PhasedPauli:
    x = z = 0
    seen: set[int] = set()
    for tok in re.finditer(r"\S+", body):
        pos = offset + tok.start() + 1
        m = _SPARSE_TOKEN.match(tok.group())
        if not m:
            raise ParseError(f"bad factor {tok.group()!r}", position=pos)
        letter, idx = m.group(1), int(m.group(2))
        if not 1 <= idx <= n:
            raise ParseError(f"qubit index {idx} out of range 1..{n}", position=pos)
        if idx in seen:
            raise ParseError(f"duplicate qubit index {idx}", position=pos)
        seen.add(idx)
        code = _LETTERS.index(letter)
        x |= (code & 1) << (idx - 1)
        z |= (code >> 1) << (idx - 1)
    return PhasedPauli(n, x, z, kappa)


def format_pauli(p: PhasedPauli, dense: bool = False) -> str:
    """Inverse of :func:`parse_pauli`. Sparse by default; identity prints dense."""
    prefix = _PHASE_TEXT[p.kappa]
    if dense or p.is_identity:
        return prefix + "".join(p.local(q) for q in range(p.n))
    return prefix + " ".join(f"{p.local(q)}{q + 1}" for q in p.support)
