"""Bit-exact linear algebra over F2.

Vectors are packed into a Python ``int`` (bit ``i`` of the int is entry ``i``
of the vector), so XOR and popcount run word-parallel inside CPython's
bignum routines. A symplectic vector of length ``2n`` stores the X-part in
bits ``0..n-1`` and the Z-part in bits ``n..2n-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidArgumentError


def mask(length: int) -> int:
    return (1 << length) - 1


def popcount(v: int) -> int:
    return v.bit_count()


def parity(v: int) -> int:
    return v.bit_count() & 1


def bit_indices(v: int) -> list[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


@dataclass(frozen=True)
class BitVec:
    """Fixed-length binary vector. Bits at or above ``length`` are always zero."""

    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise InvalidArgumentError("BitVec length must be non-negative")
        if self.bits < 0 or self.bits >> self.length:
            object.__setattr__(self, "bits", self.bits & mask(self.length))

    @classmethod
    def zeros(cls, length: int) -> BitVec:
        return cls(length, 0)

    @classmethod
    def unit(cls, length: int, index: int) -> BitVec:
        if not 0 <= index < length:
            raise InvalidArgumentError(f"index {index} out of range for length {length}")
        return cls(length, 1 << index)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVec:
        value = 0
        length = 0
        for i, b in enumerate(bits):
            if b:
                value |= 1 << i
            length = i + 1
        return cls(length, value)

    @classmethod
    def from_string(cls, text: str) -> BitVec:
        """Parse ``"101|010"`` style text; ``|`` and whitespace are ignored."""
        cleaned = [c for c in text if c not in "| \t"]
        if any(c not in "01" for c in cleaned):
            raise InvalidArgumentError(f"not a binary string: {text!r}")
        return cls.from_bits(int(c) for c in cleaned)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, index: int) -> int:
        if index < 0:
            index += self.length
        if not 0 <= index < self.length:
            raise IndexError(index)
        return (self.bits >> index) & 1

    def __iter__(self):
        return (((self.bits >> i) & 1) for i in range(self.length))

    def _check(self, other: BitVec) -> None:
        if self.length != other.length:
            raise InvalidArgumentError(f"length mismatch: {self.length} vs {other.length}")

    def __xor__(self, other: BitVec) -> BitVec:
        self._check(other)
        return BitVec(self.length, self.bits ^ other.bits)

    __add__ = __xor__

    def __and__(self, other: BitVec) -> BitVec:
        self._check(other)
        return BitVec(self.length, self.bits & other.bits)

    def dot(self, other: BitVec) -> int:
        self._check(other)
        return parity(self.bits & other.bits)

    def weight(self) -> int:
        return popcount(self.bits)

    def to_list(self) -> list[int]:
        return list(self)

    def split(self) -> tuple[BitVec, BitVec]:
        """Halves ``[a|b]`` of an even-length vector."""
        if self.length % 2:
            raise InvalidArgumentError("cannot split an odd-length vector")
        n = self.length // 2
        return BitVec(n, self.bits & mask(n)), BitVec(n, self.bits >> n)

    def __str__(self) -> str:
        return "".join(str(b) for b in self)


def _check_symplectic(x: BitVec, y: BitVec) -> int:
    if x.length != y.length:
        raise InvalidArgumentError(f"length mismatch: {x.length} vs {y.length}")
    if x.length % 2:
        raise InvalidArgumentError(f"symplectic vectors need even length, got {x.length}")
    return x.length // 2


def symplectic_form(x: int, y: int, n: int) -> int:
    """<x, y>_s on packed ints of length 2n."""
    m = mask(n)
    return parity(((x & m) & (y >> n)) ^ ((x >> n) & (y & m)))


def symplectic_inner(x: BitVec, y: BitVec) -> int:
    n = _check_symplectic(x, y)
    return symplectic_form(x.bits, y.bits, n)


def omega_swap(x: BitVec) -> BitVec:
    """x -> x Omega, i.e. swap the two halves (signs vanish over F2)."""
    n = _check_symplectic(x, x)
    m = mask(n)
    return BitVec(x.length, ((x.bits & m) << n) | (x.bits >> n))


def transvection_apply(h: BitVec, x: BitVec) -> BitVec:
    """Z_h(x) = x + <x, h>_s h."""
    n = _check_symplectic(h, x)
    if symplectic_form(x.bits, h.bits, n):
        return BitVec(x.length, x.bits ^ h.bits)
    return x


def transvection_matrix(h: BitVec) -> BitMatrix:
    """F_h = I + Omega h^T h, acting on row vectors from the right."""
    _check_symplectic(h, h)
    length = h.length
    # row i of Omega h^T h is (Omega h^T)_i * h = h[swap(i)] * h
    hw = omega_swap(h)
    rows = [(1 << i) ^ (h.bits if hw[i] else 0) for i in range(length)]
    return BitMatrix(length, tuple(rows))


@dataclass(frozen=True)
class BitMatrix:
    """Row-major binary matrix; each row is a packed int of ``ncols`` bits."""

    ncols: int
    rows: tuple[int, ...] = ()

    def __post_init__(self):
        m = mask(self.ncols)
        object.__setattr__(self, "rows", tuple(int(r) & m for r in self.rows))

    @classmethod
    def from_rows(cls, rows: Sequence[BitVec] | Sequence[Sequence[int]], ncols: int | None = None) -> BitMatrix:
        packed = []
        width = ncols
        for r in rows:
            v = r if isinstance(r, BitVec) else BitVec.from_bits(r)
            if width is None:
                width = v.length
            elif v.length != width:
                raise InvalidArgumentError(f"row length {v.length} != {width}")
            packed.append(v.bits)
        return cls(width or 0, tuple(packed))

    @classmethod
    def identity(cls, size: int) -> BitMatrix:
        return cls(size, tuple(1 << i for i in range(size)))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    def row(self, i: int) -> BitVec:
        return BitVec(self.ncols, self.rows[i])

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]

    def vecmat(self, c: BitVec) -> BitVec:
        """Row vector times matrix: c . M."""
        if c.length != self.nrows:
            raise InvalidArgumentError(f"coefficient length {c.length} != rows {self.nrows}")
        acc = 0
        for i in bit_indices(c.bits):
            acc ^= self.rows[i]
        return BitVec(self.ncols, acc)

    def matvec(self, v: BitVec) -> BitVec:
        """M v^T as a vector indexed by row."""
        if v.length != self.ncols:
            raise InvalidArgumentError(f"vector length {v.length} != cols {self.ncols}")
        out = 0
        for i, r in enumerate(self.rows):
            if parity(r & v.bits):
                out |= 1 << i
        return BitVec(self.nrows, out)

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self.ncols != other.nrows:
            raise InvalidArgumentError(f"shape mismatch {self.shape} @ {other.shape}")
        rows = []
        for r in self.rows:
            acc = 0
            for i in bit_indices(r):
                acc ^= other.rows[i]
            rows.append(acc)
        return BitMatrix(other.ncols, tuple(rows))

    def transpose(self) -> BitMatrix:
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            for j in bit_indices(r):
                cols[j] |= 1 << i
        return BitMatrix(self.nrows, tuple(cols))

    def rank(self) -> int:
        return len(row_reduce(self.rows, self.ncols).pivots)

    def row_basis(self) -> BitMatrix:
        """Linearly independent subset of the original rows spanning the row space."""
        red = row_reduce(self.rows, self.ncols)
        return BitMatrix(self.ncols, tuple(self.rows[i] for i in red.independent))

    def nullspace(self) -> BitMatrix:
        """Basis of {x : M x^T = 0}."""
        red = row_reduce(self.rows, self.ncols)
        pivot_cols = red.pivots
        free = [j for j in range(self.ncols) if j not in set(pivot_cols)]
        basis = []
        for f in free:
            x = 1 << f
            for r, pc in zip(red.reduced, pivot_cols):
                if (r >> f) & 1:
                    x |= 1 << pc
            basis.append(x)
        return BitMatrix(self.ncols, tuple(basis))


@dataclass(frozen=True)
class Reduction:
    """Reduced row echelon form with provenance.

    ``reduced[i]`` has its leading one in column ``pivots[i]`` and equals the
    XOR of the original rows flagged in ``combos[i]``. ``independent`` lists
    original row indices whose span equals the row space.
    """

    reduced: tuple[int, ...]
    pivots: tuple[int, ...]
    combos: tuple[int, ...]
    independent: tuple[int, ...]


def row_reduce(rows: Sequence[int], ncols: int) -> Reduction:
    """Leftmost-pivot Gauss-Jordan elimination over F2."""
    work = list(rows)
    combos = [1 << i for i in range(len(work))]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        bit = 1 << col
        pivot = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        combos[r], combos[pivot] = combos[pivot], combos[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
                combos[i] ^= combos[r]
        pivots.append(col)
        r += 1
        if r == len(work):
            break
    reduced = work[:r]
    # earliest rows win: a row is kept iff it is independent of the rows before it
    basis_rows: list[int] = []
    span_red: list[tuple[int, int]] = []
    for idx, row in enumerate(rows):
        v = row
        for pv, pc in span_red:
            if (v >> pc) & 1:
                v ^= pv
        if v:
            basis_rows.append(idx)
            span_red.append((v, v.bit_length() - 1))
    return Reduction(tuple(reduced), tuple(pivots), tuple(combos[:r]), tuple(basis_rows))


def solve_membership(matrix: BitMatrix, v: BitVec) -> BitVec | None:
    """Coefficients ``c`` with ``c . M == v``, or ``None`` if v is outside the row space.

    Deterministic: the solution uses only the rows picked as pivots by
    leftmost-pivot elimination.
    """
    if v.length != matrix.ncols:
        raise InvalidArgumentError(f"vector length {v.length} != cols {matrix.ncols}")
    red = row_reduce(matrix.rows, matrix.ncols)
    target = v.bits
    coeffs = 0
    for row, col, combo in zip(red.reduced, red.pivots, red.combos):
        if (target >> col) & 1:
            target ^= row
            coeffs ^= combo
    if target:
        return None
    return BitVec(matrix.nrows, coeffs)


class RowSpaceSolver:
    """Precomputed elimination for repeated membership queries against one matrix."""

    def __init__(self, matrix: BitMatrix):
        self.matrix = matrix
        self._red = row_reduce(matrix.rows, matrix.ncols)

    @property
    def rank(self) -> int:
        return len(self._red.pivots)

    def solve(self, v: int) -> int | None:
        coeffs = 0
        for row, col, combo in zip(self._red.reduced, self._red.pivots, self._red.combos):
            if (v >> col) & 1:
                v ^= row
                coeffs ^= combo
        return None if v else coeffs

    def reduce(self, v: int) -> int:
        """Canonical representative of ``v`` modulo the row space."""
        for row, col in zip(self._red.reduced, self._red.pivots):
            if (v >> col) & 1:
                v ^= row
        return v
