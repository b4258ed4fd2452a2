"""Lifted-product CSS codes over the ring F2[x]/(x^l - 1).

A base matrix entry is a list of exponents: ``[0, 3]`` stands for
``1 + x^3`` and ``[]`` for zero. Each monomial ``x^e`` lifts to the
``l x l`` cyclic shift matrix with ones at ``(r, (r + e) mod l)``.
"""

from __future__ import annotations

from typing import Sequence

from .code import StabilizerCode, css_code_from_checks
from .errors import InvalidArgumentError
from .f2 import BitMatrix

Base = Sequence[Sequence[Sequence[int]]]


def _check_base(base: Base, lift_size: int, name: str) -> tuple[int, int]:
    if not base:
        raise InvalidArgumentError(f"base matrix {name} is empty")
    cols = len(base[0])
    if cols == 0:
        raise InvalidArgumentError(f"base matrix {name} has no columns")
    for r, row in enumerate(base):
        if len(row) != cols:
            raise InvalidArgumentError(f"base matrix {name} row {r} has {len(row)} entries, expected {cols}")
        for entry in row:
            for e in entry:
                if not isinstance(e, int) or not 0 <= e < lift_size:
                    raise InvalidArgumentError(f"exponent {e!r} in {name} outside [0, {lift_size})")
    return len(base), cols


def _poly_mask(entry: Sequence[int]) -> int:
    m = 0
    for e in entry:
        m ^= 1 << e  # repeated exponents cancel over F2
    return m


def conjugate(base: Base, lift_size: int) -> list[list[list[int]]]:
    """Transpose with every exponent negated mod l."""
    rows, cols = len(base), len(base[0])
    return [
        [sorted((-e) % lift_size for e in _exps(base[r][c])) for r in range(rows)]
        for c in range(cols)
    ]


def _exps(entry: Sequence[int]) -> list[int]:
    m = _poly_mask(entry)
    return [e for e in range(m.bit_length()) if (m >> e) & 1]


def _identity(size: int) -> list[list[list[int]]]:
    return [[[0] if i == j else [] for j in range(size)] for i in range(size)]


def _kron(a: Base, b: Base, lift_size: int) -> list[list[list[int]]]:
    """Kronecker product over the ring (polynomial products mod x^l - 1)."""
    out = []
    for ra in a:
        for rb in b:
            row = []
            for ea in ra:
                for eb in rb:
                    m = 0
                    for x in _exps(ea):
                        for y in _exps(eb):
                            m ^= 1 << ((x + y) % lift_size)
                    row.append([e for e in range(lift_size) if (m >> e) & 1])
            out.append(row)
    return out


def _hstack(left, right):
    return [l + r for l, r in zip(left, right)]


def expand(base: Base, lift_size: int) -> BitMatrix:
    """Replace each ring entry by its l x l circulant."""
    rows, cols = len(base), len(base[0])
    out = []
    for r in range(rows):
        for shift in range(lift_size):
            bits = 0
            for c in range(cols):
                for e in _exps(base[r][c]):
                    bits |= 1 << (c * lift_size + (shift + e) % lift_size)
            out.append(bits)
    return BitMatrix(cols * lift_size, tuple(out))


def lifted_product(base_a: Base, base_b: Base, lift_size: int, name: str | None = None) -> StabilizerCode:
    """Lifted-product code LP(A, B).

    HX = [A (x) I_nB | I_mA (x) B*] and HZ = [I_nA (x) B | A* (x) I_mB],
    where ``*`` is the ring conjugate transpose. HX HZ^T = A B* + A B* = 0.
    """
    if not isinstance(lift_size, int) or lift_size < 1:
        raise InvalidArgumentError(f"lift size must be a positive integer, got {lift_size!r}")
    ma, na = _check_base(base_a, lift_size, "A")
    mb, nb = _check_base(base_b, lift_size, "B")
    a_star = conjugate(base_a, lift_size)
    b_star = conjugate(base_b, lift_size)
    hx = _hstack(_kron(base_a, _identity(nb), lift_size), _kron(_identity(ma), b_star, lift_size))
    hz = _hstack(_kron(_identity(na), base_b, lift_size), _kron(a_star, _identity(mb), lift_size))
    return css_code_from_checks(expand(hx, lift_size), expand(hz, lift_size), name=name)
