"""Stabilizer code container, validation, lifting and text I/O.

Code file format (UTF-8, ``#`` starts a comment)::

    code n=8 k=3 d=3 name=833
    S XXXXXXXX          # n-k stabilizer lines
    ...
    X IIIXXIXX          # k logical-X lines
    ...
    Z IZXIZIIX          # k logical-Z lines

Pauli strings use the dense or sparse grammar of :mod:`transvec.pauli`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

from .errors import InternalInvariantError, InvalidArgumentError, ParseError, ValidationError
from .f2 import BitMatrix, BitVec, RowSpaceSolver, bit_indices, mask, symplectic_form
from .pauli import PhasedPauli, format_pauli, parse_pauli, pauli_mul, product


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: tuple
    message: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.message}"


@dataclass(frozen=True)
class StabilizerCode:
    n: int
    k: int
    stabilizers: tuple[PhasedPauli, ...]
    logical_x: tuple[PhasedPauli, ...]
    logical_z: tuple[PhasedPauli, ...]
    name: str | None = None
    distance: int | None = field(default=None, compare=False)

    def __post_init__(self):
        for attr in ("stabilizers", "logical_x", "logical_z"):
            object.__setattr__(self, attr, tuple(getattr(self, attr)))

    @property
    def num_stabilizers(self) -> int:
        return len(self.stabilizers)

    @cached_property
    def stabilizer_matrix(self) -> BitMatrix:
        """Rows ``[x|z]`` of the generators, 2n columns."""
        return BitMatrix(2 * self.n, tuple(s.bits for s in self.stabilizers))

    @cached_property
    def _stabilizer_solver(self) -> RowSpaceSolver:
        return RowSpaceSolver(self.stabilizer_matrix)

    @cached_property
    def _normalizer_solver(self) -> RowSpaceSolver:
        rows = [p.bits for p in (*self.stabilizers, *self.logical_x, *self.logical_z)]
        return RowSpaceSolver(BitMatrix(2 * self.n, tuple(rows)))

    def is_css(self) -> bool:
        return all(not s.x or not s.z for s in self.stabilizers)

    def stabilizer_element(self, coefficients: int) -> PhasedPauli:
        """Product of the generators flagged in ``coefficients``, in index order."""
        return product((self.stabilizers[i] for i in bit_indices(coefficients)), self.n)

    def stabilizer_witness(self, p: PhasedPauli) -> int | None:
        """Generator combination whose product equals ``p`` exactly (phase included)."""
        coeffs = self._stabilizer_solver.solve(p.bits)
        if coeffs is None:
            return None
        return coeffs if self.stabilizer_element(coeffs) == p else None

    def in_stabilizer_span(self, p: PhasedPauli) -> bool:
        return self._stabilizer_solver.solve(p.bits) is not None

    def lift(self, logical: PhasedPauli) -> PhasedPauli:
        return lift(self, logical)

    def syndrome(self, e: PhasedPauli) -> BitVec:
        return syndrome(self, e)


def validate(code: StabilizerCode) -> list[Violation]:
    """Every structural invariant of a stabilizer code, reported as data."""
    out: list[Violation] = []
    n, k = code.n, code.k
    S, LX, LZ = code.stabilizers, code.logical_x, code.logical_z

    if not 0 <= k <= n:
        out.append(Violation("arity", (), f"k={k} outside 0..n={n}"))
    if len(S) != n - k:
        out.append(Violation("arity", (), f"{len(S)} stabilizers, expected n-k={n - k}"))
    if len(LX) != k or len(LZ) != k:
        out.append(Violation("arity", (), f"{len(LX)} logical X and {len(LZ)} logical Z, expected k={k}"))
    groups = (("S", S), ("X", LX), ("Z", LZ))
    for tag, ops in groups:
        for i, p in enumerate(ops):
            if p.n != n:
                out.append(Violation("size", (tag, i), f"{tag}{i + 1} acts on {p.n} qubits, expected {n}"))
            elif not p.is_hermitian:
                out.append(Violation("phase", (tag, i), f"{tag}{i + 1} is not Hermitian (kappa={p.kappa})"))
    if any(v.kind == "size" for v in out):
        return out

    def anti(p, q):
        return symplectic_form(p.bits, q.bits, n)

    for i in range(len(S)):
        if S[i].is_identity:
            out.append(Violation("stabilizer", (i,), f"stabilizer {i + 1} is the identity"))
        for j in range(i + 1, len(S)):
            if anti(S[i], S[j]):
                out.append(Violation("commutation", (i, j), f"stabilizers {i + 1} and {j + 1} anticommute"))
    rank = code.stabilizer_matrix.rank()
    if rank != len(S):
        out.append(Violation("rank", (), f"stabilizer rank {rank} but {len(S)} generators"))
    for tag, ops in groups[1:]:
        for i, p in enumerate(ops):
            for j, s in enumerate(S):
                if anti(p, s):
                    out.append(
                        Violation("logical-commutation", (tag, i, j), f"logical {tag}{i + 1} anticommutes with stabilizer {j + 1}")
                    )
            if code.in_stabilizer_span(p):
                out.append(Violation("trivial-logical", (tag, i), f"logical {tag}{i + 1} lies in the stabilizer group"))
    for i, px in enumerate(LX):
        for j, pz in enumerate(LZ):
            want = 1 if i == j else 0
            if anti(px, pz) != want:
                out.append(
                    Violation("pairing", (i, j), f"<X{i + 1}, Z{j + 1}>_s = {1 - want}, expected {want}")
                )
    for tag, ops in groups[1:]:
        for i in range(len(ops)):
            for j in range(i + 1, len(ops)):
                if anti(ops[i], ops[j]):
                    out.append(Violation("logical-commutation", (tag, i, j), f"logical {tag}{i + 1} and {tag}{j + 1} anticommute"))
    return out


def check_valid(code: StabilizerCode) -> StabilizerCode:
    violations = validate(code)
    if violations:
        lines = "; ".join(str(v) for v in violations)
        raise ValidationError(f"invalid stabilizer code: {lines}", violations)
    return code


_TABLE_833 = {
    "S": [
        "X1 X2 X3 X4 X5 X6 X7 X8",
        "Z1 Z2 Z3 Z4 Z5 Z6 Z7 Z8",
        "Z3 Y4 X5 Z6 Y7 X8",
        "Z2 X3 X5 Y6 Z7 Y8",
        "X2 Z4 Z5 X6 Y7 Y8",
    ],
    "X": ["X4 X5 X7 X8", "X3 Z4 Z5 X6", "Z1 Z2 X6 X7"],
    "Z": ["Z2 X3 Z5 X8", "Z1 Z5 Z6 Z7", "Z1 Z2 Z4 Z7"],
}


def builtin_833() -> StabilizerCode:
    """The non-CSS [[8,3,3]] code with its published generator table."""
    parse = lambda s: parse_pauli(s, 8)  # noqa: E731
    return StabilizerCode(
        n=8,
        k=3,
        stabilizers=tuple(map(parse, _TABLE_833["S"])),
        logical_x=tuple(map(parse, _TABLE_833["X"])),
        logical_z=tuple(map(parse, _TABLE_833["Z"])),
        name="833",
        distance=3,
    )


BUILTINS = {"833": builtin_833}


def trivial_code(n: int = 1) -> StabilizerCode:
    """n bare qubits, no stabilizers. Used as the unencoded reference."""
    return StabilizerCode(
        n=n,
        k=n,
        stabilizers=(),
        logical_x=tuple(PhasedPauli.single(n, q, "X") for q in range(n)),
        logical_z=tuple(PhasedPauli.single(n, q, "Z") for q in range(n)),
        name=f"bare{n}",
        distance=1,
    )


def lift(code: StabilizerCode, logical: PhasedPauli) -> PhasedPauli:
    """Physical representative of a k-qubit logical Pauli.

    ``i**kappa E(a, b)`` becomes ``i**(kappa + a.b)`` times the ordered product
    of X-bar_j for j in a (ascending) and then Z-bar_j for j in b (ascending).
    """
    if logical.n != code.k:
        raise InvalidArgumentError(f"logical acts on {logical.n} qubits, code has k={code.k}")
    factors = [code.logical_x[j] for j in bit_indices(logical.x)]
    factors += [code.logical_z[j] for j in bit_indices(logical.z)]
    phase = logical.kappa + (logical.x & logical.z).bit_count()
    return product(factors, code.n).times_i(phase)


def syndrome(code: StabilizerCode, e: PhasedPauli) -> BitVec:
    """Bit i is the symplectic product of ``e`` with stabilizer i."""
    if e.n != code.n:
        raise InvalidArgumentError(f"error acts on {e.n} qubits, code has n={code.n}")
    bits = 0
    for i, s in enumerate(code.stabilizers):
        if symplectic_form(e.bits, s.bits, code.n):
            bits |= 1 << i
    return BitVec(len(code.stabilizers), bits)


@dataclass(frozen=True)
class LogicalEffect:
    kind: str  # "trivial" | "logical" | "detectable"
    logical: PhasedPauli | None = None
    syndrome: BitVec | None = None

    @property
    def has_x_component(self) -> bool:
        return self.logical is not None and self.logical.x != 0

    def x_component_on(self, qubit: int) -> bool:
        return self.logical is not None and bool((self.logical.x >> qubit) & 1)


def logical_effect(code: StabilizerCode, e: PhasedPauli) -> LogicalEffect:
    """Classify ``e``: detectable, a pure stabilizer product, or a logical class."""
    s = syndrome(code, e)
    if s.bits:
        return LogicalEffect("detectable", syndrome=s)
    coeffs = code._normalizer_solver.solve(e.bits)
    if coeffs is None:
        raise InternalInvariantError("zero-syndrome Pauli outside span of stabilizers and logicals")
    r = code.num_stabilizers
    lx = (coeffs >> r) & mask(code.k)
    lz = (coeffs >> (r + code.k)) & mask(code.k)
    if not (lx or lz):
        return LogicalEffect("trivial", syndrome=s)
    return LogicalEffect("logical", logical=PhasedPauli(code.k, lx, lz), syndrome=s)


# file I/O -------------------------------------------------------------------


def format_code(code: StabilizerCode, dense: bool | None = None) -> str:
    if dense is None:
        dense = code.n <= 32
    header = f"code n={code.n} k={code.k}"
    if code.distance is not None:
        header += f" d={code.distance}"
    if code.name:
        header += f" name={code.name}"
    lines = [header]
    for tag, ops in (("S", code.stabilizers), ("X", code.logical_x), ("Z", code.logical_z)):
        lines += [f"{tag} {format_pauli(p, dense=dense)}" for p in ops]
    return "\n".join(lines) + "\n"


def parse_code(text: str, *, check: bool = True) -> StabilizerCode:
    header = None
    entries: dict[str, list[PhasedPauli]] = {"S": [], "X": [], "Z": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            header = _parse_header(line, lineno)
            continue
        tag, _, rest = line.partition(" ")
        if tag not in entries:
            raise ParseError(f"unknown line tag {tag!r} (expected S, X or Z)", line=lineno)
        try:
            entries[tag].append(parse_pauli(rest.strip(), header["n"]))
        except ParseError as exc:
            raise ParseError(str(exc), line=lineno) from None
    if header is None:
        raise ParseError("missing 'code n=<n> k=<k>' header")
    n, k = header["n"], header["k"]
    counts = {"S": n - k, "X": k, "Z": k}
    for tag, want in counts.items():
        if len(entries[tag]) != want:
            raise ParseError(f"arity error: {len(entries[tag])} '{tag}' lines, expected {want}")
    code = StabilizerCode(
        n=n,
        k=k,
        stabilizers=tuple(entries["S"]),
        logical_x=tuple(entries["X"]),
        logical_z=tuple(entries["Z"]),
        name=header.get("name"),
        distance=header.get("d"),
    )
    return check_valid(code) if check else code


def _parse_header(line: str, lineno: int) -> dict:
    parts = line.split()
    if parts[0] != "code":
        raise ParseError("first line must start with 'code'", line=lineno)
    out: dict = {}
    for part in parts[1:]:
        key, eq, value = part.partition("=")
        if not eq:
            raise ParseError(f"expected key=value, got {part!r}", line=lineno)
        if key in ("n", "k", "d"):
            try:
                out[key] = int(value)
            except ValueError:
                raise ParseError(f"{key} must be an integer", line=lineno) from None
        elif key == "name":
            out[key] = value
        else:
            raise ParseError(f"unknown header key {key!r}", line=lineno)
    if "n" not in out or "k" not in out:
        raise ParseError("header needs n= and k=", line=lineno)
    if not 0 <= out["k"] <= out["n"]:
        raise ParseError(f"k={out['k']} outside 0..n", line=lineno)
    return out


def load_code(path, *, check: bool = True) -> StabilizerCode:
    return parse_code(Path(path).read_text(encoding="utf-8"), check=check)


def save_code(code: StabilizerCode, path) -> None:
    Path(path).write_text(format_code(code), encoding="utf-8")


# CSS construction -------------------------------------------------------------


def css_code_from_checks(hx: BitMatrix, hz: BitMatrix, name: str | None = None) -> StabilizerCode:
    """CSS code from X- and Z-check matrices (rows may be redundant).

    Logical X operators come from ker(hz) modulo rowspace(hx), logical Z from
    ker(hx) modulo rowspace(hz); the Z set is then re-paired so that
    <X_i, Z_j>_s = delta_ij.
    """
    if hx.ncols != hz.ncols:
        raise InvalidArgumentError("hx and hz must have the same number of columns")
    n = hx.ncols
    if any((a & b).bit_count() & 1 for a in hx.rows for b in hz.rows):
        raise ValidationError("X and Z checks do not commute")
    hx_b = hx.row_basis()
    hz_b = hz.row_basis()
    lx = _quotient_basis(hz.nullspace(), hx_b)
    lz = _quotient_basis(hx.nullspace(), hz_b)
    if len(lx) != len(lz):
        raise InternalInvariantError("logical X and Z counts differ")
    k = len(lx)
    lz = _pair(lx, lz, n)
    stabs = [PhasedPauli(n, r, 0) for r in hx_b.rows] + [PhasedPauli(n, 0, r) for r in hz_b.rows]
    code = StabilizerCode(
        n=n,
        k=k,
        stabilizers=tuple(stabs),
        logical_x=tuple(PhasedPauli(n, v, 0) for v in lx),
        logical_z=tuple(PhasedPauli(n, 0, v) for v in lz),
        name=name,
    )
    return check_valid(code)


def _quotient_basis(kernel: BitMatrix, span: BitMatrix) -> list[int]:
    """Kernel vectors independent modulo ``span`` (greedy, in kernel order)."""
    modulo = RowSpaceSolver(span)
    echelon: list[tuple[int, int]] = []
    chosen = []
    for v in kernel.rows:
        r = modulo.reduce(v)
        for b, pc in echelon:
            if (r >> pc) & 1:
                r ^= b
        if r:
            echelon.append((r, r.bit_length() - 1))
            chosen.append(v)
    return chosen


def _pair(lx: Sequence[int], lz: Sequence[int], n: int) -> list[int]:
    k = len(lx)
    if k == 0:
        return []
    # M[i][j] = <lx_i, lz_j>; want lz' = A lz with M A^T = I, i.e. A = (M^-1)^T
    m_rows = [sum((((lx[i] & lz[j]).bit_count() & 1) << j) for j in range(k)) for i in range(k)]
    inv = _invert(m_rows, k)
    inv_t = BitMatrix(k, tuple(inv)).transpose().rows
    out = []
    for i in range(k):
        acc = 0
        for j in bit_indices(inv_t[i]):
            acc ^= lz[j]
        out.append(acc)
    return out


def _invert(rows: list[int], k: int) -> list[int]:
    aug = [r | (1 << (k + i)) for i, r in enumerate(rows)]
    for col in range(k):
        pivot = next((i for i in range(col, k) if (aug[i] >> col) & 1), None)
        if pivot is None:
            raise InternalInvariantError("logical pairing matrix is singular")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        for i in range(k):
            if i != col and (aug[i] >> col) & 1:
                aug[i] ^= aug[col]
    return [r >> k for r in aug]


def load_check_matrix(path) -> BitMatrix:
    """Sparse check-matrix text: header ``checks rows=<m> cols=<n>``, then one
    line per row listing the 0-based column indices of its ones. Comment
    lines are skipped; a blank line is an all-zero row."""
    header = None
    rows: list[int] = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if raw.lstrip().startswith("#"):
            continue
        line = raw.split("#", 1)[0].strip()
        if header is None:
            if not line:
                continue
            parts = line.split()
            if parts[0] != "checks":
                raise ParseError("first line must be 'checks rows=<m> cols=<n>'", line=lineno)
            try:
                header = {k: int(v) for k, v in (p.split("=") for p in parts[1:])}
                header["rows"], header["cols"]
            except (ValueError, KeyError):
                raise ParseError("bad checks header", line=lineno) from None
            continue
        if len(rows) == header["rows"]:
            if line:
                raise ParseError("more rows than declared", line=lineno)
            continue
        value = 0
        for tok in line.split():
            try:
                c = int(tok)
            except ValueError:
                raise ParseError(f"bad column index {tok!r}", line=lineno) from None
            if not 0 <= c < header["cols"]:
                raise ParseError(f"column {c} out of range", line=lineno)
            value ^= 1 << c
        rows.append(value)
    if header is None:
        raise ParseError("empty check-matrix file")
    if len(rows) != header["rows"]:
        raise ParseError(f"{len(rows)} rows, header declares {header['rows']}")
    return BitMatrix(header["cols"], tuple(rows))


def save_check_matrix(matrix: BitMatrix, path) -> None:
    lines = [f"checks rows={matrix.nrows} cols={matrix.ncols}"]
    lines += [" ".join(map(str, bit_indices(r))) for r in matrix.rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
