"""Syndrome decoders: exact lookup and min-sum BP with OSD-0 fallback.

Both decoders see a stabilizer code through its symplectic parity-check
matrix. Error variables are the 2n bits ``[e_x | e_z]`` and check ``i`` is
``<e, S_i>_s``, so non-CSS codes need no special treatment. Correlations
between the X and Z bit of a depolarizing fault are ignored.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .code import StabilizerCode, syndrome
from .errors import CapacityError, InternalInvariantError, InvalidArgumentError
from .f2 import BitVec
from .pauli import PhasedPauli

LOOKUP_LIMIT = 22
DEFAULT_PRIOR = 0.01


@dataclass(frozen=True)
class DecoderConfig:
    kind: str = "lookup"
    bp_max_iters: int = 30
    min_sum_scale: float = 0.75
    prior_p: float | None = None  # None: follow the simulated p (0.01 standalone)
    osd_order: int = 0

    def __post_init__(self):
        if self.kind not in ("lookup", "bp_osd"):
            raise InvalidArgumentError(f"unknown decoder kind {self.kind!r}")
        if self.prior_p is not None and not 0 < self.prior_p < 1:
            raise InvalidArgumentError("prior_p must lie strictly between 0 and 1")
        if self.bp_max_iters < 1:
            raise InvalidArgumentError("bp_max_iters must be at least 1")
        if self.osd_order != 0:
            raise InvalidArgumentError("only OSD order 0 is supported")


def symplectic_check_matrix(code: StabilizerCode) -> np.ndarray:
    """(n-k) x 2n uint8 matrix H with H [e_x|e_z]^T = syndrome."""
    n = code.n
    h = np.zeros((code.num_stabilizers, 2 * n), dtype=np.uint8)
    for i, s in enumerate(code.stabilizers):
        for j in range(n):
            h[i, j] = (s.z >> j) & 1
            h[i, n + j] = (s.x >> j) & 1
    return h


def _syndrome_int(code: StabilizerCode, syn) -> int:
    if isinstance(syn, BitVec):
        if syn.length != code.num_stabilizers:
            raise InvalidArgumentError(f"syndrome length {syn.length} != {code.num_stabilizers}")
        return syn.bits
    value = int(syn)
    if value < 0 or value >> code.num_stabilizers:
        raise InvalidArgumentError("syndrome out of range")
    return value


def _lex_key(p: PhasedPauli) -> str:
    n = p.n
    return "".join(str((p.x >> j) & 1) for j in range(n)) + "".join(str((p.z >> j) & 1) for j in range(n))


def build_lookup(code: StabilizerCode, max_weight: int | None = None) -> list[PhasedPauli]:
    """Minimum-weight error for every syndrome, indexed by the syndrome as an int.

    Errors are enumerated weight by weight; within a weight the
    lexicographically smallest ``[x|z]`` wins.
    """
    m = code.num_stabilizers
    if m > LOOKUP_LIMIT:
        raise CapacityError(f"lookup table needs n-k <= {LOOKUP_LIMIT}, got {m}")
    n = code.n
    size = 1 << m
    table: list[PhasedPauli | None] = [None] * size
    table[0] = PhasedPauli.identity(n)
    filled = 1
    cap = n if max_weight is None else max_weight
    weight = 0
    while filled < size and weight < cap:
        weight += 1
        best: dict[int, tuple[str, PhasedPauli]] = {}
        for positions in itertools.combinations(range(n), weight):
            for letters in itertools.product((1, 2, 3), repeat=weight):
                x = z = 0
                for q, c in zip(positions, letters):
                    x |= (c & 1) << q
                    z |= (c >> 1) << q
                e = PhasedPauli(n, x, z)
                s = syndrome(code, e).bits
                if table[s] is not None:
                    continue
                key = _lex_key(e)
                if s not in best or key < best[s][0]:
                    best[s] = (key, e)
        for s, (_, e) in best.items():
            table[s] = e
            filled += 1
    if filled < size:
        raise CapacityError(f"{size - filled} syndromes unreachable within weight {cap}")
    return table  # type: ignore[return-value]


class LookupDecoder:
    def __init__(self, code: StabilizerCode, table: list[PhasedPauli] | None = None):
        self.code = code
        self.table = table if table is not None else build_lookup(code)
        n = code.n
        self._tx = np.array([[(e.x >> j) & 1 for j in range(n)] for e in self.table], dtype=bool)
        self._tz = np.array([[(e.z >> j) & 1 for j in range(n)] for e in self.table], dtype=bool)

    def decode(self, syn) -> PhasedPauli:
        return self.table[_syndrome_int(self.code, syn)]

    def decode_batch(self, syndromes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Rows of syndrome bits (shots x (n-k)) to correction X and Z bit arrays."""
        weights = 1 << np.arange(syndromes.shape[1], dtype=np.int64)
        idx = syndromes.astype(np.int64) @ weights
        return self._tx[idx], self._tz[idx]


class BpOsdDecoder:
    """Scaled min-sum belief propagation; OSD-0 on the posterior when BP fails."""

    def __init__(self, code: StabilizerCode, config: DecoderConfig | None = None):
        self.code = code
        self.config = config or DecoderConfig(kind="bp_osd")
        self.h = symplectic_check_matrix(code)
        m, nv = self.h.shape
        self.num_checks, self.num_vars = m, nv
        checks, variables = np.nonzero(self.h)  # row-major: sorted by check
        self._edge_check = checks
        self._edge_var = variables
        self._check_start = np.searchsorted(checks, np.arange(m))
        if m and np.any(np.diff(np.append(self._check_start, len(checks))) == 0):
            raise InvalidArgumentError("a stabilizer row has no support")
        prior = self.config.prior_p if self.config.prior_p is not None else DEFAULT_PRIOR
        q = 2.0 * prior / 3.0
        self.channel_llr = np.full(nv, np.log((1 - q) / q))
        # columns packed as ints over the check index, for OSD elimination
        self._columns = [
            sum(1 << int(c) for c in np.nonzero(self.h[:, j])[0]) for j in range(nv)
        ]
        self._rank = int(np.linalg.matrix_rank(self.h.astype(float))) if m else 0
        self._cache: dict[bytes, tuple[np.ndarray, np.ndarray]] = {}

    # BP ---------------------------------------------------------------------

    def bp(self, syn: np.ndarray, iterations: int | None = None):
        """Run min-sum; returns (hard decision, posterior LLRs, converged)."""
        syn = np.asarray(syn, dtype=np.uint8)
        iters = iterations or self.config.bp_max_iters
        ec, ev = self._edge_check, self._edge_var
        starts = self._check_start
        alpha = self.config.min_sum_scale
        llr = self.channel_llr
        check_sign = np.where(syn[ec] == 1, -1.0, 1.0)
        v2c = llr[ev].copy()
        posterior = llr.copy()
        hard = np.zeros(self.num_vars, dtype=np.uint8)
        for _ in range(iters):
            mag = np.abs(v2c)
            neg = (v2c < 0).astype(np.int64)
            neg_count = np.add.reduceat(neg, starts)
            min1 = np.minimum.reduceat(mag, starts)
            is_min = mag == min1[ec]
            # second minimum: mask the first occurrence of the minimum per check
            first = np.zeros(len(ec), dtype=bool)
            hit = np.flatnonzero(is_min)
            _, pos = np.unique(ec[hit], return_index=True)
            first[hit[pos]] = True
            masked = np.where(first, np.inf, mag)
            min2 = np.minimum.reduceat(masked, starts)
            other_min = np.where(first, min2[ec], min1[ec])
            other_neg = (neg_count[ec] - neg) & 1
            c2v = alpha * check_sign * np.where(other_neg == 1, -1.0, 1.0) * other_min
            total = np.bincount(ev, weights=c2v, minlength=self.num_vars)
            posterior = llr + total
            hard = (posterior < 0).astype(np.uint8)
            if np.array_equal((self.h @ hard) & 1, syn):
                return hard, posterior, True
            v2c = posterior[ev] - c2v
        return hard, posterior, False

    def osd0(self, syn: np.ndarray, posterior: np.ndarray) -> np.ndarray:
        """Solve on the most reliable information set (most likely flips first)."""
        order = np.argsort(posterior, kind="stable")
        basis: list[tuple[int, int, int]] = []
        for j in order:
            v, combo = self._columns[j], 1 << int(j)
            for b, pb, cb in basis:
                if (v >> pb) & 1:
                    v ^= b
                    combo ^= cb
            if v:
                basis.append((v, v.bit_length() - 1, combo))
                if len(basis) == self._rank:
                    break
        target = sum(1 << int(i) for i in np.flatnonzero(syn))
        sol = 0
        for b, pb, cb in basis:
            if (target >> pb) & 1:
                target ^= b
                sol ^= cb
        if target:
            raise InternalInvariantError("syndrome outside the check-matrix column space")
        return np.array([(sol >> j) & 1 for j in range(self.num_vars)], dtype=np.uint8)

    def decode_bits(self, syn: np.ndarray) -> np.ndarray:
        syn = np.asarray(syn, dtype=np.uint8)
        if not syn.any():
            return np.zeros(self.num_vars, dtype=np.uint8)
        hard, posterior, ok = self.bp(syn)
        return hard if ok else self.osd0(syn, posterior)

    def decode(self, syn) -> PhasedPauli:
        value = _syndrome_int(self.code, syn)
        bits = np.array([(value >> i) & 1 for i in range(self.num_checks)], dtype=np.uint8)
        e = self.decode_bits(bits)
        n = self.code.n
        x = sum(int(b) << j for j, b in enumerate(e[:n]))
        z = sum(int(b) << j for j, b in enumerate(e[n:]))
        return PhasedPauli(n, x, z)

    def decode_batch(self, syndromes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = self.code.n
        out_x = np.zeros((syndromes.shape[0], n), dtype=bool)
        out_z = np.zeros((syndromes.shape[0], n), dtype=bool)
        for row, syn in enumerate(syndromes.astype(np.uint8)):
            if not syn.any():
                continue
            key = np.packbits(syn).tobytes()
            hit = self._cache.get(key)
            if hit is None:
                e = self.decode_bits(syn).astype(bool)
                hit = (e[:n], e[n:])
                if len(self._cache) < 100_000:
                    self._cache[key] = hit
            out_x[row], out_z[row] = hit
        return out_x, out_z


def make_decoder(code: StabilizerCode, config: DecoderConfig):
    if config.kind == "lookup":
        return LookupDecoder(code)
    return BpOsdDecoder(code, config)


def decode(code: StabilizerCode, syn, config: DecoderConfig | None = None) -> PhasedPauli:
    """One-shot decode; builds the decoder every call, so reuse one for loops."""
    config = config or DecoderConfig()
    correction = make_decoder(code, config).decode(syn)
    if syndrome(code, correction).bits != _syndrome_int(code, syn):
        raise InternalInvariantError("decoder returned a correction with the wrong syndrome")
    return correction

