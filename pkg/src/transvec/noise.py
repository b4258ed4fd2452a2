"""Pauli-frame Monte Carlo of Clifford circuits under depolarizing noise.

Each shot carries an X frame and a Z frame (one bit per qubit). Shots are
simulated together as boolean arrays of shape ``(shots, n)``. After the
circuit, an ideal syndrome is read off the frame, a decoder proposes a
correction and the shot fails when the residual flips a logical Z
measurement, i.e. anticommutes with some Z-bar.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate, quarter_turns
from .code import StabilizerCode
from .decoder import DecoderConfig, make_decoder, symplectic_check_matrix
from .errors import InternalInvariantError, InvalidArgumentError, UnsupportedCircuitError

BATCH_SIZE = 4096
WILSON_Z = 1.959963984540054
EXTRAPOLATION_SPAN = 10.0
CSV_HEADER = ("p", "shots", "failures", "rate", "ci_lo", "ci_hi", "seed")


@dataclass(frozen=True)
class NoiseModel:
    p: float
    idle_noise: bool = True
    cnot_noise: bool = True
    single_qubit_gate_noise: bool = False

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0) or math.isnan(self.p):
            raise InvalidArgumentError(f"p must lie in [0, 1], got {self.p}")


def wilson_interval(failures: int, shots: int, z: float = WILSON_Z) -> tuple[float, float]:
    if shots <= 0:
        raise InvalidArgumentError("shots must be positive")
    phat = failures / shots
    denom = 1 + z * z / shots
    centre = (phat + z * z / (2 * shots)) / denom
    half = z * math.sqrt(phat * (1 - phat) / shots + z * z / (4 * shots * shots)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class SimResult:
    p: float
    shots: int
    failures: int
    seed: int
    config: dict = field(default_factory=dict, compare=False)

    @property
    def rate(self) -> float:
        return self.failures / self.shots

    @property
    def wilson_ci(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.shots)

    def csv_row(self) -> list[str]:
        lo, hi = self.wilson_ci
        return [_g6(self.p), str(self.shots), str(self.failures), _g6(self.rate), _g6(lo), _g6(hi), str(self.seed)]


def _g6(x: float) -> str:
    return f"{x:.6g}"


# frame compilation ------------------------------------------------------------

@dataclass(frozen=True)
class _Layer:
    gates: tuple[Gate, ...]
    cnots: tuple[tuple[int, int], ...]
    singles: tuple[int, ...]
    idle: tuple[int, ...]


def _compile(circuit: Circuit) -> list[_Layer]:
    out = []
    for layer in circuit.layers():
        busy = set()
        cnots, singles = [], []
        for g in layer:
            if g.kind == "RZ" and quarter_turns(g.angle) is None:
                raise UnsupportedCircuitError(
                    f"Pauli-frame simulation needs Clifford gates; got {g.to_text()}"
                )
            busy.update(g.qubits)
            if g.kind == "CNOT":
                cnots.append(g.qubits)
            else:
                singles.append(g.qubits[0])
        idle = tuple(q for q in range(circuit.n) if q not in busy)
        out.append(_Layer(tuple(layer), tuple(cnots), tuple(singles), idle))
    return out


def apply_gate_to_frame(gate: Gate, fx: np.ndarray, fz: np.ndarray) -> None:
    """In-place conjugation of Pauli frames (phases dropped) by one gate.

    Works on a single frame (1-D arrays) or a batch (shots along axis 0).
    """
    q = gate.qubits
    if gate.kind == "H":
        a = q[0]
        fx[..., a], fz[..., a] = fz[..., a].copy(), fx[..., a].copy()
    elif gate.kind == "HY":
        fx[..., q[0]] ^= fz[..., q[0]]
    elif gate.kind == "P":
        fz[..., q[0]] ^= fx[..., q[0]]
    elif gate.kind == "RZ":
        turns = quarter_turns(gate.angle)
        if turns is None:
            raise UnsupportedCircuitError(f"non-Clifford gate {gate.to_text()}")
        if turns & 1:
            fz[..., q[0]] ^= fx[..., q[0]]
    elif gate.kind == "CNOT":
        c, t = q
        fx[..., t] ^= fx[..., c]
        fz[..., c] ^= fz[..., t]
    else:  # pragma: no cover - Gate validates kinds
        raise InternalInvariantError(f"unknown gate kind {gate.kind}")


def propagate_frame(circuit: Circuit, fx: np.ndarray, fz: np.ndarray, start: int = 0) -> None:
    """Push frames through ``circuit.gates[start:]`` in place."""
    for g in circuit.gates[start:]:
        apply_gate_to_frame(g, fx, fz)


def _depolarize_1q(rng, fx, fz, qubits: Sequence[int], p: float) -> None:
    if not qubits or p == 0:
        return
    cols = list(qubits)
    shots = fx.shape[0]
    hit = rng.random((shots, len(cols))) < p
    letter = rng.integers(1, 4, size=(shots, len(cols)))
    fx[:, cols] ^= hit & ((letter & 1) == 1)
    fz[:, cols] ^= hit & ((letter >> 1) == 1)


def _depolarize_2q(rng, fx, fz, pairs: Sequence[tuple[int, int]], p: float) -> None:
    if not pairs or p == 0:
        return
    a = [c for c, _ in pairs]
    b = [t for _, t in pairs]
    shots = fx.shape[0]
    hit = rng.random((shots, len(pairs))) < p
    r = rng.integers(1, 16, size=(shots, len(pairs)))
    fx[:, a] ^= hit & ((r & 1) == 1)
    fz[:, a] ^= hit & (((r >> 1) & 1) == 1)
    fx[:, b] ^= hit & (((r >> 2) & 1) == 1)
    fz[:, b] ^= hit & (((r >> 3) & 1) == 1)


def sample_frames(layers: list[_Layer], n: int, noise: NoiseModel, shots: int, rng) -> tuple[np.ndarray, np.ndarray]:
    fx = np.zeros((shots, n), dtype=bool)
    fz = np.zeros((shots, n), dtype=bool)
    for layer in layers:
        for g in layer.gates:
            apply_gate_to_frame(g, fx, fz)
        if noise.cnot_noise:
            _depolarize_2q(rng, fx, fz, layer.cnots, noise.p)
        if noise.single_qubit_gate_noise:
            _depolarize_1q(rng, fx, fz, layer.singles, noise.p)
        if noise.idle_noise:
            _depolarize_1q(rng, fx, fz, layer.idle, noise.p)
    return fx, fz


# failure accounting -----------------------------------------------------------

def _bits(value: int, n: int) -> np.ndarray:
    return np.array([(value >> j) & 1 for j in range(n)], dtype=np.uint8)


def logical_x_flips(code: StabilizerCode, rx: np.ndarray, rz: np.ndarray) -> np.ndarray:
    """(shots, k) bool: residual anticommutes with Z-bar_i."""
    n = code.n
    zx = np.array([_bits(l.x, n) for l in code.logical_z], dtype=np.uint8).reshape(-1, n)
    zz = np.array([_bits(l.z, n) for l in code.logical_z], dtype=np.uint8).reshape(-1, n)
    return ((rx.astype(np.uint8) @ zz.T + rz.astype(np.uint8) @ zx.T) & 1).astype(bool)


def frame_syndromes(code: StabilizerCode, fx: np.ndarray, fz: np.ndarray, h: np.ndarray | None = None) -> np.ndarray:
    h = symplectic_check_matrix(code) if h is None else h
    e = np.concatenate([fx, fz], axis=1).astype(np.uint8)
    return ((e @ h.T.astype(np.int64)) & 1).astype(np.uint8)


def evaluate_frames(code, decoder, fx, fz, target: int | None = None, h=None) -> np.ndarray:
    """Decode end-of-circuit frames; True where the shot is a logical failure."""
    h = symplectic_check_matrix(code) if h is None else h
    cx, cz = decoder.decode_batch(frame_syndromes(code, fx, fz, h))
    rx, rz = fx ^ cx, fz ^ cz
    if frame_syndromes(code, rx, rz, h).any():
        raise InternalInvariantError("residual after correction has a nonzero syndrome")
    flips = logical_x_flips(code, rx, rz)
    return flips.any(axis=1) if target is None else flips[:, target]


def _scope_index(code: StabilizerCode, failure_scope) -> int | None:
    if failure_scope == "any_logical":
        return None
    if isinstance(failure_scope, (int, np.integer)) and not isinstance(failure_scope, bool):
        if not 0 <= failure_scope < code.k:
            raise InvalidArgumentError(f"target logical {failure_scope} outside 0..{code.k - 1}")
        return int(failure_scope)
    raise InvalidArgumentError(f"failure_scope must be 'any_logical' or a logical index, got {failure_scope!r}")


def run_monte_carlo(
    code: StabilizerCode,
    circuit: Circuit,
    noise: NoiseModel,
    shots: int,
    seed: int,
    failure_scope: str | int = "any_logical",
    decoder: DecoderConfig | None = None,
    *,
    stream: int = 0,
    _decoder_instance=None,
) -> SimResult:
    """Sample ``shots`` noisy runs and count logical X failures.

    Args:
        failure_scope: "any_logical", or a 0-based logical index to count only
            flips of that logical qubit.
        decoder: decoder settings; lookup by default. A BP-OSD config whose
            prior is None uses ``noise.p``.
        stream: extra key mixed into the seed (the sweep passes the p index).
    """
    if shots <= 0:
        raise InvalidArgumentError("shots must be positive")
    if code.n != circuit.n:
        raise InvalidArgumentError(f"code has {code.n} qubits but circuit has {circuit.n}")
    target = _scope_index(code, failure_scope)
    layers = _compile(circuit)
    cfg = decoder or DecoderConfig()
    if cfg.kind == "bp_osd" and cfg.prior_p is None and 0 < noise.p < 1:
        cfg = replace(cfg, prior_p=noise.p)
    dec = _decoder_instance or make_decoder(code, cfg)
    h = symplectic_check_matrix(code)
    failures = 0
    for batch, start in enumerate(range(0, shots, BATCH_SIZE)):
        size = min(BATCH_SIZE, shots - start)
        rng = np.random.default_rng(np.random.SeedSequence([seed, stream, batch]))
        fx, fz = sample_frames(layers, code.n, noise, size, rng)
        failures += int(evaluate_frames(code, dec, fx, fz, target, h).sum())
    config = {"noise": asdict(noise), "decoder": asdict(cfg), "failure_scope": failure_scope, "stream": stream}
    return SimResult(noise.p, shots, failures, seed, config)


def sweep(
    code: StabilizerCode,
    circuit: Circuit,
    p_list: Sequence[float],
    shots: int,
    seed: int,
    failure_scope: str | int = "any_logical",
    decoder: DecoderConfig | None = None,
    **noise_flags,
) -> list[SimResult]:
    """One SimResult per p; the lookup table is built once and shared."""
    if shots <= 0:
        raise InvalidArgumentError("shots must be positive")
    results = []
    shared = None
    if decoder is None or decoder.kind == "lookup":
        shared = make_decoder(code, decoder or DecoderConfig())
    for i, p in enumerate(p_list):
        noise = NoiseModel(float(p), **noise_flags)
        cfg = decoder
        if cfg is not None and cfg.kind == "bp_osd" and cfg.prior_p is None and 0 < noise.p < 1:
            cfg = replace(cfg, prior_p=noise.p)
        results.append(
            run_monte_carlo(code, circuit, noise, shots, seed, failure_scope, cfg, stream=i, _decoder_instance=shared)
        )
    return results


def format_csv(results: Sequence[SimResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in results:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def write_csv(results: Sequence[SimResult], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(format_csv(results))


def read_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        {k: (int(v) if k in ("shots", "failures", "seed") else float(v)) for k, v in row.items()}
        for row in rows
    ]


# reference line and crossing ---------------------------------------------------

def reference_rate(p: float) -> float:
    """Unencoded single-qubit reference line: one fault location, failure rate p."""
    return p


def unencoded_reference_circuit() -> Circuit:
    """One physical qubit with a single Phase gate (the Clifford-angle kernel)."""
    from .circuit import PHASE

    return Circuit(1, (PHASE(0),))


def pseudothreshold(ps: Sequence[float], rates: Sequence[float]) -> float | None:
    """Physical p where the rate curve meets the line rate = p.

    A sign change of ``log(rate/p)`` between neighbours is interpolated
    linearly in log-log. Without a sign change a power law ``a p^b`` is fit
    to the nonzero points and solved for ``a p^b = p``, accepted only within
    a decade of the sampled range. Returns None otherwise.
    """
    pts = [(float(p), float(r)) for p, r in zip(ps, rates) if p > 0 and r > 0]
    pts.sort()
    if not pts:
        return None
    lp = np.log([p for p, _ in pts])
    lr = np.log([r for _, r in pts])
    gap = lr - lp
    for i in range(len(pts) - 1):
        if gap[i] == 0:
            return pts[i][0]
        if gap[i] * gap[i + 1] < 0:
            t = gap[i] / (gap[i] - gap[i + 1])
            return float(np.exp(lp[i] + t * (lp[i + 1] - lp[i])))
    if gap[-1] == 0:
        return pts[-1][0]
    if len(pts) < 2:
        return None
    b, loga = np.polyfit(lp, lr, 1)
    if abs(b - 1) < 1e-9:
        return None
    crossing = float(np.exp(loga / (1 - b)))
    # extrapolating more than a decade past the data is not an estimate
    if not pts[0][0] / EXTRAPOLATION_SPAN <= crossing <= pts[-1][0] * EXTRAPOLATION_SPAN:
        return None
    return crossing
