"""Command-line front end.

Exit codes: 0 ok, 2 parse/config error, 3 validation failure, 4 capacity
exceeded, 5 internal invariant broken.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from typing import Sequence

import numpy as np

from . import oracle
from .circuit import reduce_weight, synthesize_trotter
from .code import BUILTINS, StabilizerCode, css_code_from_checks, format_code, lift, load_check_matrix, load_code, validate
from .decoder import DecoderConfig
from .errors import InternalInvariantError, InvalidArgumentError, TransvecError
from .noise import format_csv, pseudothreshold, sweep
from .pauli import PhasedPauli, commutes, format_pauli, parse_pauli
from .propagate import conjugate_circuit, verify_logical_action, verify_stabilizer_centralization

EXIT_OK, EXIT_CONFIG, EXIT_VALIDATION, EXIT_CAPACITY, EXIT_INTERNAL = 0, 2, 3, 4, 5

_ANGLE_RE = re.compile(r"^([+-]?)(\d+(?:\.\d*)?|\.\d+)?\*?pi(?:/(\d+))?$")


def parse_angle(text: str) -> float:
    """Radians from ``0.7``, ``pi/2``, ``-pi/4``, ``3pi/4`` or ``2*pi``.

    ``pi/2`` maps to exactly ``math.pi / 2`` so Clifford detection is exact.
    """
    s = text.strip().replace(" ", "").lower()
    m = _ANGLE_RE.match(s)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        coeff = float(m.group(2)) if m.group(2) else 1.0
        den = int(m.group(3)) if m.group(3) else 1
        if den == 0:
            raise InvalidArgumentError(f"bad angle {text!r}")
        return sign * coeff * math.pi / den
    try:
        value = float(s)
    except ValueError:
        raise InvalidArgumentError(f"bad angle {text!r}") from None
    if not math.isfinite(value):
        raise InvalidArgumentError("theta must be finite")
    return value


def parse_p_list(text: str) -> list[float]:
    """``1e-3,2e-3``, ``lo:hi:N`` (linear) or ``lo:hi:logN`` (log-spaced)."""
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            lo, hi, spec = text.split(":")
            lo_f, hi_f = float(lo), float(hi)
            if spec.startswith("log"):
                num = int(spec[3:])
                if lo_f <= 0 or hi_f <= 0:
                    raise InvalidArgumentError("log-spaced p range needs positive ends")
                values = np.geomspace(lo_f, hi_f, num)
            else:
                values = np.linspace(lo_f, hi_f, int(spec))
            out = [float(v) for v in values]
        else:
            out = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise InvalidArgumentError(f"bad p list {text!r}") from None
    for p in out:
        if not 0 <= p <= 1:
            raise InvalidArgumentError(f"p={p} outside [0, 1]")
    return out


def _load(args, *, check: bool = True) -> StabilizerCode:
    if args.hx or args.hz:
        if not (args.hx and args.hz):
            raise InvalidArgumentError("--hx and --hz must be given together")
        return css_code_from_checks(load_check_matrix(args.hx), load_check_matrix(args.hz), name="css")
    if args.code:
        return load_code(args.code, check=check)
    name = args.builtin or "833"
    if name not in BUILTINS:
        raise InvalidArgumentError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    return BUILTINS[name]()


def _logical(args, code: StabilizerCode) -> PhasedPauli:
    if not args.logical:
        raise InvalidArgumentError("--logical is required")
    return parse_pauli(args.logical, code.k)


def _physical(args, code: StabilizerCode) -> PhasedPauli:
    phys = lift(code, _logical(args, code))
    if getattr(args, "reduce", None):
        phys = reduce_weight(phys, code, args.reduce)
    return phys


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# subcommands -------------------------------------------------------------------


def cmd_code(args) -> int:
    code = _load(args, check=False)
    violations = validate(code)
    if args.action == "info":
        d = code.distance if code.distance is not None else "?"
        print(f"[[{code.n},{code.k},{d}]]" + (f" {code.name}" if code.name else ""))
        dense = code.n <= 32
        for label, ops in (("S", code.stabilizers), ("X", code.logical_x), ("Z", code.logical_z)):
            for i, op in enumerate(ops, start=1):
                print(f"  {label}{i}  {format_pauli(op, dense=dense)}")
    if args.out:
        _emit(format_code(code), args.out)
    if violations:
        for v in violations:
            print(f"invalid: {v}", file=sys.stderr)
        return EXIT_VALIDATION
    print("valid")
    return EXIT_OK


def cmd_synth(args) -> int:
    code = _load(args)
    theta = parse_angle(args.theta)
    phys = _physical(args, code)
    circuit = synthesize_trotter(phys, theta)
    if args.json:
        payload = {"physical": format_pauli(phys), "theta": theta, "circuit": circuit.to_dict()}
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        header = f"# physical {format_pauli(phys)}  weight {phys.weight}  depth {circuit.depth()}\n"
        _emit(header + circuit.to_text(), args.out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    code = _load(args)
    if args.pauli:
        before = parse_pauli(args.pauli, code.n)
    else:
        before = lift(code, _logical(args, code))
    after = reduce_weight(before, code, args.strategy)
    print(f"input   {format_pauli(before)}  (weight {before.weight})")
    print(f"reduced {format_pauli(after)}  (weight {after.weight})")
    return EXIT_OK


def cmd_verify(args) -> int:
    code = _load(args)
    theta = parse_angle(args.theta)
    logical = _logical(args, code)
    reports = [verify_logical_action(code, logical, theta, reduce=args.reduce)]
    reports.append(verify_stabilizer_centralization(code, reports[0].physical, theta, reports[0].circuit))
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        for r in reports:
            for c in r.checks:
                status = "ok  " if c.passed else "FAIL"
                print(f"{status} {r.kind:26s} {c.name:4s} {c.message}".rstrip())
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VALIDATION


def _double_angle_suite(samples: int, seed: int) -> int:
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(samples):
        n = int(rng.integers(1, 5))
        while True:
            p = PhasedPauli(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)))
            q = PhasedPauli(n, int(rng.integers(0, 1 << n)), int(rng.integers(0, 1 << n)))
            if not p.is_identity and not commutes(p, q):
                break
        theta = float(rng.uniform(-math.pi, math.pi))
        u = oracle.dense_trotter(p, theta)
        qm = oracle.dense_pauli(q)
        lhs = qm @ oracle.conjugate(u, qm)
        rhs = math.cos(theta) * np.eye(1 << n) + 1j * math.sin(theta) * oracle.dense_pauli(p)
        bad += not np.allclose(lhs, rhs, atol=oracle.ATOL)
    return bad


def cmd_oracle(args) -> int:
    code = _load(args)
    if code.n > oracle.MAX_QUBITS:
        oracle.dense_pauli(PhasedPauli.identity(code.n))  # raises CapacityError
    theta = parse_angle(args.theta)
    phys = _physical(args, code)
    circuit = synthesize_trotter(phys, theta)
    ok = True
    unitary_ok = oracle.equal_up_to_phase(oracle.dense_circuit(circuit), oracle.dense_trotter(phys, theta))
    print(f"{'ok  ' if unitary_ok else 'FAIL'} circuit == exp(-i theta/2 P) up to phase")
    ok &= unitary_ok
    u = oracle.dense_circuit(circuit)
    ops = list(code.stabilizers) + list(code.logical_x) + list(code.logical_z)
    mismatches = 0
    for op in ops:
        image = conjugate_circuit(op, circuit)
        dense = oracle.conjugate(u, oracle.dense_pauli(op))
        mismatches += not np.allclose(dense, oracle.dense_pauli_sum(image.expanded()), atol=oracle.ATOL)
    print(f"{'ok  ' if not mismatches else 'FAIL'} conjugation engine vs dense on {len(ops)} operators")
    ok &= mismatches == 0
    bad = _double_angle_suite(args.samples, args.seed)
    print(f"{'ok  ' if not bad else 'FAIL'} double-angle identity on {args.samples} random pairs")
    ok &= bad == 0
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_simulate(args) -> int:
    code = _load(args)
    theta = parse_angle(args.theta)
    phys = _physical(args, code)
    circuit = synthesize_trotter(phys, theta)
    p_list = parse_p_list(args.p)
    if args.shots <= 0:
        raise InvalidArgumentError("--shots must be positive")
    scope: str | int = "any_logical"
    if args.target is not None:
        if not 1 <= args.target <= code.k:
            raise InvalidArgumentError(f"--target must lie in 1..{code.k}")
        scope = args.target - 1
    cfg = DecoderConfig(
        kind=args.decoder,
        bp_max_iters=args.bp_iters,
        min_sum_scale=args.ms_scale,
        prior_p=args.prior,
    )
    results = sweep(
        code,
        circuit,
        p_list,
        args.shots,
        args.seed,
        failure_scope=scope,
        decoder=cfg,
        idle_noise=not args.no_idle,
        cnot_noise=not args.no_cnot,
        single_qubit_gate_noise=args.single_qubit_noise,
    )
    _emit(format_csv(results), args.out)
    if args.out and results:
        pt = pseudothreshold(p_list, [r.rate for r in results])
        print(f"pseudothreshold estimate: {pt:.6g}" if pt else "pseudothreshold estimate: none")
    return EXIT_OK


# parser ----------------------------------------------------------------------------


def _code_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--builtin", help="builtin code name (default 833)")
    g.add_argument("--code", help="path to a code file")
    g.add_argument("--hx", help="X check matrix (sparse rows); needs --hz")
    p.add_argument("--hz", help="Z check matrix (sparse rows)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transvec", description="Trotter kernels on stabilizer codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("code", help="inspect or validate a stabilizer code")
    p.add_argument("action", choices=["info", "validate"])
    _code_args(p)
    p.add_argument("--out", help="also write the code in file format")
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("synth", help="synthesize the physical Trotter kernel")
    _code_args(p)
    p.add_argument("--logical", required=True, help='logical Pauli, e.g. "X1 Z2 X3"')
    p.add_argument("--theta", default="pi/2", help="angle in radians or pi/N")
    p.add_argument("--reduce", choices=["exhaustive", "greedy"])
    p.add_argument("--json", action="store_true", help="emit the circuit object instead of text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("reduce", help="minimum-weight stabilizer-equivalent Pauli")
    _code_args(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--logical")
    src.add_argument("--pauli", help="physical Pauli on n qubits")
    p.add_argument("--strategy", choices=["exhaustive", "greedy"], default="exhaustive")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verify", help="check logical action and stabilizer centralization")
    _code_args(p)
    p.add_argument("--logical", required=True)
    p.add_argument("--theta", default="pi/2")
    p.add_argument("--reduce", choices=["exhaustive", "greedy"])
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="dense-matrix certification (n <= 10)")
    _code_args(p)
    p.add_argument("--logical", required=True)
    p.add_argument("--theta", default="pi/2")
    p.add_argument("--reduce", choices=["exhaustive", "greedy"])
    p.add_argument("--samples", type=int, default=50, help="random pairs for the double-angle check")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="Pauli-frame Monte Carlo sweep, CSV output")
    _code_args(p)
    p.add_argument("--logical", required=True)
    p.add_argument("--theta", default="pi/2")
    p.add_argument("--reduce", choices=["exhaustive", "greedy"])
    p.add_argument("--p", required=True, help="comma list, lo:hi:N or lo:hi:logN")
    p.add_argument("--shots", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--decoder", choices=["lookup", "bp_osd"], default="lookup")
    p.add_argument("--bp-iters", type=int, default=30)
    p.add_argument("--ms-scale", type=float, default=0.75)
    p.add_argument("--prior", type=float, help="BP prior p (default: each sweep point's p)")
    p.add_argument("--target", type=int, help="count flips of this 1-based logical only")
    p.add_argument("--no-idle", action="store_true")
    p.add_argument("--no-cnot", action="store_true")
    p.add_argument("--single-qubit-noise", action="store_true")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TransvecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - last line of defence
        print(f"internal error: {exc!r}", file=sys.stderr)
        return InternalInvariantError.exit_code


if __name__ == "__main__":
    sys.exit(main())
