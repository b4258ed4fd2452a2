"""Trotter-circuit synthesis, verification and noisy simulation on stabilizer codes."""

from .circuit import Circuit, Gate, reduce_weight, synthesize_trotter, transvection_from_sets
from .code import StabilizerCode, builtin_833, css_code_from_checks, lift, logical_effect, syndrome, validate
from .decoder import BpOsdDecoder, DecoderConfig, LookupDecoder, build_lookup, decode
from .errors import (
    CapacityError,
    InternalInvariantError,
    InvalidArgumentError,
    ParseError,
    TransvecError,
    UnsupportedCircuitError,
    ValidationError,
)
from .f2 import BitMatrix, BitVec, symplectic_inner, transvection_apply, transvection_matrix
from .lifted import lifted_product
from .noise import NoiseModel, SimResult, pseudothreshold, run_monte_carlo, sweep
from .pauli import PhasedPauli, commutes, format_pauli, parse_pauli, pauli_mul
from .propagate import (
    PauliSum,
    conjugate_circuit,
    conjugate_gate,
    conjugate_trotter,
    lemma1_image,
    residual_error_analysis,
    verify_logical_action,
    verify_stabilizer_centralization,
)

__version__ = "0.1.0"
