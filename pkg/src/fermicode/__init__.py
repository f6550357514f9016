"""Compiler and resource estimator for a polynomial fermion-to-qubit code.

The layers, bottom up: ``arith`` (primes and polynomials over F_p),
``codes`` (parameter derivation, codebook, encode/decode), ``fenwick``
(the binary-tree occupation transform and its Pauli supports), ``hermite``
(interpolants and minima scans), ``qsp`` (phase-angle finding and the
encoded-parity programs), ``circuits`` (gate programs, simulation,
routing), ``synthesize`` (fermionic terms down to gates), ``resources``
(qubit/gate tables and cost projections), ``cli`` (the ``fermicode``
executable).
"""

from .codes import (
    CodeParams,
    NotACodewordError,
    codebook,
    decode,
    derive_params,
    encode,
    segment_params,
    verify_code,
)
from .circuits import GateProgram, count_gates, simulate
from .hermite import ctrl_phase_poly, majority_poly
from .qsp import find_qsp_angles, synth_parity
from .resources import compare_encodings, optimal_degree, sim_cost
from .synthesize import compile_terms, parse_hamiltonian, synth_hop

__all__ = [
    "CodeParams",
    "GateProgram",
    "NotACodewordError",
    "codebook",
    "compare_encodings",
    "compile_terms",
    "count_gates",
    "ctrl_phase_poly",
    "decode",
    "derive_params",
    "encode",
    "find_qsp_angles",
    "majority_poly",
    "optimal_degree",
    "parse_hamiltonian",
    "segment_params",
    "sim_cost",
    "simulate",
    "synth_hop",
    "synth_parity",
    "verify_code",
]

__version__ = "0.1.0"
