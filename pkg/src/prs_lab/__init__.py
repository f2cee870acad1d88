"""Desk-scale laboratory for pseudorandom quantum states.

Exact finite-dimensional simulation of binary-phase state generators, the
hybrid chain comparing them to Haar averages, unconditional distinguishing
attacks, verifiable tomography, and the classical-communication commitment
and one-time-pad protocols built on it.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    InfeasibleError,
    NumericError,
    ResourceError,
    ShapeError,
    UsageError,
)
from .states import (
    DensityMatrix,
    PureState,
    Rng,
    basis_state,
    fidelity_overlap,
    frobenius_sq,
    haar_sample,
    measure_shots,
    partial_trace_leading,
    swap_test_accept_prob,
    swap_test_sample,
    trace_distance,
)
from .paulis import PauliString, pauli_apply, pauli_sample
from .symmetric import sym_dim, sym_projector
from .prf import PrfKey, PrfSpec, prf_bit, prf_eval
from .generators import (
    AbortModel,
    GeneratorParams,
    PrsEnsemble,
    abort_wrapped,
    binary_phase_state,
    prfs_generate,
    prfs_test,
    prfs_test_product,
    prs_generate,
)

__all__ = [
    "AbortModel",
    "DensityMatrix",
    "DomainError",
    "GeneratorParams",
    "InfeasibleError",
    "NumericError",
    "PauliString",
    "PrfKey",
    "PrfSpec",
    "PrsEnsemble",
    "PureState",
    "ResourceError",
    "Rng",
    "ShapeError",
    "UsageError",
    "abort_wrapped",
    "basis_state",
    "binary_phase_state",
    "fidelity_overlap",
    "frobenius_sq",
    "haar_sample",
    "measure_shots",
    "partial_trace_leading",
    "pauli_apply",
    "pauli_sample",
    "prf_bit",
    "prf_eval",
    "prfs_generate",
    "prfs_test",
    "prfs_test_product",
    "prs_generate",
    "swap_test_accept_prob",
    "swap_test_sample",
    "sym_dim",
    "sym_projector",
    "trace_distance",
]
