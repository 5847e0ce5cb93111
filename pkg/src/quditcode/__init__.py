"""Probabilistic, error-free coding of n qudits into one smaller system."""
from ._kernels import USE_NUMBA
from .coding import (
    CapExceededError,
    CodingScheme,
    all_outcomes,
    encoding_operator,
    hamming_ball,
    outcome_distribution,
    sample_outcome,
    subspace_dimension,
    verify_completeness,
)
from .protocol import (
    ClassicalMessage,
    Decoder,
    classical_message,
    decode,
    decode_projectors,
    encode,
    exact_success_probability,
    joint_table,
    recover_subset,
)
from .state import (
    DensityMatrix,
    StateVector,
    SystemLayout,
    entanglement_entropy,
    environment_entangled_state,
    haar_random_local,
    product_state,
    purify,
)

__version__ = "0.1.0"

__all__ = [
    "USE_NUMBA",
    "CapExceededError",
    "CodingScheme",
    "all_outcomes",
    "encoding_operator",
    "hamming_ball",
    "outcome_distribution",
    "sample_outcome",
    "subspace_dimension",
    "verify_completeness",
    "ClassicalMessage",
    "Decoder",
    "classical_message",
    "decode",
    "decode_projectors",
    "encode",
    "exact_success_probability",
    "joint_table",
    "recover_subset",
    "DensityMatrix",
    "StateVector",
    "SystemLayout",
    "entanglement_entropy",
    "environment_entangled_state",
    "haar_random_local",
    "product_state",
    "purify",
]
