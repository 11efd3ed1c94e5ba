"""Separability analysis for bipartite quantum states.

Library + CLI implementing the positive-partial-transpose test, a
range-based criterion driven by a product-vector-in-subspace solver, and
verification of finite separable decompositions.
"""

from .matkit import (
    ContractViolation,
    Polynomial,
    SplitMix64,
    SubspaceBasis,
    eig_hermitian,
    kron,
    nullspace,
    orthonormalize,
    poly_roots,
)
from .statefab import (
    BipartiteState,
    ProductVector,
    StateFormatError,
    StateInvariantError,
    partial_transpose,
    read_state,
    state_family,
    write_state,
)
from .sepcrit import (
    ProductVectorSet,
    SamplingBudget,
    SeparabilityReport,
    UnsupportedDimensions,
    VERDICT_INCONCLUSIVE,
    VERDICT_NPT,
    VERDICT_RANGE,
    analyze,
    partial_conjugate,
    ppt_check,
    product_vectors_in_subspace,
    range_criterion,
    range_of,
)
from .decomp import (
    SeparableDecomposition,
    ensemble_in_range,
    fourier_decomposition,
    read_decomposition,
    verify_decomposition,
    write_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "BipartiteState",
    "ContractViolation",
    "Polynomial",
    "ProductVector",
    "ProductVectorSet",
    "SamplingBudget",
    "SeparabilityReport",
    "SeparableDecomposition",
    "SplitMix64",
    "StateFormatError",
    "StateInvariantError",
    "SubspaceBasis",
    "UnsupportedDimensions",
    "VERDICT_INCONCLUSIVE",
    "VERDICT_NPT",
    "VERDICT_RANGE",
    "analyze",
    "eig_hermitian",
    "ensemble_in_range",
    "fourier_decomposition",
    "kron",
    "nullspace",
    "orthonormalize",
    "partial_conjugate",
    "partial_transpose",
    "poly_roots",
    "ppt_check",
    "product_vectors_in_subspace",
    "range_criterion",
    "range_of",
    "read_decomposition",
    "read_state",
    "state_family",
    "verify_decomposition",
    "write_decomposition",
    "write_state",
]
