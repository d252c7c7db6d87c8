"""Geometric entanglement measures, product-basis coherence and separability tools for dense states.

Geometric measures of m-inseparability, fidelity-based coherence over
product bases, pure-state separability classification, and convex-roof
upper bounds for mixed states, on dense state vectors.
"""

__version__ = "0.1.0"

from .bases import ProductBasis, complete_basis
from .classify import (
    ClassificationResult,
    classify,
    finest_factorization,
    incoherent_basis_witness,
    is_product_across,
    theorem1_check,
    theorem3_check,
)
from .coherence import (
    CoherenceResult,
    IdentityReport,
    direct_basis_search,
    fidelity_coherence,
    min_fidelity_coherence,
    verify_theorem5,
)
from .exceptions import (
    ArgumentError,
    BudgetExceeded,
    DimensionError,
    EntscopeError,
    IsometryError,
    NonPSDError,
    NotProductError,
    ParseError,
    StateFileError,
)
from .geometric import AlsConfig, BlockProductState, GmResult, closest_block_product, ggm, gm_m
from .partitions import Partition, bipartitions, enumerate_partitions, merged_dims, stirling2
from .roof import (
    Decomposition,
    RoofResult,
    ensemble_from_isometry,
    gm_mixed,
    roof_upper_bound,
    spectral_decomposition,
)
from .stateio import load_state_file, parse_mixture, parse_state, write_state_file
from .tensor import (
    DensityMatrix,
    PureState,
    SchmidtResult,
    environment_vector,
    inner_product,
    kron,
    matricize,
    partial_trace,
    random_state,
    schmidt,
    schmidt_max,
)
