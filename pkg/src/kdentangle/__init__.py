"""Kirkwood-Dirac quasiprobability tables and a nonreality-based bipartite
entanglement monotone: closed form, basis optimization, convex roof, bounds,
and a sampled estimation pipeline."""

from .entanglement import (
    BoundsReport,
    PureEntanglementReport,
    asymmetry_lower_bound,
    binary_entropy,
    bounds_report,
    entropy_from_concurrence,
    marginal_disturbance,
    measurement_disturbance,
    minimized_nonreality,
    mixed_entanglement,
    nonreality_entropy,
    pure_entanglement,
    roof_normalization,
    wootters_concurrence,
)
from .errors import (
    BadParamCount,
    BadSpec,
    BasisPairSingular,
    DimensionMismatch,
    DomainError,
    KdToolError,
    NoConvergence,
    NotHermitian,
    NotPSD,
    NotUnitary,
    OptimizerFailed,
)
from .kd import (
    KDDistribution,
    kd_coherence,
    kd_full,
    kd_marginal,
    kd_to_csv,
    marginalize_over_b,
    max_nonreality,
    nonreality,
    optimal_second_basis,
    reconstruct_state,
)
from .linalg import (
    HermitianEigen,
    commutator_trace_norm,
    hermitian_eig,
    kron,
    operator_norm,
    partial_trace,
    psd_sqrt,
    svd,
    trace_norm,
)
from .optimize import (
    BasisParams,
    ConvexRoofResult,
    OptimizerConfig,
    SearchDiagnostics,
    materialize_basis,
    minimize_convex_roof,
    minimize_over_bases,
    unitary_from_angles,
)
from .states import (
    BipartiteDims,
    BipartitePureState,
    DensityOperator,
    SchmidtDecomposition,
    apply_local_unitary,
    assemble_from_schmidt,
    basis_ket,
    bell_state,
    haar_pure,
    haar_unitary,
    load_state,
    make_state,
    max_entangled,
    product_state,
    random_entangled_pure,
    random_mixed,
    random_product_pure,
    save_state,
    schmidt,
    werner_state,
)
from .weakvalue import (
    ShotRecord,
    WeakValueEstimate,
    estimate_kd_imag,
    sample_born,
    sampled_entanglement,
    sampled_max_nonreality,
)

__version__ = "0.1.0"
