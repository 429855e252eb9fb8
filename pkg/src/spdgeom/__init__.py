"""Affine-invariant geometry of symmetric positive-definite matrices.

The package provides the Riemannian structure of the positive-definite cone
under the trace metric tr(x^-1 X x^-1 Y) (geodesics, distance, curvature),
the spectral calculus behind it, the differential of the matrix exponential,
bracket-closure tests for linear subspaces of symmetric matrices, the
geodesic projection onto totally geodesic submanifolds exp(E), and the
resulting two-sided (x = e f e) and global (g = k f e) factorizations with
covariance-oriented applications.
"""

from .applications import (
    AdaFactors,
    BlockPartition,
    BlockSplit,
    DadFactors,
    DiagProjectionReport,
    Sl2Factors,
    ada_decompose,
    ada_sum_split,
    block_diag_part,
    correlation_normalize,
    cosh_sinh_split,
    dad_decompose,
    diag_projection_compare,
    off_block_part,
    sl2_decompose,
    sl2_reconstruct,
)
from .decompose import (
    GlFactors,
    MostowFactors,
    ProjectionResult,
    TranslatedSubmanifold,
    geodesic_project,
    mostow_gl,
    mostow_spd,
    translate_convex_submanifold,
)
from .dexp import (
    AdFunctionOperator,
    ad,
    ad_function_apply,
    conjugation_flow_field,
    dexp_apply,
    dexp_apply_left,
    dexp_inv_apply,
    integrate_conjugation_flow,
    tau,
    tau_inv,
)
from .errors import ConvergenceError, DomainError, ParseError, SpdGeomError
from .manifold import (
    GeodesicSegment,
    TangentVector,
    al_kashi_slack,
    congruence_action,
    curvature_tensor_id,
    distance,
    geodesic,
    geodesic_symmetry,
    metric,
    riem_exp,
    riem_log,
    riemannian_angle,
    sectional_curvature_id,
)
from .matfun import (
    EigenDecomposition,
    SPD_TOL,
    as_sym,
    frobenius,
    is_spd,
    require_spd,
    spd_exp,
    spd_inv,
    spd_inv_sqrt,
    spd_log,
    spd_pow,
    spd_sqrt,
    spd_sqrt_pair,
    sym_apply,
    sym_eigen,
    tr_inner,
)
from .subspace import (
    LtsReport,
    LtsWitness,
    Subspace,
    block_antidiag_subspace,
    block_diag_subspace,
    build_subspace,
    diag_subspace,
    load_subspace,
    lts_check,
    multi_block_zero_diag_counterexample,
    orthogonal_complement,
    project_trace,
    sl2_traceless_diag_subspace,
    subspace_from_dict,
    zero_diag_block_subspace,
)

__version__ = "0.1.0"
