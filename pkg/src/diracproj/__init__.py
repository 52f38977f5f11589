"""Spectral projections and decompositions of 1-d Dirac operators.

Builds Fourier-basis truncations of L = i * diag(1, -1) d/dx + v(x) on
[0, pi] under periodic, antiperiodic, or Dirichlet-type boundary
conditions, computes Riesz projections by contour integration of the
resolvent, measures their quadratic closeness to the free projections,
reconstructs functions from the resulting disc decomposition, and audits
the inequality chain that controls all of it.
"""

from .potential import (
    BC_TAGS,
    DIRICHLET,
    PER_MINUS,
    PER_PLUS,
    PotentialSpec,
    RSequence,
    dirichlet_w,
    from_samples,
    potential_norm,
    r_sequence,
    random_potential,
    rho,
    tail_norm,
    validate_bc,
)
from .operator import (
    BCClassification,
    BasisIndexSet,
    EigenResidualError,
    OperatorMatrix,
    basis_index_set,
    bc_quadruple,
    build_free,
    build_operator,
    build_v,
    classify_bc,
    disc_centers,
    eigen,
    eigenbasis_condition,
    lattice_points,
)
from .resolvent import (
    IllConditionedError,
    KOperator,
    ShiftedSolve,
    ThresholdNotFoundError,
    branch_sqrt,
    circle_norm_profile,
    circle_samples,
    dominated_hs_norm,
    find_threshold_n,
    k_operator,
    kvk_hs_norm,
    resolve,
    shifted_solve,
)
from .projections import (
    ContourProximityError,
    ContourSpec,
    DeviationReport,
    ProjectionQualityError,
    ProjectionResult,
    deviation,
    deviation_report,
    free_projection,
    global_projection,
    localization_counts,
    riesz_projection,
)
from .decomposition import (
    FunctionVector,
    UnconditionalityReport,
    expand,
    reconstruct,
    reconstruction_curve,
    synthesize,
    unconditionality_test,
    uniform_grid,
)
from .bounds import (
    BoundCheck,
    check_chain_sums,
    check_circle_double_sum,
    check_elementary,
    check_shift_sums,
    check_tail_sums,
    run_battery,
    violations,
    worst_ratios,
)

__version__ = "0.1.0"

__all__ = [
    "BC_TAGS",
    "DIRICHLET",
    "PER_MINUS",
    "PER_PLUS",
    "PotentialSpec",
    "RSequence",
    "dirichlet_w",
    "from_samples",
    "potential_norm",
    "r_sequence",
    "random_potential",
    "rho",
    "tail_norm",
    "validate_bc",
    "BCClassification",
    "BasisIndexSet",
    "EigenResidualError",
    "OperatorMatrix",
    "basis_index_set",
    "bc_quadruple",
    "build_free",
    "build_operator",
    "build_v",
    "classify_bc",
    "disc_centers",
    "eigen",
    "eigenbasis_condition",
    "lattice_points",
    "IllConditionedError",
    "KOperator",
    "ShiftedSolve",
    "ThresholdNotFoundError",
    "branch_sqrt",
    "circle_norm_profile",
    "circle_samples",
    "dominated_hs_norm",
    "find_threshold_n",
    "k_operator",
    "kvk_hs_norm",
    "resolve",
    "shifted_solve",
    "ContourProximityError",
    "ContourSpec",
    "DeviationReport",
    "ProjectionQualityError",
    "ProjectionResult",
    "deviation",
    "deviation_report",
    "free_projection",
    "global_projection",
    "localization_counts",
    "riesz_projection",
    "FunctionVector",
    "UnconditionalityReport",
    "expand",
    "reconstruct",
    "reconstruction_curve",
    "synthesize",
    "unconditionality_test",
    "uniform_grid",
    "BoundCheck",
    "check_chain_sums",
    "check_circle_double_sum",
    "check_elementary",
    "check_shift_sums",
    "check_tail_sums",
    "run_battery",
    "violations",
    "worst_ratios",
    "__version__",
]
