"""Geometric measure of entanglement for multipartite quantum states.

Pure states: ``1 - Lambda_max`` where ``Lambda_max`` is the largest overlap
with a product state.  Mixed states: the Frobenius distance to the nearest
disentangled state of equal norm, computed by constrained maximization
over separable ensembles with a recoverable first-order optimality
certificate.
"""

from .families import (
    CASE_I_GAMMA,
    CASE_II_GAMMA,
    SweepRow,
    default_alpha_grid,
    example1,
    example2,
    sweep,
)
from .mixed import (
    ConstraintResiduals,
    KktMultipliers,
    MeasureResult,
    MixedProblem,
    SolverConfig,
    constraint_residuals,
    ensemble_norm_gap,
    entanglement_eigenvalue_mixed,
    feasible_start,
    kkt_residual,
    kkt_residual_blocks,
    objective,
    recover_multipliers,
    solve,
)
from .pure import (
    PureEigenpair,
    entanglement_eigenvalue_pure,
    geometric_measure_pure,
    multi_start_eigenvalue,
    overlap_with_product,
    qe_iterate,
)
from .states import (
    DensityMatrix,
    NotUnitaryError,
    ProductState,
    PureState,
    SeparableEnsemble,
    ShapeMismatchError,
    SpaceShape,
    apply_local_unitaries,
    basis_product_state,
    bell_state,
    ensemble_norm_squared,
    ensemble_to_density,
    expectation,
    frobenius_norm_squared,
    ghz_state,
    product_overlap,
    random_product_state,
    random_pure_state,
    random_unitary,
    w_state,
)

__version__ = "0.1.0"
