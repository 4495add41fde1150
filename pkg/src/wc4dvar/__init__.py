"""Matrix-free weak-constraint 4D-Var solver laboratory.

Block space-time operators for the incremental inner problem, randomised
low-rank change-of-variable preconditioners, a traced conjugate-gradient
solver, and an identical-twin experiment harness around the Lorenz 96 model.
"""

from ._backend import BACKEND
from .covariance import (
    CorrelationSpec,
    CovarianceOperator,
    CovarianceSet,
    NotPositiveDefiniteError,
    build_correlation,
    make_covariance,
    sample_gaussian,
)
from .experiments import (
    CASES,
    EnsembleResult,
    ExperimentConfig,
    TwinData,
    build_covariances,
    build_inner_problem,
    gauss_newton,
    generate_truth,
    generate_twin,
    run_ensemble,
    run_inner,
    singular_value_table,
    solve_inner,
)
from .lorenz96 import (
    ModelConfig,
    ModelOverflowError,
    integrate,
    step_adj,
    step_rk4,
    step_tlm,
    tendency,
)
from .operators import (
    InnerProblem,
    LinearizationState,
    ObservationSet,
    apply_error_cov_inverse,
    apply_error_cov_sqrt,
    apply_step_residual,
    apply_step_residual_t,
    compute_mismatches,
    hessian_apply,
    hessian_rhs,
    nonlinear_cost,
    propagate_increments,
    propagate_increments_t,
    quadratic_cost,
    scaled_strict_propagation,
    scaled_strict_propagation_t,
    scatter_observed,
    select_observed,
    strict_propagation,
    strict_propagation_t,
)
from .pcg import SolveTrace, SolverConfig, pcg_solve, read_trace_csv, write_trace_csv
from .precond import (
    Preconditioner,
    apply_transform,
    apply_transform_t,
    build_lowrank_linv,
    build_lowrank_s,
    make_preconditioner,
)
from .rsvd import LowRankSVD, rsvd

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CASES",
    "CorrelationSpec",
    "CovarianceOperator",
    "CovarianceSet",
    "EnsembleResult",
    "ExperimentConfig",
    "InnerProblem",
    "LinearizationState",
    "LowRankSVD",
    "ModelConfig",
    "ModelOverflowError",
    "NotPositiveDefiniteError",
    "ObservationSet",
    "Preconditioner",
    "SolveTrace",
    "SolverConfig",
    "TwinData",
    "apply_error_cov_inverse",
    "apply_error_cov_sqrt",
    "apply_step_residual",
    "apply_step_residual_t",
    "apply_transform",
    "apply_transform_t",
    "build_correlation",
    "build_covariances",
    "build_inner_problem",
    "build_lowrank_linv",
    "build_lowrank_s",
    "compute_mismatches",
    "gauss_newton",
    "generate_truth",
    "generate_twin",
    "hessian_apply",
    "hessian_rhs",
    "integrate",
    "make_covariance",
    "make_preconditioner",
    "nonlinear_cost",
    "pcg_solve",
    "propagate_increments",
    "propagate_increments_t",
    "quadratic_cost",
    "read_trace_csv",
    "rsvd",
    "run_ensemble",
    "run_inner",
    "sample_gaussian",
    "scaled_strict_propagation",
    "scaled_strict_propagation_t",
    "scatter_observed",
    "select_observed",
    "singular_value_table",
    "solve_inner",
    "step_adj",
    "step_rk4",
    "step_tlm",
    "strict_propagation",
    "strict_propagation_t",
    "tendency",
    "write_trace_csv",
]
