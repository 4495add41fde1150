"""Conjugate gradients on the transformed inner system with cost tracing.

The solver runs plain CG on the congruence-transformed operator
``C^T A C`` with a zero starting vector, and after every iteration maps the
iterate back to physical space to record the value of the quadratic cost.
That extra transform application per iteration is accepted bookkeeping
overhead; it never enters any timing claim.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .operators import InnerProblem, hessian_apply, hessian_rhs, quadratic_cost
from .precond import Preconditioner, apply_transform, apply_transform_t

CONVERGED = "converged"
MAX_ITER = "max-iter"
BREAKDOWN = "breakdown"


@dataclass(frozen=True)
class SolverConfig:
    """Iteration budget and stopping rule.

    With ``fixed_iterations`` set (the experiment default) exactly
    ``max_iterations`` iterations run and the tolerance is ignored.
    """

    max_iterations: int = 100
    residual_tolerance: float = 1e-8
    fixed_iterations: bool = True

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.residual_tolerance > 0.0:
            raise ValueError("residual_tolerance must be > 0")


@dataclass
class SolveTrace:
    """Per-iteration record of the physical-space quadratic cost and the
    transformed-system residual norm. Record 0 is the zero initial guess."""

    iterations: list[int] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)
    resnorms: list[float] = field(default_factory=list)
    status: str = MAX_ITER

    def append(self, iteration: int, cost: float, resnorm: float) -> None:
        self.iterations.append(iteration)
        self.costs.append(cost)
        self.resnorms.append(resnorm)

    def __len__(self) -> int:
        return len(self.iterations)


def pcg_solve(
    prob: InnerProblem, prec: Preconditioner, cfg: SolverConfig
) -> tuple[np.ndarray, SolveTrace]:
    """Solve the inner system through the transform ``C`` and trace the cost.

    Returns the final physical-space increment and the trace. A breakdown
    (non-positive curvature, the signature of a singular transform) stops
    the iteration with the partial trace and status ``"breakdown"``.
    """
    rhs = apply_transform_t(prec, hessian_rhs(prob))
    x = np.zeros_like(rhs)
    r = rhs.copy()
    rr = float(np.vdot(r, r))
    rhs_norm = float(np.sqrt(rr))

    trace = SolveTrace()
    trace.append(0, quadratic_cost(prob, None), rhs_norm)

    if rhs_norm == 0.0:
        trace.status = CONVERGED
        return x, trace

    p = r.copy()
    trace.status = MAX_ITER
    for iteration in range(1, cfg.max_iterations + 1):
        ap = apply_transform_t(prec, hessian_apply(prob, apply_transform(prec, p)))
        curvature = float(np.vdot(p, ap))
        if curvature <= 0.0:
            trace.status = BREAKDOWN
            break
        alpha = rr / curvature
        x += alpha * p
        r -= alpha * ap
        rr_next = float(np.vdot(r, r))
        resnorm = float(np.sqrt(rr_next))

        cost = quadratic_cost(prob, apply_transform(prec, x))
        if not np.isfinite(cost):
            raise RuntimeError(
                f"non-finite quadratic cost at iteration {iteration} "
                f"(variant {prec.describe()})"
            )
        trace.append(iteration, cost, resnorm)

        if not cfg.fixed_iterations and resnorm <= cfg.residual_tolerance * rhs_norm:
            trace.status = CONVERGED
            break
        p = r + (rr_next / rr) * p
        rr = rr_next

    return apply_transform(prec, x), trace


def write_trace_csv(trace: SolveTrace, path) -> None:
    """Serialise a trace as CSV: header ``iteration,cost,resnorm``, one row
    per record, 17 significant digits, LF line endings."""
    with open(path, "w", newline="") as fh:
        fh.write("iteration,cost,resnorm\n")
        for i, cost, resnorm in zip(trace.iterations, trace.costs, trace.resnorms):
            fh.write(f"{i},{cost:.17g},{resnorm:.17g}\n")


def read_trace_csv(path) -> SolveTrace:
    """Parse a trace CSV written by ``write_trace_csv``."""
    trace = SolveTrace()
    with open(path, newline="") as fh:
        header = fh.readline().strip()
        if header != "iteration,cost,resnorm":
            raise ValueError(f"unexpected trace header: {header!r}")
        for line in fh:
            i, cost, resnorm = line.strip().split(",")
            trace.append(int(i), float(cost), float(resnorm))
    return trace
