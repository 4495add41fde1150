"""Block space-time algebra of the incremental weak-constraint problem.

A trajectory-shaped vector is an ``(N+1, n)`` array, one row per time block.
All operators here are matrix free: the block lower-bidiagonal step-residual
map, its transpose, its inverse (forward substitution in time) and the
inverse transpose (backward substitution), the observation selection and
scatter maps, the Gauss-Newton Hessian, the quadratic and nonlinear cost
functions, and the strictly lower propagation operators used to build
low-rank preconditioners.

Naming: ``apply_step_residual`` maps a trajectory increment ``v`` to
``(v_0, v_1 - M_0 v_0, ..., v_N - M_{N-1} v_{N-1})`` where ``M_i`` is the
tangent-linear step at reference block ``i``; ``propagate_increments`` is
its inverse. The strict propagation operators are those maps minus the
identity (optionally composed with the block covariance square root), which
is exactly their strictly lower triangular part.

Every function accepts increments shaped ``(N+1, n)`` or column blocks
shaped ``(N+1, n, m)``; the output matches the input. The Hessian is never
assembled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import CovarianceSet
from .lorenz96 import ModelConfig, step_adj, step_rk4, step_tlm


@dataclass(frozen=True)
class ObservationSet:
    """Observation times, observed component indices, values, and error std.

    ``times`` are strictly increasing time indices in ``[0, N]``;
    ``components[k]`` lists the observed grid indices at ``times[k]`` and
    ``values[k]`` the corresponding measurements. The observation error
    covariance is ``sigma_obs**2 * I``.
    """

    times: tuple[int, ...]
    components: tuple[np.ndarray, ...]
    values: tuple[np.ndarray, ...]
    sigma_obs: float

    def __post_init__(self) -> None:
        if not (len(self.times) == len(self.components) == len(self.values)):
            raise ValueError("times, components, and values must have equal length")
        if any(t2 <= t1 for t1, t2 in zip(self.times, self.times[1:])):
            raise ValueError("observation times must be strictly increasing")
        for comps, vals in zip(self.components, self.values):
            if len(comps) != len(vals):
                raise ValueError("component and value counts differ at an observation time")
        if self.sigma_obs < 0.0:
            raise ValueError("sigma_obs must be >= 0")

    @property
    def total(self) -> int:
        """Total observation count across the window."""
        return sum(len(c) for c in self.components)

    def validate(self, n: int, window: int) -> None:
        if self.times and (self.times[0] < 0 or self.times[-1] > window):
            raise ValueError("observation times fall outside the window")
        for comps in self.components:
            comps = np.asarray(comps)
            if comps.size and (comps.min() < 0 or comps.max() >= n):
                raise ValueError("observed component index out of range")


@dataclass(frozen=True)
class LinearizationState:
    """Reference trajectory for the tangent-linear steps plus the model and
    error-covariance configuration. Immutable; safe to share across threads."""

    cfg: ModelConfig
    reference: np.ndarray  # (N+1, n)
    covs: CovarianceSet

    def __post_init__(self) -> None:
        ref = np.asarray(self.reference, dtype=np.float64)
        if ref.ndim != 2 or ref.shape[1] != self.cfg.n:
            raise ValueError(f"reference trajectory must be (N+1, {self.cfg.n})")
        if ref.shape[0] != self.covs.window + 1:
            raise ValueError(
                f"reference has {ref.shape[0]} blocks but the covariance set "
                f"provides {self.covs.window} model-error blocks"
            )
        object.__setattr__(self, "reference", ref)

    @property
    def window(self) -> int:
        """Number of model steps N."""
        return self.reference.shape[0] - 1

    @property
    def size(self) -> int:
        """Total space-time dimension (N+1) * n."""
        return self.reference.size


@dataclass(frozen=True)
class InnerProblem:
    """One linearised inner problem: linearisation state, observations, the
    per-step model-minus-state mismatch, and the innovation vector."""

    lin: LinearizationState
    obs: ObservationSet
    state_mismatch: np.ndarray  # (N+1, n)
    innovation: np.ndarray  # (p,)


def _check_traj(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape[:2] != lin.reference.shape:
        raise ValueError(
            f"trajectory increment has shape {v.shape}, expected leading {lin.reference.shape}"
        )
    return v


# ---------------------------------------------------------------------------
# block covariance applications


def _uniform_model_error(covs: CovarianceSet) -> bool:
    return covs.window > 0 and all(q is covs.model_error[0] for q in covs.model_error)


def _apply_blockdiag(covs: CovarianceSet, v: np.ndarray, attr: str) -> np.ndarray:
    """Apply one cached covariance factor blockwise along the time dimension."""
    out = np.empty_like(v)
    first = getattr(covs.background, attr)
    if first is None:
        raise ValueError("covariance factor unavailable (zero-variance operator)")
    out[0] = first @ v[0]
    if covs.window == 0:
        return out
    if _uniform_model_error(covs) and v.ndim == 2:
        q = getattr(covs.model_error[0], attr)
        out[1:] = v[1:] @ q  # factors are symmetric
        return out
    for i in range(1, covs.window + 1):
        out[i] = getattr(covs.block(i), attr) @ v[i]
    return out


def apply_error_cov_inverse(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    """Blockwise inverse error covariance (background block, then model error)."""
    return _apply_blockdiag(lin.covs, _check_traj(lin, v), "inv")


def apply_error_cov_sqrt(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    """Blockwise symmetric square root of the error covariance."""
    return _apply_blockdiag(lin.covs, _check_traj(lin, v), "sqrt")


# ---------------------------------------------------------------------------
# step-residual operator (block lower bidiagonal) and its relatives


def apply_step_residual(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    """Block lower-bidiagonal map: block 0 passes through, block i gets
    ``v_i - M_{i-1} v_{i-1}``. Per-block products are independent."""
    v = _check_traj(lin, v)
    out = np.empty_like(v)
    out[0] = v[0]
    for i in range(1, v.shape[0]):
        out[i] = v[i] - step_tlm(lin.cfg, lin.reference[i - 1], v[i - 1])
    return out


def apply_step_residual_t(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    """Transpose of ``apply_step_residual``: block i gets ``v_i - M_i^T v_{i+1}``."""
    v = _check_traj(lin, v)
    out = np.empty_like(v)
    last = v.shape[0] - 1
    out[last] = v[last]
    for i in range(last - 1, -1, -1):
        out[i] = v[i] - step_adj(lin.cfg, lin.reference[i], v[i + 1])
    return out


def propagate_increments(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    """Inverse of ``apply_step_residual`` by forward substitution in time:
    ``w_0 = v_0``, ``w_i = M_{i-1} w_{i-1} + v_i``. Sequential across blocks."""
    v = _check_traj(lin, v)
    out = np.empty_like(v)
    out[0] = v[0]
    for i in range(1, v.shape[0]):
        out[i] = step_tlm(lin.cfg, lin.reference[i - 1], out[i - 1]) + v[i]
    return out


def propagate_increments_t(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    """Transpose of ``propagate_increments`` by backward substitution:
    ``w_N = v_N``, ``w_i = M_i^T w_{i+1} + v_i``."""
    v = _check_traj(lin, v)
    out = np.empty_like(v)
    last = v.shape[0] - 1
    out[last] = v[last]
    for i in range(last - 1, -1, -1):
        out[i] = step_adj(lin.cfg, lin.reference[i], out[i + 1]) + v[i]
    return out


def strict_propagation(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    """Strictly lower triangular part of ``propagate_increments``: the
    propagation map minus the identity. Block 0 of the result is zero."""
    return propagate_increments(lin, v) - _check_traj(lin, v)


def strict_propagation_t(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    return propagate_increments_t(lin, v) - _check_traj(lin, v)


def scaled_strict_propagation(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    """Strictly lower part of (propagation composed with the covariance square
    root): ``propagate(sqrt(D) v) - sqrt(D) v``."""
    w = apply_error_cov_sqrt(lin, v)
    return propagate_increments(lin, w) - w


def scaled_strict_propagation_t(lin: LinearizationState, v: np.ndarray) -> np.ndarray:
    return apply_error_cov_sqrt(lin, strict_propagation_t(lin, v))


# ---------------------------------------------------------------------------
# observation operator


def select_observed(obs: ObservationSet, v: np.ndarray) -> np.ndarray:
    """Gather the observed components at the observed times (rows of the
    identity); returns a length-p vector."""
    if obs.total == 0:
        return np.zeros(0)
    return np.concatenate([v[t][comps] for t, comps in zip(obs.times, obs.components)])


def scatter_observed(obs: ObservationSet, w: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Transpose of ``select_observed``: scatter a length-p vector back into
    a zero trajectory of the given ``(N+1, n)`` shape."""
    out = np.zeros(shape)
    start = 0
    for t, comps in zip(obs.times, obs.components):
        k = len(comps)
        out[t][comps] = w[start : start + k]
        start += k
    return out


# ---------------------------------------------------------------------------
# Hessian system


def hessian_apply(prob: InnerProblem, v: np.ndarray) -> np.ndarray:
    """Gauss-Newton Hessian product without assembling the matrix: the
    covariance-weighted normal term plus the observation term."""
    lin = prob.lin
    u = apply_step_residual(lin, v)
    u = apply_error_cov_inverse(lin, u)
    u = apply_step_residual_t(lin, u)
    if prob.obs.total:
        w = select_observed(prob.obs, v) / prob.obs.sigma_obs**2
        u += scatter_observed(prob.obs, w, lin.reference.shape)
    return u


def hessian_rhs(prob: InnerProblem) -> np.ndarray:
    """Right-hand side of the inner linear system, built from the state
    mismatch and the innovation."""
    lin = prob.lin
    u = apply_step_residual_t(lin, apply_error_cov_inverse(lin, prob.state_mismatch))
    if prob.obs.total:
        u += scatter_observed(
            prob.obs, prob.innovation / prob.obs.sigma_obs**2, lin.reference.shape
        )
    return u


def compute_mismatches(
    lin: LinearizationState, background: np.ndarray, obs: ObservationSet
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the nonlinear residuals at the linearisation trajectory.

    Returns the trajectory-shaped state mismatch (block 0: reference minus
    background; block i: nonlinear step of block i-1 minus block i) and the
    observation-space innovation (values minus observed reference).
    """
    ref = lin.reference
    mismatch = np.empty_like(ref)
    mismatch[0] = ref[0] - background
    for i in range(1, ref.shape[0]):
        mismatch[i] = step_rk4(lin.cfg, ref[i - 1]) - ref[i]
    if obs.total:
        innovation = np.concatenate(
            [y - ref[t][comps] for t, comps, y in zip(obs.times, obs.components, obs.values)]
        )
    else:
        innovation = np.zeros(0)
    return mismatch, innovation


# ---------------------------------------------------------------------------
# cost functions


def quadratic_cost(prob: InnerProblem, dx: np.ndarray | None) -> float:
    """Value of the linearised (inner) cost function at increment ``dx``
    (``None`` means the zero increment)."""
    lin = prob.lin
    if dx is None:
        r_state = -prob.state_mismatch
        r_obs = -prob.innovation
    else:
        r_state = apply_step_residual(lin, dx) - prob.state_mismatch
        r_obs = select_observed(prob.obs, dx) - prob.innovation
    cost = 0.5 * float(np.vdot(r_state, apply_error_cov_inverse(lin, r_state)))
    if prob.obs.total:
        cost += 0.5 * float(r_obs @ r_obs) / prob.obs.sigma_obs**2
    return cost


def nonlinear_cost(
    cfg: ModelConfig,
    covs: CovarianceSet,
    background: np.ndarray,
    obs: ObservationSet,
    x: np.ndarray,
) -> float:
    """Full nonlinear cost of a trajectory: background misfit, observation
    misfit, and per-step model-error misfit, each weighted by the inverse of
    its covariance."""
    x = np.asarray(x, dtype=np.float64)
    r0 = x[0] - background
    cost = 0.5 * float(r0 @ covs.background.apply_inv(r0))
    for t, comps, y in zip(obs.times, obs.components, obs.values):
        r = y - x[t][comps]
        cost += 0.5 * float(r @ r) / obs.sigma_obs**2
    for i in range(x.shape[0] - 1):
        r = x[i + 1] - step_rk4(cfg, x[i])
        cost += 0.5 * float(r @ covs.model_error[i].apply_inv(r))
    return cost
