"""Change-of-variable preconditioners for the inner linear system.

Four variants of the transform ``C`` are supported, all applied as a split
(congruence) preconditioner ``C^T A C``:

* ``none``       -- identity.
* ``exact``      -- the full propagation composed with the block covariance
                    square root (sequential in time).
* ``lowrank-linv`` -- identity-plus-low-rank approximation of the propagation
                    map, composed with the covariance square root; rank 0
                    degenerates to the square root alone.
* ``lowrank-s``  -- covariance square root plus a low-rank approximation of
                    the scaled strict propagation.

The low-rank factors come from the randomised SVD of the corresponding
strictly lower triangular operator, which needs only forward/adjoint block
products and keeps the block (time-parallel) structure of the problem.
"""

from __future__ import annotations

import warnings

import numpy as np

from .operators import (
    LinearizationState,
    apply_error_cov_sqrt,
    propagate_increments,
    propagate_increments_t,
    scaled_strict_propagation,
    scaled_strict_propagation_t,
    strict_propagation,
    strict_propagation_t,
)
from .rsvd import LowRankSVD, rsvd

NONE = "none"
EXACT = "exact"
LOWRANK_LINV = "lowrank-linv"
LOWRANK_S = "lowrank-s"
VARIANTS = (NONE, EXACT, LOWRANK_LINV, LOWRANK_S)


class Preconditioner:
    """A concrete transform ``C`` bound to a linearisation state.

    Immutable once built; application is thread safe.
    """

    def __init__(
        self,
        kind: str,
        lin: LinearizationState | None = None,
        factors: LowRankSVD | None = None,
    ):
        if kind not in VARIANTS:
            raise ValueError(f"unknown preconditioner variant {kind!r}")
        if kind != NONE and lin is None:
            raise ValueError(f"variant {kind!r} requires a linearisation state")
        if kind in (LOWRANK_LINV, LOWRANK_S) and factors is None:
            raise ValueError(f"variant {kind!r} requires low-rank factors")
        self.kind = kind
        self.lin = lin
        self.factors = factors

    def describe(self) -> str:
        if self.factors is not None:
            return f"{self.kind}(k={self.factors.rank}, l={self.factors.oversample})"
        return self.kind


def _lowrank_term(factors: LowRankSVD, v: np.ndarray, transpose: bool) -> np.ndarray:
    flat = v.reshape(-1)
    out = factors.apply_t(flat) if transpose else factors.apply(flat)
    return out.reshape(v.shape)


def apply_transform(prec: Preconditioner, v: np.ndarray) -> np.ndarray:
    """Apply ``C`` to a trajectory-shaped increment."""
    if prec.kind == NONE:
        return v
    lin = prec.lin
    if prec.kind == EXACT:
        return propagate_increments(lin, apply_error_cov_sqrt(lin, v))
    if prec.kind == LOWRANK_LINV:
        w = apply_error_cov_sqrt(lin, v)
        return w + _lowrank_term(prec.factors, w, transpose=False)
    # lowrank-s
    return apply_error_cov_sqrt(lin, v) + _lowrank_term(prec.factors, v, transpose=False)


def apply_transform_t(prec: Preconditioner, v: np.ndarray) -> np.ndarray:
    """Apply ``C^T`` to a trajectory-shaped increment."""
    if prec.kind == NONE:
        return v
    lin = prec.lin
    if prec.kind == EXACT:
        return apply_error_cov_sqrt(lin, propagate_increments_t(lin, v))
    if prec.kind == LOWRANK_LINV:
        return apply_error_cov_sqrt(lin, v + _lowrank_term(prec.factors, v, transpose=True))
    return apply_error_cov_sqrt(lin, v) + _lowrank_term(prec.factors, v, transpose=True)


class _StrictPropagationOperator:
    """Matrix-free view of the strict propagation map for sketching."""

    def __init__(self, lin: LinearizationState, scaled: bool):
        self.lin = lin
        self.dim = lin.size
        self._fwd = scaled_strict_propagation if scaled else strict_propagation
        self._adj = scaled_strict_propagation_t if scaled else strict_propagation_t

    def _blocked(self, block: np.ndarray, fn) -> np.ndarray:
        shape = self.lin.reference.shape
        return fn(self.lin, block.reshape(shape + block.shape[1:])).reshape(block.shape)

    def matmat(self, block: np.ndarray) -> np.ndarray:
        return self._blocked(block, self._fwd)

    def rmatmat(self, block: np.ndarray) -> np.ndarray:
        return self._blocked(block, self._adj)


def propagation_tail_operator(lin: LinearizationState) -> _StrictPropagationOperator:
    """Sketchable view of the strictly lower part of the propagation map."""
    return _StrictPropagationOperator(lin, scaled=False)


def scaled_propagation_tail_operator(lin: LinearizationState) -> _StrictPropagationOperator:
    """Sketchable view of the strictly lower part of the scaled propagation."""
    return _StrictPropagationOperator(lin, scaled=True)


def _check_near_singular(factors: LowRankSVD) -> None:
    # determinant of the k-by-k capacitance matrix of I + U S V^T
    if factors.rank == 0:
        return
    cap = np.eye(factors.rank) + factors.singular_values[:, None] * (factors.v.T @ factors.u)
    det = np.linalg.det(cap)
    if abs(det) < 1e-8:
        warnings.warn(
            f"identity-plus-low-rank transform is close to singular (|det|={abs(det):.3e})",
            stacklevel=3,
        )


def build_lowrank_linv(
    lin: LinearizationState,
    rank: int,
    oversample: int = 5,
    rng: np.random.Generator | None = None,
    sketch: np.ndarray | None = None,
) -> Preconditioner:
    """Low-rank identity-plus-tail approximation of the propagation map.

    Rank 0 skips the sketch entirely and yields the covariance square root
    alone (every tangent-linear block treated as zero).
    """
    if rank == 0:
        return Preconditioner(LOWRANK_LINV, lin, LowRankSVD.empty(lin.size))
    factors = rsvd(propagation_tail_operator(lin), rank, oversample, rng, sketch)
    _check_near_singular(factors)
    return Preconditioner(LOWRANK_LINV, lin, factors)


def build_lowrank_s(
    lin: LinearizationState,
    rank: int,
    oversample: int = 5,
    rng: np.random.Generator | None = None,
    sketch: np.ndarray | None = None,
) -> Preconditioner:
    """Covariance square root plus a low-rank approximation of the scaled
    strict propagation."""
    if rank == 0:
        return Preconditioner(LOWRANK_S, lin, LowRankSVD.empty(lin.size))
    factors = rsvd(scaled_propagation_tail_operator(lin), rank, oversample, rng, sketch)
    return Preconditioner(LOWRANK_S, lin, factors)


def make_preconditioner(
    kind: str,
    lin: LinearizationState,
    rank: int = 0,
    oversample: int = 5,
    rng: np.random.Generator | None = None,
) -> Preconditioner:
    """Build any variant by name (the names match the CLI flags)."""
    if kind == NONE:
        return Preconditioner(NONE)
    if kind == EXACT:
        return Preconditioner(EXACT, lin)
    if kind == LOWRANK_LINV:
        return build_lowrank_linv(lin, rank, oversample, rng)
    if kind == LOWRANK_S:
        return build_lowrank_s(lin, rank, oversample, rng)
    raise ValueError(f"unknown preconditioner variant {kind!r}")
