"""Randomised singular value decomposition of a matrix-free operator.

Sketch-project-truncate scheme with oversampling: draw a Gaussian test
matrix with ``rank + oversample`` columns, sample the operator range,
orthonormalise, and by default complete one full round of the classic
subspace iteration (one extra forward/transpose product pair) before
projecting; then take the small dense SVD of the projection and drop the
``oversample`` smallest triplets. Only forward and transpose block products
with the operator are required, and every block product may be evaluated
column-parallel.

The single refinement round costs two extra block products per build and is
what makes the retained triplets track the true leading spectrum on
operators whose singular values decay slowly beyond the target rank; pass
``refinement_passes=0`` for the plain single-pass sketch. More than one
round is out of scope.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Protocol

import numpy as np


class SketchableOperator(Protocol):
    """Square matrix-free operator exposing mutually adjoint block products."""

    dim: int

    def matmat(self, block: np.ndarray) -> np.ndarray:
        """Forward product with an ``(dim, m)`` block of columns."""
        ...

    def rmatmat(self, block: np.ndarray) -> np.ndarray:
        """Transpose product with an ``(dim, m)`` block of columns."""
        ...


@dataclass(frozen=True)
class LowRankSVD:
    """Rank-k factors: orthonormal left/right vectors and descending values."""

    u: np.ndarray  # (dim, rank)
    singular_values: np.ndarray  # (rank,)
    v: np.ndarray  # (dim, rank)
    rank: int
    oversample: int

    @classmethod
    def empty(cls, dim: int) -> "LowRankSVD":
        """Rank-0 factors (the zero operator)."""
        return cls(
            u=np.zeros((dim, 0)),
            singular_values=np.zeros(0),
            v=np.zeros((dim, 0)),
            rank=0,
            oversample=0,
        )

    def apply(self, w: np.ndarray) -> np.ndarray:
        """Product of the reconstructed low-rank matrix with a vector."""
        return self.u @ (self.singular_values * (self.v.T @ w))

    def apply_t(self, w: np.ndarray) -> np.ndarray:
        return self.v @ (self.singular_values * (self.u.T @ w))


def _orthonormalise(sample: np.ndarray, label: str) -> np.ndarray:
    basis, tri = np.linalg.qr(sample, mode="reduced")
    diag = np.abs(np.diag(tri))
    tiny = diag <= max(1e-300, sample.shape[0] * np.finfo(np.float64).eps * (diag.max() or 1.0))
    if tiny.any():
        warnings.warn(
            f"{label} is numerically rank deficient ({int(tiny.sum())} of "
            f"{sample.shape[1]} columns dependent); effective rank is reduced",
            stacklevel=3,
        )
    return basis


def rsvd(
    op: SketchableOperator,
    rank: int,
    oversample: int = 5,
    rng: np.random.Generator | None = None,
    sketch: np.ndarray | None = None,
    refinement_passes: int = 1,
) -> LowRankSVD:
    """Approximate the leading ``rank`` singular triplets of ``op``.

    Parameters
    ----------
    op : operator with ``dim``, ``matmat``, ``rmatmat``
    rank : number of retained triplets (k >= 1)
    oversample : extra sketch columns, truncated after the small SVD
    rng : source for the Gaussian test matrix (ignored if ``sketch`` given)
    sketch : optional pre-drawn ``(dim, rank + oversample)`` Gaussian test
        matrix; supplying leading columns of a shared matrix makes runs with
        different ranks use nested sketches
    refinement_passes : 0 for the plain one-pass range sketch, 1 (default)
        to complete a full subspace-iteration round before projecting
    """
    s = op.dim
    if rank < 1:
        raise ValueError("rank must be >= 1")
    if oversample < 0:
        raise ValueError("oversample must be >= 0")
    if rank + oversample > s:
        raise ValueError(f"rank + oversample = {rank + oversample} exceeds dimension {s}")
    if refinement_passes not in (0, 1):
        raise ValueError("refinement_passes must be 0 or 1 (more rounds are out of scope)")

    width = rank + oversample
    if sketch is None:
        if rng is None:
            raise ValueError("either rng or sketch must be supplied")
        sketch = rng.standard_normal((s, width))
    elif sketch.shape != (s, width):
        raise ValueError(f"sketch must have shape ({s}, {width})")

    basis = _orthonormalise(op.matmat(sketch), "range sketch")
    for _ in range(refinement_passes):
        basis = _orthonormalise(op.matmat(op.rmatmat(basis)), "refined range sketch")

    projected = op.rmatmat(basis).T  # equals basis.T @ op, built from transpose products
    u_small, values, vt = np.linalg.svd(projected, full_matrices=False)
    return LowRankSVD(
        u=basis @ u_small[:, :rank],
        singular_values=values[:rank],
        v=vt[:rank].T,
        rank=rank,
        oversample=oversample,
    )
