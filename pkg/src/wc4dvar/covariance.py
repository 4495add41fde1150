"""Stationary correlation models on the periodic grid and SPD covariances.

Two correlation families are provided. The second-order autoregressive
family evaluates ``(1 + d/L) exp(-d/L)`` at the minimum-image (ring)
distance ``d``. The diffusion family is built as the diagonal-renormalised
inverse of ``I + L^4 * Delta^2``, where ``Delta`` is the periodic
second-difference operator scaled by ``1/dx^2``; the inverse is circulant,
so the renormalisation reduces to one scalar division and the result keeps
a unit diagonal by construction.

Covariance operators store the scaled matrix together with its symmetric
square root, inverse square root, and inverse, all obtained from one
symmetric eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SOAR = "soar"
LAPLACIAN = "laplacian"
IDENTITY = "identity"
_KINDS = (SOAR, LAPLACIAN, IDENTITY)


class NotPositiveDefiniteError(RuntimeError):
    """A correlation or covariance matrix failed positive definiteness."""


@dataclass(frozen=True)
class CorrelationSpec:
    """Correlation family, dimension, grid spacing, and length scale."""

    kind: str
    n: int
    dx: float = 1.0
    lengthscale: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown correlation kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        if self.kind != IDENTITY:
            if not self.lengthscale > 0.0:
                raise ValueError("lengthscale must be > 0")
            if not self.dx > 0.0:
                raise ValueError("grid spacing must be > 0")


def _ring_distance(n: int, dx: float) -> np.ndarray:
    idx = np.arange(n)
    offsets = np.abs(np.subtract.outer(idx, idx))
    return np.minimum(offsets, n - offsets) * dx


def build_correlation(spec: CorrelationSpec) -> np.ndarray:
    """Construct the n-by-n correlation matrix for ``spec``.

    Raises
    ------
    NotPositiveDefiniteError
        If the constructed matrix is not positive definite.
    """
    if spec.kind == IDENTITY:
        return np.eye(spec.n)
    if spec.kind == SOAR:
        r = _ring_distance(spec.n, spec.dx) / spec.lengthscale
        corr = (1.0 + r) * np.exp(-r)
    else:
        # periodic second difference, scaled to the grid
        n = spec.n
        second = -2.0 * np.eye(n)
        idx = np.arange(n)
        second[idx, (idx + 1) % n] += 1.0
        second[idx, (idx - 1) % n] += 1.0
        second /= spec.dx**2
        smoother = np.linalg.inv(np.eye(n) + spec.lengthscale**4 * (second @ second))
        smoother = 0.5 * (smoother + smoother.T)
        scale = np.sqrt(np.diag(smoother))
        corr = smoother / np.outer(scale, scale)
        corr = 0.5 * (corr + corr.T)
    if np.linalg.eigvalsh(corr).min() <= 0.0:
        raise NotPositiveDefiniteError(
            f"{spec.kind} correlation (n={spec.n}, L={spec.lengthscale}) is not positive definite"
        )
    return corr


@dataclass(frozen=True)
class CovarianceOperator:
    """SPD covariance ``sigma^2 * C`` with cached symmetric factors.

    ``sigma == 0`` gives the zero operator: sampling works (and returns
    zeros), but the inverse factors are unavailable.
    """

    matrix: np.ndarray
    sqrt: np.ndarray
    sigma: float
    inv_sqrt: np.ndarray | None = field(default=None, repr=False)
    inv: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def apply_inv(self, v: np.ndarray) -> np.ndarray:
        if self.inv is None:
            raise NotPositiveDefiniteError("zero covariance has no inverse")
        return self.inv @ v

    def apply_sqrt(self, v: np.ndarray) -> np.ndarray:
        return self.sqrt @ v


def make_covariance(corr: np.ndarray, sigma: float) -> CovarianceOperator:
    """Scale a unit-diagonal correlation matrix by ``sigma^2`` and factor it.

    The symmetric square root and its inverse come from the eigendecomposition
    of ``corr``; an eigenvalue <= 0 raises ``NotPositiveDefiniteError``.
    """
    corr = np.asarray(corr, dtype=np.float64)
    if corr.ndim != 2 or corr.shape[0] != corr.shape[1]:
        raise ValueError("correlation must be a square matrix")
    if not np.allclose(corr, corr.T, rtol=0.0, atol=1e-10):
        raise ValueError("correlation must be symmetric")
    if not np.allclose(np.diag(corr), 1.0, rtol=0.0, atol=1e-8):
        raise ValueError("correlation must have unit diagonal")
    if sigma < 0.0:
        raise ValueError("sigma must be >= 0")

    n = corr.shape[0]
    if sigma == 0.0:
        zero = np.zeros((n, n))
        return CovarianceOperator(matrix=zero, sqrt=zero.copy(), sigma=0.0)

    w, vecs = np.linalg.eigh(corr)
    if w.min() <= 0.0:
        raise NotPositiveDefiniteError(f"correlation has smallest eigenvalue {w.min():.3e}")

    def _sym(values: np.ndarray) -> np.ndarray:
        m = (vecs * values) @ vecs.T
        return 0.5 * (m + m.T)

    return CovarianceOperator(
        matrix=_sym(sigma**2 * w),
        sqrt=_sym(sigma * np.sqrt(w)),
        inv_sqrt=_sym(1.0 / (sigma * np.sqrt(w))),
        inv=_sym(1.0 / (sigma**2 * w)),
        sigma=sigma,
    )


def sample_gaussian(cov: CovarianceOperator, rng: np.random.Generator) -> np.ndarray:
    """Draw one zero-mean sample with covariance ``cov.matrix``."""
    return cov.sqrt @ rng.standard_normal(cov.n)


@dataclass(frozen=True)
class CovarianceSet:
    """Per-block error covariances of the space-time problem: one for the
    initial-state error, one per model step."""

    background: CovarianceOperator
    model_error: tuple[CovarianceOperator, ...]

    def block(self, i: int) -> CovarianceOperator:
        """Covariance of time block ``i`` (0 is the initial-state block)."""
        return self.background if i == 0 else self.model_error[i - 1]

    @property
    def window(self) -> int:
        return len(self.model_error)
