"""Lorenz 96 model, RK4 time stepping, and exact discrete linearisations.

The tangent-linear and adjoint maps are the exact derivative and transpose
of the discrete RK4 update (differentiate-the-scheme), so adjoint identities
hold to machine precision. Stage reference states are recomputed from the
reference state on every call; the operators carry no hidden state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend


class ModelOverflowError(RuntimeError):
    """The integration produced non-finite values (state left the attractor)."""


@dataclass(frozen=True)
class ModelConfig:
    """Model dimension, constant forcing, and RK4 time step."""

    n: int
    forcing: float = 8.0
    dt: float = 2.5e-2

    def __post_init__(self) -> None:
        if self.n < 4:
            raise ValueError(f"cyclic coupling needs n >= 4, got n={self.n}")
        if not math.isfinite(self.forcing):
            raise ValueError("forcing must be finite")
        # dt == 0 is allowed (the step is then the identity map)
        if not (self.dt >= 0.0 and math.isfinite(self.dt)):
            raise ValueError(f"time step must be finite and >= 0, got {self.dt}")


def _check_state(cfg: ModelConfig, x: np.ndarray, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != cfg.n:
        raise ValueError(f"{name} has leading dimension {x.shape[0]}, expected n={cfg.n}")
    return x


def tendency(cfg: ModelConfig, x: np.ndarray) -> np.ndarray:
    """Time derivative of the state (cyclic advection, damping, forcing)."""
    x = _check_state(cfg, x, "state")
    return _backend.tendency(x, cfg.forcing)


def step_rk4(cfg: ModelConfig, x: np.ndarray) -> np.ndarray:
    """Advance the state one time step with the classical RK4 scheme.

    Raises
    ------
    ModelOverflowError
        If the update contains non-finite entries.
    """
    x = _check_state(cfg, x, "state")
    out = _backend.rk4_step(x, cfg.forcing, cfg.dt)
    if not np.all(np.isfinite(out)):
        raise ModelOverflowError("RK4 step produced non-finite values")
    return out


def step_tlm(cfg: ModelConfig, x_ref: np.ndarray, dx: np.ndarray) -> np.ndarray:
    """Tangent-linear RK4 step: exact Jacobian of ``step_rk4`` at ``x_ref``
    applied to ``dx``. ``dx`` may be a vector or an ``(n, m)`` block of columns."""
    x_ref = _check_state(cfg, x_ref, "reference state")
    dx = _check_state(cfg, dx, "perturbation")
    return _backend.rk4_tlm(x_ref, cfg.forcing, cfg.dt, dx)


def step_adj(cfg: ModelConfig, x_ref: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Adjoint RK4 step: exact transpose of the ``step_tlm`` map at ``x_ref``."""
    x_ref = _check_state(cfg, x_ref, "reference state")
    dy = _check_state(cfg, dy, "adjoint seed")
    return _backend.rk4_adj(x_ref, cfg.forcing, cfg.dt, dy)


def integrate(cfg: ModelConfig, x0: np.ndarray, steps: int) -> np.ndarray:
    """Integrate ``steps`` RK4 steps; returns the ``(steps + 1, n)`` trajectory
    including the initial state."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    x0 = _check_state(cfg, x0, "initial state")
    out = np.empty((steps + 1, cfg.n))
    out[0] = x0
    for i in range(steps):
        out[i + 1] = step_rk4(cfg, out[i])
    return out
