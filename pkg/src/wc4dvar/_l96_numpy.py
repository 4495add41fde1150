"""Pure-numpy kernels for the Lorenz 96 model and its discrete linearisations.

This is the reference implementation; the compiled extension in
``_l96_kernels`` mirrors it operation for operation. Shape conventions:

* reference states ``x`` are 1-d arrays of length ``n``;
* perturbation arguments ``dx``/``dy`` may be ``(n,)`` vectors or ``(n, m)``
  blocks of columns, and the output matches the input shape.

The tangent-linear and adjoint kernels differentiate the discrete RK4 map
stage by stage, so the adjoint is the exact transpose of the tangent-linear
map in floating point up to rounding.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def tendency(x: np.ndarray, forcing: float) -> np.ndarray:
    """Cyclic quadratic-advection tendency with linear damping and forcing."""
    xm1 = np.roll(x, 1, axis=0)
    xm2 = np.roll(x, 2, axis=0)
    xp1 = np.roll(x, -1, axis=0)
    return (xp1 - xm2) * xm1 - x + forcing


def rk4_step(x: np.ndarray, forcing: float, dt: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of size ``dt``."""
    k1 = tendency(x, forcing)
    k2 = tendency(x + 0.5 * dt * k1, forcing)
    k3 = tendency(x + 0.5 * dt * k2, forcing)
    k4 = tendency(x + dt * k3, forcing)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _coeffs(x: np.ndarray, cols: bool) -> tuple[np.ndarray, np.ndarray]:
    """Jacobian coefficients of the tendency at ``x``, column-broadcast if needed."""
    xm1 = np.roll(x, 1)
    diff = np.roll(x, -1) - np.roll(x, 2)
    if cols:
        return xm1[:, None], diff[:, None]
    return xm1, diff


def _tendency_tlm(x: np.ndarray, dx: np.ndarray) -> np.ndarray:
    xm1, diff = _coeffs(x, dx.ndim == 2)
    return xm1 * (np.roll(dx, -1, axis=0) - np.roll(dx, 2, axis=0)) + diff * np.roll(dx, 1, axis=0) - dx


def _tendency_adj(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    # Mechanical transpose of _tendency_tlm: adjoint of v -> a * roll(v, s)
    # is w -> roll(a * w, -s).
    xm1, diff = _coeffs(x, w.ndim == 2)
    aw = xm1 * w
    return np.roll(aw, 1, axis=0) - np.roll(aw, -2, axis=0) + np.roll(diff * w, -1, axis=0) - w


def _stage_states(x: np.ndarray, forcing: float, dt: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    k1 = tendency(x, forcing)
    x2 = x + 0.5 * dt * k1
    k2 = tendency(x2, forcing)
    x3 = x + 0.5 * dt * k2
    k3 = tendency(x3, forcing)
    x4 = x + dt * k3
    return x2, x3, x4


def rk4_tlm(x: np.ndarray, forcing: float, dt: float, dx: np.ndarray) -> np.ndarray:
    """Exact Jacobian-vector product of ``rk4_step`` at ``x`` applied to ``dx``."""
    x2, x3, x4 = _stage_states(x, forcing, dt)
    dk1 = _tendency_tlm(x, dx)
    dk2 = _tendency_tlm(x2, dx + 0.5 * dt * dk1)
    dk3 = _tendency_tlm(x3, dx + 0.5 * dt * dk2)
    dk4 = _tendency_tlm(x4, dx + dt * dk3)
    return dx + (dt / 6.0) * (dk1 + 2.0 * dk2 + 2.0 * dk3 + dk4)


def rk4_adj(x: np.ndarray, forcing: float, dt: float, dy: np.ndarray) -> np.ndarray:
    """Exact transpose of the ``rk4_tlm`` linear map at ``x`` applied to ``dy``."""
    x2, x3, x4 = _stage_states(x, forcing, dt)
    u4 = _tendency_adj(x4, (dt / 6.0) * dy)
    out = dy + u4
    u3 = _tendency_adj(x3, (dt / 3.0) * dy + dt * u4)
    out += u3
    u2 = _tendency_adj(x2, (dt / 3.0) * dy + 0.5 * dt * u3)
    out += u2
    out += _tendency_adj(x, (dt / 6.0) * dy + 0.5 * dt * u2)
    return out
