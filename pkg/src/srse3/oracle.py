"""Fixed-step RK4 integration of the vertical (momentum) system.

This is the reference the closed forms are checked against, so it never calls
into :mod:`srse3.controls`. The state is ``(u1, ..., u6, U)`` with
``U' = u3`` appended; ``u6`` is carried but never updated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

#: oracle density used by the tests and the CLI unless overridden
DEFAULT_STEPS_PER_UNIT = 10_000


class VerticalState(NamedTuple):
    t: float
    u1: float
    u2: float
    u3: float
    u4: float
    u5: float
    u6: float
    U: float


def vertical_rhs(u) -> np.ndarray:
    """Right-hand side of the vertical system for ``u = (u1, ..., u6)``."""
    u1, u2, u3, u4, u5, u6 = (float(v) for v in u[:6])
    return np.array(
        [-u3 * u5, u3 * u4, u1 * u5 - u2 * u4, u2 * u3 - u5 * u6, u4 * u6 - u1 * u3, 0.0]
    )


@njit(cache=True)
def _f7(y, out):
    u1, u2, u3, u4, u5, u6 = y[0], y[1], y[2], y[3], y[4], y[5]
    # u1/u5 and u2/u4 terms are written so that u1 = -u5, u2 = u4 (and the
    # mirrored pair) survive a step bit-for-bit.
    out[0] = -(u3 * u5)
    out[1] = u3 * u4
    out[2] = u1 * u5 - u2 * u4
    out[3] = u2 * u3 - u5 * u6
    out[4] = u4 * u6 - u1 * u3
    out[5] = 0.0
    out[6] = u3


@njit(cache=True)
def _rk4_vertical(y0, h, n_steps, stride):
    n_rec = n_steps // stride + 1
    out = np.empty((n_rec, 7))
    y = y0.copy()
    out[0] = y
    k1 = np.empty(7)
    k2 = np.empty(7)
    k3 = np.empty(7)
    k4 = np.empty(7)
    tmp = np.empty(7)
    r = 1
    for i in range(n_steps):
        _f7(y, k1)
        for j in range(7):
            tmp[j] = y[j] + 0.5 * h * k1[j]
        _f7(tmp, k2)
        for j in range(7):
            tmp[j] = y[j] + 0.5 * h * k2[j]
        _f7(tmp, k3)
        for j in range(7):
            tmp[j] = y[j] + h * k3[j]
        _f7(tmp, k4)
        for j in range(7):
            if j != 5:
                y[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        if (i + 1) % stride == 0:
            out[r] = y
            r += 1
    return out


@njit(cache=True)
def _rk4_vertical_batch(Y0, h, n_steps, stride):
    n = Y0.shape[0]
    out = np.empty((n_steps // stride + 1, n, 7))
    for i in range(n):
        out[:, i, :] = _rk4_vertical(Y0[i], h, n_steps, stride)
    return out


@dataclass(frozen=True)
class VerticalTrack:
    """Recorded oracle states: ``u`` has shape ``(n, 6)``, ``t`` and ``U`` shape ``(n,)``."""

    t: np.ndarray
    u: np.ndarray
    U: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, i) -> VerticalState:
        return VerticalState(float(self.t[i]), *map(float, self.u[i]), float(self.U[i]))


def _initial_state(m) -> np.ndarray:
    if hasattr(m, "as_array"):
        u = list(m.as_array()) + [getattr(m, "u6_0", 0.0)]
    else:
        u = [float(v) for v in m]
        if len(u) == 5:
            u.append(0.0)
    if len(u) != 6:
        raise ValueError(f"expected 5 or 6 momentum components, got {len(u)}")
    return np.array(u + [0.0])


def integrate_vertical(m, t1: float, n_steps: int, stride: int = 1) -> VerticalTrack:
    """Classical RK4 with step ``t1 / n_steps``.

    ``m`` is an :class:`~srse3.controls.InitialMomentum` or a plain sequence of
    5 or 6 momenta (a nonzero sixth component is allowed here). Every
    ``stride``-th state is recorded, including the initial one.
    """
    if not t1 > 0:
        raise ValueError("t1 must be positive")
    if n_steps < 1 or stride < 1 or n_steps % stride:
        raise ValueError("n_steps must be a positive multiple of stride")
    h = t1 / n_steps
    out = _rk4_vertical(_initial_state(m), h, int(n_steps), int(stride))
    t = np.arange(out.shape[0]) * (h * stride)
    return VerticalTrack(t, out[:, :6], out[:, 6])


def integrate_vertical_batch(momenta, t1: float, n_steps: int, stride: int = 1):
    """Integrate many initial momenta at once.

    Returns:
        ``(t, states)`` with ``states`` of shape ``(n_records, n_momenta, 7)``.
    """
    if n_steps % stride:
        raise ValueError("n_steps must be a multiple of stride")
    Y0 = np.array([_initial_state(m) for m in momenta])
    h = t1 / n_steps
    out = _rk4_vertical_batch(Y0, h, int(n_steps), int(stride))
    return np.arange(out.shape[0]) * (h * stride), out


@njit(cache=True)
def _f_full(y, out):
    u1, u2, u3, u4, u5, u6 = y[0], y[1], y[2], y[3], y[4], y[5]
    th, be, al = y[9], y[10], y[11]
    cb = math.cos(be)
    sb = math.sin(be)
    ca = math.cos(al)
    sa = math.sin(al)
    out[0] = -(u3 * u5)
    out[1] = u3 * u4
    out[2] = u1 * u5 - u2 * u4
    out[3] = u2 * u3 - u5 * u6
    out[4] = u4 * u6 - u1 * u3
    out[5] = 0.0
    out[6] = u3 * sb
    out[7] = -u3 * cb * math.sin(th)
    out[8] = u3 * cb * math.cos(th)
    w = u4 * ca - u5 * sa
    out[9] = w / cb
    out[10] = u4 * sa + u5 * ca
    out[11] = -w * sb / cb + u6


@njit(cache=True)
def _rk4_full(y0, h, n_steps, stride):
    out = np.empty((n_steps // stride + 1, 12))
    y = y0.copy()
    out[0] = y
    k1 = np.empty(12)
    k2 = np.empty(12)
    k3 = np.empty(12)
    k4 = np.empty(12)
    tmp = np.empty(12)
    r = 1
    for i in range(n_steps):
        _f_full(y, k1)
        for j in range(12):
            tmp[j] = y[j] + 0.5 * h * k1[j]
        _f_full(tmp, k2)
        for j in range(12):
            tmp[j] = y[j] + 0.5 * h * k2[j]
        _f_full(tmp, k3)
        for j in range(12):
            tmp[j] = y[j] + h * k3[j]
        _f_full(tmp, k4)
        for j in range(12):
            y[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
        if (i + 1) % stride == 0:
            out[r] = y
            r += 1
    return out


def integrate_hamiltonian(m, t1: float, n_steps: int, stride: int = 1):
    """RK4 on the full Hamiltonian system (momenta and angle-chart pose together).

    The pose starts at the identity. Angles are left unwrapped.

    Returns:
        ``(t, u, q)`` with ``u`` of shape ``(n, 6)`` and ``q`` of shape ``(n, 6)``
        holding ``(x, y, z, theta, beta, alpha)``.
    """
    if n_steps % stride:
        raise ValueError("n_steps must be a multiple of stride")
    y0 = np.zeros(12)
    y0[:6] = _initial_state(m)[:6]
    h = t1 / n_steps
    out = _rk4_full(y0, h, int(n_steps), int(stride))
    return np.arange(out.shape[0]) * (h * stride), out[:, :6], out[:, 6:]
