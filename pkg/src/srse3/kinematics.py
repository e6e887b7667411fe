"""Angle chart of SE(3), the left-invariant frame and right-invariant momenta.

A rotation is written ``R = Rx(theta) @ Ry(beta) @ Rz(alpha)`` with
``theta in [-pi/2, pi/2)``, ``beta in [-pi, pi)``, ``alpha in [0, 2*pi)``.
The chart degenerates where ``cos(beta) = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ChartSingularityError

#: |sin(beta)| at or beyond ``1 - CHART_EPS`` counts as singular.
CHART_EPS = 1e-9

_TWO_PI = 2.0 * math.pi


@njit(cache=True)
def _wrap(angle: float, lo: float, width: float) -> float:
    w = (angle - lo) % width
    if w >= width:  # float modulo can land exactly on ``width``
        w = 0.0
    return lo + w


@njit(cache=True)
def normalize_angles(theta: float, beta: float, alpha: float) -> tuple[float, float, float]:
    """Map any angle triple to the canonical ranges without changing the rotation.

    ``theta`` has period 2*pi as a rotation angle, so shifting it into a
    half-width range uses ``(theta, beta, alpha) ~ (theta + pi, pi - beta, alpha + pi)``.
    """
    theta = _wrap(theta, -math.pi, _TWO_PI)
    if theta >= 0.5 * math.pi:
        theta, beta, alpha = theta - math.pi, math.pi - beta, alpha + math.pi
    elif theta < -0.5 * math.pi:
        theta, beta, alpha = theta + math.pi, math.pi - beta, alpha + math.pi
    return theta, _wrap(beta, -math.pi, _TWO_PI), _wrap(alpha, 0.0, _TWO_PI)


@dataclass(frozen=True)
class Pose:
    """Point of SE(3) in the angle chart; angles are normalized on construction."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    theta: float = 0.0
    beta: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        th, be, al = normalize_angles(self.theta, self.beta, self.alpha)
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "beta", be)
        object.__setattr__(self, "alpha", al)
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def identity(cls) -> "Pose":
        return cls()

    def as_array(self) -> np.ndarray:
        """Coordinates in the order ``(x, y, z, theta, beta, alpha)``."""
        return np.array([self.x, self.y, self.z, self.theta, self.beta, self.alpha])


def rotation_matrix(theta: float, beta: float, alpha: float) -> np.ndarray:
    ct, st = math.cos(theta), math.sin(theta)
    cb, sb = math.cos(beta), math.sin(beta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array(
        [
            [ca * cb, -cb * sa, sb],
            [ct * sa + ca * sb * st, ca * ct - sa * sb * st, -cb * st],
            [sa * st - ca * ct * sb, ct * sa * sb + ca * st, cb * ct],
        ]
    )


def pose_to_matrix(g: Pose) -> np.ndarray:
    """Homogeneous 4x4 matrix of a pose."""
    M = np.eye(4)
    M[:3, :3] = rotation_matrix(g.theta, g.beta, g.alpha)
    M[:3, 3] = (g.x, g.y, g.z)
    return M


def matrix_to_pose(M: np.ndarray) -> Pose:
    """Inverse of :func:`pose_to_matrix`.

    Raises:
        ChartSingularityError: if ``|M[0, 2]| >= 1 - CHART_EPS``.
    """
    M = np.asarray(M, dtype=float)
    s = M[0, 2]
    if abs(s) >= 1.0 - CHART_EPS:
        raise ChartSingularityError(f"|sin(beta)| = {abs(s):.17g} at the chart singularity")
    beta = math.asin(s)
    alpha = math.atan2(-M[0, 1], M[0, 0])
    theta = math.atan2(-M[1, 2], M[2, 2])
    # Pose() folds theta outside [-pi/2, pi/2) onto the cos(beta) < 0 branch
    return Pose(M[0, 3], M[1, 3], M[2, 3], theta, beta, alpha)


def _check_chart(beta: float) -> float:
    cb = math.cos(beta)
    if abs(cb) <= math.sqrt(CHART_EPS * (2.0 - CHART_EPS)):
        raise ChartSingularityError(f"cos(beta) = {cb:.3g}: angle chart is singular")
    return cb


def frame_fields(g: Pose) -> np.ndarray:
    """Left-invariant fields A1..A6 at ``g``.

    Returns a ``(6, 6)`` array whose row ``i`` holds the components of
    ``A_{i+1}`` along ``(d_x, d_y, d_z, d_theta, d_beta, d_alpha)``.
    """
    cb = _check_chart(g.beta)
    R = rotation_matrix(g.theta, g.beta, g.alpha)
    sb = math.sin(g.beta)
    ca, sa = math.cos(g.alpha), math.sin(g.alpha)
    tb = sb / cb
    out = np.zeros((6, 6))
    # A1, A2, A3 translate along the body axes (the columns of R)
    out[0, :3] = R[:, 0]
    out[1, :3] = R[:, 1]
    out[2, :3] = R[:, 2]
    out[3, 3:] = (ca / cb, sa, -ca * tb)
    out[4, 3:] = (-sa / cb, ca, sa * tb)
    out[5, 5] = 1.0
    return out


def rho_invariants(u, g: Pose) -> tuple[float, float, float]:
    """Right-invariant Hamiltonians ``(rho1, rho2, rho3)``; only ``u[0:3]`` enter."""
    u1, u2, u3 = float(u[0]), float(u[1]), float(u[2])
    ct, st = math.cos(g.theta), math.sin(g.theta)
    cb, sb = math.cos(g.beta), math.sin(g.beta)
    ca, sa = math.cos(g.alpha), math.sin(g.alpha)
    rho1 = -u1 * ca * cb + u2 * cb * sa - u3 * sb
    rho2 = -ct * (u2 * ca + u1 * sa) + (u3 * cb + (-u1 * ca + u2 * sa) * sb) * st
    rho3 = -u3 * cb * ct + ct * (u1 * ca - u2 * sa) * sb - (u2 * ca + u1 * sa) * st
    return rho1, rho2, rho3


def rho_from_matrix(u, R: np.ndarray) -> np.ndarray:
    """Same quantities as :func:`rho_invariants`, computed as ``-R @ (u1, u2, u3)``."""
    return -(np.asarray(R)[:3, :3] @ np.asarray(u[:3], dtype=float))


def hat(w) -> np.ndarray:
    """Skew-symmetric matrix with ``hat(w) @ v == cross(w, v)``."""
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


def body_velocity(u4: float, u5: float, u6: float = 0.0) -> np.ndarray:
    """Body angular velocity ``Omega`` with ``dR/dt = R @ Omega``.

    At the identity A4, A5, A6 reduce to d_theta, d_beta, d_alpha, i.e. rotations
    about the x, y, z axes, so ``Omega = hat((u4, u5, u6))``.
    """
    return hat((u4, u5, u6))


def orthonormalize(R: np.ndarray) -> np.ndarray:
    """Gram-Schmidt on the columns of a near-rotation matrix."""
    c0 = R[:, 0] / np.linalg.norm(R[:, 0])
    c1 = R[:, 1] - (c0 @ R[:, 1]) * c0
    c1 /= np.linalg.norm(c1)
    c2 = np.cross(c0, c1)
    return np.column_stack((c0, c1, c2))
