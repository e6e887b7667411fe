"""Integration of geodesics driven by the closed-form controls.

Two backends share one non-autonomous RK4 scheme (controls are evaluated in
closed form at every stage time):

``angles``
    the six scalar equations in the ``(x, y, z, theta, beta, alpha)`` chart;
    aborts with :class:`ChartSingularityError` when ``cos(beta)`` nears 0.
``matrix``
    ``p' = u3 R e3`` and ``R' = R hat(u4, u5, 0)`` on the rotation matrix,
    re-orthonormalized after every step; valid everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .controls import CaseParams, ControlSample, InitialMomentum, classify, eval_controls, first_integrals
from .errors import ChartSingularityError
from .kinematics import (
    Pose,
    _check_chart,
    matrix_to_pose,
    normalize_angles,
    pose_to_matrix,
    rho_from_matrix,
    rho_invariants,
)

BACKENDS = ("angles", "matrix")
#: largest internal RK4 step
MAX_STEP = 1e-3
#: the angles backend stops once beta is this close to +-pi/2
SINGULARITY_MARGIN = 1e-6
#: angles backend: a step where |cos(beta)| < REFINE_COS is split into
#: ceil(REFINE_COS / |cos(beta)|) pieces, at most MAX_REFINE
REFINE_COS = 0.1
MAX_REFINE = 4096


def horizontal_rhs(g: Pose, u) -> np.ndarray:
    """Velocity ``(x', y', z', theta', beta', alpha')`` of ``u3 A3 + u4 A4 + u5 A5`` at ``g``.

    ``u`` is a scalar :class:`ControlSample` or a sequence ``(u1, ..., u5)``.
    """
    if isinstance(u, ControlSample):
        u3, u4, u5 = float(u.u3), float(u.u4), float(u.u5)
    else:
        u3, u4, u5 = (float(v) for v in u[2:5])
    cb = _check_chart(g.beta)
    sb = math.sin(g.beta)
    ct, st = math.cos(g.theta), math.sin(g.theta)
    ca, sa = math.cos(g.alpha), math.sin(g.alpha)
    w = u4 * ca - u5 * sa
    return np.array([u3 * sb, -u3 * cb * st, u3 * cb * ct, w / cb, u4 * sa + u5 * ca, -w * sb / cb])


@njit(cache=True)
def _angles_f(q, u3, u4, u5, out):
    th, be, al = q[3], q[4], q[5]
    cb = math.cos(be)
    sb = math.sin(be)
    ca = math.cos(al)
    sa = math.sin(al)
    w = u4 * ca - u5 * sa
    out[0] = u3 * sb
    out[1] = -u3 * cb * math.sin(th)
    out[2] = u3 * cb * math.cos(th)
    out[3] = w / cb
    out[4] = u4 * sa + u5 * ca
    out[5] = -w * sb / cb


@njit(cache=True)
def _chart_lost(c0, q, cos_min):
    # cos(beta) near zero, or changed sign within the step (a pole was crossed)
    c = math.cos(q[4])
    return abs(c) < cos_min or c * c0 < 0.0


@njit(cache=True)
def _integrate_angles(ctrl, hs, counts, cos_min):
    """RK4 over steps of size ``hs[k]`` with controls ``ctrl[2k : 2k + 3]``.

    ``counts[s]`` steps separate output sample ``s`` from ``s + 1``.
    Returns ``(coords, failed_step, cos_beta)``; ``failed_step`` is -1 on
    success, else the index of the step that lost the chart. ``cos_beta``
    holds ``cos(beta)`` after every completed step.
    """
    n_samples = counts.shape[0] + 1
    out = np.zeros((n_samples, 6))
    cosb = np.ones(hs.shape[0] + 1)
    q = np.zeros(6)
    k1 = np.empty(6)
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    tmp = np.empty(6)
    step = 0
    for s in range(1, n_samples):
        for _ in range(counts[s - 1]):
            h = hs[step]
            a = ctrl[2 * step]
            m = ctrl[2 * step + 1]
            b = ctrl[2 * step + 2]
            c0 = math.cos(q[4])
            lost = False
            _angles_f(q, a[0], a[1], a[2], k1)
            for j in range(6):
                tmp[j] = q[j] + 0.5 * h * k1[j]
            lost = lost or _chart_lost(c0, tmp, cos_min)
            _angles_f(tmp, m[0], m[1], m[2], k2)
            for j in range(6):
                tmp[j] = q[j] + 0.5 * h * k2[j]
            lost = lost or _chart_lost(c0, tmp, cos_min)
            _angles_f(tmp, m[0], m[1], m[2], k3)
            for j in range(6):
                tmp[j] = q[j] + h * k3[j]
            lost = lost or _chart_lost(c0, tmp, cos_min)
            _angles_f(tmp, b[0], b[1], b[2], k4)
            for j in range(6):
                q[j] = q[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if lost or _chart_lost(c0, q, cos_min):
                out[s:] = np.nan
                return out, step, cosb
            step += 1
            th, be, al = normalize_angles(q[3], q[4], q[5])
            q[3] = th
            q[4] = be
            q[5] = al
            cosb[step] = math.cos(be)
        out[s] = q
    return out, -1, cosb


@njit(cache=True)
def _matrix_f(R, u3, u4, u5, dp, dR):
    for i in range(3):
        dp[i] = u3 * R[i, 2]
        # R @ hat((u4, u5, 0))
        dR[i, 0] = R[i, 2] * (-u5)
        dR[i, 1] = R[i, 2] * u4
        dR[i, 2] = R[i, 0] * u5 - R[i, 1] * u4


@njit(cache=True)
def _gram_schmidt(R):
    c0 = R[:, 0] / math.sqrt(R[0, 0] ** 2 + R[1, 0] ** 2 + R[2, 0] ** 2)
    c1 = R[:, 1] - (c0[0] * R[0, 1] + c0[1] * R[1, 1] + c0[2] * R[2, 1]) * c0
    c1 = c1 / math.sqrt(c1[0] ** 2 + c1[1] ** 2 + c1[2] ** 2)
    R[:, 0] = c0
    R[:, 1] = c1
    R[0, 2] = c0[1] * c1[2] - c0[2] * c1[1]
    R[1, 2] = c0[2] * c1[0] - c0[0] * c1[2]
    R[2, 2] = c0[0] * c1[1] - c0[1] * c1[0]


@njit(cache=True)
def _integrate_matrix(ctrl, h, n_sub, n_samples):
    out = np.zeros((n_samples, 4, 4))
    p = np.zeros(3)
    R = np.eye(3)
    out[0] = np.eye(4)
    kp = np.empty((4, 3))
    kR = np.empty((4, 3, 3))
    Rt = np.empty((3, 3))
    step = 0
    for s in range(1, n_samples):
        for _ in range(n_sub):
            a = ctrl[2 * step]
            m = ctrl[2 * step + 1]
            b = ctrl[2 * step + 2]
            _matrix_f(R, a[0], a[1], a[2], kp[0], kR[0])
            Rt[:, :] = R + 0.5 * h * kR[0]
            _matrix_f(Rt, m[0], m[1], m[2], kp[1], kR[1])
            Rt[:, :] = R + 0.5 * h * kR[1]
            _matrix_f(Rt, m[0], m[1], m[2], kp[2], kR[2])
            Rt[:, :] = R + h * kR[2]
            _matrix_f(Rt, b[0], b[1], b[2], kp[3], kR[3])
            p += h / 6.0 * (kp[0] + 2.0 * kp[1] + 2.0 * kp[2] + kp[3])
            R += h / 6.0 * (kR[0] + 2.0 * kR[1] + 2.0 * kR[2] + kR[3])
            _gram_schmidt(R)
            step += 1
        out[s, :3, :3] = R
        out[s, :3, 3] = p
        out[s, 3, 3] = 1.0
    return out


@dataclass(frozen=True)
class Trajectory:
    """Geodesic sampled at equally spaced times, starting at the identity.

    ``matrices`` always holds the 4x4 poses. ``coords`` holds the chart
    coordinates ``(x, y, z, theta, beta, alpha)``; rows are NaN where the
    matrix backend passed through the chart singularity.
    ``invariant_log`` columns are ``H, W, rho1, rho2, rho3``.
    """

    t: np.ndarray
    matrices: np.ndarray
    coords: np.ndarray
    controls: ControlSample
    invariant_log: np.ndarray
    backend: str
    momentum: InitialMomentum
    params: CaseParams

    @property
    def poses(self) -> list[Pose | None]:
        return [None if np.isnan(c[0]) else Pose(*c) for c in self.coords]

    @property
    def samples(self) -> list[tuple[float, Pose | None, ControlSample]]:
        c = self.controls
        return [
            (float(ti), pose, ControlSample(float(ti), *(float(np.asarray(v)[i]) for v in (c.u1, c.u2, c.u3, c.u4, c.u5, c.U))))
            for i, (ti, pose) in enumerate(zip(self.t, self.poses))
        ]


def _internal_grid(t1: float, n_samples: int) -> tuple[int, float]:
    dt = t1 / (n_samples - 1)
    n_sub = max(1, math.ceil(dt / MAX_STEP - 1e-9))
    return n_sub, dt / n_sub


def _refinement(cosb: np.ndarray) -> np.ndarray | None:
    """Per-step split factors from ``cos(beta)`` at the step ends, or None."""
    c = np.abs(cosb)
    # the smallest value over a step and its neighbours, to catch dips between grid points
    c = np.minimum(c[:-1], c[1:])
    padded = np.pad(c, 1, mode="edge")
    c = np.minimum(c, np.minimum(padded[:-2], padded[2:]))
    if c.min() >= REFINE_COS:
        return None
    return np.clip(np.ceil(REFINE_COS / c), 1, MAX_REFINE).astype(np.int64)


def _refined_grid(refine: np.ndarray, h: float):
    """Start times, step sizes and the RK4 stage grid after splitting step ``j`` into ``refine[j]``."""
    base = np.repeat(np.arange(refine.size), refine)
    piece = np.arange(base.size) - np.repeat(np.cumsum(refine) - refine, refine)
    hs = h / refine[base]
    starts = base * h + piece * hs
    grid = np.empty(2 * base.size + 1)
    grid[0:-1:2] = starts
    grid[1::2] = starts + 0.5 * hs
    grid[-1] = refine.size * h
    return starts, hs, grid


def integrate_geodesic(
    m: InitialMomentum, t1: float, n_samples: int, backend: str = "angles"
) -> Trajectory:
    """Integrate the geodesic with initial momentum ``m`` on ``[0, t1]``.

    ``n_samples`` output times (both ends included); the internal step is
    at most :data:`MAX_STEP` and divides the output spacing. The angles
    backend shortens it further where ``|cos(beta)|`` is small, since its
    equations stiffen like ``1 / cos(beta)`` there.

    Raises:
        ChartSingularityError: angles backend only, when ``beta`` comes within
            :data:`SINGULARITY_MARGIN` of ``+-pi/2``; ``.t`` holds the time.
    """
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
    if not t1 > 0:
        raise ValueError("t1 must be positive")
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    cp = classify(m)
    cos_min = math.sin(SINGULARITY_MARGIN)
    n_sub, h = _internal_grid(t1, n_samples)
    n_steps = n_sub * (n_samples - 1)
    grid = np.arange(2 * n_steps + 1) * (0.5 * h)
    fine = eval_controls(grid, cp, m)
    ctrl = np.column_stack((fine.u3, fine.u4, fine.u5))
    t = np.linspace(0.0, t1, n_samples)
    t[1:-1] = np.arange(1, n_samples - 1) * (n_sub * h)
    controls = eval_controls(t, cp, m)

    if backend == "angles":
        counts = np.full(n_samples - 1, n_sub, dtype=np.int64)
        coords, failed, cosb = _integrate_angles(ctrl, np.full(n_steps, h), counts, cos_min)
        starts = np.arange(n_steps) * h
        if failed < 0:
            refine = _refinement(cosb)
            if refine is not None:
                starts, hs, grid = _refined_grid(refine, h)
                fine = eval_controls(grid, cp, m)
                ctrl = np.column_stack((fine.u3, fine.u4, fine.u5))
                counts = refine.reshape(n_samples - 1, n_sub).sum(axis=1)
                coords, failed, _ = _integrate_angles(ctrl, hs, counts, cos_min)
        if failed >= 0:
            tf = float(starts[failed])
            raise ChartSingularityError(f"angle chart singular (cos(beta) ~ 0) at t = {tf:.17g}", t=tf)
        matrices = np.array([pose_to_matrix(Pose(*c)) for c in coords])
    else:
        matrices = _integrate_matrix(ctrl, h, n_sub, n_samples)
        coords = np.full((n_samples, 6), np.nan)
        for i, M in enumerate(matrices):
            try:
                coords[i] = matrix_to_pose(M).as_array()
            except ChartSingularityError:
                pass

    H, W = first_integrals(controls)
    u = controls.momenta()
    rho = np.empty((n_samples, 3))
    for i in range(n_samples):
        if backend == "angles":
            rho[i] = rho_invariants(u[:, i], Pose(*coords[i]))
        else:
            rho[i] = rho_from_matrix(u[:, i], matrices[i])
    log = np.column_stack((H, W, rho))
    return Trajectory(t, matrices, coords, controls, log, backend, m, cp)


@dataclass(frozen=True)
class InvariantReport:
    """Max absolute deviation of each first integral from its t = 0 value."""

    H: float
    W: float
    rho1: float
    rho2: float
    rho3: float

    def as_dict(self) -> dict:
        return {"H": self.H, "W": self.W, "rho1": self.rho1, "rho2": self.rho2, "rho3": self.rho3}

    def worst(self) -> float:
        return max(self.as_dict().values())


def check_invariants(tr: Trajectory) -> InvariantReport:
    drift = np.max(np.abs(tr.invariant_log - tr.invariant_log[0]), axis=0)
    return InvariantReport(*(float(d) for d in drift))
