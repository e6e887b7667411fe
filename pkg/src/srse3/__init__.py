"""Extremal controls and geodesics of the sub-Riemannian problem on SE(3), u6 = 0."""

__version__ = "0.1.0"

from .controls import (
    Case,
    CaseParams,
    ControlSample,
    InitialMomentum,
    classify,
    eval_controls,
    eval_u3_U,
    extremal_controls,
    first_integrals,
)
from .elliptic import JacobiTriple, complete_K, incomplete_F, incomplete_F_tan, jacobi_sn_cn_dn
from .errors import ChartSingularityError, DomainError, UnsupportedMomentumError
from .geodesic import Trajectory, check_invariants, horizontal_rhs, integrate_geodesic
from .kinematics import Pose, frame_fields, matrix_to_pose, pose_to_matrix, rho_invariants
from .oracle import integrate_vertical, vertical_rhs

__all__ = [
    "Case", "CaseParams", "ChartSingularityError", "ControlSample", "DomainError",
    "InitialMomentum", "JacobiTriple", "Pose", "Trajectory", "UnsupportedMomentumError",
    "check_invariants", "classify", "complete_K", "eval_controls", "eval_u3_U",
    "extremal_controls", "first_integrals", "frame_fields", "horizontal_rhs",
    "incomplete_F", "incomplete_F_tan", "integrate_geodesic", "integrate_vertical", "jacobi_sn_cn_dn",
    "matrix_to_pose", "pose_to_matrix", "rho_invariants", "vertical_rhs",
]
