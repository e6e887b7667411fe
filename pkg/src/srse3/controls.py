"""Closed-form extremal controls for the u6 = 0 family.

Given the initial momenta ``u1(0)..u5(0)``, ``u3`` and its integral
``U(t) = int_0^t u3`` are known in closed form in three regimes, and the
remaining momenta follow from ``U``::

    u1 = (u1 + u5)/2 exp(-U) + (u1 - u5)/2 exp(U)
    u2 = (u2 + u4)/2 exp(U)  + (u2 - u4)/2 exp(-U)
    u4 = (u2 + u4)/2 exp(U)  - (u2 - u4)/2 exp(-U)
    u5 = (u1 + u5)/2 exp(-U) - (u1 - u5)/2 exp(U)

(initial values on the right).

The regime is decided by ``A = (u1+u5)^2 + (u2-u4)^2`` and
``B = (u1-u5)^2 + (u2+u4)^2`` at t = 0: ``A = 0`` gives a hyperbolic
solution decaying to ``u3 -> -b``, ``B = 0`` its mirror image, and
``A*B > 0`` the periodic solution in Jacobi elliptic functions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .elliptic import complete_K, incomplete_F, incomplete_F_tan, jacobi_sn_cn_dn
from .errors import UnsupportedMomentumError

#: A (or B) at or below ZERO_REL_TOL * (A + B) is treated as zero. Any
#: positive value would be wrong eventually: dropping the A-modes costs about
#: sqrt(A) exp(b t). A is computed to full relative accuracy and vanishes in
#: floating point only when u1 = -u5 and u2 = u4 exactly, and the elliptic
#: branch stays accurate arbitrarily close to the separatrix.
ZERO_REL_TOL = 0.0
#: |b t| beyond which the hyperbolic cases switch to the log-sum-exp form
STABLE_SWITCH = 30.0


class Case(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    TRIVIAL = "TRIVIAL"


@dataclass(frozen=True)
class InitialMomentum:
    u1_0: float
    u2_0: float
    u3_0: float
    u4_0: float
    u5_0: float
    u6_0: float = 0.0

    def __post_init__(self):
        for name in ("u1_0", "u2_0", "u3_0", "u4_0", "u5_0", "u6_0"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.u6_0 != 0.0:
            raise UnsupportedMomentumError(
                f"only u6(0) = 0 is supported, got u6(0) = {self.u6_0!r}"
            )

    @classmethod
    def from_sequence(cls, values) -> "InitialMomentum":
        values = [float(v) for v in values]
        if len(values) not in (5, 6):
            raise ValueError(f"expected 5 momentum components, got {len(values)}")
        return cls(*values)

    def as_array(self) -> np.ndarray:
        """The five momenta ``(u1, ..., u5)`` at t = 0."""
        return np.array([self.u1_0, self.u2_0, self.u3_0, self.u4_0, self.u5_0])


@dataclass(frozen=True)
class CaseParams:
    """Constants derived from the initial momenta.

    ``p0``, ``psi0`` and ``V0`` only exist in case III and are ``None``
    otherwise. ``k`` is ``P / Q`` (which equals 1 in cases I and II, and is
    set to 0 when ``Q = 0``). ``kc = sqrt(1 - k^2) = 2 (AB)^(1/4) / Q`` is
    kept separately because it is not recoverable from ``k`` when A*B is small.
    """

    case: Case
    A: float
    B: float
    b: float
    B1: float
    P: float
    Q: float
    k: float
    p0: float | None = None
    V0: float | None = None
    psi0: float | None = None
    kc: float | None = None

    def as_dict(self) -> dict:
        return {
            "case": self.case.value,
            "A": self.A,
            "B": self.B,
            "b": self.b,
            "B1": self.B1,
            "P": self.P,
            "Q": self.Q,
            "k": self.k,
            "p0": self.p0,
            "V0": self.V0,
            "psi0": self.psi0,
            "kc": self.kc,
        }


@dataclass(frozen=True)
class ControlSample:
    """Controls at one time or, with array fields, along a grid of times."""

    t: np.ndarray | float
    u1: np.ndarray | float
    u2: np.ndarray | float
    u3: np.ndarray | float
    u4: np.ndarray | float
    u5: np.ndarray | float
    U: np.ndarray | float

    def momenta(self) -> np.ndarray:
        """Stacked ``(u1, ..., u5)``, leading axis of length 5."""
        return np.stack([np.asarray(v, dtype=float) for v in (self.u1, self.u2, self.u3, self.u4, self.u5)])


def classify(m: InitialMomentum) -> CaseParams:
    if m.u6_0 != 0.0:
        raise UnsupportedMomentumError("only u6(0) = 0 is supported")
    u1, u2, u3, u4, u5 = (float(v) for v in m.as_array())
    A = (u1 + u5) ** 2 + (u2 - u4) ** 2
    B = (u1 - u5) ** 2 + (u2 + u4) ** 2
    tol = ZERO_REL_TOL * (A + B)
    a_zero, b_zero = A <= tol, B <= tol
    b = math.hypot(u3, u4, u5)
    B1 = u4 * u4 + u5 * u5
    sA, sB = math.sqrt(A), math.sqrt(B)
    # B - A = 4 (u2 u4 - u1 u5) exactly, which avoids cancellation when A ~ B
    gap = 4.0 * (u2 * u4 - u1 * u5)
    root_gap = gap / (sA + sB) if sA + sB > 0.0 else 0.0  # sqrt(B) - sqrt(A)
    P = math.hypot(2.0 * u3, root_gap)
    Q = math.hypot(2.0 * u3, sA + sB)

    ratio = P / Q if Q > 0.0 else 0.0
    if a_zero and b_zero and u3 == u4 == u5 == 0.0:
        return CaseParams(Case.TRIVIAL, A, B, b, B1, P, Q, 0.0)
    if a_zero:
        return CaseParams(Case.I, A, B, b, B1, P, Q, ratio)
    if b_zero:
        return CaseParams(Case.II, A, B, b, B1, P, Q, ratio)

    V0 = 0.5 * (math.log1p(gap / A) if abs(gap) < 0.5 * A else math.log(B / A))
    if P == 0.0:
        # u3(0) = 0 and A = B: the elliptic solution is the constant y = 0
        return CaseParams(Case.III, A, B, b, B1, P, Q, 0.0, 0.0, V0, 0.0, 1.0)
    k = min(1.0, P / Q)  # P <= Q exactly; the quotient may round above 1
    kc = min(1.0, 2.0 * math.sqrt(sA * sB) / Q)
    # sin(p0) = -2 u3 / P and cos(p0) = (sqrt(B) - sqrt(A)) / P reproduce
    # p0 = -asin(2 u3 / P) for B >= A and pi + asin(2 u3 / P) for B < A
    p0 = math.atan2(-2.0 * u3, root_gap)
    if gap < 0.0 and p0 < 0.0:
        p0 += 2.0 * math.pi
    return CaseParams(Case.III, A, B, b, B1, P, Q, k, p0, V0, _initial_phase(p0, u3, root_gap, k, kc), kc)


def _initial_phase(p0: float, u3: float, root_gap: float, k: float, kc: float) -> float:
    # Near cos(p0) = 0 the rounded p0 fixes cn(psi0) only to ~1e-16 absolute.
    # There p0 = n pi/2 + e with tan(e) = root_gap / (2 u3) known to full
    # relative accuracy, and F(n pi/2 + e) = n K + F(atan(tan(e) / kc)).
    if u3 == 0.0 or abs(root_gap) >= 2.0 * abs(u3):
        return incomplete_F(p0, k, kc)
    n = 2 * round((p0 - 0.5 * math.pi) / math.pi) + 1
    return n * complete_K(k, kc) + incomplete_F_tan(root_gap / (2.0 * u3) / kc, k, kc)


def _hyperbolic_decay(t: np.ndarray, u30: float, b: float, B1: float) -> tuple[np.ndarray, np.ndarray]:
    """``(u3, U)`` for ``U'' = -B1 exp(2U)``, ``U(0) = 0``, ``U'(0) = u30``."""
    # 1 + u30/b and 1 - u30/b without cancellation (b^2 = u30^2 + B1)
    if u30 >= 0.0:
        opc, omc = 1.0 + u30 / b, B1 / (b * (b + u30))
    else:
        opc, omc = B1 / (b * (b - u30)), 1.0 - u30 / b
    bt = b * t
    u3 = np.empty_like(t)
    U = np.empty_like(t)
    small = np.abs(bt) <= STABLE_SWITCH
    if np.any(small):
        em, ep = np.exp(-bt[small]), np.exp(bt[small])
        den = opc * em + omc * ep
        u3[small] = b * (opc * em - omc * ep) / den
        U[small] = -np.log(0.5 * den)
    big = ~small
    if np.any(big):
        l1 = (math.log(opc) if opc > 0.0 else -np.inf) - bt[big]
        l2 = (math.log(omc) if omc > 0.0 else -np.inf) + bt[big]
        top = np.maximum(l1, l2)
        w1, w2 = np.exp(l1 - top), np.exp(l2 - top)
        u3[big] = b * (w1 - w2) / (w1 + w2)
        U[big] = -(top + np.log(w1 + w2) - math.log(2.0))
    return u3, U


def eval_u3_U(t, cp: CaseParams, m: InitialMomentum):
    """``u3(t)`` and ``U(t)`` in closed form; ``t`` may be a scalar or an array."""
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    u30 = m.u3_0
    if cp.case is Case.TRIVIAL or cp.b == 0.0:
        u3, U = np.zeros_like(t), np.zeros_like(t)
    elif cp.case is Case.I:
        u3, U = _hyperbolic_decay(t, u30, cp.b, cp.B1)
    elif cp.case is Case.II:
        # the B = 0 solution is the A = 0 one reflected in time
        u3, Um = _hyperbolic_decay(-t, u30, cp.b, cp.B1)
        U = -Um
    elif cp.P == 0.0:
        u3, U = np.zeros_like(t), np.zeros_like(t)
    else:
        psi = cp.psi0 + 0.5 * cp.Q * t
        sn, cn, dn = jacobi_sn_cn_dn(psi, cp.k, cp.kc)
        root_ab = math.sqrt(cp.A) * math.sqrt(cp.B)
        # exp(y) = 1 + P^2/(2 sqrt(AB)) (cn^2 + cn dn / k). Flipping the sign
        # of the cn dn term gives exp(-y) (Q^2 - P^2 = 4 sqrt(AB)), so take
        # whichever of the two has no cancellation.
        acn = np.abs(cn)
        y = np.sign(cn) * np.log1p(cp.P * acn * (cp.P * acn + cp.Q * dn) / (2.0 * root_ab))
        U = 0.5 * (y - cp.V0)
        u3 = -0.5 * cp.P * sn
    # pin the initial conditions exactly
    u3 = np.where(t == 0.0, u30, u3)
    U = np.where(t == 0.0, 0.0, U)
    if scalar:
        return float(u3[0]), float(U[0])
    return u3, U


def eval_controls(t, cp: CaseParams, m: InitialMomentum) -> ControlSample:
    u3, U = eval_u3_U(t, cp, m)
    u10, u20, _, u40, u50 = m.as_array()
    # exp(-U) and exp(U) coefficients; the pairs combine exactly, unlike the
    # cosh/sinh form, which cancels badly once |U| is large.
    a1, a2 = 0.5 * (u10 + u50), 0.5 * (u20 - u40)
    b1, b2 = 0.5 * (u10 - u50), 0.5 * (u20 + u40)
    # The vanishing pair is dropped in cases I/II: its exponential grows like
    # exp(b|t|) and would overflow. U is bounded above in case I and below in
    # case II, so the kept exponential cannot.
    if cp.case is Case.I:
        a1 = a2 = 0.0
    elif cp.case is Case.II:
        b1 = b2 = 0.0
    em = np.exp(-U) if cp.case is not Case.I else 0.0
    ep = np.exp(U) if cp.case is not Case.II else 0.0
    u1 = a1 * em + b1 * ep
    u2 = b2 * ep + a2 * em
    u4 = b2 * ep - a2 * em
    u5 = a1 * em - b1 * ep
    u1, u2, u4, u5 = (np.where(np.asarray(t) == 0.0, u0, v) for u0, v in ((u10, u1), (u20, u2), (u40, u4), (u50, u5)))
    if np.ndim(U) == 0:
        u1, u2, u4, u5 = (float(v) for v in (u1, u2, u4, u5))
    return ControlSample(t, u1, u2, u3, u4, u5, U)


def extremal_controls(m: InitialMomentum, t) -> ControlSample:
    """Classify ``m`` and evaluate all five controls at ``t``."""
    return eval_controls(t, classify(m), m)


def first_integrals(s: ControlSample):
    """Hamiltonian ``H = (u3^2 + u4^2 + u5^2) / 2`` and Casimir ``W = u1 u4 + u2 u5``."""
    H = 0.5 * (np.square(s.u3) + np.square(s.u4) + np.square(s.u5))
    W = np.multiply(s.u1, s.u4) + np.multiply(s.u2, s.u5)
    return H, W


def period(cp: CaseParams) -> float:
    """Time period ``8 K(k) / Q`` of ``u3`` in case III."""
    if cp.case is not Case.III or cp.P == 0.0:
        raise ValueError("u3 is periodic only in non-degenerate case III")
    return 8.0 * complete_K(cp.k, cp.kc) / cp.Q
