"""Elliptic integral of the first kind and Jacobi elliptic functions.

Everything is computed with the arithmetic-geometric mean (descending Landen
sequence), parameterized by the modulus ``k`` (not the parameter ``m = k**2``).
Only real arguments and ``0 <= k < 1`` are supported.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError

_MAX_ITER = 64
_EPS = 2.0**-53


class JacobiTriple(NamedTuple):
    sn: np.ndarray | float
    cn: np.ndarray | float
    dn: np.ndarray | float


def _check_modulus(k: float, kc: float | None = None) -> tuple[float, float]:
    k = float(k)
    if kc is None:
        if not (0.0 <= k < 1.0):
            raise DomainError(f"modulus must satisfy 0 <= k < 1, got {k!r}")
        return k, math.sqrt((1.0 - k) * (1.0 + k))
    # with kc given, k itself may have rounded up to 1
    kc = float(kc)
    if not (0.0 < kc <= 1.0 and 0.0 <= k <= 1.0):
        raise DomainError(f"need 0 <= k <= 1 and 0 < kc <= 1, got k={k!r}, kc={kc!r}")
    return k, kc


def _agm_sequence(k: float, kc: float) -> tuple[list[float], list[float]]:
    """Return the AGM terms ``a_n`` and ``c_n`` started from ``(1, kc)``."""
    a, b, c = 1.0, kc, k
    aa, cc = [a], [c]
    for _ in range(_MAX_ITER):
        if abs(c) <= 4.0 * _EPS * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        aa.append(a)
        cc.append(c)
    return aa, cc


def complete_K(k: float, kc: float | None = None) -> float:
    """Complete elliptic integral of the first kind, ``K(k) = pi / (2 agm(1, k'))``.

    ``kc = sqrt(1 - k**2)`` may be passed when it is known more accurately than
    ``k`` itself (``k`` close to 1). The same applies to the functions below.
    """
    k, kc = _check_modulus(k, kc)
    if k == 0.0:
        return 0.5 * math.pi
    aa, _ = _agm_sequence(k, kc)
    return 0.5 * math.pi / aa[-1]


def _F_principal(phi: float, k: float, kc: float) -> float:
    # phi in [-pi/2, pi/2]; descending Landen on the amplitude.
    if abs(phi) == 0.5 * math.pi:
        return math.copysign(complete_K(k, kc), phi)
    a, b = 1.0, kc
    scale = 1.0
    for _ in range(_MAX_ITER):
        if abs(a - b) <= 4.0 * _EPS * a:
            break
        # continuous branch of atan((b/a) tan(phi)) keeps the doubled amplitude monotone
        phi = phi + math.atan(b / a * math.tan(phi)) + math.pi * round(phi / math.pi)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
        scale *= 2.0
    return phi / (scale * a)


def incomplete_F(phi: float, k: float, kc: float | None = None) -> float:
    """Incomplete elliptic integral of the first kind on the whole real line.

    Uses ``F(phi + n*pi, k) = 2 n K(k) + F(phi, k)`` to reduce ``phi`` into
    ``[-pi/2, pi/2]`` before the Landen iteration.
    """
    k, kc = _check_modulus(k, kc)
    phi = float(phi)
    if k == 0.0:
        return phi
    n = round(phi / math.pi)
    r = phi - n * math.pi
    if n == 0:
        return _F_principal(r, k, kc)
    return 2.0 * n * complete_K(k, kc) + _F_principal(r, k, kc)


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson's symmetric integral ``R_F(x, y, z)`` by duplication (``x, y, z >= 0``)."""
    if min(x, y, z) < 0.0 or (x == 0.0) + (y == 0.0) + (z == 0.0) > 1:
        raise DomainError("R_F needs nonnegative arguments, at most one zero")
    for _ in range(2000):
        mu = (x + y + z) / 3.0
        dx, dy, dz = 1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu
        if max(abs(dx), abs(dy), abs(dz)) < 1e-3:
            break
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / math.sqrt(mu)


def incomplete_F_tan(T: float, k: float, kc: float | None = None) -> float:
    """``F(atan(T), k)`` from the tangent itself.

    Relative accuracy holds for every ``T``, including ``|T|`` so large that
    ``atan(T)`` rounds next to ``pi/2`` (where ``F`` is steep for ``k ~ 1``).
    """
    k, kc = _check_modulus(k, kc)
    T = float(T)
    if T == 0.0:
        return 0.0
    if math.isinf(T):
        return math.copysign(complete_K(k, kc), T)
    if abs(T) <= 1.0:
        return T * carlson_rf(1.0, 1.0 + (kc * T) ** 2, 1.0 + T * T)
    # R_F(s^2, s^2 + kc^2, 1 + s^2) with s = 1/T; one duplication step taken
    # on the square roots so that neither s^2 nor kc^2 can underflow
    s = 1.0 / abs(T)
    sx, sy, sz = s, math.hypot(s, kc), math.hypot(1.0, s)
    lam = sx * sy + sy * sz + sz * sx
    return math.copysign(carlson_rf(0.25 * (sx * sx + lam), 0.25 * (sy * sy + lam), 0.25 * (sz * sz + lam)), T)


def _base_sn_cn_dn(v: np.ndarray, kc: float):
    # Bulirsch's descending Landen recursion; accurate for |v| <= K/2 at any kc
    a, g = 1.0, kc
    means, geos = [], []
    for _ in range(_MAX_ITER):
        means.append(a)
        geos.append(g)
        c = 0.5 * (a + g)
        if abs(a - g) <= 4.0 * _EPS * a:
            break
        a, g = c, math.sqrt(a * g)
    w = c * v
    sn, cn = np.sin(w), np.cos(w)
    tiny = np.abs(v) < 1e-50  # the ratio recursion overflows; sn = v to O(v^3)
    s = np.where(tiny, 1.0, sn)
    dn = np.ones_like(w)
    r = cn / s
    c = r * c
    for m, e in zip(reversed(means), reversed(geos)):
        r = c * r
        c = dn * c
        dn = (e + r) / (m + r)
        r = c / m
    sn = np.copysign(1.0 / np.sqrt(c * c + 1.0), s)
    return np.where(tiny, v, sn), np.where(tiny, 1.0, c * sn), np.where(tiny, 1.0, dn)


def jacobi_sn_cn_dn(u, k: float, kc: float | None = None) -> JacobiTriple:
    """Jacobi elliptic functions ``sn, cn, dn`` of real ``u`` (scalar or array).

    The argument is reduced to ``|v| <= K/2`` by the half-period shift
    ``(sn, cn, dn)(v + 2K) = (-sn, -cn, dn)`` and the quarter-period shift
    ``sn(K - d) = cd(d)``, ``cn(K - d) = k' sd(d)``, ``dn(K - d) = k' nd(d)``,
    where the base values from the descending Landen recursion keep full
    relative accuracy.
    """
    k, kc = _check_modulus(k, kc)
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if k == 0.0:
        sn, cn, dn = np.sin(u), np.cos(u), np.ones_like(u)
    else:
        K = complete_K(k, kc)
        u = u - 4.0 * K * np.round(u / (4.0 * K))
        flip = np.abs(u) > 1.5 * K
        u = np.where(flip, u - 2.0 * K * np.sign(u), u)
        d = K - np.abs(u)
        near = np.abs(d) < 0.5 * K
        sn, cn, dn = _base_sn_cn_dn(np.where(near, d, u), kc)
        sn, cn, dn = (
            np.where(near, np.sign(u) * cn / dn, sn),
            np.where(near, kc * sn / dn, cn),
            np.where(near, kc / dn, dn),
        )
        sign = np.where(flip, -1.0, 1.0)
        sn, cn = sign * sn, sign * cn
    if scalar:
        return JacobiTriple(float(sn), float(cn), float(dn))
    return JacobiTriple(sn, cn, dn)
