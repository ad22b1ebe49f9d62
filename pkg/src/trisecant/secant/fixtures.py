"""Genus-one data sets on which the secant conditions are known to hold.

Every genus-one principally polarised abelian variety is a Jacobian, so the
flex, tangent and trisecant problems are solvable there.  The constants are
found by solving the (linear) condition (B) on two characteristics; the
remaining conditions then serve as independent checks.
"""

from __future__ import annotations

import cmath

import numpy as np

from ..elliptic import EllipticParams, phi_kernel, weierstrass
from ..errors import DegeneratePoint
from ..theta import SiegelMatrix, theta, theta_char2, characteristics
from .data import FlexData, PrymQuadData, TangentData, TrisecantData

__all__ = ["DEFAULT_TAU", "lame_flex_fixture", "lame_p_numeric", "solve_flex_B", "tangent_fixture",
           "trisecant_fixture", "fay_triple", "bdhe_fixture", "prym_g1_fixture"]

DEFAULT_TAU = 0.2 + 1.1j


def _params(tau: complex) -> EllipticParams:
    return EllipticParams(0.5, tau / 2)


def lame_flex_fixture(tau: complex = DEFAULT_TAU, z: complex = 0.23 + 0.17j) -> FlexData:
    """Lame operator ``d^2 - 2 wp(x)`` in theta form, periods ``1`` and ``tau``.

    ``-2 d^2 log theta(x + (1+tau)/2) = 2 wp(x) + 4 eta1`` and the Hermite
    eigenfunction ``Phi(x, z)`` is a theta quotient times ``exp(p x)``.
    """
    P = _params(tau)
    zeta = weierstrass(z, P, "zeta")
    p = zeta - 2 * P.eta1 * z
    E = weierstrass(z, P, "p") - 4 * P.eta1
    return FlexData(B=[[tau]], U=[1.0], V=[0.0], A=[-z], p=p, E=E)


def lame_p_numeric(tau: complex, z: complex, x: complex = 0.31 + 0.07j) -> complex:
    """``p`` from ``d_x log Phi - d_x log(theta ratio)`` with ``d_x log Phi = zeta(z) - zeta(z-x) - zeta(x)``."""
    P = _params(tau)
    h = (1 + tau) / 2
    dlog_phi = (weierstrass(z, P, "zeta") - weierstrass(z - x, P, "zeta") - weierstrass(x, P, "zeta"))
    num = theta([x - z + h], [[tau]], 1, [[1.0]])
    den = theta([x + h], [[tau]], 1, [[1.0]])
    return dlog_phi - (num.d(0) / num.value - den.d(0) / den.value)


def lame_psi_ratio(tau: complex, z: complex, x: complex) -> complex:
    """``Phi(x, z)`` divided by the theta form of the eigenfunction (should be constant)."""
    d = lame_flex_fixture(tau, z)
    h = (1 + tau) / 2
    th = theta([x + d.A[0] + h], [[tau]]).value / theta([x + h], [[tau]]).value
    return phi_kernel(x, z, _params(tau)) / (th * cmath.exp(d.p * x))


def _solve2(M, rhs):
    M = np.asarray(M, dtype=np.complex128)
    if abs(np.linalg.det(M)) < 1e-14 * max(1.0, np.abs(M).max() ** 2):
        raise DegeneratePoint("the two characteristic equations are dependent")
    return np.linalg.solve(M, rhs)


def solve_flex_B(B, U, V, A) -> tuple[complex, complex]:
    """``(p, E)`` from condition (B) at genus one (linear in ``p`` and ``E - p^2``)."""
    S = SiegelMatrix.coerce(B)
    dirs = [U] if np.linalg.norm(V) == 0 else [U, V]
    rows, rhs = [], []
    for eps in characteristics(S.g):
        j = theta_char2(np.asarray(A) / 2, eps, S, 2, dirs)
        tv = j.d(1) if len(dirs) == 2 else 0j
        rows.append([-2 * j.d(0), j.value])
        rhs.append(j.d(0, 0) - tv)
    p, q = _solve2(rows, rhs)
    return complex(p), complex(q + p * p)


def tangent_fixture(tau: complex = DEFAULT_TAU, U: complex = 0.31 + 0.12j,
                    A: complex = -0.27 + 0.21j, V: complex = 1.0) -> TangentData:
    """Solve condition (B) for ``(e^p, E)`` with ``U, V, A`` fixed.

    At genus one (B) is linear in ``e^p`` and ``E``, so the parameter search
    collapses to a 2x2 solve.
    """
    S = SiegelMatrix([[tau]])
    a, b = np.array([(A - U) / 2]), np.array([(A + U) / 2])
    rows, rhs = [], []
    for eps in characteristics(1):
        ja = theta_char2(a, eps, S, 1, [[V]])
        rows.append([-theta_char2(b, eps, S), ja.value])
        rhs.append(-ja.d(0))
    ep, E = _solve2(rows, rhs)
    return TangentData(B=S, U=[U], V=[V], A=[A], p=cmath.log(ep), E=E)


def trisecant_fixture(tau: complex = DEFAULT_TAU, U: complex = 0.31 + 0.12j,
                      V: complex = -0.18 + 0.27j, A: complex = 0.22 - 0.09j) -> TrisecantData:
    """Solve condition (B) for ``(e^p, e^E)`` with ``U, V, A`` fixed."""
    S = SiegelMatrix([[tau]])
    c1, c2, c3 = (np.array([w]) for w in ((A - U - V) / 2, (A + U - V) / 2, (A + V - U) / 2))
    rows, rhs = [], []
    for eps in characteristics(1):
        rows.append([theta_char2(c2, eps, S), -theta_char2(c3, eps, S)])
        rhs.append(-theta_char2(c1, eps, S))
    ep, eE = _solve2(rows, rhs)
    return TrisecantData(B=S, U=[U], V=[V], A=[A], p=cmath.log(ep), E=cmath.log(eE))


def fay_triple(tau: complex, a1, a2, a3, a4) -> list:
    """Three Kummer arguments ``r + A_i`` with ``2 r = A_4 - A_1 - A_2 - A_3``.

    The ``A_i`` are Abel images of four points of the curve; at genus one the
    Abel map is the identity on ``C / (Z + tau Z)``.
    """
    r = (a4 - a1 - a2 - a3) / 2
    return [np.array([r + a]) for a in (a1, a2, a3)]


def bdhe_fixture(tau: complex = DEFAULT_TAU, alpha=0.29 + 0.11j, beta=0.17 - 0.23j,
                 gamma=-0.21 + 0.14j, Z=0.13 + 0.37j):
    """``tau_n(l, m) = exp(Q) theta(n alpha + l beta + m gamma + Z)`` solving BDHE.

    The three Kummer vectors of the shifted products span at most a plane, so
    a null vector ``(c1, c2, c3)`` exists; the quadratic gauge ``Q`` turns
    ``c1 T1 - c2 T2 + c3 T3 = 0`` into the unit-coefficient equation.
    Returns ``(callable, c)``.
    """
    S = SiegelMatrix([[tau]])
    w = [(beta - gamma) / 2, (beta + gamma) / 2, alpha + (beta - gamma) / 2]
    K = np.array([[theta_char2(np.array([x]), e, S) for x in w] for e in characteristics(1)])
    M = K * np.array([1, -1, 1])
    _, _, vh = np.linalg.svd(M)
    c = vh[-1].conj()
    s_lm = 0.5 * cmath.log(c[1] / c[0])
    s_nn = 0.5 * cmath.log(c[2] / c[0])

    def tau_fn(n, l, m):
        q = s_nn * n * n + 2 * s_lm * l * m
        return cmath.exp(q) * theta(np.array([n * alpha + l * beta + m * gamma + Z]), S).value

    return tau_fn, c


def prym_g1_fixture(tau: complex = DEFAULT_TAU, A=0.21 + 0.08j, U=0.33 - 0.12j, V=-0.14 + 0.26j,
                    W=0.09 + 0.31j, alpha3: complex = 1.0, beta3: complex = 1.0) -> PrymQuadData:
    """Genus-one smoke data for the quadrisecant relations.

    For each sign the relation ``a1 K1 - a2 K2 + a3 K3 - K4 = 0`` has a
    one-parameter family of solutions; fixing ``a3`` leaves a 2x2 solve.  The
    six products ``a_i`` (upper sign) and ``b_i`` (lower sign) are monomials
    in ``w_i, c_i`` whose exponent matrix is invertible, so logarithms recover
    the constants.
    """
    S = SiegelMatrix([[tau]])
    coeffs = []
    for sgn, a3 in ((1, alpha3), (-1, beta3)):
        pts = [(A + U + V - sgn * W) / 2, (A + U - V + sgn * W) / 2,
               (A + V - U + sgn * W) / 2, (A - U - V - sgn * W) / 2]
        K = np.array([[theta_char2(np.array([x]), e, S) for x in pts] for e in characteristics(1)])
        rows = [[K[i, 0], -K[i, 1]] for i in range(2)]
        rhs = [K[i, 3] - a3 * K[i, 2] for i in range(2)]
        a1, a2 = _solve2(rows, rhs)
        coeffs.append((a1, a2, a3))
    (a1, a2, a3), (b1, b2, b3) = coeffs
    # exponents of (w1, w2, w3, c1, c2, c3)
    M = np.array([[1, 1, 0, 1, 1, 0],
                  [1, 0, 1, 1, 0, 1],
                  [0, 1, 1, 0, 1, 1],
                  [1, 1, 0, -1, -1, 0],
                  [1, 0, -1, -1, 0, 1],
                  [0, 1, -1, 0, -1, 1]], dtype=float)
    logs = np.array([cmath.log(v) for v in (a1, a2, a3, b1, b2, b3)])
    w1, w2, w3, c1, c2, c3 = np.exp(np.linalg.solve(M, logs))
    return PrymQuadData(B=S, A=[A], U=[U], V=[V], W=[W], c1=c1, c2=c2, c3=c3, w1=w1, w2=w2, w3=w3)
