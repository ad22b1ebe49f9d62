"""Fully discrete trisecant conditions and the secancy of Kummer points."""

from __future__ import annotations

import cmath

import numpy as np

from ..theta import secancy_rank, theta_abs, theta_many
from ._common import divisor_samples, kummer_jets, safe_samples
from .data import TrisecantData
from .report import Accumulator, ResidualReport

__all__ = ["trisecant_A_residual", "trisecant_B_residual", "trisecant_C_residual",
           "trisecant_points", "cubic_on_divisor"]


def trisecant_A_residual(d: TrisecantData, Z=None, window=(5, 5), *, origin=(-2, -2), samples: int = 3,
                         rng: np.random.Generator | None = None, tol: float = 1e-6) -> ResidualReport:
    """Residual of ``psi(m, n+1) - psi(m+1, n) - u(m, n) psi(m, n)`` on an ``(m, n)`` window."""
    S = d.B
    rng = rng if rng is not None else np.random.default_rng(0)
    M, N = window
    m0, n0 = origin
    ms, ns = range(m0, m0 + M + 1), range(n0, n0 + N + 1)
    shifts = [m * d.U + n * d.V for m in ms for n in ns]
    Zs = safe_samples(rng, S, samples, shifts, Z)
    acc = Accumulator("trisecant_A", tol)
    for Z0 in Zs:
        pts = np.array([m * d.U + n * d.V + Z0 for m in ms for n in ns])
        tau = theta_many(pts, S)[0][:, 0].reshape(M + 1, N + 1)
        phi = theta_many(pts + d.A, S)[0][:, 0].reshape(M + 1, N + 1)

        def psi(i, j):
            return phi[i, j] / tau[i, j] * cmath.exp((m0 + i) * d.p + (n0 + j) * d.E)

        for i in range(M):
            for j in range(N):
                u = tau[i + 1, j + 1] * tau[i, j] / (tau[i, j + 1] * tau[i + 1, j])
                a, b, c = psi(i, j + 1), psi(i + 1, j), u * psi(i, j)
                acc.add(a - b - c, (a, b, c), Z=Z0, m=m0 + i, n=n0 + j)
    return acc.report()


def trisecant_points(d: TrisecantData) -> list:
    return [(d.A - d.U - d.V) / 2, (d.A + d.U - d.V) / 2, (d.A + d.V - d.U) / 2]


def trisecant_B_residual(d: TrisecantData, *, tol: float = 1e-6) -> ResidualReport:
    """``Theta((A-U-V)/2) + e^p Theta((A+U-V)/2) - e^E Theta((A+V-U)/2)`` plus secancy rank."""
    pts = trisecant_points(d)
    ks = [kummer_jets(p, d.B) for p in pts]
    ep, eE = cmath.exp(d.p), cmath.exp(d.E)
    acc = Accumulator("trisecant_B", tol)
    per = []
    for k in range(len(ks[0])):
        terms = (ks[0][k](), ep * ks[1][k](), -eE * ks[2][k]())
        per.append(sum(terms))
        acc.add(per[-1], terms, characteristic=k)
    rank = secancy_rank(pts, d.B)
    return acc.report(per_characteristic=[[float(r.real), float(r.imag)] for r in per],
                      secancy_rank=rank)


def cubic_on_divisor(Zs, S, terms, name: str, tol: float) -> ResidualReport:
    """``sum_k c_k prod_j theta(Z + s_kj)`` over divisor samples.

    ``terms`` is a list of ``(c_k, shifts_k)``.  Every factor is an
    undifferentiated theta, so the rounding scale of a monomial is ``|c_k|``
    times the product of absolute-value series; this keeps the normalisation
    meaningful when a factor itself lies on the divisor.
    """
    acc = Accumulator(name, tol)
    for Z0 in Zs:
        total, scale = 0j, 0.0
        for c, shifts in terms:
            pts = np.array([Z0 + s for s in shifts])
            vals = theta_many(pts, S)[0][:, 0]
            total += c * np.prod(vals)
            scale = max(scale, abs(c) * float(np.prod([theta_abs(p, S) for p in pts])))
        acc.add_scaled(abs(total), scale, Z=Z0)
    return acc.report()


def trisecant_C_residual(d: TrisecantData, samples: int = 6, *, Z=None,
                         rng: np.random.Generator | None = None, tol: float = 1e-6) -> ResidualReport:
    """``theta(Z+U) theta(Z-V) theta(Z-U+V) + theta(Z-U) theta(Z+V) theta(Z+U-V)`` on the divisor."""
    S = d.B
    rng = rng if rng is not None else np.random.default_rng(0)
    Zs = divisor_samples(S, samples, rng) if Z is None else np.atleast_2d(np.asarray(Z, complex))
    U, V = d.U, d.V
    return cubic_on_divisor(Zs, S, [(1, (U, -V, V - U)), (1, (-U, V, U - V))], "trisecant_C", tol)
