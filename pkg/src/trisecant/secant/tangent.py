"""Tangent-trisecant conditions: one continuous variable ``t`` and one shift ``x -> x + 1``.

The shift is realised as translation of the theta argument by ``U``.
"""

from __future__ import annotations

import cmath

import numpy as np

from ._common import Jets, check_direction, divisor_samples, kummer_jets, safe_samples
from .data import TangentData
from .report import Accumulator, ResidualReport

__all__ = ["tangent_A_residual", "tangent_B_residual", "tangent_C_residual", "DEFAULT_GRID"]

DEFAULT_GRID = (np.arange(-2, 3), np.linspace(-0.3, 0.3, 3))


def tangent_A_residual(d: TangentData, Z=None, grid=DEFAULT_GRID, *, samples: int = 4,
                       rng: np.random.Generator | None = None, tol: float = 1e-6) -> ResidualReport:
    """Residual of ``(d_t - T + u) psi`` with ``u = (T - 1) v``, ``v = -d_t log theta``."""
    S = d.B
    rng = rng if rng is not None else np.random.default_rng(0)
    xs, ts = (np.asarray(v, dtype=float) for v in grid)
    shifts = [x * d.U + t * d.V for x in list(xs) + [xs[-1] + 1] for t in ts]
    Zs = safe_samples(rng, S, samples, shifts, Z)
    where, pts = [], []
    for Z0 in Zs:
        for x in xs:
            for t in ts:
                X = x * d.U + t * d.V + Z0
                pts += [X, X + d.U]
                where.append((Z0, x, t))
    pts = np.array(pts)
    tj = Jets(pts, S, 1, [d.V])
    fj = Jets(pts + d.A, S, 1, [d.V])
    acc = Accumulator("tangent_A", tol)
    for k, (Z0, x, t) in enumerate(where):
        q0, q1 = 2 * k, 2 * k + 1
        e0 = cmath.exp(x * d.p + t * d.E)
        e1 = cmath.exp((x + 1) * d.p + t * d.E)
        ratio = fj(q0) / tj(q0)
        psi = e0 * ratio
        psi_t = e0 * ((fj(q0, 0) - ratio * tj(q0, 0)) / tj(q0) + d.E * ratio)
        shifted = e1 * fj(q1) / tj(q1)
        v0 = -tj(q0, 0) / tj(q0)
        v1 = -tj(q1, 0) / tj(q1)
        u = v1 - v0
        acc.add(psi_t - shifted + u * psi, (psi_t, shifted, u * psi), Z=Z0, x=x, t=t)
    return acc.report()


def tangent_B_residual(d: TangentData, *, tol: float = 1e-6) -> ResidualReport:
    """``d_V Theta((A-U)/2) - e^p Theta((A+U)/2) + E Theta((A-U)/2)`` for every ``eps``."""
    acc = Accumulator("tangent_B", tol)
    a = kummer_jets((d.A - d.U) / 2, d.B, 1, [d.V])
    b = kummer_jets((d.A + d.U) / 2, d.B)
    ep = cmath.exp(d.p)
    per = []
    for k, (ta, tb) in enumerate(zip(a, b)):
        terms = (ta(0), -ep * tb(), d.E * ta())
        per.append(sum(terms))
        acc.add(per[-1], terms, characteristic=k)
    return acc.report(per_characteristic=[[float(r.real), float(r.imag)] for r in per])


def tangent_C_residual(d: TangentData, samples: int = 6, *, Z=None,
                       rng: np.random.Generator | None = None, tol: float = 1e-6) -> ResidualReport:
    """``d_V[theta(Z+U) theta(Z-U)] d_V theta(Z) - theta(Z+U) theta(Z-U) d_VV theta(Z)`` on the divisor."""
    S = d.B
    rng = rng if rng is not None else np.random.default_rng(0)
    Zs = divisor_samples(S, samples, rng) if Z is None else np.atleast_2d(np.asarray(Z, complex))
    j0 = Jets(Zs, S, 2, [d.V, *np.eye(S.g)])
    for q in range(len(Zs)):
        check_direction(j0, q, 0, "V", range(1, 1 + S.g))
    jp = Jets(Zs + d.U, S, 1, [d.V])
    jm = Jets(Zs - d.U, S, 1, [d.V])
    acc = Accumulator("tangent_C", tol)
    for q, Z0 in enumerate(Zs):
        terms = (jp(q, 0) * jm(q) * j0(q, 0), jp(q) * jm(q, 0) * j0(q, 0),
                 -jp(q) * jm(q) * j0(q, 0, 0))
        acc.add(sum(terms), terms, Z=Z0)
    return acc.report()
