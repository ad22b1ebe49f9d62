"""Flex (degenerate trisecant) conditions (A), (B) and (C).

(A) is the heat-type equation ``(d_y - d_x^2 + u) psi = 0`` with
``u = -2 d_x^2 log theta(Ux + Vy + Z)`` and the theta-quotient wave function;
(B) is the differential relation on the second-order theta constants at
``A/2``; (C) is the cubic relation between jets of theta on its divisor.
"""

from __future__ import annotations

import cmath

import numpy as np

from ._common import Jets, check_direction, divisor_samples, kummer_jets, safe_samples
from .data import FlexData
from .report import Accumulator, ResidualReport

__all__ = ["flex_A_residual", "flex_B_residual", "flex_C_residual", "DEFAULT_GRID"]

DEFAULT_GRID = (np.linspace(-0.4, 0.4, 5), np.linspace(-0.3, 0.3, 3))


def flex_A_residual(d: FlexData, Z=None, grid=DEFAULT_GRID, *, samples: int = 4,
                    rng: np.random.Generator | None = None, tol: float = 1e-6,
                    amplitude: complex = 0.0) -> ResidualReport:
    """Residual of ``psi_y - psi_xx + u psi`` on ``Z`` samples times an ``(x, y)`` grid.

    ``amplitude`` multiplies psi by ``exp(amplitude)``; the normalised report
    does not depend on it.
    """
    S = d.B
    rng = rng if rng is not None else np.random.default_rng(0)
    xs, ys = (np.asarray(v, dtype=float) for v in grid)
    shifts = [x * d.U + y * d.V for x in xs for y in ys]
    Zs = safe_samples(rng, S, samples, shifts, Z)
    pts, where = [], []
    for Z0 in Zs:
        for x in xs:
            for y in ys:
                pts.append(x * d.U + y * d.V + Z0)
                where.append((Z0, x, y))
    pts = np.array(pts)
    tj = Jets(pts, S, 2, [d.U, d.V])
    fj = Jets(pts + d.A, S, 2, [d.U, d.V])
    acc = Accumulator("flex_A", tol)
    for q, (Z0, x, y) in enumerate(where):
        t, tu, tuu, tv = tj(q), tj(q, 0), tj(q, 0, 0), tj(q, 1)
        f, fu, fuu, fv = fj(q), fj(q, 0), fj(q, 0, 0), fj(q, 1)
        qq = f / t
        qu = (fu - qq * tu) / t
        quu = (fuu - 2 * qu * tu - qq * tuu) / t
        qv = (fv - qq * tv) / t
        e = cmath.exp(d.p * x + d.E * y + amplitude)
        psi = e * qq
        psi_y = e * (qv + d.E * qq)
        psi_xx = e * (quu + 2 * d.p * qu + d.p ** 2 * qq)
        u = -2 * (tuu / t - (tu / t) ** 2)
        acc.add(psi_y - psi_xx + u * psi, (psi_y, psi_xx, u * psi), Z=Z0, x=x, y=y)
    return acc.report()


def flex_B_residual(d: FlexData, *, tol: float = 1e-6) -> ResidualReport:
    """``(d_V - d_U^2 - 2p d_U + E - p^2) Theta[eps,0](A/2)`` for every ``eps``."""
    acc = Accumulator("flex_B", tol)
    per = []
    for k, th in enumerate(kummer_jets(d.A / 2, d.B, 2, [d.U, d.V])):
        terms = (th(1), -th(0, 0), -2 * d.p * th(0), (d.E - d.p ** 2) * th())
        r = sum(terms)
        per.append(r)
        acc.add(r, terms, characteristic=k)
    return acc.report(per_characteristic=[[float(r.real), float(r.imag)] for r in per])


def flex_C_residual(d: FlexData, samples: int = 6, *, Z=None, rng: np.random.Generator | None = None,
                    tol: float = 1e-6) -> ResidualReport:
    """Cubic jet relation between U- and V-derivatives of theta on its divisor."""
    S = d.B
    rng = rng if rng is not None else np.random.default_rng(0)
    Zs = divisor_samples(S, samples, rng) if Z is None else np.atleast_2d(np.asarray(Z, complex))
    first = Jets(Zs, S, 1, [d.U, d.V, *np.eye(S.g)])
    for q in range(len(Zs)):
        check_direction(first, q, 0, "U", range(2, 2 + S.g))
    j = Jets(Zs, S, 4, [d.U, d.V])
    acc = Accumulator("flex_C", tol)
    for q, Z0 in enumerate(Zs):
        tu, tuu, tuuu, tuuuu = j(q, 0), j(q, 0, 0), j(q, 0, 0, 0), j(q, 0, 0, 0, 0)
        tv, tuv, tvv = j(q, 1), j(q, 0, 1), j(q, 1, 1)
        terms = (tv * tv * tuu, -tuu ** 3, 2 * tuu * tuuu * tu, -2 * tv * tuv * tu,
                 tvv * tu * tu, -tuuuu * tu * tu)
        acc.add(sum(terms), terms, Z=Z0)
    return acc.report()
