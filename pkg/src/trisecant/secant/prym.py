"""Quadrisecant relations for Prym-type theta functions.

The discrete equation (A) alternates between two sublattices: with
``nu = (1 + (-1)^(n+m+1)) / 2`` the shift by ``W`` enters the numerator of
the wave function on odd cells and its denominator on even ones.
"""

from __future__ import annotations

import numpy as np

from ..theta import theta
from ._common import divisor_samples, kummer_jets, random_points, safe_samples
from .data import PrymQuadData
from .report import Accumulator, ResidualReport
from .trisecant import cubic_on_divisor

__all__ = ["prym_A_residual", "prym_B_residual", "prym_C_residual", "prym_quad_identity",
           "prym_five_term_residual", "prym_quad_residuals", "nu"]


def nu(n: int, m: int) -> int:
    return (1 + (-1) ** (n + m + 1)) // 2


class _Lattice:
    """Wave function and potential of (A) on a window, for one base point ``Z``."""

    def __init__(self, d: PrymQuadData, Z):
        self.d, self.Z = d, np.asarray(Z, dtype=np.complex128)
        self._cache = {}

    def th(self, z):
        key = tuple(np.round(z, 15))
        if key not in self._cache:
            self._cache[key] = theta(z, self.d.B).value
        return self._cache[key]

    def psi(self, n, m):
        d, v = self.d, nu(n, m)
        X = n * d.U + m * d.V + self.Z
        mult = d.w1 ** n * d.w2 ** m * d.w3 ** v * (d.c1 ** m * d.c2 ** n) ** (1 - 2 * v)
        return self.th(d.A + X + v * d.W) / self.th(X + (1 - v) * d.W) * mult

    def u(self, n, m):
        d, v = self.d, nu(n, m)
        X = n * d.U + m * d.V + self.Z
        C = d.c3 * (d.c2 ** (2 * n + 1) * d.c1 ** (2 * m + 1)) ** (1 - 2 * v)
        num = self.th(X + d.U + v * d.W) * self.th(X + d.V + v * d.W)
        den = self.th(X + d.U + d.V + (1 - v) * d.W) * self.th(X + (1 - v) * d.W)
        return C * num / den


def _cells(window, origin):
    (N, M), (n0, m0) = window, origin
    return [(n, m) for n in range(n0, n0 + N) for m in range(m0, m0 + M)]


def _samples(d, Z, window, origin, samples, rng, pad=1):
    (N, M), (n0, m0) = window, origin
    shifts = [n * d.U + m * d.V + k * d.W for n in range(n0 - pad, n0 + N + 2)
              for m in range(m0 - pad, m0 + M + 2) for k in (0, 1)]
    return safe_samples(rng, d.B, samples, shifts, Z)


def prym_A_residual(d: PrymQuadData, Z=None, window=(4, 4), *, origin=(-2, -2), samples: int = 2,
                    rng: np.random.Generator | None = None, tol: float = 1e-6) -> ResidualReport:
    """``psi_{n+1,m+1} - u_{nm} (psi_{n+1,m} - psi_{n,m+1}) - psi_{nm}`` on a window."""
    rng = rng if rng is not None else np.random.default_rng(0)
    acc = Accumulator("prym_A", tol)
    for Z0 in _samples(d, Z, window, origin, samples, rng):
        L = _Lattice(d, Z0)
        for n, m in _cells(window, origin):
            u = L.u(n, m)
            terms = (L.psi(n + 1, m + 1), -u * L.psi(n + 1, m), u * L.psi(n, m + 1), -L.psi(n, m))
            acc.add(sum(terms), terms, Z=Z0, n=n, m=m)
    return acc.report()


def prym_five_term_residual(d: PrymQuadData, Z=None, window=(3, 3), *, origin=(-1, -1),
                            samples: int = 2, rng: np.random.Generator | None = None,
                            tol: float = 1e-6) -> ResidualReport:
    """Five-term equation with coefficients eliminated from (A) on neighbouring cells.

    ``a = u_{nm} u_{n,m-1}``, ``b = u_{nm} u_{n-1,m}``, ``c = u_{nm} / u_{n-1,m-1}``
    and ``d = 1 + c - a - b``.  It holds whenever (A) holds on the four cells.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    acc = Accumulator("prym_five_term", tol)
    for Z0 in _samples(d, Z, window, origin, samples, rng, pad=2):
        L = _Lattice(d, Z0)
        for n, m in _cells(window, origin):
            u = L.u(n, m)
            a, b = u * L.u(n, m - 1), u * L.u(n - 1, m)
            c = u / L.u(n - 1, m - 1)
            dd = 1 + c - a - b
            terms = (L.psi(n + 1, m + 1), -a * L.psi(n + 1, m - 1), -b * L.psi(n - 1, m + 1),
                     c * L.psi(n - 1, m - 1), -dd * L.psi(n, m))
            acc.add(sum(terms), terms, Z=Z0, n=n, m=m)
    return acc.report()


def prym_B_residual(d: PrymQuadData, sign: int = 1, *, tol: float = 1e-6) -> ResidualReport:
    """Four-term relation between lifted Kummer vectors for the sign ``+1`` or ``-1``."""
    s = 1 if sign > 0 else -1
    A, U, V, W = d.A, d.U, d.V, d.W
    pts = [(A + U + V - s * W) / 2, (A + U - V + s * W) / 2, (A + V - U + s * W) / 2,
           (A - U - V - s * W) / 2]
    coef = [d.w1 * d.w2 * (d.c1 * d.c2) ** s, -d.w1 * d.c3 * (d.w3 * d.c1) ** s,
            d.w2 * d.c3 * (d.w3 * d.c2) ** s, -1]
    ks = [kummer_jets(p, d.B) for p in pts]
    acc = Accumulator(f"prym_B{'+' if s > 0 else '-'}", tol)
    for k in range(len(ks[0])):
        terms = [c * K[k]() for c, K in zip(coef, ks)]
        acc.add(sum(terms), terms, characteristic=k)
    return acc.report()


def prym_C_residual(d: PrymQuadData, sign: int = 1, samples: int = 4, *, Z=None,
                    rng: np.random.Generator | None = None, tol: float = 1e-6) -> ResidualReport:
    """Cubic relation on the divisor for the sign choice ``+1`` or ``-1``."""
    s = 1 if sign > 0 else -1
    rng = rng if rng is not None else np.random.default_rng(0)
    S = d.B
    Zs = divisor_samples(S, samples, rng) if Z is None else np.atleast_2d(np.asarray(Z, complex))
    U, V, W = d.U, d.V, s * d.W
    a1, a2 = d.c1 ** (-2 * s), d.c2 ** (-2 * s)
    c3 = d.c3 ** 2
    terms = [(a1 * c3, (U - V, -U + W, V + W)),
             (a2 * c3, (-U + V, U + W, -V + W)),
             (-a1 * a2, (-U - V, U + W, V + W)),
             (-1, (U + V, -U + W, -V + W))]
    return cubic_on_divisor(Zs, S, terms, f"prym_C{'+' if s > 0 else '-'}", tol)


def _bracket(d: PrymQuadData, X, Z, th):
    U, V = d.U, d.V
    k1, k2, k3 = d.c1 ** 2 * d.c3 ** 2, d.c2 ** 2 * d.c3 ** 2, d.c1 ** 2 * d.c2 ** 2
    terms = [th(X + U + V + Z) * th(Z - U) * th(Z - V),
             -k1 * th(X + U - V + Z) * th(Z - U) * th(Z + V),
             -k2 * th(X - U + V + Z) * th(Z + U) * th(Z - V),
             k3 * th(X - U - V + Z) * th(Z + U) * th(Z + V)]
    return sum(terms), terms


def prym_quad_identity(d: PrymQuadData, Z=None, *, samples: int = 4, A=None,
                       rng: np.random.Generator | None = None, tol: float = 1e-6) -> ResidualReport:
    """``theta(Z+W) [A-bracket] - theta(A+Z) [W-bracket]`` at arbitrary ``Z``.

    ``A`` overrides ``d.A``.  Both sides go through the same bracket routine,
    so ``A = W`` yields an exact zero.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    S = d.B
    Zs = random_points(rng, S, samples) if Z is None else np.atleast_2d(np.asarray(Z, complex))

    A = d.A if A is None else np.asarray(A, dtype=np.complex128)

    def th(z):
        return theta(z, S).value

    acc = Accumulator("prym_quad", tol)
    for Z0 in Zs:
        ba, ta = _bracket(d, A, Z0, th)
        bw, tw = _bracket(d, d.W, Z0, th)
        fw, fa = th(Z0 + d.W), th(A + Z0)
        lhs, rhs = fw * ba, fa * bw
        terms = [fw * t for t in ta] + [fa * t for t in tw]
        acc.add(lhs - rhs, terms, Z=Z0)
    return acc.report()


def prym_quad_residuals(d: PrymQuadData, *, window=(4, 4), samples: int = 2, divisor_samples_: int = 4,
                        rng_seed: int = 0, tol: float = 1e-6) -> dict:
    """Every quadrisecant check, keyed by name."""
    def rng():
        return np.random.default_rng(rng_seed)
    out = {
        "A": prym_A_residual(d, window=window, samples=samples, rng=rng(), tol=tol),
        "B+": prym_B_residual(d, 1, tol=tol),
        "B-": prym_B_residual(d, -1, tol=tol),
        "C+": prym_C_residual(d, 1, divisor_samples_, rng=rng(), tol=tol),
        "C-": prym_C_residual(d, -1, divisor_samples_, rng=rng(), tol=tol),
        "quad": prym_quad_identity(d, samples=samples, rng=rng(), tol=tol),
        "five_term": prym_five_term_residual(d, samples=samples, rng=rng(), tol=tol),
    }
    return out
