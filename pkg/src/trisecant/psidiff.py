r"""Pseudodifference operators in the unit shift ``T`` and the 2D Toda flows.

Coefficients are :class:`GridFn` values on a finite integer window.  The
composition law :math:`T^s \circ v = v(\cdot + s)\, T^s` moves windows, and
every result carries the intersection of the windows it was built from.

Conventions (with :math:`\mathcal{L} = T + \sum_{s \ge 0} w_s T^{-s}`):

* ``res_T`` is the coefficient of :math:`T^0`;
* :math:`\mathcal{L}_+ = T + w_0`, so the potential is ``u = -w_0``;
* the discrete wave is :math:`\psi = (1 + \sum \xi_s k^{-s}) k^x`, and the dual
  uses the right action :math:`f T = T^{-1} f`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DepthExhausted, PostconditionFailed, ValidationError, WindowExhausted
from .jets import INF, to_exact

__all__ = [
    "GridFn",
    "PsiDiffOp",
    "DWave",
    "llnov",
    "random_llnov",
    "dmul",
    "dresidue",
    "dresidue_T",
    "dsplit",
    "toda_flow",
    "ff1_residual",
    "two_dev_residual",
    "toda_flow_commutativity_residual",
    "dwave_and_dual",
    "jn_fn_check",
    "dpairing_identity",
    "DEFAULT_WINDOW",
]

DEFAULT_WINDOW = 16
FLOAT_FLOW_TOL = 1e-10


class GridFn:
    """Function on the integers ``lo..hi``; ``const`` functions cover everything."""

    __slots__ = ("lo", "hi", "vals", "const", "exact")

    def __init__(self, lo, values, exact: bool = True, const=None):
        self.exact = exact
        if const is not None:
            self.const = to_exact(const) if exact and not _is_exact(const) else const
            self.lo, self.hi, self.vals = -INF, INF, None
            return
        self.const = None
        vals = [to_exact(v) if exact and not _is_exact(v) else (v if exact else complex(v))
                for v in values]
        self.lo = int(lo)
        self.hi = self.lo + len(vals) - 1
        self.vals = vals

    @classmethod
    def constant(cls, value, exact: bool = True) -> "GridFn":
        return cls(0, [], exact, const=value)

    @classmethod
    def from_function(cls, f, lo: int, hi: int, exact: bool = True) -> "GridFn":
        return cls(lo, [f(x) for x in range(lo, hi + 1)], exact)

    def _zero(self):
        return to_exact(0) if self.exact else 0j

    def __call__(self, x: int):
        if self.const is not None:
            return self.const
        if not self.lo <= x <= self.hi:
            raise WindowExhausted(f"x={x} outside window [{self.lo}, {self.hi}]")
        return self.vals[x - self.lo]

    def shift(self, s: int) -> "GridFn":
        """``x -> f(x + s)``."""
        if self.const is not None or s == 0:
            return self
        out = GridFn.__new__(GridFn)
        out.exact, out.const = self.exact, None
        out.lo, out.hi, out.vals = self.lo - s, self.hi - s, self.vals
        return out

    def _binary(self, other, op):
        if not isinstance(other, GridFn):
            other = GridFn.constant(other, self.exact)
        if self.const is not None and other.const is not None:
            return GridFn.constant(op(self.const, other.const), self.exact)
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if hi < lo:
            raise WindowExhausted("windows do not overlap")
        return GridFn(lo, [op(self(x), other(x)) for x in range(int(lo), int(hi) + 1)], self.exact)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def difference(self) -> "GridFn":
        """``(T - 1) f``."""
        return self.shift(1) - self

    def is_zero(self, tol: float = 0.0) -> bool:
        vals = [self.const] if self.const is not None else self.vals
        if self.exact or tol == 0.0:
            return not any(vals)
        return all(abs(v) <= tol for v in vals)

    def is_constant(self) -> bool:
        if self.const is not None:
            return True
        return all(v == self.vals[0] for v in self.vals)

    def margin(self, x0: int = 0):
        return min(x0 - self.lo, self.hi - x0)

    def __repr__(self):
        if self.const is not None:
            return f"GridFn(const={self.const})"
        return f"GridFn([{self.lo}..{self.hi}])"


def _is_exact(v):
    from sympy.polys.domains import QQ_I
    return isinstance(v, QQ_I.dtype)


class PsiDiffOp:
    """Truncated series ``sum_{s >= -depth} a_s T^s`` with grid coefficients."""

    __slots__ = ("coeffs", "depth", "exact")

    def __init__(self, coeffs: Mapping[int, GridFn], depth=INF, exact: bool = True):
        self.depth = depth
        self.exact = exact
        self.coeffs = {int(s): c for s, c in coeffs.items()
                       if s >= -depth and not (c.const is not None and not c.const)}

    @classmethod
    def shift_op(cls, n: int = 1, depth=INF, exact: bool = True) -> "PsiDiffOp":
        return cls({n: GridFn.constant(1, exact)}, depth, exact)

    @classmethod
    def scalar(cls, f, exact: bool = True) -> "PsiDiffOp":
        if not isinstance(f, GridFn):
            f = GridFn.constant(f, exact)
        return cls({0: f}, INF, f.exact)

    @property
    def top(self):
        return max(self.coeffs, default=-INF)

    @property
    def bottom(self):
        return min(self.coeffs, default=INF)

    def order(self, tol: float = 0.0):
        return max((s for s, c in self.coeffs.items() if not c.is_zero(tol)), default=-INF)

    def max_abs(self) -> float:
        vals = [v for c in self.coeffs.values() for v in ([c.const] if c.const is not None else c.vals)]
        return max((abs(complex(float(v.x), float(v.y))) if self.exact else abs(v) for v in vals), default=0.0)

    def __getitem__(self, s: int) -> GridFn:
        if s < -self.depth:
            raise DepthExhausted(f"coefficient of T^{s} below reliable depth {self.depth}")
        return self.coeffs.get(s, GridFn.constant(0, self.exact))

    def __add__(self, other):
        if not isinstance(other, PsiDiffOp):
            other = PsiDiffOp.scalar(other, self.exact)
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out[s] + c if s in out else c
        return PsiDiffOp(out, min(self.depth, other.depth), self.exact)

    __radd__ = __add__

    def __neg__(self):
        return PsiDiffOp({s: -c for s, c in self.coeffs.items()}, self.depth, self.exact)

    def __sub__(self, other):
        if not isinstance(other, PsiDiffOp):
            other = PsiDiffOp.scalar(other, self.exact)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, PsiDiffOp):
            return dmul(self, other)
        return PsiDiffOp({s: c * other for s, c in self.coeffs.items()}, self.depth, self.exact)

    def __pow__(self, n: int) -> "PsiDiffOp":
        out = PsiDiffOp.scalar(1, self.exact)
        for _ in range(n):
            out = dmul(out, self)
        return out

    def truncate(self, depth) -> "PsiDiffOp":
        return PsiDiffOp(self.coeffs, min(depth, self.depth), self.exact)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs.values())

    def margin(self, x0: int = 0):
        return min((c.margin(x0) for c in self.coeffs.values()), default=INF)

    def __repr__(self):
        return f"PsiDiffOp({sorted(self.coeffs.items(), reverse=True)}, depth={self.depth})"


def dmul(A: PsiDiffOp, B: PsiDiffOp, depth=None) -> PsiDiffOp:
    """``A o B`` using ``T^a o v = v(. + a) T^a``."""
    if not A.coeffs or not B.coeffs:
        return PsiDiffOp({}, min(A.depth, B.depth), A.exact)
    d = min(A.depth - B.top, B.depth - A.top)
    if depth is not None:
        d = min(d, depth)
    out: dict[int, GridFn] = {}
    for a, f in A.coeffs.items():
        for b, g in B.coeffs.items():
            s = a + b
            if s < -d:
                continue
            t = f * g.shift(a)
            out[s] = out[s] + t if s in out else t
    if d < 0:
        raise DepthExhausted(f"product has negative reliable depth {d}")
    return PsiDiffOp(out, d, A.exact)


def dcommutator(A: PsiDiffOp, B: PsiDiffOp) -> PsiDiffOp:
    return dmul(A, B) - dmul(B, A)


def dresidue(A: PsiDiffOp) -> GridFn:
    """Coefficient of ``T^0``."""
    return A[0]


def dresidue_T(A: PsiDiffOp) -> GridFn:
    """``res_T(A T)``, i.e. the coefficient of ``T^-1`` in ``A``."""
    if A.depth < 1:
        raise DepthExhausted("res_T(A T) needs depth >= 1")
    return A[-1]


def dsplit(A: PsiDiffOp) -> tuple[PsiDiffOp, PsiDiffOp]:
    plus = PsiDiffOp({s: c for s, c in A.coeffs.items() if s >= 0}, INF, A.exact)
    minus = PsiDiffOp({s: c for s, c in A.coeffs.items() if s < 0}, A.depth, A.exact)
    return plus, minus


def llnov(w: list, exact: bool = True) -> PsiDiffOp:
    """``T + w_0 + w_1 T^-1 + ... + w_M T^-M`` with depth ``M``."""
    coeffs = {1: GridFn.constant(1, exact)}
    for s, ws in enumerate(w):
        coeffs[-s] = ws
    return PsiDiffOp(coeffs, len(w) - 1, exact)


def random_llnov(rng, depth: int, window: int = DEFAULT_WINDOW, x0: int = 0,
                 exact: bool = True, den: int = 5) -> PsiDiffOp:
    def val():
        re = Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, den + 1)))
        im = Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, den + 1)))
        return (re, im) if exact else complex(float(re), float(im))
    ws = [GridFn(x0 - window, [val() for _ in range(2 * window + 1)], exact) for _ in range(depth + 1)]
    return llnov(ws, exact)


def _check_llnov(L: PsiDiffOp):
    if L.top != 1 or not (L[1] - 1).is_zero():
        raise ValidationError("expected T + O(T^0)")


def _powers(L, n):
    out = [PsiDiffOp.scalar(1, L.exact)]
    for _ in range(n):
        out.append(dmul(out[-1], L))
    return out


def toda_flow(L: PsiDiffOp, i: int) -> PsiDiffOp:
    """``d_i L = [(L^i)_+, L]``, asserted to be ``O(T^0)``."""
    _check_llnov(L)
    plus = dsplit(L ** i)[0]
    out = dcommutator(plus, L)
    # float mode: the cancelled positive powers keep rounding residue
    tol = 0.0 if L.exact else FLOAT_FLOW_TOL * max(1.0, plus.max_abs()) * max(1.0, L.max_abs())
    if out.order(tol) > 0:
        raise PostconditionFailed(f"Toda flow {i} has order {out.order(tol)} > 0")
    return out


def ff1_residual(L: PsiDiffOp, m: int) -> GridFn:
    """``d_t F_m - (T - 1) F_m^1`` with ``d_t`` the first flow.

    ``d_t F_m = res_T [L_+, L^m]`` is computed algebraically.
    """
    _check_llnov(L)
    Lm = L ** m
    dF = dresidue(dcommutator(dsplit(L)[0], Lm))
    return dF - dresidue_T(Lm).difference()


def two_dev_residual(L: PsiDiffOp, m: int) -> GridFn:
    """``d_{t_m} u + (T - 1) F_m^1`` with ``u = -w_0``."""
    _check_llnov(L)
    du = -dresidue(toda_flow(L, m))
    return du + dresidue_T(L ** m).difference()


def toda_flow_commutativity_residual(L: PsiDiffOp, i: int, j: int) -> PsiDiffOp:
    _check_llnov(L)
    P = _powers(L, max(i, j))

    def dd(a, b):
        da_lb = dsplit(dcommutator(dsplit(P[a])[0], P[b]))[0]
        da_l = dcommutator(dsplit(P[a])[0], L)
        return dcommutator(da_lb, L) + dcommutator(dsplit(P[b])[0], da_l)

    return dd(i, j) - dd(j, i)


@dataclass
class DWave:
    """``(1 + sum_s xi_s k^-s) k^{sign x}`` on the grid."""

    xi: list
    sign: int = 1
    exact: bool = True
    L: PsiDiffOp | None = field(default=None, repr=False)

    @property
    def S(self) -> int:
        return len(self.xi) - 1


def _antidifference(rhs: GridFn, x0: int) -> GridFn:
    """``f`` with ``f(x+1) - f(x) = rhs(x)`` and ``f(x0) = 0``."""
    lo, hi = rhs.lo, rhs.hi + 1
    if not lo <= x0 <= hi:
        raise WindowExhausted(f"normalisation point {x0} left the window [{lo}, {hi}]")
    vals = {x0: rhs._zero()}
    for x in range(x0 + 1, hi + 1):
        vals[x] = vals[x - 1] + rhs(x - 1)
    for x in range(x0 - 1, lo - 1, -1):
        vals[x] = vals[x + 1] - rhs(x)
    return GridFn(lo, [vals[x] for x in range(lo, hi + 1)], rhs.exact)


def dwave(L: PsiDiffOp, S: int, x0: int = 0) -> DWave:
    """Solve ``L psi = k psi``: ``(T - 1) xi_{n+1} = -sum_{s+r=n} w_s(x) xi_r(x - s)``."""
    _check_llnov(L)
    if L.depth < S - 1:
        raise DepthExhausted(f"discrete wave depth {S} needs operator depth >= {S - 1}")
    one = GridFn.constant(1, L.exact)
    xi = [one]
    for n in range(S):
        rhs = GridFn.constant(0, L.exact)
        for s in range(0, n + 1):
            rhs = rhs + L[-s] * xi[n - s].shift(-s)
        xi.append(_antidifference(-rhs, x0))
    return DWave(xi, 1, L.exact, L)


def dwave_and_dual(L: PsiDiffOp, S: int, x0: int = 0) -> tuple[DWave, DWave, PsiDiffOp]:
    """Wave series, dual series and the dressing inverse ``Phi^-1``."""
    w = dwave(L, S, x0)
    Phi = PsiDiffOp({-s: c for s, c in enumerate(w.xi)}, S, L.exact)
    Phinv = _inverse(Phi, S)
    if not (dmul(Phi, Phinv) - 1).is_zero():
        raise PostconditionFailed("Phi Phi^-1 != 1")
    dressed = dmul(dmul(Phi, PsiDiffOp.shift_op(1, exact=L.exact)), Phinv)
    depth = min(dressed.depth, L.depth)
    if not (dressed.truncate(depth) - L.truncate(depth)).is_zero():
        raise PostconditionFailed("L != Phi T Phi^-1")
    xi_plus = [GridFn.constant(1, L.exact)] + [Phinv[-s].shift(s) for s in range(1, S + 1)]
    return w, DWave(xi_plus, -1, L.exact, L), Phinv


def _inverse(Phi: PsiDiffOp, depth: int) -> PsiDiffOp:
    X = Phi - 1
    out = PsiDiffOp.scalar(1, Phi.exact).truncate(depth)
    term = PsiDiffOp.scalar(1, Phi.exact).truncate(depth)
    for _ in range(depth):
        term = -dmul(term, X, depth)
        out = out + term
    return out


def jn_fn_check(L: PsiDiffOp, N: int, x0: int = 0) -> dict:
    """``J_n`` from ``psi^+ psi`` against ``F_n = res_T L^n`` for ``n <= N``."""
    w, wp, _ = dwave_and_dual(L, N, x0)
    P = _powers(L, N)
    rows = []
    for n in range(1, N + 1):
        J = GridFn.constant(0, L.exact)
        for r in range(n + 1):
            J = J + wp.xi[r] * w.xi[n - r]
        F = dresidue(P[n])
        rows.append({"n": n, "equal": (J - F).is_zero(), "J": J, "F": F})
    return {"rows": rows, "pass": all(r["equal"] for r in rows)}


def dpairing_identity(D1: PsiDiffOp, D2: PsiDiffOp) -> tuple[GridFn, GridFn]:
    """Both sides of ``[k^0] (k^{-x} D1)(D2 k^x) = res_T(D2 D1)``."""
    left = GridFn.constant(0, D1.exact)
    for s, a in D1.coeffs.items():
        b = D2.coeffs.get(-s)
        if b is not None:
            left = left + a.shift(-s) * b
    return left, dresidue(dmul(D2, D1))
