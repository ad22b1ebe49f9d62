r"""Commuting ordinary differential (and difference) operators.

For commuting monic operators :math:`L_n, L_m`, the operator :math:`L_m`
preserves the ``n``-dimensional space of solutions of :math:`L_n y = \lambda y`.
In the canonical basis :math:`c_i` normalised by
:math:`c_i^{(j)}(x_0) = \delta_{ij}`, its matrix has entries polynomial in
:math:`\lambda`, and

.. math::

    R(\lambda, \mu) = \det(\mu I - M(\lambda))

is the spectral polynomial.  The sign convention ``det(mu I - M)`` makes ``R``
monic in ``mu``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .errors import (
    DegreeBudgetExceeded,
    DepthExhausted,
    JetTooShallow,
    NonConstantRatio,
    NotCommuting,
    ValidationError,
)
from .jets import INF, CoeffJet, to_exact, to_json_scalar
from .psido import PsiDO, commutator as _commutator, left_action, mul, nth_root, wave
from .psidiff import GridFn, PsiDiffOp, dmul

__all__ = [
    "diffop",
    "commutator",
    "CanonicalBasis",
    "canonical_basis",
    "SpectralPolynomial",
    "spectral_polynomial",
    "bc_annihilation",
    "formal_eigenvalue",
    "rexpans_residual",
    "spectral_polynomial_difference",
    "bc_annihilation_difference",
    "lame_pair",
    "rational_kdv_pair",
    "exact_wp_taylor",
]

FLOAT_TOL = 1e-8


def diffop(u: list, exact: bool = True) -> PsiDO:
    """``d^n + u[n-1] d^(n-1) + ... + u[0]`` with ``n = len(u)``."""
    n = len(u)
    coeffs = {n: CoeffJet.const(1, exact)}
    for i, ui in enumerate(u):
        coeffs[i] = ui if isinstance(ui, CoeffJet) else CoeffJet.const(ui, exact)
    return PsiDO(coeffs, INF, exact)


def _order(L: PsiDO) -> int:
    n = L.top
    if L.bottom < 0 or not (L[n] - 1).is_zero():
        raise ValidationError("expected a monic differential operator")
    return int(n)


def commutator(A: PsiDO, B: PsiDO) -> PsiDO:
    """``AB - BA`` with jet orders tracked."""
    try:
        return _commutator(A, B)
    except DepthExhausted as exc:
        raise JetTooShallow(str(exc)) from None


def _zero(exact):
    return to_exact(0) if exact else 0j


# polynomials in lambda as coefficient lists -------------------------------

def _padd(p, q, exact):
    n = max(len(p), len(q))
    z = _zero(exact)
    return [(p[i] if i < len(p) else z) + (q[i] if i < len(q) else z) for i in range(n)]


def _pscale(p, c):
    return [v * c for v in p]


def _pshift(p, exact):
    return [_zero(exact)] + list(p)


def _pmul(p, q, exact):
    if not p or not q:
        return []
    out = [_zero(exact)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _ptrim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


@dataclass
class CanonicalBasis:
    """``y[i][k]``: Taylor coefficient of ``(x - x0)^k`` in ``c_i``, a polynomial in lambda."""

    n: int
    y: list
    J: int
    exact: bool = True

    def degree(self) -> int:
        return max((len(_ptrim(p)) - 1 for row in self.y for p in row), default=0)


def canonical_basis(L: PsiDO, J: int, deg_budget: int) -> CanonicalBasis:
    """Power-series solutions of ``L y = lambda y`` with unit initial block.

    Matching ``(x - x0)^k`` gives
    ``(k+n)!/k! y_{k+n} = lambda y_k - sum_{i<n} sum_{a+b=k} u_{i,a} (b+i)!/b! y_{b+i}``.
    """
    n = _order(L)
    exact = L.exact
    for i in range(n):
        if L[i].order < J - n:
            raise JetTooShallow(f"coefficient u_{i} has jet order {L[i].order} < {J - n}")
    basis = []
    for i0 in range(n):
        y = [[to_exact(1) if exact else 1 + 0j] if k == i0 else [] for k in range(n)]
        for k in range(0, J - n + 1):
            acc = _pshift(y[k], exact)
            for i in range(n):
                ui = L[i]
                for a in range(0, k + 1):
                    ua = ui[a]
                    if not ua:
                        continue
                    b = k - a
                    f = math.factorial(b + i) // math.factorial(b)
                    acc = _padd(acc, _pscale(y[b + i], -ua * f), exact)
            scale = Fraction(math.factorial(k), math.factorial(k + n))
            c = to_exact(scale) if exact else float(scale)
            nxt = _ptrim(_pscale(acc, c))
            if len(nxt) - 1 > deg_budget:
                raise DegreeBudgetExceeded(f"lambda-degree {len(nxt) - 1} exceeds budget {deg_budget}")
            y.append(nxt)
        basis.append(y)
    return CanonicalBasis(n, basis, J, exact)


@dataclass
class SpectralPolynomial:
    """``R(lambda, mu) = sum c[a, b] lambda^a mu^b``."""

    terms: dict
    exact: bool = True

    def __post_init__(self):
        self.terms = {k: v for k, v in self.terms.items() if v}

    def coeff(self, a: int, b: int):
        return self.terms.get((a, b), _zero(self.exact))

    @property
    def mu_degree(self) -> int:
        return max((b for _, b in self.terms), default=0)

    @property
    def lambda_degree(self) -> int:
        return max((a for a, _ in self.terms), default=0)

    def __call__(self, lam, mu):
        return sum(complex(_c(v)) * lam ** a * mu ** b for (a, b), v in self.terms.items())

    def max_difference(self, other: "SpectralPolynomial") -> float:
        keys = set(self.terms) | set(other.terms)
        return max((abs(_c(self.coeff(*k)) - _c(other.coeff(*k))) for k in keys), default=0.0)

    def __eq__(self, other):
        if not isinstance(other, SpectralPolynomial):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(not (self.coeff(*k) - other.coeff(*k)) for k in keys)

    def to_json(self) -> dict:
        return {"terms": [{"a": a, "b": b, "c": to_json_scalar(v)}
                          for (a, b), v in sorted(self.terms.items())]}

    def __repr__(self):
        parts = [f"({v})*lam^{a}*mu^{b}" for (a, b), v in sorted(self.terms.items())]
        return "R = " + (" + ".join(parts) or "0")


def _c(v) -> complex:
    if isinstance(v, complex) or isinstance(v, (int, float)):
        return complex(v)
    return complex(float(v.x), float(v.y))


def _bivariate_det(M: list, exact: bool) -> dict:
    """``det(mu I - M)`` for a matrix of lambda-polynomials, as ``{(a, b): c}``."""
    n = len(M)
    # entries of mu I - M as {(a, b): c}
    E = [[{} for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for a, c in enumerate(M[i][j]):
                if c:
                    E[i][j][(a, 0)] = -c
            if i == j:
                E[i][j][(0, 1)] = E[i][j].get((0, 1), _zero(exact)) + (to_exact(1) if exact else 1)
    total: dict = {}
    for perm in permutations(range(n)):
        sign = _perm_sign(perm)
        prod = {(0, 0): to_exact(sign) if exact else complex(sign)}
        for i, j in enumerate(perm):
            nxt: dict = {}
            for (a1, b1), c1 in prod.items():
                for (a2, b2), c2 in E[i][j].items():
                    k = (a1 + a2, b1 + b2)
                    nxt[k] = nxt.get(k, _zero(exact)) + c1 * c2
            prod = nxt
        for k, v in prod.items():
            total[k] = total.get(k, _zero(exact)) + v
    return total


def _perm_sign(perm) -> int:
    sign, seen = 1, set()
    for i in range(len(perm)):
        if i in seen:
            continue
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _commute_check(Ln: PsiDO, Lm: PsiDO, tol: float):
    C = commutator(Ln, Lm)
    if Ln.exact:
        if not C.is_zero():
            raise NotCommuting("commutator has nonzero exact jet coefficients")
    else:
        scale = max(Ln.max_abs(), Lm.max_abs(), 1.0)
        if C.max_abs() > tol * scale ** 2:
            raise NotCommuting(f"commutator jet magnitude {C.max_abs():.3g} exceeds tolerance")


def spectral_polynomial(Ln: PsiDO, Lm: PsiDO, deg_budget: int | None = None,
                        tol: float = FLOAT_TOL) -> SpectralPolynomial:
    """``det(mu I - M(lambda))`` with ``M_ij = (L_m c_j)^(i)(x0)``."""
    n, m = _order(Ln), _order(Lm)
    _commute_check(Ln, Lm, tol)
    exact = Ln.exact
    budget = m + 2 if deg_budget is None else deg_budget
    need = m + n - 1
    B = canonical_basis(Ln, need, budget)
    M = [[[] for _ in range(n)] for _ in range(n)]
    for j in range(n):
        y = B.y[j]
        for i in range(n):
            acc: list = []
            # Taylor coefficient of t^i in sum_l v_l c_j^(l)
            for l in range(m + 1):
                vl = Lm[l]
                for a in range(i + 1):
                    va = vl[a]
                    if not va:
                        continue
                    b = i - a
                    f = math.factorial(b + l) // math.factorial(b)
                    acc = _padd(acc, _pscale(y[b + l], va * f), exact)
            M[i][j] = _ptrim(_pscale(acc, math.factorial(i)))
    return SpectralPolynomial(_bivariate_det(M, exact), exact)


def bc_annihilation(Ln: PsiDO, Lm: PsiDO, R: SpectralPolynomial) -> PsiDO:
    """``R(L_n, L_m)`` as an operator; zero through the valid jet order."""
    try:
        pn = [PsiDO.one(Ln.exact)]
        pm = [PsiDO.one(Ln.exact)]
        for _ in range(R.lambda_degree):
            pn.append(mul(pn[-1], Ln))
        for _ in range(R.mu_degree):
            pm.append(mul(pm[-1], Lm))
        out = PsiDO({}, INF, Ln.exact)
        for (a, b), c in R.terms.items():
            out = out + mul(pn[a], pm[b]) * c
    except DepthExhausted as exc:
        raise JetTooShallow(str(exc)) from None
    return out


def formal_eigenvalue(Ln: PsiDO, Lm: PsiDO, S: int, tol: float = 1e-9) -> dict:
    """``a_m(k)`` with ``L_m psi = a_m(k) psi`` for the wave of ``L_n^(1/n)``.

    Returns ``{power: constant}`` for powers ``m, m-1, ..., -S``.  Raises
    :class:`NonConstantRatio` if a coefficient depends on ``x``.
    """
    n, m = _order(Ln), _order(Lm)
    depth = m + S + 1
    root = nth_root(Ln, n, depth)
    w = wave(root, m + S)
    series = w.series()
    image = left_action(Lm, series)
    a: dict = {}
    for p in range(m, -S - 1, -1):
        acc = image[p]
        for s in range(1, m - p + 1):
            acc = acc - w.xi[s] * a[p + s]
        if Ln.exact:
            if not acc.is_constant():
                raise NonConstantRatio(f"coefficient of k^{p} depends on x")
        else:
            # deep Taylor indices are dominated by rounding, so test the slope only
            scale = max([1.0, abs(acc.value())] + [abs(v) for v in a.values()])
            if acc.order >= 1 and abs(acc[1]) > tol * scale:
                raise NonConstantRatio(f"coefficient of k^{p} depends on x")
        a[p] = acc.value()
    return a


def rexpans_residual(R: SpectralPolynomial, a: dict, n: int, orders: int) -> float:
    """Largest mismatch between ``R(k^n, mu)`` and ``prod_i (mu - a(w^i k))``.

    Compares every ``mu`` coefficient as a Laurent series in ``k`` over the
    top ``orders`` powers that are reliable.  Uses exact arithmetic when the
    roots of unity lie in Q(i) (``n`` in 1, 2, 4) and ``a`` is exact.
    """
    exact = n in (1, 2, 4) and not isinstance(next(iter(a.values())), complex)
    roots = {1: [1], 2: [1, -1], 4: [1, (0, 1), -1, (0, -1)]}
    if exact:
        ws = [to_exact(r) if isinstance(r, tuple) else to_exact(r) for r in roots[n]]
        one = to_exact(1)
    else:
        ws = [cmath.exp(2j * math.pi * i / n) for i in range(n)]
        one = 1 + 0j
        a = {p: _c(v) for p, v in a.items()}
    top = max(a)
    low = min(a)
    # product as {mu power: {k power: coeff}}
    prod = {0: {0: one}}
    for w in ws:
        fac = {1: {0: one}, 0: {p: -(v * w ** p if p >= 0 else v * _inv_pow(w, -p, exact)) for p, v in a.items()}}
        nxt: dict = {}
        for b1, s1 in prod.items():
            for b2, s2 in fac.items():
                tgt = nxt.setdefault(b1 + b2, {})
                for p1, c1 in s1.items():
                    for p2, c2 in s2.items():
                        tgt[p1 + p2] = tgt.get(p1 + p2, 0 * one) + c1 * c2
        prod = nxt
    reliable = (n - 1) * top + low
    worst = 0.0
    for b in range(n + 1):
        series = prod.get(b, {})
        hi = max(series, default=0)
        for p in range(hi, max(hi - orders, reliable) - 1, -1):
            lhs = series.get(p, 0 * one)
            rhs = 0 * one
            if p % n == 0 and p >= 0:
                rhs = R.coeff(p // n, b)
                if not exact:
                    rhs = _c(rhs)
            worst = max(worst, abs(_c(lhs - rhs)))
    return worst


def _inv_pow(w, p, exact):
    inv = (to_exact(1) / w) if exact else 1 / w
    return inv ** p


# difference operators -------------------------------------------------------

def spectral_polynomial_difference(un: list, um: list, x0: int = 0,
                                   exact: bool = True) -> SpectralPolynomial:
    """Spectral polynomial of ``T^n + sum u_i T^i`` and ``T^m + sum v_i T^i``.

    ``un[i]``, ``um[i]`` are :class:`GridFn` coefficients (or constants).  The
    canonical basis is fixed by ``c_j(x0 + i) = delta_ij``.
    """
    n, m = len(un), len(um)
    one = to_exact(1) if exact else 1 + 0j
    grid = [g if isinstance(g, GridFn) else GridFn.constant(g, exact) for g in un]
    vgrid = [g if isinstance(g, GridFn) else GridFn.constant(g, exact) for g in um]
    M = [[[] for _ in range(n)] for _ in range(n)]
    for j in range(n):
        vals = {x0 + i: ([one] if i == j else []) for i in range(n)}
        for x in range(x0, x0 + m):
            acc = _pshift(vals[x], exact)
            for i in range(n):
                acc = _padd(acc, _pscale(vals[x + i], -grid[i](x)), exact)
            vals[x + n] = _ptrim(acc)
        for i in range(n):
            x = x0 + i
            acc = list(vals[x + m])
            for l in range(m):
                acc = _padd(acc, _pscale(vals[x + l], vgrid[l](x)), exact)
            M[i][j] = _ptrim(acc)
    return SpectralPolynomial(_bivariate_det(M, exact), exact)


def bc_annihilation_difference(Ln: PsiDiffOp, Lm: PsiDiffOp, R: SpectralPolynomial) -> PsiDiffOp:
    pn = [PsiDiffOp.scalar(1, Ln.exact)]
    pm = [PsiDiffOp.scalar(1, Ln.exact)]
    for _ in range(R.lambda_degree):
        pn.append(dmul(pn[-1], Ln))
    for _ in range(R.mu_degree):
        pm.append(dmul(pm[-1], Lm))
    out = PsiDiffOp({}, INF, Ln.exact)
    for (a, b), c in R.terms.items():
        out = out + dmul(pn[a], pm[b]) * c
    return out


# standard pairs -------------------------------------------------------------

def lame_pair(wp_coeffs: list, exact: bool | None = None) -> tuple[PsiDO, PsiDO]:
    """``(d^2 - 2 wp, d^3 - 3 wp d - (3/2) wp')`` from Taylor coefficients of ``wp``."""
    if exact is None:
        exact = not isinstance(wp_coeffs[0], complex)
    J = len(wp_coeffs) - 1
    wp = CoeffJet(list(wp_coeffs), J, exact)
    half = to_exact(Fraction(3, 2)) if exact else 1.5
    L2 = diffop([wp * -2, CoeffJet.zero(exact)], exact)
    L3 = diffop([wp.deriv() * (-half), wp * -3, CoeffJet.zero(exact)], exact)
    return L2, L3


def rational_kdv_pair(x0, J: int) -> tuple[PsiDO, PsiDO]:
    """``(d^2 - 2/x^2, d^3 - 3 x^-2 d + 3 x^-3)`` as exact jets at rational ``x0``."""
    x0 = Fraction(x0)

    def inv_pow(p):
        # Taylor coefficients of x^-p at x0
        return CoeffJet([Fraction((-1) ** k * math.comb(k + p - 1, k)) / x0 ** (k + p)
                         for k in range(J + 1)], J)

    L2 = diffop([inv_pow(2) * -2, CoeffJet.zero()])
    L3 = diffop([inv_pow(3) * 3, inv_pow(2) * -3, CoeffJet.zero()])
    return L2, L3


def exact_wp_taylor(p0, p1, g2, order: int) -> list:
    """Taylor coefficients of ``wp(delta + t)`` from rational ``wp, wp', g2`` at delta.

    ``g3 = 4 p0^3 - g2 p0 - p1^2`` is implied; the recursion is
    ``wp'' = 6 wp^2 - g2/2``.
    """
    a = [to_exact(p0), to_exact(p1)]
    g2 = to_exact(g2)
    for k in range(order - 1):
        conv = a[0] * 0
        for i in range(k + 1):
            conv = conv + a[i] * a[k - i]
        rhs = conv * 6 - (g2 / to_exact(2) if k == 0 else 0)
        a.append(rhs / to_exact((k + 2) * (k + 1)))
    return a[: order + 1]
