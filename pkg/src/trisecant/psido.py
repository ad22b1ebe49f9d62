r"""Formal pseudodifferential operators in :math:`\partial^{-1}` with jet coefficients.

An operator is a finite map ``order -> CoeffJet`` together with a *depth*
``M``: coefficients of :math:`\partial^s` are reliable for ``s >= -M``.
Differential operators with exactly known coefficients have ``depth = inf``.
Products compute their own reliable depth and drop everything below it, and
coefficients lose one jet order per derivative consumed by the Leibniz rule

.. math::

    \partial^a \circ f = \sum_{j \ge 0} \binom{a}{j} f^{(j)} \partial^{a-j}.

Around the ring sit the Sato KP flows, wave and dual wave series, the
k-residue pairing and the Lemma-type identity ``J_{n+1} = res L^n``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DepthExhausted, JetTooShallow, PostconditionFailed, ValidationError
from .jets import INF, CoeffJet, binom, random_jet, to_exact

__all__ = [
    "PsiDO",
    "KSeries",
    "WaveSeries",
    "lkp",
    "random_lkp",
    "mul",
    "residue",
    "split",
    "kp_flow",
    "zero_curvature_residual",
    "flow_commutativity_residual",
    "u_flow_residual",
    "wave",
    "dressing_and_dual",
    "bilinear_pairing",
    "pairing_identity",
    "fn_jn_check",
    "nth_root",
    "rescale_wave",
    "dual_residual",
    "dressing",
    "commutator",
    "left_action",
    "right_action",
]


FLOAT_FLOW_TOL = 1e-10


class PsiDO:
    """Truncated formal series ``sum_{s >= -depth} a_s d^s``."""

    __slots__ = ("coeffs", "depth", "exact")

    def __init__(self, coeffs: Mapping[int, CoeffJet], depth=INF, exact: bool = True):
        self.depth = depth
        self.exact = exact
        lo = -depth
        self.coeffs = {int(s): c for s, c in coeffs.items()
                       if s >= lo and not (c.order == INF and not c.c)}

    # construction -----------------------------------------------------
    @classmethod
    def d(cls, n: int = 1, depth=INF, exact: bool = True) -> "PsiDO":
        """``d^n``; negative powers need a finite depth to be usable in products."""
        return cls({n: CoeffJet.const(1, exact)}, depth, exact)

    @classmethod
    def scalar(cls, f, exact: bool = True) -> "PsiDO":
        if not isinstance(f, CoeffJet):
            f = CoeffJet.const(f, exact)
        return cls({0: f}, INF, f.exact)

    @classmethod
    def one(cls, exact: bool = True) -> "PsiDO":
        return cls.scalar(1, exact)

    # inspection -------------------------------------------------------
    @property
    def top(self):
        return max(self.coeffs, default=-INF)

    @property
    def bottom(self):
        return min(self.coeffs, default=INF)

    def order(self, tol: float = 0.0):
        """Highest power whose coefficient is not zero (within ``tol`` in float mode)."""
        return max((s for s, c in self.coeffs.items() if not c.is_zero(tol)), default=-INF)

    def __getitem__(self, s: int) -> CoeffJet:
        if s < -self.depth:
            raise DepthExhausted(f"coefficient of d^{s} lies below the reliable depth {self.depth}")
        return self.coeffs.get(s, CoeffJet.zero(self.exact))

    def items(self):
        return sorted(self.coeffs.items(), reverse=True)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(c.is_zero(tol) for c in self.coeffs.values())

    def max_abs(self) -> float:
        return max((c.max_abs() for c in self.coeffs.values()), default=0.0)

    def min_jet_order(self):
        return min((c.order for c in self.coeffs.values()), default=INF)

    # algebra ----------------------------------------------------------
    def _check(self, other):
        if self.exact != other.exact:
            raise ValidationError("cannot mix exact and float operators")

    def __add__(self, other: "PsiDO") -> "PsiDO":
        if not isinstance(other, PsiDO):
            other = PsiDO.scalar(other, self.exact)
        self._check(other)
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out[s] + c if s in out else c
        return PsiDO(out, min(self.depth, other.depth), self.exact)

    __radd__ = __add__

    def __neg__(self) -> "PsiDO":
        return PsiDO({s: -c for s, c in self.coeffs.items()}, self.depth, self.exact)

    def __sub__(self, other) -> "PsiDO":
        if not isinstance(other, PsiDO):
            other = PsiDO.scalar(other, self.exact)
        return self + (-other)

    def __rsub__(self, other) -> "PsiDO":
        return (-self) + other

    def __mul__(self, other) -> "PsiDO":
        if isinstance(other, PsiDO):
            return mul(self, other)
        return PsiDO({s: c * other for s, c in self.coeffs.items()}, self.depth, self.exact)

    def __rmul__(self, other) -> "PsiDO":
        return PsiDO({s: c * other for s, c in self.coeffs.items()}, self.depth, self.exact)

    def __pow__(self, n: int) -> "PsiDO":
        if n < 0:
            raise ValidationError("use inverse() for negative powers")
        out = PsiDO.one(self.exact)
        for _ in range(n):
            out = mul(out, self)
        return out

    def truncate(self, depth) -> "PsiDO":
        return PsiDO(self.coeffs, min(depth, self.depth), self.exact)

    def dx(self) -> "PsiDO":
        """Coefficientwise x-derivative (the commutator with d)."""
        return PsiDO({s: c.deriv() for s, c in self.coeffs.items()}, self.depth, self.exact)

    def inverse(self, depth=None) -> "PsiDO":
        """Inverse of ``1 + X`` with ``X`` of order <= -1."""
        if self.top > 0 or not (self[0] - 1).is_zero():
            raise ValidationError("inverse() needs an operator of the form 1 + O(d^-1)")
        depth = self.depth if depth is None else min(depth, self.depth)
        if depth == INF:
            raise ValidationError("inverse of an infinite series needs a finite depth")
        X = (self - 1).truncate(depth)
        out = PsiDO.one(self.exact).truncate(depth)
        term = PsiDO.one(self.exact).truncate(depth)
        for _ in range(int(depth)):
            term = -mul(term, X, depth=depth)
            out = out + term
        return out

    def to_float(self) -> "PsiDO":
        return PsiDO({s: c.to_float() for s, c in self.coeffs.items()}, self.depth, False)

    def to_json(self) -> dict:
        return {"depth": None if self.depth == INF else self.depth,
                "coeffs": {str(s): c.to_json() for s, c in self.items()}}

    @classmethod
    def from_json(cls, obj, exact: bool = True) -> "PsiDO":
        depth = INF if obj["depth"] is None else obj["depth"]
        return cls({int(s): CoeffJet.from_json(c, exact) for s, c in obj["coeffs"].items()},
                   depth, exact)

    def __repr__(self):
        body = " + ".join(f"({c!r}) d^{s}" for s, c in self.items()) or "0"
        return f"PsiDO[{body}; depth={self.depth}]"


def mul(A: PsiDO, B: PsiDO, depth=None) -> PsiDO:
    """Composition ``A o B`` with reliable-depth and jet-order tracking.

    Missing tail terms of either factor contaminate the product below
    ``min(M_A - N_B, M_B - N_A)``; an optional ``depth`` truncates further.
    """
    A._check(B)
    if not A.coeffs or not B.coeffs:
        d = min(A.depth, B.depth) if depth is None else min(A.depth, B.depth, depth)
        return PsiDO({}, d, A.exact)
    d = min(A.depth - B.top, B.depth - A.top)
    if depth is not None:
        d = min(d, depth)
    if d == INF and (A.bottom < 0 or B.bottom < 0):
        raise ValidationError("product of exact operators with negative powers needs a depth")
    out: dict[int, CoeffJet] = {}
    derivs: dict[int, list] = {b: [g] for b, g in B.coeffs.items()}
    for a, f in A.coeffs.items():
        for b, g in B.coeffs.items():
            cache = derivs[b]
            j = 0
            while True:
                s = a + b - j
                if s < -d or (a >= 0 and j > a):
                    break
                if j >= len(cache):
                    cache.append(cache[-1].deriv())
                gj = cache[j]
                if gj.order < 0:
                    d = min(d, -s - 1)
                    break
                term = f * gj
                c = binom(a, j)
                if c != 1:
                    term = term * c
                out[s] = out[s] + term if s in out else term
                j += 1
    if d < 0:
        raise DepthExhausted(f"product has negative reliable depth {d}; supply deeper operators or jets")
    return PsiDO(out, d, A.exact)


def commutator(A: PsiDO, B: PsiDO, depth=None) -> PsiDO:
    return mul(A, B, depth) - mul(B, A, depth)


def residue(A: PsiDO) -> CoeffJet:
    """Coefficient of ``d^-1``."""
    if A.depth < 1:
        raise DepthExhausted("residue needs depth >= 1")
    return A[-1]


def split(A: PsiDO) -> tuple[PsiDO, PsiDO]:
    """``(A_+, A_-)``: the differential part and the ``O(d^-1)`` remainder."""
    plus = PsiDO({s: c for s, c in A.coeffs.items() if s >= 0}, INF, A.exact)
    minus = PsiDO({s: c for s, c in A.coeffs.items() if s < 0}, A.depth, A.exact)
    if A.depth < 0:
        raise DepthExhausted("differential part is not reliable at negative depth")
    return plus, minus


def lkp(v: list, exact: bool = True) -> PsiDO:
    """``d + v_1 d^-1 + ... + v_M d^-M`` with depth ``M``."""
    coeffs = {1: CoeffJet.const(1, exact)}
    for s, vs in enumerate(v, start=1):
        coeffs[-s] = vs
    return PsiDO(coeffs, len(v), exact)


def random_lkp(rng, depth: int, jet_order: int, exact: bool = True) -> PsiDO:
    return lkp([random_jet(rng, jet_order, exact) for _ in range(depth)], exact)


def _check_lkp(L: PsiDO):
    if L.top != 1 or not (L[1] - 1).is_zero():
        raise ValidationError("expected a monic first-order operator")
    if not L[0].is_zero():
        raise ValidationError("expected vanishing d^0 coefficient (KP gauge)")


def _powers(L: PsiDO, n: int) -> list:
    out = [PsiDO.one(L.exact)]
    for _ in range(n):
        out.append(mul(out[-1], L))
    return out


def kp_flow(L: PsiDO, i: int) -> PsiDO:
    """``d_i L = [(L^i)_+, L]``; asserts the result has order at most -1."""
    _check_lkp(L)
    Li = L ** i
    plus, _ = split(Li)
    out = commutator(plus, L)
    # float mode: the cancelled positive powers keep rounding residue
    tol = 0.0 if L.exact else FLOAT_FLOW_TOL * max(1.0, plus.max_abs()) * max(1.0, L.max_abs())
    if out.order(tol) > -1:
        raise PostconditionFailed(f"flow {i} produced order {out.order(tol)} > -1")
    return out


def _flow_of_power(Lpows: list, i: int, j: int) -> PsiDO:
    """``d_i (L^j) = [(L^i)_+, L^j]``."""
    return commutator(split(Lpows[i])[0], Lpows[j])


def zero_curvature_residual(L: PsiDO, i: int, j: int) -> PsiDO:
    """``d_i (L^j)_+ - d_j (L^i)_+ + [(L^j)_+, (L^i)_+]``."""
    _check_lkp(L)
    P = _powers(L, max(i, j))
    di_lj = split(_flow_of_power(P, i, j))[0]
    dj_li = split(_flow_of_power(P, j, i))[0]
    Lj, Li = split(P[j])[0], split(P[i])[0]
    return di_lj - dj_li + commutator(Lj, Li)


def flow_commutativity_residual(L: PsiDO, i: int, j: int) -> PsiDO:
    """``d_i d_j L - d_j d_i L`` with both sides expanded by the chain rule."""
    _check_lkp(L)
    P = _powers(L, max(i, j))

    def dd(a, b):
        # d_a [ (L^b)_+, L ] = [ (d_a L^b)_+, L ] + [ (L^b)_+, d_a L ]
        da_lb = split(_flow_of_power(P, a, b))[0]
        da_l = commutator(split(P[a])[0], L)
        return commutator(da_lb, L) + commutator(split(P[b])[0], da_l)

    return dd(i, j) - dd(j, i)


def u_flow_residual(L: PsiDO, m: int) -> CoeffJet:
    """``d_m u + 2 d_x F_m`` with ``u = -2 v_1`` and ``F_m = res L^m``.

    The coefficient of ``d^-1`` in ``[(L^m)_+, L]`` is ``d_x res L^m``, so the
    flow of ``u`` is ``-2 d_x F_m``.
    """
    flow = kp_flow(L, m)
    du = flow[-1] * -2
    F = residue(L ** m)
    return du + F.deriv() * 2


# formal series in k ---------------------------------------------------------

@dataclass
class KSeries:
    """Laurent series ``sum_p c_p k^p`` with jet coefficients, reliable for ``p >= low``."""

    terms: dict
    low: float
    exact: bool = True

    def __getitem__(self, p: int) -> CoeffJet:
        if p < self.low:
            raise DepthExhausted(f"k^{p} lies below the reliable order {self.low}")
        return self.terms.get(p, CoeffJet.zero(self.exact))

    @property
    def top(self):
        return max(self.terms, default=-INF)

    def __mul__(self, other: "KSeries") -> "KSeries":
        low = max(self.low + other.top, other.low + self.top)
        out: dict = {}
        for p, a in self.terms.items():
            for q, b in other.terms.items():
                if p + q < low:
                    continue
                t = a * b
                out[p + q] = out[p + q] + t if p + q in out else t
        return KSeries(out, low, self.exact)

    def is_zero_above(self, p: int, tol: float = 0.0) -> bool:
        return all(c.is_zero(tol) for q, c in self.terms.items() if q >= p)


def left_action(D: PsiDO, g: KSeries) -> KSeries:
    """``D (g e^{kx}) = e^{kx} * result``."""
    out: dict = {}
    low = max(g.low + D.top, -D.depth + g.top)
    for s, f in D.coeffs.items():
        for q, h in g.terms.items():
            j = 0
            while True:
                p = s + q - j
                if p < low or (s >= 0 and j > s):
                    break
                hj = h.deriv(j)
                if hj.order < 0:
                    low = max(low, p + 1)
                    break
                t = f * hj * binom(s, j)
                out[p] = out[p] + t if p in out else t
                j += 1
    return KSeries({p: c for p, c in out.items() if p >= low}, low, D.exact)


def right_action(g: KSeries, D: PsiDO) -> KSeries:
    """``(g e^{-kx}) D = e^{-kx} * result`` for the formal-adjoint right action."""
    out: dict = {}
    low = max(g.low + D.top, -D.depth + g.top)
    for s, f in D.coeffs.items():
        for q, h in g.terms.items():
            fh = f * h
            j = 0
            while True:
                p = s + q - j
                if p < low or (s >= 0 and j > s):
                    break
                d = fh.deriv(j)
                if d.order < 0:
                    low = max(low, p + 1)
                    break
                t = d * (binom(s, j) * (-1) ** j)
                out[p] = out[p] + t if p in out else t
                j += 1
    return KSeries({p: c for p, c in out.items() if p >= low}, low, D.exact)


@dataclass
class WaveSeries:
    """``(1 + sum_s xi_s k^-s) e^{sign * k x}``."""

    xi: list
    sign: int = 1
    exact: bool = True
    L: PsiDO | None = field(default=None, repr=False)

    @property
    def S(self) -> int:
        return len(self.xi) - 1

    def series(self) -> KSeries:
        return KSeries({-s: c for s, c in enumerate(self.xi)}, -self.S, self.exact)


FLOAT_WAVE_TOL = 1e-4


def wave(L: PsiDO, S: int) -> WaveSeries:
    """Formal solution of ``L psi = k psi`` normalised by ``xi_s(x0) = 0``.

    Matching powers of ``k`` gives
    ``xi_n' = -sum_{s + j + r = n, s >= 1} binom(-s, j) v_s xi_r^(j)``.
    """
    _check_lkp(L)
    if L.depth < S:
        raise DepthExhausted(f"wave depth {S} needs operator depth >= {S}, have {L.depth}")
    one = CoeffJet.const(1, L.exact)
    xi = [one]
    for n in range(1, S + 1):
        rhs = CoeffJet.zero(L.exact)
        for s in range(1, n + 1):
            vs = L[-s]
            if vs.is_zero() and vs.order == INF:
                continue
            for j in range(0, n - s + 1):
                r = n - s - j
                c = binom(-s, j)
                rhs = rhs + vs * xi[r].deriv(j) * c
        xi_n = (-rhs).integrate()
        if xi_n.order < 0:
            raise JetTooShallow(f"jets exhausted while solving for xi_{n}")
        xi.append(xi_n)
    w = WaveSeries(xi, 1, L.exact, L)
    res = left_action(L, w.series())
    kpsi = KSeries({p + 1: c for p, c in w.series().terms.items()}, w.series().low + 1, L.exact)
    diff = KSeries({p: res[p] - kpsi[p] for p in range(1 - S, 2)
                    if p >= max(res.low, kpsi.low)}, 1 - S)
    if L.exact:
        ok = diff.is_zero_above(1 - S)
    else:
        # Taylor coefficients grow geometrically and deep ones carry rounding,
        # so compare index by index against the largest contribution
        ok = True
        parts = list(res.terms.values()) + list(kpsi.terms.values())
        for c in diff.terms.values():
            for k, v in enumerate(c.c):
                scale = max([abs(t.c[k]) for t in parts if k < len(t.c)] + [1.0])
                ok = ok and abs(v) <= FLOAT_WAVE_TOL * scale
    if not ok:
        raise PostconditionFailed("wave series does not solve L psi = k psi")
    return w


def rescale_wave(w: WaveSeries, c: list) -> WaveSeries:
    """Multiply ``psi`` by ``1 + sum c_s k^-s`` with constants ``c_s``."""
    cs = [1] + list(c)
    out = []
    for n in range(w.S + 1):
        acc = CoeffJet.zero(w.exact)
        for s in range(min(n, len(cs) - 1) + 1):
            acc = acc + w.xi[n - s] * cs[s]
        out.append(acc)
    return WaveSeries(out, w.sign, w.exact, w.L)


def dressing(w: WaveSeries) -> PsiDO:
    """``Phi = 1 + sum xi_s d^-s`` so that ``psi = Phi e^{kx}``."""
    coeffs = {-s: c for s, c in enumerate(w.xi)}
    return PsiDO(coeffs, w.S, w.exact)


def dressing_and_dual(w: WaveSeries) -> tuple[PsiDO, PsiDO, WaveSeries]:
    """``(Phi, Phi^-1, psi^+)`` with ``psi^+ = e^{-kx} Phi^-1``.

    Asserts ``Phi Phi^-1 = 1`` and ``L = Phi d Phi^-1`` to the reliable depth.
    """
    Phi = dressing(w)
    Phinv = Phi.inverse()
    if not (mul(Phi, Phinv) - 1).is_zero():
        raise PostconditionFailed("Phi Phi^-1 != 1")
    if w.L is not None:
        dressed = mul(mul(Phi, PsiDO.d(1, exact=w.exact)), Phinv)
        depth = min(dressed.depth, w.L.depth)
        if not (dressed.truncate(depth) - w.L.truncate(depth)).is_zero():
            raise PostconditionFailed("L != Phi d Phi^-1")
    # right action of chi_s d^-s on e^{-kx}
    xi_plus = [CoeffJet.const(1, w.exact)]
    for n in range(1, w.S + 1):
        acc = CoeffJet.zero(w.exact)
        for s in range(1, n + 1):
            j = n - s
            acc = acc + Phinv[-s].deriv(j) * (binom(-s, j) * (-1) ** j)
        xi_plus.append(acc)
    return Phi, Phinv, WaveSeries(xi_plus, -1, w.exact, w.L)


def dual_residual(wplus: WaveSeries, L: PsiDO) -> KSeries:
    """``psi^+ L - k psi^+`` by direct right action, coefficients of ``e^{-kx}``."""
    lhs = right_action(wplus.series(), L)
    k = KSeries({p + 1: c for p, c in wplus.series().terms.items()}, wplus.series().low + 1, L.exact)
    low = max(lhs.low, k.low)
    return KSeries({p: lhs[p] - k[p] for p in range(int(low), 2)}, low, L.exact)


def bilinear_pairing(w: WaveSeries, wplus: WaveSeries, n: int) -> CoeffJet:
    """Coefficient of ``k^-1`` in ``psi^+ (d^n psi)``."""
    dn = left_action(PsiDO.d(n, exact=w.exact), w.series())
    prod = wplus.series() * dn
    return prod[-1]


def pairing_identity(D1: PsiDO, D2: PsiDO) -> tuple[CoeffJet, CoeffJet]:
    """Both sides of ``res_k (e^{-kx} D1)(D2 e^{kx}) = res_d (D2 D1)``."""
    one = KSeries({0: CoeffJet.const(1, D1.exact)}, -INF, D1.exact)
    left = right_action(one, D1) * left_action(D2, one)
    return left[-1], residue(mul(D2, D1))


def fn_jn_check(L: PsiDO, N: int) -> dict:
    """Compare ``J_{n+1}`` from ``psi^+ psi`` with ``F_n = res L^n`` for ``n <= N``."""
    w = wave(L, N + 1)
    _, _, wp = dressing_and_dual(w)
    prod = wp.series() * w.series()
    P = _powers(L, N)
    rows = []
    for n in range(1, N + 1):
        J = prod[-(n + 1)]
        F = residue(P[n])
        rows.append({"n": n, "equal": (J - F).is_zero(), "F": F, "J": J})
    return {"rows": rows, "pass": all(r["equal"] for r in rows)}


def nth_root(Ln: PsiDO, n: int, depth: int) -> PsiDO:
    """``L = d + sum_{s>=1} w_s d^-s`` with ``L^n = Ln`` through ``depth``.

    ``Ln`` must be monic of order ``n`` with vanishing ``d^{n-1}`` coefficient.
    Each step fixes ``w_s`` from the ``d^{n-1-s}`` coefficient, where it enters
    linearly with factor ``n``.
    """
    if Ln.top != n or not (Ln[n] - 1).is_zero():
        raise ValidationError("nth_root needs a monic operator of order n")
    if not Ln[n - 1].is_zero():
        raise ValidationError("nth_root needs a vanishing d^{n-1} coefficient")
    w: list = []
    for s in range(1, depth + 1):
        # zero placeholders keep L^n deep enough; w_t only reaches d^{n-1-t} and below
        L = lkp(w + [CoeffJet.zero(Ln.exact)] * n, Ln.exact)
        P = L ** n
        target = Ln[n - 1 - s] if n - 1 - s >= -Ln.depth else CoeffJet.zero(Ln.exact)
        ws = (target - P[n - 1 - s]) * (1 / n if not Ln.exact else _inv(n))
        w.append(ws)
    return lkp(w, Ln.exact)


def _inv(n: int):
    return to_exact(Fraction(1, n))
