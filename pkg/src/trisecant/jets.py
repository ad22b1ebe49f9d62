"""Truncated Taylor jets in one variable over Q(i) or complex floats.

A :class:`CoeffJet` stores normalised Taylor coefficients
``c[k] = f^(k)(x0) / k!`` together with the order up to which they are known.
Coefficients past the stored list but below ``order`` are zero, which lets
polynomials and constants carry ``order = inf``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from sympy.polys.domains import QQ, QQ_I

__all__ = ["CoeffJet", "to_exact", "to_json_scalar", "from_json_scalar", "binom", "random_jet",
           "ZERO", "ONE", "INF"]

INF = math.inf


def to_exact(x):
    """Coerce ints, Fractions, ``(re, im)`` pairs and Gaussian rationals to Q(i)."""
    if isinstance(x, QQ_I.dtype):
        return x
    if isinstance(x, tuple):
        re, im = x
        return QQ_I(_q(re), _q(im))
    if isinstance(x, complex):
        raise TypeError("floats cannot enter exact mode")
    return QQ_I(_q(x), 0)


def _q(x):
    if isinstance(x, float):
        raise TypeError("floats cannot enter exact mode")
    f = Fraction(x)
    return QQ(f.numerator, f.denominator)


def to_json_scalar(x):
    if isinstance(x, QQ_I.dtype):
        return [str(x.x), str(x.y)]
    x = complex(x)
    return [x.real, x.imag]


def from_json_scalar(pair, exact: bool):
    if exact:
        return QQ_I(_q(Fraction(pair[0])), _q(Fraction(pair[1])))
    return complex(float(pair[0]), float(pair[1]))


@lru_cache(maxsize=4096)
def binom(a: int, j: int) -> int:
    """Generalised binomial ``a (a-1) ... (a-j+1) / j!`` for any integer ``a``."""
    if j < 0:
        return 0
    num = 1
    for t in range(j):
        num *= a - t
    return num // math.factorial(j)


class CoeffJet:
    """Truncated Taylor series at a base point."""

    __slots__ = ("c", "order", "exact")

    def __init__(self, coeffs: Iterable, order=None, exact: bool = True):
        c = [to_exact(v) for v in coeffs] if exact else [complex(v) for v in coeffs]
        if order is None:
            order = len(c) - 1
        if order != INF:
            order = int(order)
            c = c[: max(order + 1, 0)]
        while c and not c[-1]:
            c.pop()
        self.c = c
        self.order = order
        self.exact = exact

    @classmethod
    def _raw(cls, c, order, exact):
        out = cls.__new__(cls)
        while c and not c[-1]:
            c.pop()
        out.c = c
        out.order = order
        out.exact = exact
        return out

    @classmethod
    def const(cls, value, exact: bool = True) -> "CoeffJet":
        return cls([value], INF, exact)

    @classmethod
    def zero(cls, exact: bool = True) -> "CoeffJet":
        return cls([], INF, exact)

    def _zero_scalar(self):
        return QQ_I(0, 0) if self.exact else 0j

    def __getitem__(self, k: int):
        if k > self.order:
            raise IndexError(f"coefficient {k} beyond jet order {self.order}")
        return self.c[k] if k < len(self.c) else self._zero_scalar()

    def value(self):
        return self[0]

    def derivative_at(self, k: int):
        """``f^(k)(x0)``."""
        return self[k] * math.factorial(k)

    def __add__(self, other):
        if not isinstance(other, CoeffJet):
            other = CoeffJet.const(other, self.exact)
        order = min(self.order, other.order)
        n = len(self.c) if len(self.c) >= len(other.c) else len(other.c)
        if order != INF:
            n = min(n, order + 1)
        a, b = self.c, other.c
        la, lb = len(a), len(b)
        z = self._zero_scalar()
        c = [(a[k] if k < la else z) + (b[k] if k < lb else z) for k in range(n)]
        return CoeffJet._raw(c, order, self.exact)

    __radd__ = __add__

    def __neg__(self):
        return CoeffJet._raw([-v for v in self.c], self.order, self.exact)

    def __sub__(self, other):
        if not isinstance(other, CoeffJet):
            other = CoeffJet.const(other, self.exact)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CoeffJet):
            if self.exact and not isinstance(other, int):
                other = to_exact(other)
            return CoeffJet._raw([v * other for v in self.c], self.order, self.exact)
        order = min(self.order, other.order)
        a, b = self.c, other.c
        if not a or not b:
            return CoeffJet._raw([], order, self.exact)
        n = len(a) + len(b) - 1
        if order != INF:
            n = min(n, order + 1)
        c = []
        la, lb = len(a), len(b)
        for k in range(n):
            lo = max(0, k - lb + 1)
            hi = min(k, la - 1)
            s = a[lo] * b[k - lo]
            for i in range(lo + 1, hi + 1):
                s += a[i] * b[k - i]
            c.append(s)
        return CoeffJet._raw(c, order, self.exact)

    __rmul__ = __mul__

    def deriv(self, k: int = 1) -> "CoeffJet":
        """``d^k/dx^k``; the known order drops by ``k``."""
        if k == 0:
            return self
        c = self.c
        out = []
        for i in range(k, len(c)):
            f = 1
            for t in range(i - k + 1, i + 1):
                f *= t
            out.append(c[i] * f)
        return CoeffJet._raw(out, self.order - k, self.exact)

    def integrate(self) -> "CoeffJet":
        """Antiderivative vanishing at the base point."""
        z = self._zero_scalar()
        if self.exact:
            c = [z] + [v / QQ_I(k + 1, 0) for k, v in enumerate(self.c)]
        else:
            c = [z] + [v / (k + 1) for k, v in enumerate(self.c)]
        return CoeffJet._raw(c, self.order + 1, self.exact)

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact or tol == 0.0:
            return not any(self.c)
        return all(abs(v) <= tol for v in self.c)

    def max_abs(self) -> float:
        return max((abs(complex(float(v.x), float(v.y))) if self.exact else abs(v) for v in self.c),
                   default=0.0)

    def is_constant(self, tol: float = 0.0) -> bool:
        return CoeffJet._raw(list(self.c[1:]), self.order - 1, self.exact).is_zero(tol)

    def to_float(self) -> "CoeffJet":
        if not self.exact:
            return self
        return CoeffJet._raw([complex(float(v.x), float(v.y)) for v in self.c], self.order, False)

    def truncate(self, order) -> "CoeffJet":
        order = min(order, self.order)
        c = self.c if order == INF else self.c[: max(order + 1, 0)]
        return CoeffJet._raw(list(c), order, self.exact)

    def __eq__(self, other):
        if not isinstance(other, CoeffJet):
            other = CoeffJet.const(other, self.exact)
        return (self - other).is_zero()

    def __hash__(self):
        return hash((tuple(self.c), self.order))

    def __repr__(self):
        return f"CoeffJet({self.c!r}, order={self.order})"

    def to_json(self) -> dict:
        return {"order": None if self.order == INF else self.order,
                "c": [to_json_scalar(v) for v in self.c]}

    @classmethod
    def from_json(cls, obj, exact: bool = True) -> "CoeffJet":
        order = INF if obj["order"] is None else obj["order"]
        return cls([from_json_scalar(p, exact) for p in obj["c"]], order, exact)


ZERO = CoeffJet.zero()
ONE = CoeffJet.const(1)


def random_jet(rng, order: int, exact: bool = True, den: int = 7, size: int = 4) -> CoeffJet:
    """Random jet with small Gaussian-rational (or complex) coefficients."""
    c = []
    for _ in range(order + 1):
        re = Fraction(int(rng.integers(-size, size + 1)), int(rng.integers(1, den + 1)))
        im = Fraction(int(rng.integers(-size, size + 1)), int(rng.integers(1, den + 1)))
        c.append((re, im) if exact else complex(float(re), float(im)))
    return CoeffJet(c, order, exact)
