"""Bilinear discrete Hirota equation on an integer window."""

from __future__ import annotations

import itertools
from functools import lru_cache

from ..errors import ValidationError
from .report import Accumulator, ResidualReport

__all__ = ["bdhe_residual"]


def bdhe_residual(tau, window=((0, 3), (0, 3), (0, 3)), *, tol: float = 1e-6) -> ResidualReport:
    """Worst ``|tau_n(l+1,m) tau_n(l,m+1) - tau_n(l,m) tau_n(l+1,m+1) + tau_{n+1}(l+1,m) tau_{n-1}(l,m+1)|``.

    ``tau`` is called as ``tau(n, l, m)``; ``window`` gives half-open ranges
    for ``n, l, m`` of the base cell, each at least 3 long.
    """
    ranges = [range(a, b) for a, b in window]
    if any(len(r) < 3 for r in ranges):
        raise ValidationError("the BDHE window needs at least 3 points in each variable")
    t = lru_cache(maxsize=None)(lambda n, l, m: complex(tau(n, l, m)))
    acc = Accumulator("bdhe", tol)
    for n, l, m in itertools.product(*ranges):
        terms = (t(n, l + 1, m) * t(n, l, m + 1), -t(n, l, m) * t(n, l + 1, m + 1),
                 t(n + 1, l + 1, m) * t(n - 1, l, m + 1))
        acc.add(sum(terms), terms, n=n, l=l, m=m)
    return acc.report()
