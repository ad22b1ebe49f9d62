"""Hirota bilinear operators acting on Taylor jets.

A jet is an array ``f[a, b, c]`` of normalised Taylor coefficients
``d^(a,b,c) f / (a! b! c!)`` at a point, with one axis per variable.  A
polynomial ``P(D_x, D_y, D_t)`` is a mapping from exponent tuples to
coefficients.  Entries may be Python ints, Fractions or any exact field type;
the arithmetic never leaves the type of the inputs.
"""

from __future__ import annotations

import math
from itertools import product
from typing import Mapping

import numpy as np

from .errors import JetTooShallow, ValidationError

__all__ = ["hirota_apply", "hirota_bilinear", "exp_jet", "jet_from_function", "KP_HIROTA"]

# D_x^4 + 3 D_y^2 - 4 D_x D_t
KP_HIROTA = {(4, 0, 0): 1, (0, 2, 0): 3, (1, 0, 1): -4}


def _degree(P: Mapping) -> int:
    return max((sum(k) for k, c in P.items() if c), default=0)


def hirota_bilinear(P: Mapping, f: np.ndarray, g: np.ndarray):
    """``P(D) f . g`` at the base point of the jets ``f`` and ``g``."""
    f = np.asarray(f, dtype=object)
    g = np.asarray(g, dtype=object)
    if f.shape != g.shape:
        raise ValidationError("jets must have the same shape")
    nvar = f.ndim
    depth = min(f.shape) - 1
    for key in P:
        if len(key) != nvar:
            raise ValidationError(f"monomial {key} does not match a {nvar}-variable jet")
    if depth < _degree(P):
        raise JetTooShallow(f"jet order {depth} is below the operator degree {_degree(P)}")
    total = 0
    for gamma, coef in P.items():
        if not coef:
            continue
        fact = math.prod(math.factorial(k) for k in gamma)
        acc = 0
        for alpha in product(*(range(k + 1) for k in gamma)):
            beta = tuple(gk - ak for gk, ak in zip(gamma, alpha))
            term = f[alpha] * g[beta]
            acc = acc - term if sum(beta) % 2 else acc + term
        total = total + coef * fact * acc
    return total


def hirota_apply(P: Mapping, tau: np.ndarray):
    """``P(D) tau . tau``."""
    return hirota_bilinear(P, tau, tau)


def exp_jet(rates, order: int, amplitude=1, const=1):
    """Jet of ``const + amplitude * exp(sum_i rates[i] * x_i)`` at the origin.

    Exact when the inputs are exact.
    """
    shape = (order + 1,) * len(rates)
    out = np.empty(shape, dtype=object)
    for idx in product(range(order + 1), repeat=len(rates)):
        term = amplitude
        for r, k in zip(rates, idx):
            term = term * r ** k / math.factorial(k)
        out[idx] = term
    out[(0,) * len(rates)] = out[(0,) * len(rates)] + const
    return out


def jet_from_function(derivative, nvar: int, order: int) -> np.ndarray:
    """Build a jet from a callable returning the mixed derivative for an index tuple."""
    out = np.empty((order + 1,) * nvar, dtype=object)
    for idx in product(range(order + 1), repeat=nvar):
        out[idx] = derivative(idx) / math.prod(math.factorial(k) for k in idx)
    return out
