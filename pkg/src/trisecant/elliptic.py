r"""Weierstrass elliptic functions through genus-one theta quotients.

With :math:`\tau = \omega_2/\omega_1`, :math:`s = x / 2\omega_1` and
:math:`h = (1 + \tau)/2` the odd theta function is

.. math::

    \vartheta_1(\pi s \mid \tau) = -i\, e^{i\pi\tau/4 + i\pi s}\, \theta(s + h \mid \tau),

so every Weierstrass function is a logarithmic derivative of
:math:`\theta(s + h)` plus elementary terms.  Arguments are first reduced to
the period parallelogram centred at 0; close to the origin the Laurent series
is used instead, which keeps the pole subtraction exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LatticePoint, ValidationError
from .theta import SiegelMatrix, theta, theta_many

__all__ = [
    "EllipticParams",
    "weierstrass",
    "weierstrass_many",
    "phi_kernel",
    "wp_taylor",
    "eisenstein_invariants",
    "lattice_sum_wp",
    "KINDS",
]

KINDS = ("p", "p'", "p''", "zeta", "sigma")
_ALIASES = {"wp": "p", "dp": "p'", "ddp": "p''", "wp'": "p'", "wp''": "p''"}
_LAURENT_TERMS = 16
_SINGULAR_DIST = 1e-12


@dataclass(frozen=True)
class EllipticParams:
    """Lattice ``2 omega1 Z + 2 omega2 Z`` with ``Im(omega2/omega1) > 0``."""

    omega1: complex
    omega2: complex
    tau: complex = field(init=False)
    g2: complex = field(init=False)
    g3: complex = field(init=False)
    eta1: complex = field(init=False)
    eta2: complex = field(init=False)

    def __post_init__(self):
        w1, w2 = complex(self.omega1), complex(self.omega2)
        if w1 == 0:
            raise ValidationError("omega1 must be nonzero")
        tau = w2 / w1
        if tau.imag <= 0:
            raise ValidationError(f"Im(omega2/omega1) must be positive, got tau={tau}")
        object.__setattr__(self, "omega1", w1)
        object.__setattr__(self, "omega2", w2)
        object.__setattr__(self, "tau", tau)
        B = SiegelMatrix([[tau]])
        h = np.array([(1 + tau) / 2])
        jet = theta(h, B, 3, [[1.0]])
        t1, t2, t3 = jet.d(0), jet.d(0, 0), jet.d(0, 0, 0)
        d3_over_d1 = -3 * math.pi ** 2 + (3j * math.pi * t2 + t3) / t1
        eta1 = -d3_over_d1 / (12 * w1)
        eta2 = (eta1 * w2 - 0.5j * math.pi) / w1
        object.__setattr__(self, "eta1", complex(eta1))
        object.__setattr__(self, "eta2", complex(eta2))
        th3 = theta([0.0], B).value
        th4 = theta([0.5], B).value
        th2 = cmath.exp(0.25j * math.pi * tau) * theta([tau / 2], B).value
        c = math.pi / (2 * w1)
        g2 = c ** 4 * (2 / 3) * (th2 ** 8 + th3 ** 8 + th4 ** 8)
        g3 = c ** 6 * (4 / 27) * (th2 ** 4 + th3 ** 4) * (th3 ** 4 + th4 ** 4) * (th4 ** 4 - th2 ** 4)
        object.__setattr__(self, "g2", complex(g2))
        object.__setattr__(self, "g3", complex(g3))

    @property
    def siegel(self) -> SiegelMatrix:
        return SiegelMatrix([[self.tau]])

    @property
    def shortest_period(self) -> float:
        return min(abs(2 * m * self.omega1 + 2 * n * self.omega2)
                   for m in range(-3, 4) for n in range(-3, 4) if (m, n) != (0, 0))

    def laurent_coefficients(self, terms: int = _LAURENT_TERMS) -> list:
        """``c_k`` with ``wp(x) = 1/x^2 + sum_{k>=2} c_k x^(2k-2)``."""
        c = [0j, 0j, self.g2 / 20, self.g3 / 28]
        for k in range(4, terms + 2):
            c.append(3 / ((2 * k + 1) * (k - 3)) * sum(c[m] * c[k - m] for m in range(2, k - 1)))
        return c

    def reduce(self, x: complex) -> tuple[complex, int, int]:
        """``x = xr + 2 m omega1 + 2 n omega2`` with ``xr`` in the centred cell."""
        a = np.array([[2 * self.omega1.real, 2 * self.omega2.real],
                      [2 * self.omega1.imag, 2 * self.omega2.imag]])
        coords = np.linalg.solve(a, [x.real, x.imag])
        m, n = (int(round(c)) for c in coords)
        return x - 2 * m * self.omega1 - 2 * n * self.omega2, m, n

    def to_json(self) -> dict:
        return {"omega1": [self.omega1.real, self.omega1.imag],
                "omega2": [self.omega2.real, self.omega2.imag]}

    @classmethod
    def from_json(cls, obj) -> "EllipticParams":
        return cls(complex(*obj["omega1"]), complex(*obj["omega2"]))


def eisenstein_invariants(params: EllipticParams, terms: int = 200) -> tuple[complex, complex]:
    """``(g2, g3)`` from the q-expansions of E4 and E6.  Independent of theta."""
    q = cmath.exp(2j * math.pi * params.tau)
    e4 = 1 + 0j
    e6 = 1 + 0j
    qn = 1 + 0j
    for n in range(1, terms + 1):
        qn *= q
        if abs(qn) < 1e-30:
            break
        divs = [d for d in range(1, n + 1) if n % d == 0]
        e4 += 240 * sum(d ** 3 for d in divs) * qn
        e6 -= 504 * sum(d ** 5 for d in divs) * qn
    w = 2 * params.omega1
    g2 = (4 * math.pi ** 4 / 3) * e4 / w ** 4
    g3 = (8 * math.pi ** 6 / 27) * e6 / w ** 6
    return g2, g3


def lattice_sum_wp(x: complex, params: EllipticParams, cutoff: int = 60) -> complex:
    """Slow direct lattice sum for wp, used only as a test oracle."""
    m, n = np.meshgrid(np.arange(-cutoff, cutoff + 1), np.arange(-cutoff, cutoff + 1))
    w = (2 * m * params.omega1 + 2 * n * params.omega2).ravel()
    w = w[w != 0]
    return complex(1 / x ** 2 + np.sum(1 / (x - w) ** 2 - 1 / w ** 2))


def _laurent(x: complex, kind: str, params: EllipticParams) -> complex:
    c = params.laurent_coefficients()
    K = range(2, len(c))
    if kind == "p":
        return x ** -2 + sum(c[k] * x ** (2 * k - 2) for k in K)
    if kind == "p'":
        return -2 * x ** -3 + sum((2 * k - 2) * c[k] * x ** (2 * k - 3) for k in K)
    if kind == "p''":
        return 6 * x ** -4 + sum((2 * k - 2) * (2 * k - 3) * c[k] * x ** (2 * k - 4) for k in K)
    if kind == "zeta":
        return 1 / x - sum(c[k] * x ** (2 * k - 1) / (2 * k - 1) for k in K)
    # sigma = x exp(-sum c_k x^(2k) / ((2k-1) 2k))
    return x * cmath.exp(-sum(c[k] * x ** (2 * k) / ((2 * k - 1) * 2 * k) for k in K))


def _log_derivs(t):
    """Derivatives 1..4 of log f from derivatives 0..4 of f."""
    t0, t1, t2, t3, t4 = t
    l1 = t1 / t0
    l2 = t2 / t0 - l1 ** 2
    l3 = t3 / t0 - 3 * t2 * t1 / t0 ** 2 + 2 * l1 ** 3
    l4 = (t4 / t0 - 4 * t3 * t1 / t0 ** 2 - 3 * t2 ** 2 / t0 ** 2
          + 12 * t2 * t1 ** 2 / t0 ** 3 - 6 * l1 ** 4)
    return l1, l2, l3, l4


def _from_theta(xr: complex, kind: str, params: EllipticParams, t) -> complex:
    w1 = params.omega1
    c = 1 / (2 * w1)
    s = xr * c
    if kind == "sigma":
        h = np.array([(1 + params.tau) / 2])
        t1h = theta(h, params.siegel, 1, [[1.0]]).d(0)
        return 2 * w1 * cmath.exp(params.eta1 * xr ** 2 / (2 * w1) + 1j * math.pi * s) * t[0] / t1h
    l1, l2, l3, l4 = _log_derivs(t)
    if kind == "zeta":
        return params.eta1 * xr / w1 + c * (1j * math.pi + l1)
    if kind == "p":
        return -params.eta1 / w1 - c ** 2 * l2
    if kind == "p'":
        return -c ** 3 * l3
    return -c ** 4 * l4


def _kind(kind: str) -> str:
    kind = _ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ValidationError(f"unknown kind {kind!r}; expected one of {KINDS}")
    return kind


def _quasi(value: complex, x: complex, xr: complex, m: int, n: int, kind: str,
           params: EllipticParams) -> complex:
    if kind == "zeta":
        return value + 2 * m * params.eta1 + 2 * n * params.eta2
    if kind == "sigma":
        w = 2 * m * params.omega1 + 2 * n * params.omega2
        ew = m * params.eta1 + n * params.eta2
        sign = -1 if (m + n + m * n) % 2 else 1
        return sign * cmath.exp(2 * ew * (xr + w / 2)) * value
    return value


def weierstrass_many(xs, params: EllipticParams, kind: str = "p") -> np.ndarray:
    """Vectorised :func:`weierstrass` over an array of arguments."""
    kind = _kind(kind)
    xs = np.asarray(xs, dtype=np.complex128)
    flat = xs.ravel()
    out = np.empty(flat.shape, dtype=np.complex128)
    small = 0.1 * params.shortest_period
    scale = max(1.0, abs(params.omega1))
    reduced = [params.reduce(complex(x)) for x in flat]
    far = []
    for i, (xr, m, n) in enumerate(reduced):
        if abs(xr) < _SINGULAR_DIST * scale and kind != "sigma":
            raise LatticePoint(f"{kind} is singular at lattice point {complex(flat[i])}")
        if abs(xr) < small:
            out[i] = _quasi(_laurent(xr, kind, params), flat[i], xr, m, n, kind, params)
        else:
            far.append(i)
    if far:
        h = (1 + params.tau) / 2
        args = np.array([[reduced[i][0] / (2 * params.omega1) + h] for i in far])
        order = 0 if kind == "sigma" else 4
        dirs = [] if kind == "sigma" else [[1.0]]
        vals, _ = theta_many(args, params.siegel, order, dirs)
        for row, i in enumerate(far):
            xr, m, n = reduced[i]
            v = _from_theta(xr, kind, params, vals[row])
            out[i] = _quasi(v, flat[i], xr, m, n, kind, params)
    return out.reshape(xs.shape)


def weierstrass(x: complex, params: EllipticParams, kind: str = "p") -> complex:
    """One of ``p, p', p'', zeta, sigma`` at ``x``.

    ``sigma(x) = x + O(x^5)`` and ``zeta(x) = 1/x + O(x^3)``.
    """
    return complex(weierstrass_many(np.array([x]), params, kind)[0])


def phi_kernel(x: complex, z: complex, params: EllipticParams) -> complex:
    """Lame kernel ``sigma(z - x) / (sigma(z) sigma(x)) * exp(zeta(z) x)``."""
    for val, name in ((x, "x"), (z, "z"), (z - x, "z - x")):
        xr, _, _ = params.reduce(complex(val))
        if abs(xr) < _SINGULAR_DIST * max(1.0, abs(params.omega1)):
            raise LatticePoint(f"Phi(x, z) is singular: {name} is a lattice point")
    sig = weierstrass_many(np.array([z - x, z, x]), params, "sigma")
    return complex(sig[0] / (sig[1] * sig[2]) * cmath.exp(weierstrass(z, params, "zeta") * x))


def wp_taylor(delta: complex, params: EllipticParams, order: int) -> np.ndarray:
    """Taylor coefficients ``a_k`` of ``wp(delta + t) = sum a_k t^k`` up to ``order``.

    Only ``wp`` and ``wp'`` at ``delta`` are evaluated; the rest follows from
    ``wp'' = 6 wp^2 - g2/2``.
    """
    a = np.zeros(order + 1, dtype=np.complex128)
    a[0] = weierstrass(delta, params, "p")
    if order >= 1:
        a[1] = weierstrass(delta, params, "p'")
    for k in range(order - 1):
        conv = sum(a[i] * a[k - i] for i in range(k + 1))
        a[k + 2] = (6 * conv - (params.g2 / 2 if k == 0 else 0)) / ((k + 2) * (k + 1))
    return a
