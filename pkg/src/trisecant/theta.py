r"""Riemann theta functions on the Siegel upper half space.

The series

.. math::

    \theta(z, B) = \sum_{m \in \mathbb{Z}^g} \exp(2\pi i (m, z) + \pi i (m, B m))

is truncated to the ellipsoid :math:`\|T(m - c)\| \le R` where
:math:`T^T T = \pi\,\mathrm{Im}\,B` and :math:`c = -\mathrm{Im}(B)^{-1}\mathrm{Im}(z)`
is the centre of the Gaussian envelope.  The radius comes from a shell-by-shell
Gaussian tail bound that also accounts for the polynomial growth introduced by
directional derivatives.

Directional derivatives are computed term by term, so a single pass over the
lattice yields a complete :class:`ThetaJet`.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations_with_replacement, product
from typing import Sequence

import numpy as np
from scipy.special import gamma as _gamma

from . import _kernels
from .errors import (
    DegeneratePoint,
    GenusTooLarge,
    NoConvergence,
    NotSiegel,
    TruncationOverflow,
    ValidationError,
)

__all__ = [
    "SiegelMatrix",
    "ThetaJet",
    "HalfCharacteristic",
    "theta",
    "theta_many",
    "theta_abs",
    "theta_char2",
    "characteristics",
    "kummer",
    "secancy_rank",
    "theta_divisor_point",
    "reduce_mod_lattice",
    "set_num_threads",
    "get_num_threads",
]

DEFAULT_TOL = 1e-16
POINT_BUDGET = 10_000_000
MAX_ORDER = 4
KUMMER_MAX_GENUS = 6
CHUNK = 256

_num_threads = 1


def set_num_threads(n: int) -> None:
    """Worker threads used for lattice sums.  Results do not depend on it."""
    global _num_threads
    if n < 1:
        raise ValueError("thread count must be positive")
    _num_threads = int(n)


def get_num_threads() -> int:
    return _num_threads


@dataclass(frozen=True, eq=False)
class SiegelMatrix:
    """Symmetric complex g x g matrix with positive definite imaginary part."""

    B: np.ndarray
    g: int = field(init=False)

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.B, dtype=np.complex128))
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise NotSiegel(f"B must be square, got shape {B.shape}")
        asym = np.max(np.abs(B - B.T)) if B.size else 0.0
        if asym > 1e-12 * max(1.0, np.max(np.abs(B))):
            raise NotSiegel(f"B is not symmetric (max |B - B^T| = {asym:.3g})")
        B = 0.5 * (B + B.T)
        try:
            np.linalg.cholesky(B.imag)
        except np.linalg.LinAlgError:
            raise NotSiegel("Im(B) is not positive definite") from None
        B.setflags(write=False)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "g", B.shape[0])

    @classmethod
    def coerce(cls, B) -> "SiegelMatrix":
        return B if isinstance(B, cls) else cls(B)

    @cached_property
    def Y(self) -> np.ndarray:
        return self.B.imag

    @cached_property
    def Yinv(self) -> np.ndarray:
        return np.linalg.inv(self.Y)

    @cached_property
    def T(self) -> np.ndarray:
        """Upper triangular factor with ``T.T @ T == pi * Im(B)``."""
        return np.linalg.cholesky(np.pi * self.Y).T

    def doubled(self) -> "SiegelMatrix":
        return SiegelMatrix(2 * self.B)

    def __repr__(self):
        return f"SiegelMatrix(g={self.g}, B={self.B.tolist()!r})"


@dataclass(frozen=True)
class HalfCharacteristic:
    eps: tuple

    def __post_init__(self):
        vals = tuple(float(e) for e in self.eps)
        if any(e not in (0.0, 0.5) for e in vals):
            raise ValidationError(f"characteristic entries must be 0 or 1/2, got {self.eps}")
        object.__setattr__(self, "eps", vals)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.eps)


def characteristics(g: int) -> list[HalfCharacteristic]:
    """All elements of ((1/2)Z/Z)^g in lexicographic order."""
    return [HalfCharacteristic(e) for e in product((0.0, 0.5), repeat=g)]


@dataclass
class ThetaJet:
    """Value and directional derivatives of a theta function at one point.

    ``derivs`` is keyed by sorted tuples of direction indices, so
    ``jet[(0, 0, 1)]`` is the third derivative along directions 0, 0, 1.
    The empty tuple holds the value.
    """

    value: complex
    derivs: dict
    directions: np.ndarray

    def __getitem__(self, key) -> complex:
        if isinstance(key, int):
            key = (key,)
        return self.derivs[tuple(sorted(key))]

    def d(self, *idx: int) -> complex:
        return self[tuple(idx)]

    @property
    def order(self) -> int:
        return max(len(k) for k in self.derivs)


def _monomials(k: int, order: int) -> list[tuple]:
    keys = [()]
    for n in range(1, order + 1):
        keys.extend(combinations_with_replacement(range(k), n))
    return keys


def _exponents(keys, k):
    monos = np.zeros((len(keys), max(k, 1)), dtype=np.int64)
    for r, key in enumerate(keys):
        for j in key:
            monos[r, j] += 1
    return monos


def _ball_volume(g: int) -> float:
    return math.pi ** (g / 2) / _gamma(g / 2 + 1)


def truncation_radius(S: SiegelMatrix, tol: float, order: int, dir_norm: float,
                      center_norm: float) -> float:
    """Smallest radius (step 1/4) whose Gaussian tail bound is below ``tol``.

    The bound is relative to the largest term of the series; it counts lattice
    points shell by shell with a covering-radius slack and multiplies by the
    worst-case derivative factor ``(2 pi |d| |n|)**order`` in each shell.
    Norms are rounded up to a coarse grid so that the bound can be cached.
    """
    dn = math.ceil(dir_norm * 4) / 4
    cn = math.ceil(center_norm * 2) / 2
    return _radius_cached(np.ascontiguousarray(S.B).tobytes(), S.g, tol, order, dn, cn)


@lru_cache(maxsize=4096)
def _radius_cached(bkey: bytes, g: int, tol: float, order: int, dir_norm: float,
                   center_norm: float) -> float:
    B = np.frombuffer(bkey, dtype=np.complex128).reshape(g, g)
    T = np.linalg.cholesky(np.pi * B.imag).T
    smin = np.linalg.svd(T, compute_uv=False).min()
    detT = abs(np.linalg.det(T))
    rho = 0.5 * math.sqrt(float(np.sum(T * T)))
    vol = _ball_volume(g)
    slack = math.exp(min(rho * rho, 700.0))
    R = 1.0
    while R < 60.0:
        tail = 0.0
        r = R
        while r < R + 60.0:
            count = vol * (r + 1.0 + rho) ** g / detT
            poly = (2 * math.pi * dir_norm * ((r + 1.0) / smin + center_norm)) ** order
            tail += count * poly * math.exp(-r * r)
            r += 1.0
        if tail * slack < tol:
            return R
        R += 0.25
    return R


@lru_cache(maxsize=64)
def _offsets(ykey: bytes, g: int, radius: float) -> np.ndarray:
    """Integer offsets covering every truncation ellipsoid with this radius.

    Sorted in a fixed spiral order: by sup-norm shell, then lexicographically.
    """
    Y = np.frombuffer(ykey).reshape(g, g)
    lam = np.linalg.eigvalsh(Y).max()
    slack = math.sqrt(math.pi * g * lam / 4.0)
    Rp = radius + slack
    Yinv = np.linalg.inv(Y)
    half = [int(math.ceil(Rp * math.sqrt(Yinv[i, i] / math.pi))) for i in range(g)]
    n_box = math.prod(2 * h + 1 for h in half)
    if n_box > POINT_BUDGET:
        raise TruncationOverflow(
            f"truncation box holds {n_box} lattice points, budget is {POINT_BUDGET}")
    axes = [np.arange(-h, h + 1) for h in half]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, g)
    # any m with |T(m + delta)| <= radius for some |delta_i| <= 1/2
    quad = np.pi * np.einsum("pi,ij,pj->p", grid.astype(float), Y, grid.astype(float))
    grid = grid[np.sqrt(quad) <= Rp + 1e-12]
    shell = np.abs(grid).max(axis=1)
    order = np.lexsort(tuple(grid[:, i] for i in reversed(range(g))) + (shell,))
    out = np.ascontiguousarray(grid[order].astype(np.float64))
    out.setflags(write=False)
    return out


def _lattice_sum(zs: np.ndarray, S: SiegelMatrix, eps: np.ndarray, dirs: np.ndarray,
                 monos: np.ndarray, tol: float, radius: float | None):
    """Chunked, order-fixed lattice sums.  Returns ``(Q, M)`` complex array."""
    g = S.g
    Q = zs.shape[0]
    y = zs.imag
    cvec = -(y @ S.Yinv.T) - eps  # centre of the envelope in m-coordinates
    if radius is None:
        order = int(monos.sum(axis=1).max()) if monos.size else 0
        dn = float(np.max(np.linalg.norm(dirs, axis=1))) if dirs.size else 0.0
        cn = float(np.max(np.linalg.norm(cvec + eps, axis=1))) + float(np.linalg.norm(eps))
        radius = truncation_radius(S, tol, order, dn, cn)
    offsets = _offsets(np.ascontiguousarray(S.Y).tobytes(), g, float(radius))
    centers = np.round(cvec)
    ypi = np.pi * S.Y
    r2 = float(radius) ** 2
    B = np.ascontiguousarray(S.B)
    shifts = _kernels.lattice_shifts(offsets, centers, cvec, eps, zs, B, ypi, r2)
    P = offsets.shape[0]
    nch = max(1, -(-P // CHUNK))
    out = np.zeros((Q, nch, monos.shape[0]), dtype=np.complex128)
    nthreads = min(_num_threads, nch)
    args = (offsets, centers, cvec, eps, zs, B, ypi, r2, dirs, monos, shifts, CHUNK)
    if nthreads <= 1:
        _kernels.chunk_sums(*args, 0, nch, out)
    else:
        bounds = np.linspace(0, nch, nthreads + 1).astype(int)
        with ThreadPoolExecutor(nthreads) as pool:
            futs = [pool.submit(_kernels.chunk_sums, *args, int(a), int(b), out)
                    for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            for f in futs:
                f.result()
    # fixed-order reduction of chunk partials
    total = np.zeros((Q, monos.shape[0]), dtype=np.complex128)
    for c in range(nch):
        total += out[:, c, :]
    return total * np.exp(shifts)[:, None], radius


def _prep(z, S: SiegelMatrix, order: int, directions) -> tuple:
    if order > MAX_ORDER:
        raise ValidationError(f"derivative order {order} exceeds cap {MAX_ORDER}")
    z = np.asarray(z, dtype=np.complex128)
    dirs = np.asarray(directions, dtype=np.complex128).reshape(-1, S.g) if len(directions) else np.zeros((0, S.g), np.complex128)
    if order > 0:
        if dirs.shape[0] == 0:
            raise ValidationError("derivatives requested without directions")
        if np.any(np.linalg.norm(dirs, axis=1) == 0):
            raise ValidationError("direction vectors must be nonzero")
    return z, dirs


def theta(z, B, order: int = 0, directions: Sequence = (), *, tol: float = DEFAULT_TOL,
          radius: float | None = None) -> ThetaJet:
    """Riemann theta function with directional derivatives up to ``order``.

    ``directions`` is a list of vectors in C^g; every multiset of them with
    at most ``order`` elements gets an entry in the returned jet.
    """
    S = SiegelMatrix.coerce(B)
    z, dirs = _prep(z, S, order, directions)
    if z.shape != (S.g,):
        raise ValidationError(f"z must have shape ({S.g},), got {z.shape}")
    keys = _monomials(dirs.shape[0], order)
    monos = _exponents(keys, dirs.shape[0])
    sums, _ = _lattice_sum(z[None, :], S, np.zeros(S.g), _pad(dirs), monos, tol, radius)
    return ThetaJet(complex(sums[0, 0]), {k: complex(v) for k, v in zip(keys, sums[0])}, dirs)


def theta_abs(z, B, *, tol: float = DEFAULT_TOL) -> float:
    """Sum of the moduli of the series terms, the natural rounding scale of theta."""
    S = SiegelMatrix.coerce(B)
    z = np.asarray(z, dtype=np.complex128)
    return float(theta(1j * z.imag, 1j * S.Y, tol=tol).value.real)


def _pad(dirs):
    return dirs if dirs.shape[0] else np.zeros((1, dirs.shape[1]), np.complex128)


def theta_many(zs, B, order: int = 0, directions: Sequence = (), *, tol: float = DEFAULT_TOL,
               radius: float | None = None) -> tuple[np.ndarray, list]:
    """Vectorised :func:`theta` over a batch of points.

    Returns ``(values, keys)`` with ``values[q, r]`` the derivative ``keys[r]``
    at ``zs[q]``.
    """
    S = SiegelMatrix.coerce(B)
    zs = np.atleast_2d(np.asarray(zs, dtype=np.complex128))
    _, dirs = _prep(zs[0], S, order, directions)
    keys = _monomials(dirs.shape[0], order)
    monos = _exponents(keys, dirs.shape[0])
    sums, _ = _lattice_sum(zs, S, np.zeros(S.g), _pad(dirs), monos, tol, radius)
    return sums, keys


def theta_char2(z, eps, B, order: int = 0, directions: Sequence = (), *,
                tol: float = DEFAULT_TOL, radius: float | None = None):
    """Second-order theta constant function ``Theta[eps,0](z) = theta[eps,0](2z, 2B)``.

    With ``order == 0`` returns the complex value; otherwise a :class:`ThetaJet`
    whose derivatives are taken with respect to ``z`` (not ``2z``).
    """
    S = SiegelMatrix.coerce(B)
    eps = eps.array if isinstance(eps, HalfCharacteristic) else HalfCharacteristic(tuple(eps)).array
    z, dirs = _prep(z, S, order, directions)
    keys = _monomials(dirs.shape[0], order)
    monos = _exponents(keys, dirs.shape[0])
    sums, _ = _lattice_sum(2 * z[None, :], S.doubled(), eps, _pad(2 * dirs), monos, tol, radius)
    if order == 0 and not len(directions):
        return complex(sums[0, 0])
    return ThetaJet(complex(sums[0, 0]), {k: complex(v) for k, v in zip(keys, sums[0])}, dirs)


def theta_char2_all(z, B, order: int = 0, directions: Sequence = (), *,
                    tol: float = DEFAULT_TOL) -> list:
    """``theta_char2`` for every characteristic, lexicographic order."""
    S = SiegelMatrix.coerce(B)
    if S.g > KUMMER_MAX_GENUS:
        raise GenusTooLarge(f"2^g coordinates requested for g={S.g} > {KUMMER_MAX_GENUS}")
    return [theta_char2(z, e, S, order, directions, tol=tol) for e in characteristics(S.g)]


def kummer(z, B, *, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Unnormalised Kummer coordinates ``(Theta[eps,0](z))_eps``."""
    S = SiegelMatrix.coerce(B)
    if S.g > KUMMER_MAX_GENUS:
        raise GenusTooLarge(f"Kummer map needs 2^{S.g} coordinates; budget is g <= {KUMMER_MAX_GENUS}")
    return np.array(theta_char2_all(z, S, tol=tol), dtype=np.complex128)


def normalize_projective(v: np.ndarray) -> np.ndarray:
    """Divide by the largest-modulus coordinate."""
    v = np.asarray(v, dtype=np.complex128)
    return v / v[np.argmax(np.abs(v))]


def secancy_rank(points, B, rtol: float = 1e-8) -> int:
    """Numerical rank of the stacked, projectively normalised Kummer vectors."""
    S = SiegelMatrix.coerce(B)
    pts = [np.asarray(p, dtype=np.complex128) for p in points]
    if not 2 <= len(pts) <= 8:
        raise ValidationError(f"secancy_rank takes 2..8 points, got {len(pts)}")
    rows = []
    for p in pts:
        k = kummer(p, S)
        if np.linalg.norm(k) < 1e-13:
            raise DegeneratePoint(f"all Kummer coordinates vanish at {p.tolist()}")
        rows.append(normalize_projective(k))
    s = np.linalg.svd(np.array(rows), compute_uv=False)
    return int(np.sum(s > rtol * s[0]))


def reduce_mod_lattice(z, B) -> np.ndarray:
    """Representative of ``z`` modulo Z^g + B Z^g with small real/imag parts."""
    S = SiegelMatrix.coerce(B)
    z = np.asarray(z, dtype=np.complex128)
    m = np.round(S.Yinv @ z.imag)
    z = z - S.B @ m
    return z - np.round(z.real)


def theta_divisor_point(B, seed, line_direction, *, tol: float = 1e-12, max_steps: int = 100,
                        restarts: int = 20, rng: np.random.Generator | None = None) -> np.ndarray:
    """A point Z of the theta divisor near ``seed + t * line_direction``.

    One-variable Newton iteration in ``t``; on failure the seed is perturbed
    (deterministically unless ``rng`` is supplied) up to ``restarts`` times.
    Convergence means ``|theta(Z)| <= tol * max_i |d theta / d z_i (Z)|``.
    """
    S = SiegelMatrix.coerce(B)
    d = np.asarray(line_direction, dtype=np.complex128)
    seed = np.asarray(seed, dtype=np.complex128)
    if np.linalg.norm(d) == 0:
        raise ValidationError("line direction must be nonzero")
    rng = rng or np.random.default_rng(12345)
    basis = list(np.eye(S.g, dtype=np.complex128))
    start = seed
    for _ in range(restarts + 1):
        t = 0.0 + 0.0j
        for _ in range(max_steps):
            Z = start + t * d
            jet = theta(Z, S, 1, [d] + basis)
            val, dval = jet.value, jet.d(0)
            grad = max(abs(jet.d(i + 1)) for i in range(S.g))
            if grad > 0 and abs(val) <= tol * grad:
                return Z
            if dval == 0:
                break
            step = val / dval
            if abs(step) > 0.5:
                step *= 0.5 / abs(step)
            t -= step
        start = seed + 0.3 * (rng.standard_normal(S.g) + 1j * rng.standard_normal(S.g))
    raise NoConvergence(f"Newton failed on the line through {seed.tolist()} after {restarts} restarts")
