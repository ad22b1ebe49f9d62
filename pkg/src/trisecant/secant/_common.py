"""Batched theta jets, sampling helpers and guards shared by the checkers."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateDirection, NearDivisor
from ..theta import (SiegelMatrix, characteristics, theta_abs, theta_char2, theta_divisor_point,
                     theta_many)

NEAR_DIVISOR = 1e-10
DEGENERATE = 1e-8


class Jets:
    """Directional theta jets at a batch of points.

    Zero directions are dropped before evaluation; any derivative along one
    of them reads as 0.
    """

    def __init__(self, points, S: SiegelMatrix, order: int, dirs=()):
        self.points = np.atleast_2d(np.asarray(points, dtype=np.complex128))
        dirs = [np.asarray(d, dtype=np.complex128) for d in dirs]
        self.live = [i for i, d in enumerate(dirs) if np.linalg.norm(d) > 0]
        if order == 0 or not self.live:
            vals, keys = theta_many(self.points, S)
        else:
            vals, keys = theta_many(self.points, S, order, [dirs[i] for i in self.live])
        self.vals = vals
        self.index = {tuple(sorted(self.live[j] for j in k)): r for r, k in enumerate(keys)}

    def __call__(self, q: int, *idx: int) -> complex:
        r = self.index.get(tuple(sorted(idx)))
        if r is None:
            if all(i in self.live for i in idx):
                raise KeyError(idx)
            return 0j
        return complex(self.vals[q, r])

    def __len__(self):
        return self.points.shape[0]


def random_points(rng: np.random.Generator, S: SiegelMatrix, n: int) -> np.ndarray:
    """Points ``a + B b`` with ``a, b`` uniform in the unit cube."""
    a = rng.random((n, S.g))
    b = rng.random((n, S.g))
    return a + b @ S.B.T


def guard_denominator(value: complex, point, S: SiegelMatrix, what: str = "theta"):
    if abs(value) < NEAR_DIVISOR * theta_abs(point, S):
        raise NearDivisor(f"{what} is within {NEAR_DIVISOR:g} of zero at {np.round(point, 12).tolist()}")


def safe_samples(rng, S: SiegelMatrix, n: int, shifts, Z=None, tries: int = 20) -> np.ndarray:
    """Sample points Z such that theta(Z + s) stays off the divisor for all shifts.

    Explicit samples are checked and rejected with :class:`NearDivisor`; random
    samples are redrawn.
    """
    shifts = np.atleast_2d(np.asarray(shifts, dtype=np.complex128))
    if Z is not None:
        Z = np.atleast_2d(np.asarray(Z, dtype=np.complex128))
        _check_off_divisor(Z, S, shifts, raise_=True)
        return Z
    out = []
    for _ in range(tries * n):
        z = random_points(rng, S, 1)
        if _check_off_divisor(z, S, shifts, raise_=False):
            out.append(z[0])
            if len(out) == n:
                return np.array(out)
    raise NearDivisor("could not draw samples away from the theta divisor")


def _check_off_divisor(Z, S, shifts, raise_: bool) -> bool:
    pts = (Z[:, None, :] + shifts[None, :, :]).reshape(-1, S.g)
    vals = theta_many(pts, S)[0][:, 0]
    for v, p in zip(vals, pts):
        if abs(v) < NEAR_DIVISOR * theta_abs(p, S):
            if raise_:
                guard_denominator(v, p, S)
            return False
    return True


def divisor_samples(S: SiegelMatrix, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` points on the theta divisor, one Newton line search each."""
    out = []
    for _ in range(n):
        seed = random_points(rng, S, 1)[0]
        d = rng.standard_normal(S.g) + 1j * rng.standard_normal(S.g)
        out.append(theta_divisor_point(S, seed, d, tol=1e-13, rng=rng))
    return np.array(out)


def check_direction(jet: Jets, q: int, k: int, name: str, basis: range):
    """Raise if the derivative along direction ``k`` vanishes at divisor point ``q``.

    ``basis`` indexes the coordinate directions inside ``jet``.
    """
    grad = max(abs(jet(q, b)) for b in basis)
    if abs(jet(q, k)) <= DEGENERATE * max(grad, 1e-300):
        raise DegenerateDirection(f"the derivative of theta along {name} vanishes on the divisor sample")


def kummer_jets(z, S: SiegelMatrix, order: int = 0, dirs=()):
    """``Theta[eps,0]`` at ``z`` for every characteristic, as callables like :class:`Jets`."""
    dirs = [np.asarray(d, dtype=np.complex128) for d in dirs]
    live = [i for i, d in enumerate(dirs) if np.linalg.norm(d) > 0]
    out = []
    for eps in characteristics(S.g):
        if order == 0 or not live:
            val = theta_char2(z, eps, S)
            out.append(lambda *idx, v=val: v if not idx else 0j)
        else:
            jet = theta_char2(z, eps, S, order, [dirs[i] for i in live])
            table = {tuple(sorted(live[j] for j in k)): v for k, v in jet.derivs.items()}
            out.append(lambda *idx, t=table: t.get(tuple(sorted(idx)), 0j))
    return out
