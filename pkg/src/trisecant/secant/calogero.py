"""Elliptic Calogero-Moser particles: Lax matrix, spectral polynomial, isospectral flow.

Expanding ``u = 2 sum_i wp(x - x_i)`` at ``x_i`` gives
``w_i = 2 sum_{j != i} wp'(x_i - x_j)``, so the zero dynamics
``x_i'' = 2 w_i`` becomes ``x_i'' = 4 sum_{j != i} wp'(x_i - x_j)``.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.integrate import solve_ivp

from ..elliptic import phi_kernel, weierstrass_many
from ..errors import IntegratorFailure, ZeroCollision
from .data import CMState, min_pair_distance
from .report import Accumulator, ResidualReport

__all__ = ["cm_lax", "cm_spectral", "cm_acceleration", "cm_integrate", "cm_isospectrality",
           "COLLISION"]

COLLISION = 1e-6


def cm_lax(state: CMState, z: complex) -> np.ndarray:
    """``L_ii = xdot_i / 2`` and ``L_ij = Phi(x_i - x_j, z)``."""
    g = state.g
    L = np.diag(state.xdot / 2).astype(np.complex128)
    for i, j in itertools.permutations(range(g), 2):
        L[i, j] = phi_kernel(complex(state.x[i] - state.x[j]), z, state.params)
    return L


def cm_spectral(state: CMState, z: complex) -> np.ndarray:
    """Coefficients of ``det(k I + L)``, leading power first.

    Faddeev-LeVerrier recursion, so no eigenvalues are involved.
    """
    L = cm_lax(state, z)
    g = L.shape[0]
    coeffs = [1.0 + 0j]
    M = np.zeros_like(L)
    eye = np.eye(g)
    A = -L
    for k in range(1, g + 1):
        M = A @ M + coeffs[-1] * eye
        coeffs.append(-np.trace(A @ M) / k)
    return np.array(coeffs)


def cm_acceleration(x: np.ndarray, params) -> np.ndarray:
    g = len(x)
    pairs = list(itertools.combinations(range(g), 2))
    acc = np.zeros(g, dtype=np.complex128)
    if not pairs:
        return acc
    diffs = np.array([x[i] - x[j] for i, j in pairs])
    for (i, j), dx in zip(pairs, diffs):
        if abs(params.reduce(complex(dx))[0]) < COLLISION:
            raise ZeroCollision(f"particles {i} and {j} collide")
    dp = weierstrass_many(diffs, params, "p'")
    for (i, j), v in zip(pairs, dp):
        acc[i] += 4 * v
        acc[j] -= 4 * v
    return acc


def cm_integrate(state: CMState, y_end: float, *, rtol: float = 1e-11, atol: float | None = None,
                 dense: bool = False):
    """Integrate ``x'' = 4 sum wp'(x_i - x_j)`` from ``y = 0`` to ``y_end``.

    Returns ``(final_state, solution)``; ``solution.sol`` is a dense
    interpolant when ``dense`` is set.
    """
    g = state.g
    params = state.params

    def rhs(_, s):
        return np.concatenate([s[g:], cm_acceleration(s[:g], params)])

    y0 = np.concatenate([state.x, state.xdot]).astype(np.complex128)
    atol = rtol if atol is None else atol
    sol = solve_ivp(rhs, (0.0, y_end), y0, method="DOP853", rtol=rtol, atol=atol, dense_output=dense)
    if sol.status != 0:
        raise IntegratorFailure(sol.message)
    final = sol.y[:, -1]
    if g > 1 and min_pair_distance(final[:g], params) <= COLLISION:
        raise ZeroCollision("particles collide along the trajectory")
    return CMState(params, final[:g], final[g:]), sol


def cm_isospectrality(state0: CMState, y_end: float = 0.3, z_samples=None, *, rtol: float = 1e-11,
                      tol: float = 1e-7) -> ResidualReport:
    """Drift of the spectral polynomial coefficients between ``y = 0`` and ``y_end``.

    Per ``z`` the residual is the largest coefficient change and the scale
    is ``max(1, largest initial coefficient)``.
    """
    if z_samples is None:
        z_samples = default_z_samples(state0.params)
    final, sol = cm_integrate(state0, y_end, rtol=rtol)
    acc = Accumulator("cm_isospectrality", tol)
    for z in z_samples:
        c0 = cm_spectral(state0, z)
        c1 = cm_spectral(final, z)
        acc.add_scaled(float(np.max(np.abs(c1 - c0))), max(1.0, float(np.max(np.abs(c0)))), z=z)
    return acc.report(y_end=y_end, rtol=rtol, steps=int(sol.t.size - 1))


def default_z_samples(params, n: int = 5) -> list:
    base = [0.21 + 0.13j, -0.17 + 0.31j, 0.33 - 0.08j, 0.07 + 0.42j, -0.29 - 0.19j,
            0.41 + 0.27j, -0.11 - 0.36j]
    return [complex(b * 2 * params.omega1) for b in base[:n]]
