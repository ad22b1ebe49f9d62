"""Motion of the zeros of a tau function and the Laurent recursion for wave solutions.

For ``u = -2 d_x^2 log tau`` with a simple zero ``eta(y)`` of ``tau``,
``u = 2/(x-eta)^2 + v + w (x-eta) + ...`` and the flex condition forces
``eta'' = 2 w``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import LostRoot, ResidueMismatch, ValidationError, ZeroCollision
from ..theta import theta
from .calogero import cm_integrate
from .data import CMState, FlexData
from .report import Accumulator, ResidualReport

__all__ = ["flex_dynamics", "laurent_vw", "track_zero", "tau_from_flex", "tau_cm",
           "LaurentData", "MotionData", "laurent_wave_step", "COLLISION_GAP"]

COLLISION_GAP = 1e-5
_STENCIL = np.array([1 / 90, -3 / 20, 3 / 2, -49 / 18, 3 / 2, -3 / 20, 1 / 90])


def laurent_vw(jet) -> tuple[complex, complex]:
    """``(v, w)`` from the x-jet ``[tau, tau', ..., tau'''']`` at a simple zero."""
    a = [jet[k] / f for k, f in zip(range(5), (1, 1, 2, 6, 24))]
    b1, b2, b3 = a[2] / a[1], a[3] / a[1], a[4] / a[1]
    c2 = b2 - b1 * b1 / 2
    c3 = b3 - b1 * b2 + b1 ** 3 / 3
    return complex(-4 * c2), complex(-12 * c3)


def _newton(tau, x, y, max_steps: int = 60):
    for _ in range(max_steps):
        j = tau(x, y)
        if j[1] == 0:
            return x, j, False
        step = j[0] / j[1]
        x = x - step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            return x, tau(x, y), True
    return x, tau(x, y), False


def _gap(jet) -> float:
    """Distance to the nearest other zero, from ``tau'/tau''`` at a near-double zero."""
    if jet[2] == 0:
        return np.inf
    return 2 * abs(jet[1] / jet[2])


def track_zero(tau, ys, x_seed, *, max_jump: float = 0.25) -> np.ndarray:
    """Newton continuation of a simple zero of ``tau(., y)`` along increasing ``ys``."""
    out = np.empty(len(ys), dtype=np.complex128)
    x = complex(x_seed)
    for k, y in enumerate(ys):
        xn, jet, ok = _newton(tau, x, y)
        if _gap(jet) < COLLISION_GAP:
            raise ZeroCollision(f"two zeros of tau within {COLLISION_GAP:g} at y = {y}")
        if not ok or (k and abs(xn - x) > max_jump):
            raise LostRoot(f"Newton lost the zero near x = {x} at y = {y}")
        out[k] = x = xn
    return out


def flex_dynamics(tau, y_range=(0.0, 0.5), x_seed: complex = 0.0, *, samples: int = 5,
                  steps=(1e-2, 3e-3, 1e-3), tol: float = 1e-5, spacing: float = 1e-2) -> ResidualReport:
    """Compare ``eta''`` (finite differences) with ``2 w`` (Laurent data) along a moving zero.

    ``tau(x, y)`` returns ``[tau, tau_x, ..., tau_xxxx]``.  For every step
    ``h`` in ``steps`` the 7-point stencil at ``h`` and ``h/2`` is Richardson
    extrapolated; per sample the step with the smallest estimated error
    (difference to the next step plus a rounding bound) is used.
    The scale is ``max(1, |eta''|, |2w|)``.
    """
    y0, y1 = y_range
    if not y1 > y0:
        raise ValidationError("y_range must be increasing")
    steps = tuple(float(h) for h in steps)
    centers = np.linspace(y0, y1, samples)
    need = [yc + k * st for yc in centers for h in steps for st in (h, h / 2) for k in range(-3, 4)]
    lo, hi = min(need), max(need)
    fill = np.linspace(lo, hi, max(2, int(np.ceil((hi - lo) / spacing)) + 1))
    ys = np.unique(np.concatenate([need, fill]))
    eta = dict(zip(ys.tolist(), track_zero(tau, ys, x_seed)))
    acc = Accumulator("flex_dynamics", tol)
    amp = float(np.sum(np.abs(_STENCIL))) * (64 * 4 + 1) / 63
    for yc in centers:
        def d2(step):
            vals = np.array([eta[yc + k * step] for k in range(-3, 4)])
            return complex(_STENCIL @ vals) / step ** 2

        rich = [(64 * d2(h / 2) - d2(h)) / 63 for h in steps]
        size = max(abs(eta[yc + k * st]) for h in steps for st in (h, h / 2) for k in range(-3, 4))
        est = []
        for i, h in enumerate(steps):
            if i + 1 < len(steps):
                trunc = abs(rich[i] - rich[i + 1])
            elif i:
                trunc = abs(rich[i - 1] - rich[i]) * (h / steps[i - 1]) ** 8
            else:
                trunc = 0.0
            est.append(trunc + np.finfo(float).eps * max(size, 1.0) * amp / h ** 2)
        best = int(np.argmin(est))
        etadd = rich[best]
        e = eta[yc]
        _, w = laurent_vw(tau(e, yc))
        acc.add_scaled(abs(etadd - 2 * w), max(1.0, abs(etadd), abs(2 * w)), y=yc, eta=e,
                       etadd=etadd, w=w, step=steps[best])
    return acc.report()


def tau_from_flex(d: FlexData, Z):
    """``tau(x, y) = theta(U x + V y + Z)`` with x-jets along ``U``."""
    Z = np.asarray(Z, dtype=np.complex128)

    def tau(x, y):
        j = theta(x * d.U + y * d.V + Z, d.B, 4, [d.U])
        return [j.value] + [j.d(*([0] * k)) for k in range(1, 5)]

    return tau


def tau_cm(state: CMState, y_end: float, *, rtol: float = 1e-12, margin: float = 0.1):
    """``tau(x, y) = prod_j theta(x - x_j(y) + (1+tau)/2)`` along a Calogero-Moser trajectory.

    The lattice is rescaled to periods ``1, tau``; the gauge factor relating
    theta to sigma is linear in ``x`` in the exponent and does not change ``u``.
    The trajectory is integrated on ``[-margin, y_end + margin]``.
    """
    P = state.params
    if abs(P.omega1 - 0.5) > 1e-14:
        raise ValidationError("tau_cm expects omega1 = 1/2")
    B = [[P.tau]]
    h = (1 + P.tau) / 2
    back, _ = cm_integrate(state, -margin, rtol=rtol)
    _, sol = cm_integrate(back, y_end + 2 * margin, rtol=rtol, dense=True)
    g = state.g

    def tau(x, y):
        xs = sol.sol(y + margin)[:g]
        total = np.zeros(5, dtype=np.complex128)
        total[0] = 1
        for xj in xs:
            j = theta([x - xj + h], B, 4, [[1.0]])
            f = np.array([j.value] + [j.d(*([0] * k)) for k in range(1, 5)])
            new = np.zeros(5, dtype=np.complex128)
            for n in range(5):
                for k in range(n + 1):
                    new[n] += _binom(n, k) * total[k] * f[n - k]
            total = new
        return list(total)

    return tau


def _binom(n, k):
    from math import comb
    return comb(n, k)


@dataclass(frozen=True)
class LaurentData:
    """Coefficients of ``xi_s = r/(x-x_i) + r0 + r1 (x-x_i) + ...`` and y-derivatives."""

    r: complex
    r_dot: complex
    r0: complex
    r0_dot: complex
    r1: complex


@dataclass(frozen=True)
class MotionData:
    """Zero velocity and acceleration and the Laurent data ``v, w`` of ``u`` at it."""

    xdot: complex
    xddot: complex
    v: complex
    w: complex


def laurent_wave_step(data: LaurentData, motion: MotionData, *, r0_next: complex = 0j,
                      r0_next_dot: complex = 0j, tol: float = 1e-9):
    """One step of ``xi_{s+1}' = (d_y + u - d_x^2) xi_s`` at a simple zero.

    The wave series is taken in powers of ``(2k)^(-1)``, which gives
    ``r_{s+1} = -xdot r_s - 2 r_{s0}`` and
    ``r_{s+1,1} = rdot_{s0} - xdot r_{s1} + w r_s + v r_{s0}``.
    The constant term ``r0_next`` is free.  Returns ``(next, misfit)`` where
    ``misfit = rdot_{s+1} + v r_{s+1} + 2 r_{s+1,1}`` equals
    ``-r_s (xddot - 2 w)`` once the input residue condition holds.
    """
    r, rd, r0, r0d, r1 = data.r, data.r_dot, data.r0, data.r0_dot, data.r1
    xd, xdd, v, w = motion.xdot, motion.xddot, motion.v, motion.w
    res = rd + v * r + 2 * r1
    scale = max(1.0, abs(rd), abs(v * r), abs(2 * r1))
    if abs(res) > tol * scale:
        raise ResidueMismatch(f"input residue rdot + v r + 2 r1 = {res:.3e} is not zero")
    r_next = -xd * r - 2 * r0
    r_next_dot = -xdd * r - xd * rd - 2 * r0d
    r1_next = r0d - xd * r1 + w * r + v * r0
    misfit = r_next_dot + v * r_next + 2 * r1_next
    return LaurentData(r_next, r_next_dot, complex(r0_next), complex(r0_next_dot), r1_next), misfit
