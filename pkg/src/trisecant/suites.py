"""Identity suites bundling the algebraic checks of the operator modules.

Each suite returns a list of ``{"name", "pass", ...}`` rows; exact suites
pass only on literal zeros.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from . import commuting as bc
from . import psidiff as pd
from . import psido as po
from .elliptic import EllipticParams, wp_taylor
from .hirota import KP_HIROTA, exp_jet, hirota_apply, hirota_bilinear
from .jets import CoeffJet

__all__ = ["kp_suite", "toda_suite", "bc_suite", "hirota_suite"]


def _row(name, ok, **detail):
    return {"name": name, "pass": bool(ok), **detail}


def kp_suite(seed: int = 0, operators: int = 10, depth: int = 6, jet_order: int = 24,
             n_max: int = 4) -> list:
    """Zero curvature, ``F_n = J_{n+1}``, ``xi_1 + xi_1^+ = 0`` and the bilinear pairings."""
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(operators):
        L = po.random_lkp(rng, depth, jet_order)
        for i, j in ((2, 3), (2, 4), (3, 4)):
            rows.append(_row(f"zero_curvature[{k}]({i},{j})", po.zero_curvature_residual(L, i, j).is_zero()))
        fj = po.fn_jn_check(L, n_max)
        rows.append(_row(f"F_n=J_n+1[{k}]", fj["pass"], n_max=n_max))
        w = po.wave(L, n_max + 1)
        _, _, wp = po.dressing_and_dual(w)
        rows.append(_row(f"xi1+xi1plus[{k}]", (w.xi[1] + wp.xi[1]).is_zero()))
        for n in range(n_max + 1):
            rows.append(_row(f"pairing[{k}](n={n})", po.bilinear_pairing(w, wp, n).is_zero()))
    return rows


def toda_suite(seed: int = 0, operators: int = 5, depth: int = 6, window: int = 16,
               m_max: int = 3, n_max: int = 4) -> list:
    """First-flow residue identity, the ``u`` flows and ``J_n = F_n`` on random Lax operators."""
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(operators):
        L = pd.random_llnov(rng, depth, window)
        for m in range(1, m_max + 1):
            rows.append(_row(f"FF1[{k}](m={m})", pd.ff1_residual(L, m).is_zero()))
            rows.append(_row(f"2dev[{k}](m={m})", pd.two_dev_residual(L, m).is_zero()))
        rows.append(_row(f"J_n=F_n[{k}]", pd.jn_fn_check(L, n_max)["pass"], n_max=n_max))
    return rows


def _float_lame(params: EllipticParams, delta: complex, order: int):
    return bc.lame_pair([complex(v) for v in wp_taylor(delta, params, order)], exact=False)


def bc_suite(tau: complex = 0.2 + 1.1j, bases=(0.31 + 0.17j, -0.23 + 0.29j), jet_order: int = 8,
             orders: int = 6) -> list:
    """Spectral curves of ``(d^2, d^3)``, the exact and floating Lame pairs and the rational KdV pair."""
    rows = []
    one = bc.diffop([CoeffJet.zero(), CoeffJet.zero()])
    three = bc.diffop([CoeffJet.zero(), CoeffJet.zero(), CoeffJet.zero()])
    R = bc.spectral_polynomial(one, three)
    target = bc.SpectralPolynomial({(0, 2): 1, (3, 0): -1}, True)
    rows.append(_row("R(d^2,d^3)=mu^2-lambda^3", R == target, R=R.to_json()))
    # exact Lame data: wp = 1/3, wp' = 1/2, g2 = 2
    L2, L3 = bc.lame_pair(bc.exact_wp_taylor(Fraction(1, 3), Fraction(1, 2), 2, 16))
    Rq = bc.spectral_polynomial(L2, L3)
    rows.append(_row("lame_exact_annihilates", bc.bc_annihilation(L2, L3, Rq).is_zero(), R=Rq.to_json()))
    a = bc.formal_eigenvalue(L2, L3, orders)
    rows.append(_row("rexpans_exact", bc.rexpans_residual(Rq, a, 2, orders) == 0, orders=orders))
    # floating Lame pair at two base points
    P = EllipticParams(0.5, tau / 2)
    Rs = []
    for k, x0 in enumerate(bases):
        F2, F3 = _float_lame(P, x0, jet_order)
        comm = bc.commutator(F2, F3)
        scale = max(F2.max_abs(), F3.max_abs(), 1.0) ** 2
        rows.append(_row(f"lame_float_commutes[{k}]", comm.max_abs() <= 1e-8 * scale,
                         residual=comm.max_abs() / scale))
        Rf = bc.spectral_polynomial(F2, F3)
        ann = bc.bc_annihilation(F2, F3, Rf)
        big = max(abs(complex(c)) for c in Rf.terms.values())
        rows.append(_row(f"lame_float_annihilates[{k}]", ann.max_abs() <= 1e-8 * big * scale,
                         residual=ann.max_abs() / (big * scale)))
        Rs.append(Rf)
        D2, D3 = _float_lame(P, x0, 4 * orders + 8)
        af = bc.formal_eigenvalue(D2, D3, orders, tol=1e-7)
        res = bc.rexpans_residual(Rf, af, 2, orders)
        rows.append(_row(f"lame_float_rexpans[{k}]", res <= 1e-8 * big, residual=res / big))
    diff = Rs[0].max_difference(Rs[1])
    big = max(abs(complex(c)) for c in Rs[0].terms.values())
    rows.append(_row("lame_float_x0_independent", diff <= 1e-9 * big, residual=diff / big))
    curve = {(0, 2): 1, (3, 0): -1, (1, 0): complex(P.g2) / 4, (0, 0): complex(P.g3) / 4}
    expect = bc.SpectralPolynomial(curve, False)
    rows.append(_row("lame_float_is_weierstrass_curve", Rs[0].max_difference(expect) <= 1e-8 * big,
                     residual=Rs[0].max_difference(expect) / big))
    for x0 in (1, 2, Fraction(8, 7)):
        K2, K3 = bc.rational_kdv_pair(x0, 12)
        Rk = bc.spectral_polynomial(K2, K3)
        rows.append(_row(f"rational_kdv(x0={x0})", Rk == target
                         and bc.bc_annihilation(K2, K3, Rk).is_zero()))
    return rows


def hirota_suite(seed: int = 0, trials: int = 5) -> list:
    """One-soliton tau for the KP bilinear form and odd polynomials on ``f . f``."""
    rows = []
    p, q = Fraction(1), Fraction(1, 2)
    omega = (p ** 4 + 3 * q ** 2) / (4 * p)
    tau = exp_jet([p, q, omega], 4, amplitude=Fraction(3, 5), const=1)
    rows.append(_row("kp_one_soliton", hirota_apply(KP_HIROTA, tau) == 0))
    bad = exp_jet([p, q, omega + 1], 4, const=1)
    rows.append(_row("kp_wrong_dispersion_nonzero", hirota_apply(KP_HIROTA, bad) != 0))
    rng = np.random.default_rng(seed)
    for t in range(trials):
        f = np.empty((4, 4, 4), dtype=object)
        for idx in product(range(4), repeat=3):
            f[idx] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
        odd = {}
        for key in product(range(4), repeat=3):
            if sum(key) % 2 == 1 and sum(key) <= 3 and rng.random() < 0.5:
                odd[key] = int(rng.integers(-5, 6))
        odd[(1, 0, 0)] = 1
        rows.append(_row(f"odd_polynomial_kills_ff[{t}]", hirota_bilinear(odd, f, f) == 0))
    return rows
