from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trisecant import psido as po
from trisecant.errors import DepthExhausted, ValidationError
from trisecant.jets import CoeffJet, random_jet
from trisecant.psido import KSeries, PsiDO, left_action, mul

seeds = st.integers(0, 2 ** 32 - 1)


def same(A, B):
    return (A - B).is_zero()


def random_op(rng, powers=(2, 0, -1, -2), depth=4, jet_order=12):
    return PsiDO({s: random_jet(rng, jet_order) for s in powers}, depth)


def test_leibniz_rule():
    f = CoeffJet([1, 2, 3, 4, 5])
    out = mul(PsiDO.d(1), PsiDO.scalar(f))
    assert same(out, PsiDO({1: f, 0: f.deriv()}))


def test_negative_power_product():
    # d^-1 f = f d^-1 - f' d^-2 + f'' d^-3 - ...
    f = CoeffJet([0, 1, 1, 1, 1, 1, 1])
    out = mul(PsiDO.d(-1, depth=4), PsiDO.scalar(f))
    expect = PsiDO({-1: f, -2: -f.deriv(), -3: f.deriv(2), -4: -f.deriv(3)}, 4)
    assert same(out, expect)
    assert same(mul(PsiDO.d(-1, depth=5), PsiDO.d(1)), PsiDO.one())


@given(seeds)
def test_associativity(seed):
    rng = np.random.default_rng(seed)
    A, B, C = (random_op(rng) for _ in range(3))
    left, right = mul(mul(A, B), C), mul(A, mul(B, C))
    depth = min(left.depth, right.depth)
    assert same(left.truncate(depth), right.truncate(depth))


@given(seeds)
def test_inverse(seed):
    rng = np.random.default_rng(seed)
    Phi = PsiDO.one() + random_op(rng, (-1, -2, -3), 5)
    assert same(mul(Phi, Phi.inverse()), PsiDO.one())
    assert same(mul(Phi.inverse(), Phi), PsiDO.one())


@settings(max_examples=6)
@given(seeds, st.sampled_from([(2, 3), (2, 4), (3, 4)]))
def test_zero_curvature_exact(seed, ij):
    L = po.random_lkp(np.random.default_rng(seed), 6, 16)
    assert po.zero_curvature_residual(L, *ij).is_zero()


@settings(max_examples=5)
@given(seeds)
def test_flows_commute(seed):
    L = po.random_lkp(np.random.default_rng(seed), 6, 16)
    assert po.flow_commutativity_residual(L, 2, 3).is_zero()


@settings(max_examples=10)
@given(seeds, st.integers(2, 4))
def test_u_flow(seed, m):
    L = po.random_lkp(np.random.default_rng(seed), 6, 16)
    assert po.u_flow_residual(L, m).is_zero()
    assert po.kp_flow(L, m).order() <= -1


def test_kdv_from_third_flow():
    # L^2 = d^2 + q: the second flow is trivial, the third is KdV for q = 2 v_1
    q = CoeffJet([Fraction(1, 3), 2, Fraction(-1, 5), 1, 0, 1] + [0] * 12)
    L2 = PsiDO({2: CoeffJet.const(1), 0: q})
    L = po.nth_root(L2, 2, 6)
    assert same((L ** 2).truncate(4), L2.truncate(4))
    assert po.kp_flow(L, 2).is_zero()
    dq = po.kp_flow(L, 3)[-1] * 2
    kdv = (q.deriv(3) + q * q.deriv() * 6) * Fraction(1, 4)
    assert (dq - kdv).truncate(8).is_zero()


@settings(max_examples=10)
@given(seeds)
def test_wave_and_dual(seed):
    L = po.random_lkp(np.random.default_rng(seed), 5, 16)
    w = po.wave(L, 5)
    # normalisation xi_s(x0) = 0
    assert not any(x[0] for x in w.xi[1:])
    _, _, wp = po.dressing_and_dual(w)
    assert po.dual_residual(wp, L).is_zero_above(-3)
    assert (w.xi[1] + wp.xi[1]).is_zero()
    for n in range(4):
        assert po.bilinear_pairing(w, wp, n).is_zero()


@settings(max_examples=8)
@given(seeds)
def test_fn_equals_jn(seed):
    L = po.random_lkp(np.random.default_rng(seed), 5, 16)
    assert po.fn_jn_check(L, 4)["pass"]


@given(seeds)
def test_pairing_identity(seed):
    rng = np.random.default_rng(seed)
    D1 = random_op(rng, (1, 0, -1, -2), 3)
    D2 = random_op(rng, (2, 1, 0), 3)
    left, right = po.pairing_identity(D1, D2)
    assert (left - right).is_zero()


@given(seeds)
def test_rescaled_wave_still_solves(seed):
    rng = np.random.default_rng(seed)
    L = po.random_lkp(rng, 4, 16)
    w = po.rescale_wave(po.wave(L, 4), [Fraction(2, 3), -1, Fraction(1, 7)])
    res = left_action(L, w.series())
    kpsi = KSeries({p + 1: c for p, c in w.series().terms.items()}, w.series().low + 1, True)
    for p in range(-2, 2):
        assert (res[p] - kpsi[p]).is_zero()


@settings(max_examples=10)
@given(seeds, st.integers(2, 3))
def test_nth_root_round_trip(seed, n):
    L = po.random_lkp(np.random.default_rng(seed), 6, 16)
    Ln = L ** n
    depth = Ln.depth - n + 1
    root = po.nth_root(Ln, n, depth)
    assert same(root, L.truncate(depth))


def test_float_mode_matches_exact():
    rng = np.random.default_rng(4)
    L = po.random_lkp(rng, 5, 18)
    F = L.to_float()
    exact = po.zero_curvature_residual(L, 2, 3)
    assert exact.is_zero()
    assert po.zero_curvature_residual(F, 2, 3).is_zero(1e-9 * max(1.0, F.max_abs()) ** 4)
    po.wave(F, 4)
    for m in (2, 3):
        assert po.kp_flow(F, m).order(1e-9) <= -1
        assert po.u_flow_residual(F, m).is_zero(1e-9 * max(1.0, F.max_abs()) ** (m + 1))


def test_json_round_trip():
    L = po.random_lkp(np.random.default_rng(1), 3, 6)
    assert same(PsiDO.from_json(L.to_json()), L)


def test_errors():
    L = po.random_lkp(np.random.default_rng(1), 3, 6)
    with pytest.raises(DepthExhausted):
        po.wave(L, 5)
    with pytest.raises(DepthExhausted):
        po.residue(PsiDO.d(2, depth=0))
    with pytest.raises(DepthExhausted):
        L[-7]
    with pytest.raises(ValidationError):
        po.kp_flow(PsiDO.d(2), 2)
    with pytest.raises(ValidationError):
        po.nth_root(PsiDO({2: CoeffJet.const(1), 1: CoeffJet.const(1)}), 2, 3)
