from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trisecant import psidiff as pd
from trisecant.errors import DepthExhausted, ValidationError, WindowExhausted
from trisecant.jets import to_exact
from trisecant.psidiff import GridFn, PsiDiffOp, dmul

seeds = st.integers(0, 2 ** 32 - 1)


def grid(rng, lo=-12, n=25):
    return GridFn(lo, [Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5))) for _ in range(n)])


def same(A, B):
    return (A - B).is_zero()


def test_shift_rule():
    f = GridFn(0, [1, 2, 3, 4])
    out = dmul(PsiDiffOp.shift_op(1), PsiDiffOp.scalar(f))
    assert out[1](0) == to_exact(2) and out[1](2) == to_exact(4)
    # T^-1 f T = f(x - 1)
    conj = dmul(dmul(PsiDiffOp.shift_op(-1, depth=2), PsiDiffOp.scalar(f)), PsiDiffOp.shift_op(1))
    assert conj[0](1) == to_exact(1) and conj[0](3) == to_exact(3)


@given(seeds)
def test_associativity(seed):
    rng = np.random.default_rng(seed)
    A, B, C = (PsiDiffOp({1: grid(rng), 0: grid(rng), -1: grid(rng), -2: grid(rng)}, 3) for _ in range(3))
    left, right = dmul(dmul(A, B), C), dmul(A, dmul(B, C))
    depth = min(left.depth, right.depth)
    assert same(left.truncate(depth), right.truncate(depth))


def test_first_flow_is_the_toda_lattice():
    # d w0 = w1(x+1) - w1(x),  d w1 = w2(x+1) - w2(x) + w1 (w0 - w0(x-1))
    L = pd.random_llnov(np.random.default_rng(3), 3, 10)
    flow = pd.toda_flow(L, 1)
    w0, w1, w2 = L[0], L[-1], L[-2]
    assert (flow[0] - w1.difference()).is_zero()
    assert (flow[-1] - w2.difference() - w1 * (w0 - w0.shift(-1))).is_zero()
    assert flow.order() <= 0


@settings(max_examples=10)
@given(seeds, st.integers(1, 3))
def test_ff1_and_two_dev(seed, m):
    L = pd.random_llnov(np.random.default_rng(seed), 5, 14)
    assert pd.ff1_residual(L, m).is_zero()
    assert pd.two_dev_residual(L, m).is_zero()


@settings(max_examples=8)
@given(seeds)
def test_flows_commute(seed):
    L = pd.random_llnov(np.random.default_rng(seed), 5, 14)
    assert pd.toda_flow_commutativity_residual(L, 1, 2).is_zero()


@settings(max_examples=10)
@given(seeds)
def test_jn_equals_fn(seed):
    L = pd.random_llnov(np.random.default_rng(seed), 5, 16)
    assert pd.jn_fn_check(L, 4)["pass"]


@settings(max_examples=10)
@given(seeds, st.integers(-2, 2))
def test_wave_normalisation_and_equation(seed, x0):
    L = pd.random_llnov(np.random.default_rng(seed), 4, 14)
    w = pd.dwave(L, 4, x0)
    assert all(not xi(x0) for xi in w.xi[1:])
    # coefficient of k^-n in L psi - k psi
    for n in range(3):
        lhs = w.xi[n + 1].shift(1) - w.xi[n + 1]
        for s in range(n + 1):
            lhs = lhs + L[-s] * w.xi[n - s].shift(-s)
        assert lhs.is_zero()


@given(seeds)
def test_pairing_identity(seed):
    rng = np.random.default_rng(seed)
    D1 = PsiDiffOp({1: grid(rng), 0: grid(rng), -1: grid(rng)}, 2)
    D2 = PsiDiffOp({2: grid(rng), -1: grid(rng), -2: grid(rng)}, 2)
    left, right = pd.dpairing_identity(D1, D2)
    assert (left - right).is_zero()


def test_float_mode():
    L = pd.random_llnov(np.random.default_rng(5), 4, 12, exact=False)
    assert pd.ff1_residual(L, 2).is_zero(1e-12)
    assert pd.two_dev_residual(L, 3).is_zero(1e-12)


def test_errors():
    L = pd.random_llnov(np.random.default_rng(1), 2, 3)
    with pytest.raises(DepthExhausted):
        pd.dwave(L, 5)
    with pytest.raises(DepthExhausted):
        L[-4]
    with pytest.raises(ValidationError):
        pd.toda_flow(PsiDiffOp.shift_op(2), 1)
    with pytest.raises(WindowExhausted):
        GridFn(0, [1, 2])(5)
    with pytest.raises(WindowExhausted):
        GridFn(0, [1, 2]) + GridFn(5, [1])
    with pytest.raises(WindowExhausted):
        pd.dwave(L, 2, x0=40)


def test_margin_shrinks_with_powers():
    L = pd.random_llnov(np.random.default_rng(2), 3, 10)
    assert L.margin() == 10
    assert (L ** 3).margin() < L.margin()
