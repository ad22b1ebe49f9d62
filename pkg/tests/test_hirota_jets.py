from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from trisecant.errors import JetTooShallow, ValidationError
from trisecant.hirota import KP_HIROTA, exp_jet, hirota_apply, hirota_bilinear, jet_from_function
from trisecant.jets import INF, CoeffJet, binom, random_jet, to_exact

rationals = st.fractions(min_value=-2, max_value=2, max_denominator=6)
seeds = st.integers(0, 2 ** 32 - 1)
x, y, t, s = sp.symbols("x y t s")


def sympy_jet(expr, order):
    """Jet of a sympy expression in (x, y, t) at the origin."""
    def d(idx):
        e = expr
        for v, k in zip((x, y, t), idx):
            e = sp.diff(e, v, k)
        return sp.Rational(e.subs({x: 0, y: 0, t: 0}))
    return jet_from_function(d, 3, order)


def sympy_hirota(P, f, g):
    # P(D) f.g = P(d_s) f(x + s) g(x - s) at s = 0, one shift per variable
    a, b, c = sp.symbols("a b c")
    prod = f.subs({x: x + a, y: y + b, t: t + c}, simultaneous=True) * \
        g.subs({x: x - a, y: y - b, t: t - c}, simultaneous=True)
    total = 0
    for (i, j, k), coef in P.items():
        total += coef * sp.diff(prod, a, i, b, j, c, k)
    return sp.Rational(total.subs({a: 0, b: 0, c: 0, x: 0, y: 0, t: 0}))


def test_one_soliton_and_wrong_dispersion():
    tau = exp_jet([1, Fraction(1, 2), Fraction(7, 16)], 4, Fraction(3, 5))
    assert hirota_apply(KP_HIROTA, tau) == 0
    bad = exp_jet([1, Fraction(1, 2), Fraction(1, 2)], 4, Fraction(3, 5))
    assert hirota_apply(KP_HIROTA, bad) != 0


@given(rationals, rationals, rationals)
def test_soliton_family(k, l, amp):
    # k^4 + 3 l^2 = 4 k w
    if k == 0:
        return
    w = (k ** 4 + 3 * l ** 2) / (4 * k)
    assert hirota_apply(KP_HIROTA, exp_jet([k, l, w], 4, amp)) == 0


def test_against_symbolic_shift_formula():
    f = 1 + x ** 2 * y + sp.Rational(1, 3) * x * t + y ** 3 - t ** 2 * x ** 2
    g = 2 - x + x ** 3 * t + sp.Rational(1, 2) * y ** 2 * x
    P = {(4, 0, 0): 1, (0, 2, 0): 3, (1, 0, 1): -4, (2, 1, 0): Fraction(2, 7), (0, 0, 0): 5}
    expect = sympy_hirota(P, f, g)
    got = hirota_bilinear(P, sympy_jet(f, 4), sympy_jet(g, 4))
    assert sp.Rational(got) == expect


@given(seeds, st.sampled_from([(1, 0, 0), (0, 1, 2), (3, 0, 0), (1, 1, 1), (2, 1, 0)]))
def test_odd_polynomials_kill_f_dot_f(seed, gamma):
    rng = np.random.default_rng(seed)
    f = np.empty((4, 4, 4), dtype=object)
    for idx in np.ndindex(f.shape):
        f[idx] = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 5)))
    assert hirota_bilinear({gamma: 1}, f, f) == 0


def test_antisymmetry_of_odd_part():
    f = sympy_jet(1 + x + x * y * t + t ** 2, 3)
    g = sympy_jet(2 - y + x ** 2 * t, 3)
    P = {(1, 0, 0): 1, (1, 1, 1): 3}
    assert hirota_bilinear(P, f, g) == -hirota_bilinear(P, g, f)


def test_hirota_errors():
    f = exp_jet([1, 1, 1], 2)
    with pytest.raises(JetTooShallow):
        hirota_apply(KP_HIROTA, f)
    with pytest.raises(ValidationError):
        hirota_apply({(1, 0): 1}, f)
    with pytest.raises(ValidationError):
        hirota_bilinear(KP_HIROTA, exp_jet([1, 1, 1], 4), exp_jet([1, 1], 4))


@given(st.lists(rationals, min_size=1, max_size=6), st.lists(rationals, min_size=1, max_size=6))
def test_jet_product_is_polynomial_product(a, b):
    pa, pb = sp.Poly(a[::-1], x), sp.Poly(b[::-1], x)
    prod = (pa * pb).all_coeffs()[::-1]
    got = CoeffJet(a, INF) * CoeffJet(b, INF)
    for k, c in enumerate(prod):
        assert got[k] == to_exact(Fraction(int(sp.numer(c)), int(sp.denom(c))))


@given(seeds)
def test_jet_leibniz_and_integration(seed):
    rng = np.random.default_rng(seed)
    f, g = random_jet(rng, 10), random_jet(rng, 10)
    assert ((f * g).deriv() - (f.deriv() * g + f * g.deriv())).is_zero()
    assert f.integrate().deriv() == f
    assert (f.deriv().integrate() + f.value() - f).is_zero()
    assert (f * g).order == 10 and f.deriv(3).order == 7


def test_jet_basics():
    f = CoeffJet([1, 2, 3], 5)
    assert f.derivative_at(2) == to_exact(6)
    assert f[4] == to_exact(0) and not f[4]
    with pytest.raises(IndexError):
        f[6]
    assert CoeffJet.from_json(f.to_json()) == f
    F = f.to_float()
    assert F.exact is False and F[1] == 2
    assert CoeffJet.from_json(F.to_json(), exact=False).c == F.c
    assert f.truncate(1).c == [to_exact(1), to_exact(2)]
    assert CoeffJet.const(4).is_constant()
    with pytest.raises(TypeError):
        to_exact(0.5)
    assert to_exact((Fraction(1, 2), 3)) == to_exact(Fraction(1, 2)) + to_exact(3) * to_exact((0, 1))


@given(st.integers(-6, 6), st.integers(0, 6))
def test_generalised_binomial(a, j):
    assert binom(a, j) == sp.binomial(a, j) if a >= 0 else binom(a, j) == sp.ff(a, j) / sp.factorial(j)
