import cmath

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trisecant.elliptic import (
    EllipticParams,
    eisenstein_invariants,
    lattice_sum_wp,
    phi_kernel,
    weierstrass,
    weierstrass_many,
    wp_taylor,
)
from trisecant.errors import LatticePoint, ValidationError

P = EllipticParams(0.5, 0.1 + 0.55j)
coord = st.floats(-0.45, 0.45, allow_nan=False)
point = st.builds(complex, coord, st.floats(-0.25, 0.25, allow_nan=False)).filter(lambda z: abs(z) > 0.05)


def wp_oracle(z, params):
    """wp through mpmath's Jacobi thetas, independent of the package's theta engine."""
    w1 = params.omega1
    q = mp.exp(1j * mp.pi * params.tau)
    v = mp.pi * z / (2 * w1)
    c = (mp.pi / (2 * w1)) ** 2
    t2, t3, t4 = (mp.jtheta(k, 0, q) for k in (2, 3, 4))
    e1 = c * (t3 ** 4 + t4 ** 4) / 3
    return complex(e1 + c * (t3 * t4 * mp.jtheta(2, v, q) / mp.jtheta(1, v, q)) ** 2)


@pytest.mark.parametrize("z", [0.13 + 0.07j, 0.31 - 0.2j, 0.02 + 0.01j, 1.3 + 0.9j, -0.7 + 0.4j])
def test_wp_matches_mpmath(z):
    assert weierstrass(z, P) == pytest.approx(wp_oracle(z, P), rel=1e-12)


def test_wp_matches_direct_lattice_sum():
    # the square-box sum converges like cutoff^-2, hence the loose tolerance
    for z in (0.13 + 0.07j, 0.02 + 0.01j):
        assert weierstrass(z, P) == pytest.approx(lattice_sum_wp(z, P, 80), rel=1e-6)


def test_invariants_agree_with_q_series():
    g2, g3 = eisenstein_invariants(P)
    assert P.g2 == pytest.approx(g2, rel=1e-12)
    assert P.g3 == pytest.approx(g3, rel=1e-12)
    c = P.laurent_coefficients()
    assert c[2] == pytest.approx(P.g2 / 20, rel=1e-14)
    assert c[3] == pytest.approx(P.g3 / 28, rel=1e-14)


@given(point)
def test_wp_even_and_derivative_odd(z):
    assert weierstrass(-z, P) == pytest.approx(weierstrass(z, P), rel=1e-11)
    assert weierstrass(-z, P, "p'") == pytest.approx(-weierstrass(z, P, "p'"), rel=1e-11)
    assert weierstrass(-z, P, "zeta") == pytest.approx(-weierstrass(z, P, "zeta"), rel=1e-11)


@given(point, st.integers(-2, 2), st.integers(-2, 2))
def test_wp_doubly_periodic(z, m, n):
    w = 2 * m * P.omega1 + 2 * n * P.omega2
    assert weierstrass(z + w, P) == pytest.approx(weierstrass(z, P), rel=1e-10, abs=1e-10)


@given(point)
def test_cubic_relation(z):
    p, dp = weierstrass(z, P), weierstrass(z, P, "p'")
    rhs = 4 * p ** 3 - P.g2 * p - P.g3
    assert abs(dp ** 2 - rhs) <= 1e-10 * max(abs(dp) ** 2, abs(4 * p ** 3), abs(P.g2 * p), abs(P.g3))


@given(point)
def test_second_derivative_relation(z):
    p, ddp = weierstrass(z, P), weierstrass(z, P, "p''")
    assert ddp == pytest.approx(6 * p ** 2 - P.g2 / 2, rel=1e-10, abs=1e-9)


@given(point, st.integers(-1, 1), st.integers(-1, 1))
def test_zeta_quasi_periodicity(z, m, n):
    shifted = weierstrass(z + 2 * m * P.omega1 + 2 * n * P.omega2, P, "zeta")
    expect = weierstrass(z, P, "zeta") + 2 * m * P.eta1 + 2 * n * P.eta2
    assert shifted == pytest.approx(expect, rel=1e-10, abs=1e-10)


def test_legendre_relation():
    assert P.eta1 * P.omega2 - P.eta2 * P.omega1 == pytest.approx(1j * np.pi / 2, rel=1e-12)


def _d1(f, z, h):
    return (f(z - 2 * h) - 8 * f(z - h) + 8 * f(z + h) - f(z + 2 * h)) / (12 * h)


@given(point)
def test_sigma_zeta_wp_by_finite_differences(z):
    # step scaled to the distance from the pole, fourth-order stencil
    h = 1e-3 * abs(z)
    dlog_sigma = _d1(lambda x: weierstrass(x, P, "sigma"), z, h) / weierstrass(z, P, "sigma")
    assert dlog_sigma == pytest.approx(weierstrass(z, P, "zeta"), rel=1e-8)
    dzeta = _d1(lambda x: weierstrass(x, P, "zeta"), z, h)
    assert -dzeta == pytest.approx(weierstrass(z, P), rel=1e-8)


def test_small_argument_branch_is_continuous():
    # 0.1 * shortest period switches from Laurent series to theta quotients
    r = 0.1 * P.shortest_period
    for kind in ("p", "p'", "zeta", "sigma"):
        a = weierstrass_many([r * (1 - 1e-9), r * (1 + 1e-9)], P, kind)
        assert abs(a[0] - a[1]) <= 1e-7 * abs(a[0])


def test_lame_eigenfunction_by_finite_differences():
    z, x, h = 0.23 + 0.17j, 0.31 + 0.07j, 1e-3
    vals = [phi_kernel(x + k * h, z, P) for k in (-2, -1, 0, 1, 2)]
    d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)
    # (d^2 - 2 wp(x)) Phi = wp(z) Phi
    assert d2 - 2 * weierstrass(x, P) * vals[2] == pytest.approx(weierstrass(z, P) * vals[2], rel=1e-8)


def test_wp_taylor_against_derivatives():
    delta = 0.31 + 0.17j
    a = wp_taylor(delta, P, 14)
    assert a[0] == pytest.approx(weierstrass(delta, P), rel=1e-13)
    assert a[1] == pytest.approx(weierstrass(delta, P, "p'"), rel=1e-13)
    assert 2 * a[2] == pytest.approx(weierstrass(delta, P, "p''"), rel=1e-12)
    t = 0.01
    series = sum(c * t ** k for k, c in enumerate(a))
    assert series == pytest.approx(weierstrass(delta + t, P), rel=1e-12)


def test_sigma_normalisation():
    for x in (1e-3, 1e-3j):
        assert weierstrass(x, P, "sigma") == pytest.approx(x, rel=1e-10)


def test_errors():
    with pytest.raises(LatticePoint):
        weierstrass(2 * P.omega2, P)
    with pytest.raises(LatticePoint):
        phi_kernel(0.0, 0.2, P)
    with pytest.raises(ValidationError):
        weierstrass(0.2, P, "wp'''")
    with pytest.raises(ValidationError):
        EllipticParams(0.5, 0.3)


def test_json_round_trip():
    Q = EllipticParams.from_json(P.to_json())
    assert Q.omega1 == P.omega1 and Q.omega2 == P.omega2
    assert cmath.isclose(Q.g2, P.g2)
