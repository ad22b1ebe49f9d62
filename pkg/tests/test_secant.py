import json
import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_siegel, random_z
from trisecant.elliptic import EllipticParams, weierstrass
from trisecant.errors import (
    DegenerateDirection,
    LostRoot,
    NearDivisor,
    ResidueMismatch,
    ValidationError,
    ZeroCollision,
)
from trisecant.secant import (
    Accumulator,
    CMState,
    FlexData,
    LaurentData,
    MotionData,
    PrymQuadData,
    ResidualReport,
    TangentData,
    TrisecantData,
    bdhe_fixture,
    bdhe_residual,
    cload,
    cm_acceleration,
    cm_integrate,
    cm_lax,
    cm_spectral,
    flex_A_residual,
    flex_B_residual,
    flex_C_residual,
    laurent_vw,
    laurent_wave_step,
    lame_flex_fixture,
    prym_B_residual,
    prym_g1_fixture,
    prym_quad_identity,
    tangent_A_residual,
    tangent_B_residual,
    tangent_C_residual,
    tangent_fixture,
    track_zero,
    trisecant_A_residual,
    trisecant_B_residual,
    trisecant_C_residual,
    trisecant_fixture,
)
from trisecant.secant.fixtures import lame_p_numeric, lame_psi_ratio

P = EllipticParams(0.5, 0.1 + 0.55j)
seeds = st.integers(0, 2 ** 32 - 1)


# fixtures and their perturbations

def test_lame_fixture_passes_all_three_conditions():
    d = lame_flex_fixture()
    assert flex_A_residual(d).normalized < 1e-10
    assert flex_B_residual(d).normalized < 1e-10
    assert flex_C_residual(d, 4).normalized < 1e-10


def test_lame_fixture_constants_match_the_eigenfunction():
    tau, z = 0.2 + 1.1j, 0.23 + 0.17j
    d = lame_flex_fixture(tau, z)
    for x in (0.31 + 0.07j, -0.12 + 0.2j):
        assert lame_p_numeric(tau, z, x) == pytest.approx(d.p, rel=1e-9)
    ratios = [lame_psi_ratio(tau, z, x) for x in (0.1 + 0.05j, 0.27 - 0.11j, -0.3 + 0.2j)]
    assert max(abs(r - ratios[0]) for r in ratios) <= 1e-10 * abs(ratios[0])


@pytest.mark.parametrize("make,checks", [
    (tangent_fixture, (tangent_A_residual, tangent_B_residual, tangent_C_residual)),
    (trisecant_fixture, (trisecant_A_residual, trisecant_B_residual, trisecant_C_residual)),
])
def test_genus_one_fixtures_pass(make, checks):
    d = make()
    for check in checks:
        rep = check(d)
        assert rep.passed and rep.normalized < 1e-10, str(rep)


@settings(max_examples=8)
@given(seeds)
def test_random_constants_fail_condition_A(seed):
    rng = np.random.default_rng(seed)
    p, E = rng.normal(size=2) + 1j * rng.normal(size=2)
    d = lame_flex_fixture()
    bad = d.replace(p=d.p + 0.5 + p, E=d.E + 0.5 + E)
    assert flex_A_residual(bad, samples=2).normalized > 1e-2
    t = tangent_fixture()
    assert tangent_A_residual(t.replace(E=t.E + 0.5 + E), samples=2).normalized > 1e-2


def test_residual_does_not_depend_on_amplitude():
    d = lame_flex_fixture().replace(E=0.3)
    a = flex_A_residual(d, samples=2)
    b = flex_A_residual(d, samples=2, amplitude=3.0 - 1.0j)
    assert a.normalized == pytest.approx(b.normalized, rel=1e-9)


def test_trisecant_B_reports_secancy_rank():
    assert trisecant_B_residual(trisecant_fixture()).extra["secancy_rank"] == 2


def test_degenerate_direction():
    d = TangentData(B=[[0.2 + 1.1j]], U=[0.31 + 0.12j], V=[0.0], A=[-0.27 + 0.21j], p=0, E=0)
    with pytest.raises(DegenerateDirection):
        tangent_C_residual(d, 2)


def test_explicit_sample_on_divisor_is_rejected():
    d = lame_flex_fixture()
    with pytest.raises(NearDivisor):
        flex_A_residual(d, Z=[(1 + d.B.B[0, 0]) / 2], grid=([0.0], [0.0]))


# BDHE

def test_bdhe():
    rep = bdhe_residual(lambda n, l, m: 1.0)
    assert rep.max_residual == 1.0 and rep.scale == 1.0 and not rep.passed
    tau, _ = bdhe_fixture()
    assert bdhe_residual(tau).normalized < 1e-10
    with pytest.raises(ValidationError):
        bdhe_residual(tau, window=((0, 2), (0, 3), (0, 3)))


# Prym

def test_prym_quad_is_exact_at_A_equal_W():
    rng = np.random.default_rng(2)
    S = random_siegel(rng, 2)
    vec = [random_z(rng, 2, 0.4, 0.2) for _ in range(4)]
    d = PrymQuadData(S, *vec, 1.1, 0.7j, -0.9, 1.3, 0.8 + 0.2j, 1.0)
    assert prym_quad_identity(d, A=d.W).max_residual == 0.0
    assert prym_quad_identity(d).normalized > 1e-6


def test_prym_fixture_B_relations():
    d = prym_g1_fixture()
    assert prym_B_residual(d, 1).normalized < 1e-10
    assert prym_B_residual(d, -1).normalized < 1e-10
    assert PrymQuadData.from_json(json.loads(json.dumps(d.to_json()))).c3 == pytest.approx(d.c3)


# Laurent data of a moving zero

def test_laurent_vw_against_sympy():
    x = sp.symbols("x")
    a, b, c = sp.Rational(1, 3), sp.Rational(-2, 5), sp.Rational(3, 7)
    f = 1 + a * x + b * x ** 2 + c * x ** 3
    tau = x * f
    # u = -2 (log tau)'' = 2/x^2 - 2 (log f)''
    logf = sp.log(f)
    v = -2 * sp.diff(logf, x, 2).subs(x, 0)
    w = -2 * sp.diff(logf, x, 3).subs(x, 0)
    jet = [complex(sp.diff(tau, x, k).subs(x, 0)) for k in range(5)]
    got = laurent_vw(jet)
    assert got[0] == pytest.approx(complex(v), rel=1e-14)
    assert got[1] == pytest.approx(complex(w), rel=1e-14)


def test_laurent_step_against_symbolic_expansion():
    # expand (d_y + u - d_x^2) xi_s around the moving pole and read off the next coefficients
    x, y, e = sp.symbols("x y e")
    X = sp.Function("X")(y)
    r, r0, r1, r2 = (sp.Function(n)(y) for n in ("r", "r0", "r1", "r2"))
    v, w = sp.Function("v")(y), sp.Function("w")(y)
    xi = r / (x - X) + r0 + r1 * (x - X) + r2 * (x - X) ** 2
    u = 2 / (x - X) ** 2 + v + w * (x - X)
    F = sp.expand((sp.diff(xi, y) + u * xi - sp.diff(xi, x, 2)).subs(x, X + e))
    residue = F.coeff(e, -1)
    r_next = -F.coeff(e, -2)
    r1_next = F.coeff(e, 0)
    vals = {X.diff(y): sp.Rational(3, 7), X.diff(y, 2): sp.Rational(-1, 3), r: sp.Rational(2, 3),
            r0: sp.Rational(-5, 4), r0.diff(y): sp.Rational(1, 6), r1: sp.Rational(1, 2),
            v: sp.Rational(5, 3), w: sp.Rational(-2, 9)}
    # impose the residue condition through r'
    rd = sp.solve(residue, r.diff(y))[0].subs(vals)
    vals[r.diff(y)] = rd

    def ev(expr):
        expr = expr.subs(X.diff(y, 2), vals[X.diff(y, 2)]).subs(r0.diff(y), vals[r0.diff(y)])
        expr = expr.subs(r.diff(y), rd).subs(X.diff(y), vals[X.diff(y)])
        return complex(expr.subs(vals))

    data = LaurentData(ev(r), ev(r.diff(y)), ev(r0), ev(r0.diff(y)), ev(r1))
    motion = MotionData(ev(X.diff(y)), ev(X.diff(y, 2)), ev(v), ev(w))
    nxt, misfit = laurent_wave_step(data, motion, r0_next=0.25)
    assert nxt.r == pytest.approx(ev(r_next), rel=1e-14)
    assert nxt.r1 == pytest.approx(ev(r1_next), rel=1e-14)
    assert nxt.r_dot == pytest.approx(ev(sp.diff(r_next, y).subs(r.diff(y), rd)), rel=1e-14)
    assert nxt.r0 == 0.25
    assert misfit == pytest.approx(-data.r * (motion.xddot - 2 * motion.w), rel=1e-13)
    # on the locus xddot = 2 w the next residue condition holds too
    _, ok = laurent_wave_step(data, MotionData(motion.xdot, 2 * motion.w, motion.v, motion.w))
    assert abs(ok) < 1e-14
    with pytest.raises(ResidueMismatch):
        laurent_wave_step(LaurentData(1, 0, 0, 0, 0), motion)


def test_zero_tracking_errors():
    def parabola(x, y):
        return [x * x + y, 2 * x, 2, 0, 0]

    assert track_zero(parabola, [-0.04, -0.01], 0.2) == pytest.approx([0.2, 0.1])
    with pytest.raises(ZeroCollision):
        track_zero(parabola, [-0.01, -1e-6, -1e-12, 0.0], 0.1)
    with pytest.raises(LostRoot):
        track_zero(lambda x, y: [1.0, 0.0, 0.0, 0.0, 0.0], [0.0], 0.0)


# Calogero-Moser

def cm_state(seed, g=3):
    rng = np.random.default_rng(seed)
    x = 0.35 * np.exp(2j * np.pi * np.arange(g) / g) * (1 + 0.2 * rng.random(g))
    return CMState(P, x, rng.normal(size=g) * 0.3 + 0.3j * rng.normal(size=g))


@settings(max_examples=10)
@given(seeds)
def test_cm_forces_balance(seed):
    assert abs(cm_acceleration(cm_state(seed).x, P).sum()) < 1e-12


def test_cm_conserves_momentum_and_energy():
    s0 = cm_state(4)

    def energy(s):
        pot = sum(weierstrass(complex(s.x[i] - s.x[j]), P) for i in range(s.g) for j in range(i + 1, s.g))
        return 0.5 * np.sum(s.xdot ** 2) - 4 * pot

    s1, _ = cm_integrate(s0, 0.2)
    assert abs(s1.xdot.sum() - s0.xdot.sum()) < 1e-9
    assert abs(energy(s1) - energy(s0)) < 1e-8 * max(1.0, abs(energy(s0)))


@pytest.mark.parametrize("seed", [0, 1])
def test_cm_spectral_matches_eigenvalues(seed):
    s = cm_state(seed)
    z = 0.21 + 0.13j
    L = cm_lax(s, z)
    # det(k + L) = prod (k + lambda_i)
    expect = np.poly(-np.linalg.eigvals(L))
    assert np.allclose(cm_spectral(s, z), expect, rtol=1e-10, atol=1e-10 * np.abs(expect).max())
    assert np.allclose(np.diag(L), s.xdot / 2)


# reports and data

def test_report_serialisation():
    acc = Accumulator("demo", 1e-3)
    acc.add(1e-4, [1.0, -2.0], where=1)
    acc.add(3e-3 + 4e-3j, [2.0 + 0j], where=np.array([0.5 + 1j]))
    rep = acc.report(note=0.25j)
    assert rep.samples == 2 and rep.max_residual == pytest.approx(5e-3) and rep.scale == 2.0
    assert not rep.passed
    out = rep.to_json()
    assert json.loads(json.dumps(out))["worst"] == {"where": [[0.5, 1.0]]}
    assert out["extra"] == {"note": [0.0, 0.25]}
    rows = rep.to_csv().splitlines()
    assert rows[0] == "name,sample,residual,scale,normalized" and len(rows) == 3
    assert rows[1].startswith("demo,0,0.0001,2.0,")
    assert "FAIL" in str(rep)
    assert Accumulator("empty", 1.0).report().samples == 0
    assert ResidualReport("x", 1.0, 0.0, 1.0, 1).normalized == math.inf


def test_data_validation():
    B = [[0.2 + 1.1j]]
    with pytest.raises(ValidationError):
        FlexData(B=B, U=[0], V=[0], A=[0.1], p=0, E=0)
    with pytest.raises(ValidationError):
        FlexData(B=B, U=[1, 0], V=[0], A=[0.1], p=0, E=0)
    with pytest.raises(ValidationError):
        FlexData(B=B, U=[np.nan], V=[0], A=[0.1], p=0, E=0)
    with pytest.raises(ValidationError):
        TangentData(B=B, U=[0.3], V=[1], A=[1.3], p=0, E=0)
    with pytest.raises(ValidationError):
        TrisecantData(B=B, U=[0.3], V=[0.3 + 0.2 + 1.1j], A=[0.1], p=0, E=0)
    good = dict(B=B, A=[0.21], U=[0.33j], V=[-0.14 + 0.26j], W=[0.09 + 0.31j],
                c1=1, c2=1, c3=1, w1=1, w2=1, w3=1)
    PrymQuadData(**good)
    with pytest.raises(ValidationError):
        PrymQuadData(**{**good, "c1": 0})
    with pytest.raises(ValidationError):
        PrymQuadData(**{**good, "A": [0.5]})
    with pytest.raises(ValidationError):
        CMState(P, [0.1, 0.1 + 1.0], [0, 0])
    with pytest.raises(ValidationError):
        FlexData.from_json({"B": [[[0.2, 1.1]]]})
    with pytest.raises(ValidationError):
        cload([1.0, 2.0, 3.0])


def test_data_json_round_trip():
    for d in (lame_flex_fixture(), tangent_fixture(), trisecant_fixture()):
        back = type(d).from_json(json.loads(json.dumps(d.to_json())))
        assert np.allclose(back.A, d.A) and back.p == d.p and back.E == d.E
    s = cm_state(0)
    back = CMState.from_json(json.loads(json.dumps(s.to_json())))
    assert np.array_equal(back.x, s.x) and np.array_equal(back.xdot, s.xdot)
