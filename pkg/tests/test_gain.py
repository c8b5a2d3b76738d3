import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from boltzgain.errors import AliasingWarning, DivergentConstant, DomainError
from boltzgain.gain import (CollisionKernel, _padded, GridFunction, LambdaNormSpec, bobylev_modes,
                            fourier_transform, inverse_fourier_transform, lambda_norm,
                            q0_plus_bobylev, q_minus, q_plus_carleman, q_plus_direct,
                            theorem2_check, theorem2_constant)
from boltzgain.kernel import AngularKernel
from boltzgain.quadrature import QuadratureSpec
from boltzgain.radial import ExponentTriple
from boltzgain.spherical import VelocityFunction, operator_P

ONE = AngularKernel.constant(1.0)
POW = AngularKernel.power(1.0, 0.25)
FAST = QuadratureSpec(sphere_order=10, radial_order=16)
G3 = VelocityFunction.gaussian(3)


def test_collision_kernel_rejects_soft_potentials():
    with pytest.raises(ValueError):
        CollisionKernel(-0.5, ONE)


def test_q_minus_examples():
    assert q_minus(G3, G3, [0, 0, 0], CollisionKernel(0, ONE)) == pytest.approx(4 * math.pi**2.5, rel=1e-10)
    assert q_minus(G3, G3, [0, 0, 0], CollisionKernel(1, ONE)) == pytest.approx(8 * math.pi**2, rel=1e-8)
    assert q_minus(G3, VelocityFunction.zero(3), [0, 0, 0], CollisionKernel(0, ONE)) == 0.0


def test_q_plus_examples():
    ck = CollisionKernel(0, ONE)
    val = q_plus_direct(G3, G3, [0, 0, 0], ck, 10, FAST)
    assert val == pytest.approx(4 * math.pi**2.5, rel=1e-6)
    assert val == pytest.approx(69.97367, abs=1e-5)
    assert q_plus_direct(VelocityFunction.zero(3), G3, [0, 0, 0], ck) == 0.0
    assert q_plus_carleman(G3, VelocityFunction.zero(3), [0, 0, 0], ck) == 0.0


@pytest.mark.parametrize("lam", [0.0, 1.0])
@pytest.mark.parametrize("kern", [ONE, POW], ids=["constant", "power"])
def test_equilibrium_identity(lam, kern):
    M = VelocityFunction.gaussian(3, 1.3, 0.7).shifted([0.2, -0.1, 0.3])
    ck = CollisionKernel(lam, kern)
    for v in np.random.default_rng(0).normal(size=(3, 3)) * 0.6:
        gain = q_plus_carleman(M, M, v, ck, FAST)
        assert gain == pytest.approx(q_minus(M, M, v, ck), rel=1e-6)


def test_direct_matches_carleman_on_bumps_in_two_dimensions():
    g = VelocityFunction.bump(2, 1.2).shifted([0.3, -0.2])
    h = VelocityFunction.bump(2, 0.9).shifted([-0.1, 0.25])
    ck = CollisionKernel(1.0, ONE)
    v = np.array([0.2, 0.1])
    d = q_plus_direct(g, h, v, ck, 24, QuadratureSpec(radial_order=32))
    c = q_plus_carleman(g, h, v, ck, QuadratureSpec(sphere_order=24, radial_order=32))
    assert c == pytest.approx(d, rel=1e-4)


@settings(max_examples=10)
@given(st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3),
       st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3))
def test_translation_equivariance(a, v):
    a, v = np.array(a), np.array(v)
    g = VelocityFunction.gaussian(3, 1.5).linearmod()
    h = VelocityFunction.gaussian(3, 2.0)
    ck = CollisionKernel(1.0, POW)
    lhs = q_plus_carleman(g.shifted(a), h.shifted(a), v, ck, FAST)
    rhs = q_plus_carleman(g, h, v - a, ck, FAST)
    assert lhs == pytest.approx(rhs, rel=1e-7, abs=1e-10)


@settings(max_examples=10)
@given(st.lists(st.floats(-1.5, 1.5), min_size=3, max_size=3), st.floats(-2, 2))
def test_positivity_and_bilinearity(v, a):
    g = VelocityFunction.gaussian(3, 1.2).shifted([0.2, 0, 0])
    g2 = VelocityFunction.gaussian(3, 1.5)
    h = VelocityFunction.gaussian(3, 0.8)
    ck = CollisionKernel(1.0, ONE)
    q1 = q_plus_carleman(g, h, v, ck, FAST)
    q2 = q_plus_carleman(g2, h, v, ck, FAST)
    assert q1 >= 0 and q2 >= 0
    assert q_plus_carleman(g.linearmod(), h, v, ck, FAST) == pytest.approx(
        q_plus_carleman(g.linearmod().scaled(-1.0), h, v, ck, FAST) * -1, rel=1e-12, abs=1e-14)
    combo = VelocityFunction(lambda k: a * g(k) + g2(k), 3, math.inf, g.cutoff_radius)
    assert q_plus_carleman(combo, h, v, ck, FAST) == pytest.approx(a * q1 + q2, rel=1e-8, abs=1e-10)


def test_grid_validation():
    with pytest.raises(DomainError):
        GridFunction(3, 1.0, 12, np.zeros((12,) * 3))
    with pytest.raises(DomainError):
        GridFunction(4, 1.0, 4, np.zeros((4,) * 4))
    with pytest.raises(DomainError):
        GridFunction(2, 1.0, 4, np.zeros((4, 8)))


def test_fourier_transform_of_gaussian_and_round_trip():
    f = GridFunction.sample(G3, 32, 8.0)
    F = fourier_transform(f)
    k2 = np.sum(F.points() ** 2, axis=-1)
    inner = k2 <= (0.6 * F.L) ** 2
    want = math.pi**1.5 * np.exp(-k2 / 4)
    np.testing.assert_allclose(F.values[inner].real, want[inner], atol=1e-6 * want.max())
    np.testing.assert_allclose(F.values.imag, 0, atol=1e-12)
    back = inverse_fourier_transform(F)
    assert back.L == pytest.approx(f.L)
    np.testing.assert_allclose(back.values, f.values, atol=1e-10)


def test_shift_theorem():
    f = GridFunction.sample(VelocityFunction.gaussian(2, 2.0), 64, 8.0)
    c = np.array([0.5, -0.25])
    fs = GridFunction.sample(VelocityFunction.gaussian(2, 2.0).shifted(c), 64, 8.0)
    F, Fs = fourier_transform(f), fourier_transform(fs)
    phase = np.exp(-1j * F.points() @ c)
    np.testing.assert_allclose(Fs.values, F.values * phase, atol=1e-12)


def test_aliasing_warning():
    f = GridFunction.sample(VelocityFunction.gaussian(3, 0.1), 16, 2.0)
    with pytest.warns(AliasingWarning):
        fourier_transform(f)


def test_grid_serialization(tmp_path):
    f = GridFunction.sample(VelocityFunction.gaussian(2), 8, 3.0)
    data = f.to_bytes()
    assert data[:4] == b"BGF1" and len(data) == 32 + 8 * 64
    g = GridFunction.from_bytes(data)
    assert (g.n, g.N, g.L, g.fourier) == (2, 8, 3.0, False)
    assert np.array_equal(g.values, f.values)
    F = fourier_transform(f, math.inf)
    F.save(tmp_path / "F.bgf")
    G = GridFunction.load(tmp_path / "F.bgf")
    assert G.fourier and np.array_equal(G.values, F.values)
    f.to_csv(tmp_path / "f.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "i0,i1,value" and len(lines) == 65
    with pytest.raises(ValueError):
        GridFunction.from_bytes(b"XXXX" + data[4:])
    with pytest.raises(ValueError):
        GridFunction.from_bytes(data[:-8])


def test_bobylev_modes_match_closed_form():
    f = GridFunction.sample(G3, 32, 8.0)
    F = fourier_transform(_padded(f, 4), math.inf)
    k = np.array([[0.0, 0.0, 0.0], [0.5, 0.0, 0.0], [0.3, -0.7, 0.4]])
    vals = bobylev_modes(F, ONE, 12, modes=k)
    want = 4 * math.pi**4 * np.exp(-np.sum(k * k, axis=1) / 4)
    np.testing.assert_allclose(vals.real, want, rtol=1e-6)
    assert want[0] == pytest.approx(389.636, abs=1e-3)


@pytest.fixture(scope="module")
def bobylev_small():
    # L = 6 keeps the spectral cut-off at |k| ~ 8.4, where Q^ is below 1e-7 of its peak
    f = GridFunction.sample(G3, 32, 6.0)
    return f, q0_plus_bobylev(f, ONE, 12, oversample=4)


def test_bobylev_matches_direct(bobylev_small):
    f, Q = bobylev_small
    ck = CollisionKernel(0, ONE)
    pts = Q.points()
    for idx in [(16, 16, 16), (17, 15, 16), (18, 16, 19)]:
        direct = q_plus_direct(G3, G3, pts[idx], ck, 12, QuadratureSpec(radial_order=24))
        assert Q.values[idx] == pytest.approx(direct, rel=1e-5)


def test_bobylev_fourier_consistency(bobylev_small):
    # the transform of the output agrees with P applied to f^ on interior modes
    f, Q = bobylev_small
    QF = fourier_transform(Q, math.inf)
    fhat = VelocityFunction.gaussian(3, 0.25, math.pi**1.5)
    k = QF.points()
    inner = np.sum(k * k, axis=-1) <= (0.3 * QF.L) ** 2
    want = operator_P(fhat, fhat, k[inner], ONE, 12)
    np.testing.assert_allclose(QF.values[inner].real, want, rtol=1e-6, atol=1e-6 * want.max())


def test_bobylev_zero():
    z = GridFunction(3, 4.0, 8, np.zeros((8, 8, 8)))
    assert not np.any(q0_plus_bobylev(z, ONE).values)
    with pytest.raises(DomainError):
        q0_plus_bobylev(fourier_transform(z, math.inf), ONE)


def test_lambda_norm_examples():
    assert lambda_norm(G3, LambdaNormSpec(1, 0)) == pytest.approx(2 * math.pi**1.5, rel=1e-8)
    assert lambda_norm(G3, LambdaNormSpec(1, 1)) == pytest.approx(math.pi**1.5 + 2 * math.pi, rel=1e-8)
    assert lambda_norm(VelocityFunction.zero(3), LambdaNormSpec(2, 1)) == 0.0


def test_theorem2_constant():
    C, _ = theorem2_constant(3, 1.0, 1.0, ONE)
    assert C.value == pytest.approx(16 * math.pi, rel=1e-12)
    assert C.value == pytest.approx(50.265, abs=1e-3)
    assert theorem2_constant(3, 2.0, 1.0, ONE)[0].value == pytest.approx(32 * math.pi, rel=1e-12)


def test_theorem2_examples():
    ck = CollisionKernel(1.0, ONE)
    e = ExponentTriple.young(1, 1)
    zero = theorem2_check(VelocityFunction.zero(3), G3, e, ck)
    assert zero.passed and zero.lhs == 0
    with pytest.raises(DivergentConstant):
        theorem2_check(G3, G3, ExponentTriple.young(2, 2), ck)
    with pytest.raises(ValueError):
        theorem2_check(G3, G3, ExponentTriple.holder(2, 2), ck)
