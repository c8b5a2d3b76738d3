import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from boltzgain.errors import DivergentConstant, DomainError
from boltzgain.kernel import AngularKernel, XiMeasure, sphere_area
from boltzgain.quadrature import QuadratureSpec
from boltzgain.radial import ExponentTriple, RadialProfile
from boltzgain.spherical import (NuMeasure, RotationSampler, VelocityFunction, aligned_rule,
                                 lemma21_pairing, lemma22_check, operator_P, post_collision_pair,
                                 radial_reduce_P, random_test_triple, sphere_rule, symmetrization_error,
                                 symmetrize, theorem1_check, theorem1_constant, weighted_lp_norm)

ONE = AngularKernel.constant(1.0)
POW = AngularKernel.power(1.0, 0.25)
FAST = QuadratureSpec(sphere_order=10, radial_order=16)


def unit(v):
    return v / np.linalg.norm(v)


vec3 = arrays(np.float64, 3, elements=st.floats(-3, 3)).filter(lambda v: np.linalg.norm(v) > 1e-3)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_rule_area_and_moments(n):
    rule = sphere_rule(n, 12)
    assert rule.weights.sum() == pytest.approx(sphere_area(n - 1), rel=1e-14)
    np.testing.assert_allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-14)
    # second moments: int w_i w_j = delta_ij |S^(n-1)| / n
    M = np.einsum("k,ki,kj->ij", rule.weights, rule.nodes, rule.nodes)
    np.testing.assert_allclose(M, np.eye(n) * sphere_area(n - 1) / n, atol=1e-13)


def test_aligned_rule_integrates_kernel():
    # the kernel is carried by the weights: int_{S^2} b(w_3) dw = 2 pi int (1-s)^(-1/4) ds
    nodes, weights = aligned_rule(POW, 3, 12, np.array([0.0, 0.0, 1.0]))
    assert weights.sum() == pytest.approx(2 * math.pi * 2**0.75 / 0.75, rel=1e-12)
    # first moment along the pole: 2 pi int s (1-s)^(-1/4) ds
    first = 2 * math.pi * (2**0.75 / 0.75 - 2**1.75 / 1.75)
    assert np.sum(weights * nodes[:, 2]) == pytest.approx(first, rel=1e-12)
    np.testing.assert_allclose(np.linalg.norm(nodes, axis=1), 1.0, atol=1e-14)


def test_post_collision_examples():
    kp, km = post_collision_pair([1.0, 0, 0], [1.0, 0, 0])
    np.testing.assert_allclose(kp, [1, 0, 0]); np.testing.assert_allclose(km, [0, 0, 0])
    kp, km = post_collision_pair([1.0, 0, 0], [0, 1.0, 0])
    np.testing.assert_allclose(kp, [0.5, 0.5, 0]); np.testing.assert_allclose(km, [0.5, -0.5, 0])
    with pytest.raises(DomainError):
        post_collision_pair([0.0, 0, 0], [1.0, 0, 0])
    with pytest.raises(DomainError):
        post_collision_pair([1.0, 0, 0], [2.0, 0, 0])


@given(vec3, vec3)
def test_post_collision_geometry(k, w):
    kp, km = post_collision_pair(k, unit(w))
    scale = max(1.0, float(k @ k))
    np.testing.assert_allclose(kp + km, k, atol=1e-12 * scale)
    assert kp @ kp + km @ km == pytest.approx(k @ k, abs=1e-12 * scale)
    assert abs(kp @ km) <= 1e-12 * scale


def test_P_examples():
    c = VelocityFunction.constant(3)
    assert operator_P(c, c, [0.3, -1.0, 2.0], ONE) == pytest.approx(4 * math.pi, rel=1e-14)
    g = VelocityFunction.gaussian(3, 0.25, math.pi**1.5)
    val = operator_P(g, g, [0.0, 0.6, 0.8], ONE)
    assert val == pytest.approx(4 * math.pi**4 * math.exp(-0.25), rel=1e-13)
    assert val == pytest.approx(303.44, abs=0.01)
    ind = RadialProfile.indicator(0.0, 1.0)
    assert radial_reduce_P(ind, ind, 1.5, XiMeasure(ONE, 3)) == pytest.approx(4 * math.pi / 3)
    one = RadialProfile.constant(1.0)
    assert radial_reduce_P(one, one, 2.0, XiMeasure(ONE, 3)) == pytest.approx(4 * math.pi)


def test_P_at_origin_is_the_continuous_limit():
    g = VelocityFunction.gaussian(3)
    near = operator_P(g, g, [1e-7, 0, 0], POW)
    assert operator_P(g, g, [0.0, 0, 0], POW) == pytest.approx(near, rel=1e-10)


@given(vec3, st.integers(0, 50))
def test_rotation_equivariance(k, seed):
    g, h, _ = random_test_triple(3, seed)
    R = RotationSampler(1, seed).matrices(3)[0]
    # order 24 leaves ~1e-6 quadrature error on these bumps; 48 is converged to ~1e-9
    lhs = operator_P(g.rotated(R), h.rotated(R), k, POW, 48)
    rhs = operator_P(g, h, R @ k, POW, 48)
    assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-8)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("kern", [ONE, POW], ids=["constant", "power"])
def test_radiality_and_radial_reduction(n, kern):
    g = VelocityFunction.gaussian(n, 1.0)
    h = VelocityFunction.bump(n, 1.3)
    dirs = np.random.default_rng(n).normal(size=(6, n))
    s = 0.9
    k = s * dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    vals = operator_P(g, h, k, kern, 48)
    assert np.std(vals) <= 1e-6 * np.mean(vals)
    want = radial_reduce_P(g.profile, h.profile, s * s, XiMeasure(kern, n))
    assert np.mean(vals) == pytest.approx(want, rel=1e-6)


def test_weighted_norm_examples():
    g = VelocityFunction.gaussian(3)
    assert weighted_lp_norm(g, 2, NuMeasure(3)) == pytest.approx((math.pi / 2) ** 0.75, rel=1e-8)
    assert weighted_lp_norm(VelocityFunction.zero(3), 2, NuMeasure(3)) == 0.0
    # int e^{-|k|^2} |k| dk = 2 pi in n = 3
    assert weighted_lp_norm(g, 1, NuMeasure(3, 1.0)) == pytest.approx(2 * math.pi, rel=1e-8)
    assert weighted_lp_norm(g, math.inf, NuMeasure(3)) == pytest.approx(1.0)


def test_haar_rotations_are_special_orthogonal():
    Q = RotationSampler(200, 3).matrices(3)
    I = np.einsum("kij,kil->kjl", Q, Q)
    np.testing.assert_allclose(I, np.broadcast_to(np.eye(3), I.shape), atol=1e-12)
    np.testing.assert_allclose(np.linalg.det(Q), 1.0, atol=1e-12)
    assert np.array_equal(Q, RotationSampler(200, 3).matrices(3))
    with pytest.raises(ValueError):
        RotationSampler(0)


def test_symmetrization_of_coordinate():
    f = VelocityFunction(lambda k: k[..., 0], 3, label="x1")
    fs = symmetrize(f, 2, RotationSampler(100000, 1))
    x = np.array([[0.3, 0.0, 0.0], [0.0, 1.2, 0.5]])
    np.testing.assert_allclose(fs(x), np.linalg.norm(x, axis=1) / math.sqrt(3), rtol=1e-2)


def test_symmetrization_properties():
    sampler = RotationSampler(4096, 5)
    f, _, _ = random_test_triple(3, 11)
    fs = symmetrize(f, 3, sampler)
    margin = symmetrization_error(f, 3, sampler)
    assert fs.radial and fs.check_radial()
    # idempotence on nonnegative functions
    x = np.random.default_rng(0).normal(size=(20, 3)) * 0.6
    np.testing.assert_allclose(symmetrize(fs, 3, sampler)(x), fs(x), rtol=1e-12, atol=1e-14)
    # norm preservation
    m = NuMeasure(3, 0.0)
    assert weighted_lp_norm(fs, 3, m) == pytest.approx(weighted_lp_norm(f, 3, m), rel=3 * margin + 1e-6)
    # radial factors pass through
    g = VelocityFunction.gaussian(3, 0.7)
    fg = VelocityFunction(lambda k: f(k) * g(k), 3, f.support_radius, f.extent)
    np.testing.assert_allclose(symmetrize(fg, 3, sampler)(x), fs(x) * g(x), rtol=1e-10, atol=1e-14)


def test_lemma21_trivial_and_two_dimensional():
    f, g, h = random_test_triple(2, 4)
    lhs, rhs = lemma21_pairing(f, g, VelocityFunction.zero(2), ONE)
    assert lhs == 0 and rhs == 0
    lhs, rhs = lemma21_pairing(f, g, h, POW, 12, QuadratureSpec(radial_order=16))
    assert rhs == pytest.approx(lhs, rel=1e-4)


def test_lemma22_radial_equality_and_sign_flip():
    b = VelocityFunction.bump(3, 1.0)
    g = VelocityFunction.gaussian(3, 2.0)
    rep = lemma22_check(b, g, b, 3, 3, 3, ONE, 10, quad=FAST)
    assert rep.passed and rep.ratio == pytest.approx(1.0, abs=1e-6)
    flip = lemma22_check(b.scaled(-1.0), g, b, 3, 3, 3, ONE, 10, quad=FAST)
    assert flip.passed and flip.ratio == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        lemma22_check(b, g, b, 2, 2, 2, ONE)


def test_theorem1_constant_and_examples():
    C = theorem1_constant(3, 0.0, 2, 2, ONE)[0].value
    assert C == pytest.approx(4 * math.pi * math.gamma(0.25) ** 2 / math.gamma(0.5), rel=1e-12)
    g = VelocityFunction.gaussian(3)
    e = ExponentTriple.holder(2, 2)
    rep = theorem1_check(g, g, e, NuMeasure(3), ONE, 10, FAST, method="radial")
    assert rep.passed and rep.constant == pytest.approx(C)
    zero = theorem1_check(VelocityFunction.zero(3), g, e, NuMeasure(3), ONE, 10, FAST)
    assert zero.passed and zero.lhs == 0
    with pytest.raises(DivergentConstant):
        theorem1_check(g, g, ExponentTriple.holder(1, math.inf), NuMeasure(3), ONE)


def test_theorem1_extremizer_ratio():
    from boltzgain.radial import extremizer_pair
    gp, hp = extremizer_pair(1e-3, 2, 2, 3)
    g = VelocityFunction.from_profile(3, gp)
    h = VelocityFunction.from_profile(3, hp)
    rep = theorem1_check(g, h, ExponentTriple.holder(2, 2), NuMeasure(3), ONE, method="radial")
    assert rep.passed and rep.ratio >= 0.995


@pytest.mark.parametrize("text, radial", [("gaussian:2", True), ("bump:1.5", True),
                                          ("shifted:bump:1,0.1,0.2,0", False),
                                          ("linearmod:gaussian:1", False), ("zero", True)])
def test_function_grammar(text, radial):
    f = VelocityFunction.parse(text, 3)
    assert f.radial == radial
    if radial:
        assert f.check_radial()


@pytest.mark.parametrize("text", ["bump:x", "shifted:bump:1,0.1", "cube:1"])
def test_function_grammar_rejects(text):
    with pytest.raises(ValueError):
        VelocityFunction.parse(text, 3)


@pytest.mark.parametrize("p, alpha", [(1, 0.0), (2, 1.0), (3, -1.0)])
def test_weighted_norm_of_radial_function_reduces_to_profile_norm(p, alpha):
    from boltzgain.radial import SigmaMeasure, lp_norm_radial
    f = VelocityFunction.gaussian(3, 0.8)
    want = (sphere_area(2) / 2) ** (1 / p) * lp_norm_radial(f.profile, p, SigmaMeasure(3, alpha))
    assert weighted_lp_norm(f, p, NuMeasure(3, alpha)) == pytest.approx(want, rel=1e-8)
