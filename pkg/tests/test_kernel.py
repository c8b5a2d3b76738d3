import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import beta as euler_beta

from boltzgain.errors import DomainError
from boltzgain.kernel import (AngularKernel, Finiteness, XiMeasure, beta_b, finiteness_check,
                              grad_cutoff, sphere_area, xi_density)

ONE = AngularKernel.constant(1.0)


def test_sphere_areas():
    assert sphere_area(0) == 2.0
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    with pytest.raises(DomainError):
        sphere_area(-1)


def test_xi_density_examples():
    assert xi_density(0.5, XiMeasure(ONE, 3)) == 1.0
    assert xi_density(0.25, XiMeasure(ONE, 2)) == pytest.approx((0.25 * 0.75) ** -0.5, rel=1e-15)
    assert xi_density(0.5, XiMeasure(AngularKernel.power(1, 0.5), 3)) == 1.0
    with pytest.raises(DomainError):
        xi_density(1.0, XiMeasure(ONE, 3))


def test_finiteness_examples():
    assert finiteness_check(0, 0, XiMeasure(ONE, 3)) is Finiteness.FINITE
    assert finiteness_check(0, -0.75, XiMeasure(AngularKernel.power(1, 1), 3)) is Finiteness.DIVERGENT
    assert finiteness_check(-0.5, -0.5, XiMeasure(ONE, 2)) is Finiteness.DIVERGENT


def test_beta_examples():
    m3 = XiMeasure(ONE, 3)
    assert beta_b(0, 0, m3).value == pytest.approx(1.0, rel=1e-14)
    assert beta_b(-0.5, -0.5, m3).value == pytest.approx(math.pi, rel=1e-13)
    assert beta_b(0, 0, XiMeasure(ONE, 2)).value == pytest.approx(math.pi, rel=1e-13)
    res = beta_b(-0.75, -0.75, m3)
    want = math.gamma(0.25) ** 2 / math.gamma(0.5)
    assert res.value == pytest.approx(want, rel=1e-12)
    assert res.error_estimate <= 1e-10 * want


def test_beta_against_high_precision_quadrature():
    # independent oracle: tanh-sinh quadrature in 30-digit arithmetic
    mpmath.mp.dps = 30
    kern = AngularKernel.power(1.3, 0.3, 0.2)
    got = beta_b(-0.4, -0.1, XiMeasure(kern, 3)).value
    dens = lambda z: 1.3 * (2 - 2 * z) ** -0.3 * (2 * z) ** -0.2
    want = mpmath.quad(lambda z: z**-0.4 * (1 - z) ** -0.1 * dens(z), [0, 0.5, 1])
    assert got == pytest.approx(float(want), rel=1e-11)


def test_divergent_beta_has_no_error_estimate():
    res = beta_b(0, -1.5, XiMeasure(AngularKernel.power(1, 1), 3))
    assert res.divergent and res.value == math.inf and res.error_estimate is None


def test_cutoff_examples():
    assert grad_cutoff(XiMeasure(ONE, 3)).value == pytest.approx(4 * math.pi, rel=1e-14)
    assert grad_cutoff(XiMeasure(ONE, 2)).value == pytest.approx(2 * math.pi, rel=1e-14)
    assert grad_cutoff(XiMeasure(AngularKernel.power(1, 2), 3)).divergent


def test_cutoff_of_power_kernel_matches_direct_integral():
    # n = 3: int_{S^2} (1-s)^(-1/2) = 2 pi int_{-1}^1 (1-s)^(-1/2) ds = 2 pi * 2 sqrt 2
    res = grad_cutoff(XiMeasure(AngularKernel.power(1, 0.5), 3))
    assert res.value == pytest.approx(4 * math.sqrt(2) * math.pi, rel=1e-13)


def test_table_kernel(tmp_path):
    path = tmp_path / "b.csv"
    path.write_text("s,b\n-1,1\n0,2\n1,1\n")
    kern = AngularKernel.parse(f"table:{path}")
    assert kern.endpoint_exponents == (0.0, 0.0)
    # hat function averaged on [0, 1] in z
    assert beta_b(0, 0, XiMeasure(kern, 3)).value == pytest.approx(1.5, rel=1e-12)
    assert kern.reflected()(np.array([-0.5])) == pytest.approx(kern(np.array([0.5])))


@pytest.mark.parametrize("text, kind", [("constant:2", "constant"), ("power:1,0.25,0", "power"),
                                        ("power:1,0.25", "power")])
def test_kernel_grammar(text, kind):
    assert AngularKernel.parse(text).kind == kind


@pytest.mark.parametrize("text", ["constant:x", "power:1", "wobble:1", "constant:-1"])
def test_kernel_grammar_rejects(text):
    with pytest.raises(ValueError):
        AngularKernel.parse(text)


def test_table_validation():
    with pytest.raises(ValueError):
        AngularKernel.table([-1, 1], [1, -1])
    with pytest.raises(ValueError):
        AngularKernel.table([0, 1], [1, 1])


def test_from_halves_matches_direct_evaluation():
    kern = AngularKernel.power(2.0, 0.3, 0.4)
    s = np.linspace(-0.9, 0.9, 7)
    np.testing.assert_allclose(kern.from_halves((1 + s) / 2, (1 - s) / 2), kern(s), rtol=1e-14)


exps = st.floats(-0.95, 1.5)


@given(exps, exps)
def test_oracle_equivalence_with_euler_beta(x, y):
    got = beta_b(x, y, XiMeasure(ONE, 3)).value
    assert got == pytest.approx(euler_beta(x + 1, y + 1), rel=1e-10)


@given(exps, exps, st.sampled_from([2, 3, 4]))
def test_symmetry_for_even_kernels(x, y, n):
    m = XiMeasure(AngularKernel.power(1.0, 0.2, 0.2), n)
    if finiteness_check(x, y, m):
        assert beta_b(x, y, m).value == pytest.approx(beta_b(y, x, m).value, rel=1e-10)


@given(st.floats(-0.9, 0.0), st.floats(-0.9, 0.0), st.floats(0.0, 0.5))
def test_monotone_in_each_argument(x, y, d):
    m = XiMeasure(ONE, 3)
    lo = beta_b(x, y, m).value
    assert beta_b(x + d, y, m).value <= lo * (1 + 1e-12)
    assert beta_b(x, y + d, m).value <= lo * (1 + 1e-12)


@given(st.floats(-3.0, 2.0), st.floats(-3.0, 2.0), st.floats(0.0, 1.5), st.floats(0.0, 1.5),
       st.sampled_from([2, 3, 4]))
def test_finiteness_rule(x, y, am, ap, n):
    m = XiMeasure(AngularKernel.power(1.0, am, ap), n)
    w = (n - 3) / 2
    assert bool(finiteness_check(x, y, m)) == (x + w - ap > -1 and y + w - am > -1)


def test_divergence_is_visible_under_refinement():
    # truncating at z = delta, the integral of z^-1 grows like log(1/delta)
    m = XiMeasure(ONE, 3)
    assert not finiteness_check(-1.0, 0.0, m)
    vals = [beta_b(-1.0 + d, 0.0, m).value for d in (1e-1, 1e-2, 1e-3)]
    assert vals[0] < vals[1] < vals[2] and vals[2] > 900
