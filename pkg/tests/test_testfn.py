import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmacorr.realnum import DomainError
from sigmacorr.testfn import (TestFunction, TestFunction2D, _fejer_sum, build_approx_pair,
                              build_tensor_pair, eval_time_domain, sample_pair)


def test_closed_form_values():
    assert eval_time_domain(TestFunction.poisson_kernel(), 0.0) == pytest.approx(1 / math.pi, abs=1e-15)
    assert eval_time_domain(TestFunction.gaussian(), 0.0) == 1.0
    tri = TestFunction.triangle()
    assert eval_time_domain(tri, 0.0) == 1.0
    # the inverse transform of the stored table gives the same value
    assert tri.quadrature_value(0.0)[0] == pytest.approx(1.0, abs=1e-6)


def test_triangle_quadrature_matches_sinc2():
    tri = TestFunction.triangle()
    s = np.linspace(-6, 6, 97)
    assert np.max(np.abs(tri.quadrature_value(s) - np.sinc(s) ** 2)) < 1e-6


def test_indicator_transform_at_zero():
    assert TestFunction.indicator(-0.3, 0.9).fhat(0.0) == pytest.approx(1.2)


def _direct_periodized(f, x, c, n0):
    n = np.arange(-n0, n0 + 1)
    return f.value(c * (x[:, None] + n)).sum(axis=1)


@pytest.mark.parametrize("c", [0.3, 1.0, 2.7, 31.6])
def test_periodized_gaussian_and_poisson(c):
    x = np.linspace(0, 1, 41, endpoint=False)
    g = TestFunction.gaussian()
    assert np.allclose(g.periodized(x, c), _direct_periodized(g, x, c, 200), rtol=1e-13, atol=1e-15)
    p = TestFunction.poisson_kernel()
    # the direct Poisson sum converges like 1/n0; compare with a tail-corrected sum
    n0 = 200000
    tail = 2.0 / (math.pi * c * c * n0)
    assert np.allclose(p.periodized(x, c), _direct_periodized(p, x, c, n0) + tail, rtol=1e-8)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 60.0), st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=8))
def test_periodized_sinc2_matches_dual_sum(c, xs):
    x = np.array(xs)
    tri = TestFunction.triangle()
    got = tri.periodized(x, c)
    want = _fejer_sum(x, c)
    assert np.allclose(got, want, rtol=1e-10, atol=1e-12)


def test_periodized_sinc2_integer_scale():
    tri = TestFunction.triangle()
    x = np.array([0.0, 0.1, 0.25, 0.5])
    c = 5.0
    with np.errstate(invalid="ignore", divide="ignore"):
        fejer = (np.sin(math.pi * c * x) / (c * np.sin(math.pi * x))) ** 2
    fejer[0] = 1.0
    assert np.allclose(tri.periodized(x, c), fejer, atol=1e-13)


def test_periodized_indicator_counts():
    f = TestFunction.indicator(-0.5, 0.5)
    x = np.array([0.0, 0.05, 0.3])
    assert list(f.periodized(x, 10.0)) == [1.0, 1.0, 0.0]
    assert list(f.periodized(x, 0.5)) == [3.0, 2.0, 2.0]


def test_callable_without_horizon_refused():
    f = TestFunction.from_callable(lambda s: s)
    with pytest.raises(DomainError):
        f.periodized(np.array([0.1]), 1.0)


def test_approx_pair_unit_interval():
    hm, hp, rep = build_approx_pair((0.0, 1.0), None, 0.3, return_report=True)
    assert 1.0 <= hp.fhat(0.0).real <= 1.3
    assert 0.7 <= hm.fhat(0.0).real <= 1.0
    s, vm, vp = sample_pair(hm, hp, -3.0, 4.0, 10_000)
    target = ((s >= 0.0) & (s <= 1.0)).astype(float)
    assert len(s) >= 10_000
    assert np.all(vm <= target + 1e-8) and np.all(target <= vp + 1e-8)


def test_approx_pair_degenerate_interval():
    eps = 0.2
    hm, hp = build_approx_pair((0.0, 0.0), None, eps)
    assert hp.fhat(0.0).real <= eps
    assert hm.fhat(0.0).real >= -eps


def test_approx_pair_weighted():
    g = lambda s: np.exp(np.asarray(s) ** 2)  # noqa: E731
    eps = 0.3
    hm, hp = build_approx_pair((-1.0, 1.0), g, eps)
    s, vm, vp = sample_pair(hm, hp, -4.0, 4.0, 10_000)
    target = np.where(np.abs(s) <= 1.0, np.exp(s**2), 0.0)
    assert np.all(vm <= target + 1e-8) and np.all(target <= vp + 1e-8)
    xs = np.linspace(-1, 1, 200_001)
    integral = float(np.trapezoid(np.exp(xs**2), xs))
    assert integral <= hp.fhat(0.0).real <= integral + eps
    assert integral - eps <= hm.fhat(0.0).real <= integral


def test_tensor_pair_sandwich():
    minus, plus, hm, hp = build_tensor_pair((-1.0, 1.0), None, 0.3)
    x = np.linspace(-2.5, 2.5, 41)
    X, Y = np.meshgrid(x, x)
    target = ((np.abs(X) <= 1) & (np.abs(Y) <= 1)).astype(float)
    lo = minus.value(X, Y)
    hi = plus.value(X, Y)
    assert np.all(lo <= target + 1e-6) and np.all(target <= hi + 1e-6)
    assert plus.fhat_support() == hp.support


def test_approx_pair_rejects_bad_eps():
    with pytest.raises(DomainError):
        build_approx_pair((0, 1), None, 0.0)


def test_2d_helpers():
    g = TestFunction2D.gaussian_window()
    assert g.value(0.0, 0.0) == 1.0
    sq = TestFunction2D.index_square(10)
    assert sq.index_radius(10) == 10
    assert sq.value(0.05, 0.5) == 0.0 and sq.value(0.1, 1.0) == 1.0
