import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmacorr.realnum import GOLDEN, ONE, SQRT2, DomainError, FixedReal, fx_from_rational
from sigmacorr.spectral import (divisors, fourier_coeff_cl, fourier_coefficients,
                                oscillation_experiment, parseval_check, partial_weyl_sums,
                                weyl_inequality_check, weyl_sum, weyl_sums, xn_direct, xn_family,
                                xn_spectral)
from sigmacorr.testfn import TestFunction

ZERO = FixedReal(0)


def test_weyl_examples():
    assert weyl_sum(ZERO, 1, 7).value == 7
    assert abs(weyl_sum(fx_from_rational(1, 2), 1, 4).value) < 1e-14
    v = weyl_sum(fx_from_rational(1, 4), 1, 2).value
    assert abs(v - (1 + 1j)) < 1e-14


@settings(max_examples=30, deadline=None)
@given(st.integers(0, ONE - 1), st.lists(st.integers(-50, 50), min_size=1, max_size=5), st.integers(1, 60))
def test_weyl_against_exact_phases(raw, ns, N):
    alpha = FixedReal(raw)
    got = weyl_sums(alpha, np.array(ns), N)
    for n, g in zip(ns, got):
        # phase frac(n alpha j^2) from exact integers
        want = sum(cmath.exp(2j * math.pi * (((n * raw * j * j) % ONE) / ONE)) for j in range(1, N + 1))
        assert abs(g - want) < 1e-11


def test_partial_sums_are_cumulative():
    ns = np.arange(1, 6)
    S = partial_weyl_sums(SQRT2, ns, 40)
    for N in (1, 17, 40):
        assert np.allclose(S[:, N - 1], weyl_sums(SQRT2, ns, N), atol=1e-12)


def test_weyl_inequality():
    chk = weyl_inequality_check(SQRT2, 1000, 1000)
    assert chk.exponent <= 1.15 and not chk.violation and chk.diophantine
    ctl = weyl_inequality_check(ZERO, 50, 1000)
    assert ctl.exponent >= 1.9
    assert ctl.lhs == pytest.approx(50 * 1000**2)
    single = weyl_inequality_check(SQRT2, 1, 1000)
    assert single.lhs <= 1000**1.6


def test_coefficient_examples():
    tri = TestFunction.triangle()
    assert fourier_coeff_cl(tri, 1.0, 2, 3) == pytest.approx(0.25)
    assert fourier_coeff_cl(tri, 1.0, 2, 1) == 0.0
    assert fourier_coeff_cl(tri, 1.0, 7, 0) == pytest.approx(-1 / 7)


@pytest.mark.parametrize("N,sigma", [(6, 1.0), (9, 0.5), (12, 0.8)])
def test_coefficients_divisor_route_matches_enumeration(N, sigma):
    tri = TestFunction.triangle()
    M = int(math.floor(tri.support * N**sigma))
    table = fourier_coefficients(tri, sigma, N, M)
    for l_, v in table.items():
        assert fourier_coeff_cl(tri, sigma, N, l_) == pytest.approx(v, abs=1e-14)
    for l_ in range(1, 60):
        if l_ not in table:
            assert fourier_coeff_cl(tri, sigma, N, l_) == 0.0


@given(st.integers(1, 10**6))
def test_divisors(n):
    ds = divisors(n)
    assert ds == sorted(set(ds))
    assert all(n % d == 0 for d in ds)
    assert len(ds) == sum(1 for d in range(1, math.isqrt(n) + 1) if n % d == 0 for _ in ({d, n // d}))


@pytest.mark.parametrize("sigma", [0.0, 0.5, 1.0])
@pytest.mark.parametrize("alpha", [SQRT2, GOLDEN])
def test_xn_two_routes_agree_gaussian(sigma, alpha):
    f = TestFunction.gaussian()
    d = xn_direct(alpha, f, sigma, 300)
    s = xn_spectral(alpha, f, sigma, 300)
    assert abs(d.value - s.value) <= 1e-8 + s.tail_bound


def test_xn_zero_function():
    f = TestFunction.from_table(0.5, 0.5, np.zeros(5))
    assert xn_direct(SQRT2, f, 0.5, 50).value == 0.0
    assert xn_spectral(SQRT2, f, 0.5, 50).value == 0.0


def test_xn_direct_guard():
    with pytest.raises(DomainError):
        xn_direct(SQRT2, TestFunction.gaussian(), 0.5, 10**5)


def test_xn_golden_small():
    assert abs(xn_spectral(GOLDEN, TestFunction.triangle(), 0.5, 10**4).value) < 0.05


def test_xn_family_matches_single():
    f = TestFunction.triangle()
    Ns = [200, 201, 230]
    fam = xn_family(SQRT2, f, 0.5, Ns)
    for N, v in zip(Ns, fam):
        assert v == pytest.approx(xn_spectral(SQRT2, f, 0.5, N).value, abs=1e-12)


def test_parseval_small():
    chk = parseval_check(None, TestFunction.triangle(), 0.5, 20)
    assert chk.relative_gap < 1e-10


def test_oscillation():
    rows = oscillation_experiment(SQRT2, TestFunction.triangle(), 1.0, 0.4, [500, 1000, 2000])
    vals = [r[2] for r in rows]
    assert vals[0] > vals[1] > vals[2]
    zero = oscillation_experiment(SQRT2, TestFunction.triangle(), 1.0, 0.01, [500])
    assert zero[0][1] == 1 or zero[0][2] >= 0.0
    assert oscillation_experiment(SQRT2, TestFunction.triangle(), 1.0, 0.0, [300])[0][1:] == (1, pytest.approx(
        abs(xn_spectral(SQRT2, TestFunction.triangle(), 1.0, 301).value
            - xn_spectral(SQRT2, TestFunction.triangle(), 1.0, 300).value), abs=1e-12))
