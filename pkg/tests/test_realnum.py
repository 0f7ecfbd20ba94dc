import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sigmacorr.realnum import (FRAC_BITS, ONE, DomainError, FixedReal, GOLDEN, InsufficientDataError,
                               RangeError, SQRT2, cf_expand, dioph_type_estimate, fx_frac_power,
                               fx_from_rational, fx_sqrt_int, parse_real)


def test_from_rational_examples():
    third = fx_from_rational(1, 3)
    assert third.raw == ONE // 3
    assert fx_from_rational(0, 1).raw == 0
    x = fx_from_rational(7, 5)
    assert x.int_part == 1
    assert x.frac_part == (2 * ONE) // 5
    with pytest.raises(DomainError):
        fx_from_rational(1, 0)
    with pytest.raises(RangeError):
        fx_from_rational(2**70, 1)


@given(st.integers(-10**12, 10**12), st.integers(1, 10**12))
def test_from_rational_truncation_error(p, q):
    x = fx_from_rational(p, q)
    err = Fraction(p, q) - x.to_fraction()
    assert 0 <= err < Fraction(1, ONE)


def test_sqrt_examples():
    assert fx_sqrt_int(4).raw == 2 * ONE
    assert fx_sqrt_int(1).raw == ONE
    r = fx_sqrt_int(2).raw
    # |r^2 - 2| < 2^-126 checked in 256-bit integer arithmetic
    assert abs(r * r - 2 * ONE * ONE) < ONE * ONE >> 126


@given(st.integers(1, 10**15))
def test_sqrt_is_correctly_rounded(m):
    r = fx_sqrt_int(m).raw
    target = Fraction(m) * ONE * ONE
    assert abs(Fraction(r) ** 2 - target) <= abs(Fraction(r + 1) ** 2 - target)
    assert abs(Fraction(r) ** 2 - target) <= abs(Fraction(r - 1) ** 2 - target)


def test_frac_power_examples():
    third = fx_from_rational(1, 3)
    assert fx_frac_power(third, 2, 2).raw == (4 * third.raw) % ONE
    assert abs(float(fx_frac_power(third, 2, 2)) - 1 / 3) < 1e-15
    assert fx_frac_power(SQRT2, 1, 1).raw == SQRT2.frac_part
    assert fx_frac_power(SQRT2, 10, 2).to_decimal(8) == "0.42135623"
    with pytest.raises(RangeError):
        fx_frac_power(SQRT2, 2**32, 2)


SQRT2_256 = math.isqrt(2 << 512)  # sqrt(2) * 2^256, floor


@settings(max_examples=300)
@given(st.integers(1, 3 * 10**9), st.integers(1, 2))
def test_frac_power_against_wide_oracle(n, d):
    if n**d >= 2**63:
        return
    got = fx_frac_power(SQRT2, n, d).raw
    exact = (SQRT2_256 * n**d) % (1 << 256)  # frac of the wide product, 256 bits
    err = abs(Fraction(got, ONE) - Fraction(exact, 1 << 256))
    err = min(err, 1 - err)
    assert err <= Fraction(n**d + 1, ONE)


def test_cf_examples():
    g = cf_expand(GOLDEN)
    assert set(g.coefficients[:40]) == {1}
    r = cf_expand(fx_from_rational(7, 5))
    assert r.coefficients == (1, 2, 2) and r.terminated
    s = cf_expand(SQRT2)
    assert s.coefficients[:30] == (1,) + (2,) * 29
    q = [c[1] for c in s.convergents]
    assert all(q[k + 1] == 2 * q[k] + q[k - 1] for k in range(1, 25))


@pytest.mark.parametrize("alpha", [GOLDEN, SQRT2, parse_real("pi"), fx_sqrt_int(7), fx_from_rational(355, 113)])
def test_cf_invariants(alpha):
    cf = cf_expand(alpha)
    conv = cf.convergents
    for k in range(1, len(conv)):
        (p, q), (pp, qp) = conv[k], conv[k - 1]
        assert p * qp - pp * q == (-1) ** (k - 1)
        assert q > qp or (k == 1 and q == qp)
    for k in range(len(conv) - 2):
        p, q = conv[k]
        assert cf.error(k) < 1.0 / conv[k + 1][1]


def test_dioph_type_examples():
    # least-squares slope estimator; see the ledger for the 1e-3 lower slack
    assert 2.0 - 1e-3 <= dioph_type_estimate(cf_expand(GOLDEN), 10**6) <= 2.05
    assert 2.0 - 1e-3 <= dioph_type_estimate(cf_expand(SQRT2), 10**6) <= 2.1
    with pytest.raises(InsufficientDataError):
        dioph_type_estimate(cf_expand(fx_from_rational(1, 2)), 10**6)


def test_hex_and_decimal_round_trip():
    for x in (SQRT2, GOLDEN, fx_from_rational(-7, 3), FixedReal(0)):
        assert FixedReal.from_hex(x.to_hex()) == x
    assert parse_real("0.25").raw == ONE // 4
    assert parse_real("sqrt(2)") == SQRT2
    assert parse_real("1/4").raw == ONE >> 2


@given(st.integers(-(2**60), 2**60), st.integers(0, ONE - 1))
def test_frac_in_unit_interval(i, f):
    x = FixedReal.from_parts(i, f)
    assert 0 <= x.frac().raw < ONE
    assert x.int_part == i and x.frac_part == f
    assert FRAC_BITS == 128
