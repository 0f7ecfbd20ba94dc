import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from sigmacorr.fixedvec import FracArray
from sigmacorr.paircount import (CorrelationQuery, boundary_correction, count_pairs_bruteforce,
                                 count_pairs_sorted, distinct_gaps, pair_corr_functional,
                                 rk_bruteforce, spacing_measure)
from sigmacorr.realnum import GOLDEN, ONE, SQRT2, DomainError, FixedReal, fx_from_rational
from sigmacorr.seqgen import SequenceSpec, generate
from sigmacorr.testfn import TestFunction, TestFunction2D

QUARTER = [ONE // 4, 0, ONE // 4]


def both(theta, q):
    s, b = count_pairs_sorted(theta, q), count_pairs_bruteforce(theta, q)
    assert s == b
    return s


def test_small_example():
    est = both(QUARTER, CorrelationQuery(1.0, -0.8, 0.8, 3))
    assert est.ordered_pair_count == 6
    assert est.value == 2.0


def test_single_point():
    assert both([ONE // 3], CorrelationQuery(0.5, -3, 3, 1)).ordered_pair_count == 0


def test_full_circle():
    theta = generate(SequenceSpec("power", 17, SQRT2))
    est = both(theta, CorrelationQuery(0.0, 0.0, 1.0, 17))
    assert est.ordered_pair_count == 17 * 16
    assert est.window_covers_circle


def test_rational_residues():
    # alpha = 1/5: theta_j - theta_k is a multiple of 1/5, only 0 lies in +-0.1/100
    N = 100
    theta = generate(SequenceSpec("power", N, fx_from_rational(1, 5), d=2))
    est = count_pairs_sorted(theta, CorrelationQuery(1.0, -0.1 * N, 0.1 * N, N))
    want = sum(1 for j in range(1, N + 1) for k in range(1, N + 1)
               if j != k and (j * j - k * k) % 5 == 0)
    # (j^2 - k^2)/5 is exact in binary but the stored 1/5 is truncated; the
    # multiples of it still sit within N^2 ulps of an integer
    assert est.ordered_pair_count == want


def test_refusals():
    with pytest.raises(DomainError):
        CorrelationQuery(2.0, -1, 1, 10)
    with pytest.raises(DomainError):
        CorrelationQuery(1.0, -1, 1, 0)
    with pytest.raises(DomainError):
        count_pairs_sorted(QUARTER, CorrelationQuery(1.0, -1, 1, 4))


window = st.tuples(st.floats(-3, 3), st.floats(0, 4)).map(lambda t: (t[0], t[0] + t[1]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 300), st.floats(0, 1.99), window, st.integers(0, 2**64), st.integers(1, 4))
def test_sorted_matches_bruteforce(N, sigma, ab, seed, chunks):
    theta = generate(SequenceSpec("uniform_random", N, seed=seed))
    q = CorrelationQuery(sigma, ab[0], ab[1], N)
    assert count_pairs_sorted(theta, q, chunks=chunks) == count_pairs_bruteforce(theta, q)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 200), st.floats(0, 1.99), window, st.floats(0, 2))
def test_monotone_and_symmetric(N, sigma, ab, grow):
    theta = generate(SequenceSpec("power", N, GOLDEN, d=2))
    a, b = ab
    base = count_pairs_sorted(theta, CorrelationQuery(sigma, a, b, N)).ordered_pair_count
    wider = count_pairs_sorted(theta, CorrelationQuery(sigma, a - grow, b + grow, N)).ordered_pair_count
    mirror = count_pairs_sorted(theta, CorrelationQuery(sigma, -b, -a, N)).ordered_pair_count
    assert wider >= base
    assert mirror == base


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 150), st.floats(0.1, 1.9), st.floats(0.1, 1.5))
def test_scale_identity(N, sigma, b):
    # R^sigma on [a,b] equals R^1 on N^(1-sigma)[a,b] up to the normalisation factor
    theta = generate(SequenceSpec("power", N, SQRT2, d=2))
    s = count_pairs_sorted(theta, CorrelationQuery(sigma, -b, b, N))
    scale = N ** (1.0 - sigma)
    one = count_pairs_sorted(theta, CorrelationQuery(1.0, -b * scale, b * scale, N))
    assert abs(s.value - one.value * N ** (sigma - 1.0)) <= 1e-9 * max(1.0, s.value)


def test_equal_spacing():
    theta = [k * (ONE // 4) for k in range(4)]
    h = spacing_measure(theta, bins=4)
    assert np.allclose(h.gaps, 1.0)
    assert h.exact_gap_total == ONE
    assert distinct_gaps(theta) == 1
    with pytest.raises(DomainError):
        spacing_measure([0], bins=3)


def test_exact_gap_total_random():
    theta = generate(SequenceSpec("uniform_random", 1000, seed=7))
    h = spacing_measure(theta, bins=20)
    assert h.exact_gap_total == ONE
    assert abs(h.masses.sum() - 1.0) < 1e-12


@pytest.mark.parametrize("alpha", [SQRT2, GOLDEN, FixedReal.from_decimal("3.14159265358979")])
@pytest.mark.parametrize("N", [10, 100, 1000])
def test_three_gaps(alpha, N):
    assert distinct_gaps(generate(SequenceSpec("power", N, alpha, d=1))) <= 3


def test_rk_triples():
    theta = [0, ONE // 3, 2 * (ONE // 3)]
    assert rk_bruteforce(theta, 3, [(-1, 1), (-1, 1)], 1.0) == 2.0
    with pytest.raises(DomainError):
        rk_bruteforce(theta, 1, [], 1.0)


def test_rk2_matches_pair_count():
    N = 300
    theta = generate(SequenceSpec("power", N, SQRT2))
    r2 = rk_bruteforce(theta, 2, [(-0.5, 0.7)], 1.0 / N)
    est = count_pairs_sorted(theta, CorrelationQuery(1.0, -0.5, 0.7, N))
    assert math.isclose(r2, est.value, rel_tol=1e-12)


def _rk_naive(theta, k, boxes, scale):
    x = np.array(FracArray.from_raws(theta).to_float())
    n = len(x)
    import itertools
    count = 0
    for tup in itertools.permutations(range(n), k):
        ok = True
        for i, (a, b) in enumerate(boxes):
            d = x[tup[i]] - x[tup[i + 1]]
            d -= math.floor(d - scale * a)  # representative at or above the left end
            ok &= d <= scale * b
        count += ok
    return count / n


@pytest.mark.parametrize("k", [3, 4])
def test_rk_against_enumeration(k):
    N = 12
    theta = generate(SequenceSpec("uniform_random", N, seed=k)).raws()
    boxes = [(-1.3, 0.9), (-0.4, 2.1), (-2.0, 0.5)][: k - 1]
    assert rk_bruteforce(theta, k, boxes, 1.0 / 3) == _rk_naive(theta, k, boxes, 1.0 / 3)


def test_rk3_uniform_baseline():
    N = 300
    theta = generate(SequenceSpec("uniform_random", N, seed=99))
    r3 = rk_bruteforce(theta, 3, [(0, 1), (0, 1)], 1.0 / N)
    assert abs(r3 - 1.0) <= 5 / math.sqrt(N)


def test_functional_zero_function():
    f = TestFunction.from_callable(lambda s: 0.0 * s, fhat=lambda u: 0.0 * u, horizon=1.0)
    theta = generate(SequenceSpec("power", 20, SQRT2))
    assert pair_corr_functional(f, TestFunction2D.indicator_square(-1, 1), theta, 0.5, 20) == 0.0


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 120), st.floats(0, 1.5), window)
def test_functional_indicator_relation(N, sigma, ab):
    # R counts membership, the functional counts representatives; they agree
    # while the scaled window is shorter than one period
    assume((ab[1] - ab[0]) / N**sigma < 0.999)
    theta = generate(SequenceSpec("power", N, SQRT2, d=2))
    q = CorrelationQuery(sigma, ab[0], ab[1], N)
    f = TestFunction.indicator(*ab)
    val = pair_corr_functional(f, TestFunction2D.indicator_square(-1, 1), theta, sigma, N)
    want = 4 * count_pairs_sorted(theta, q).value + boundary_correction(theta, q)
    assert math.isclose(val, want, rel_tol=1e-12, abs_tol=1e-12)
