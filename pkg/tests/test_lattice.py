import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmacorr.lattice import (Lattice2D, check_height_bound, check_lipschitz, check_siegel_estimate,
                               count_in_disk, count_in_disk_bruteforce, disk_points,
                               first_estimate_sum, fit_exponent, lipschitz_bound, predicted_exponents,
                               random_unimodular, shortest_vector, shortest_vector_bruteforce,
                               siegel_gaussian_sum)
from sigmacorr.realnum import GOLDEN, SQRT2, DomainError, FixedReal, RangeError, fx_from_rational

Z2 = Lattice2D.raw(np.eye(2))


def test_shortest_examples():
    assert shortest_vector(Z2)[1] == 1.0
    assert shortest_vector(Lattice2D.raw(np.diag([2.0, 0.5])))[1] == 0.5
    d = Lattice2D.delta(10, SQRT2)
    assert shortest_vector(d)[1] == shortest_vector_bruteforce(d, box=200)
    with pytest.raises(DomainError):
        Lattice2D.raw([[1, 2], [2, 4]])


def test_count_examples():
    assert count_in_disk(Z2, 1.0) == 5
    assert count_in_disk(Z2, 1.5) == 9
    d = Lattice2D.delta(30, SQRT2)
    assert count_in_disk(d, 3.0) == count_in_disk_bruteforce(d, 3.0)


def test_count_guard():
    with pytest.raises(RangeError):
        count_in_disk(Z2, 1e6)


def test_reduced_basis_is_basis():
    L = Lattice2D.delta(57.0, GOLDEN)
    U = np.array(L.transform, dtype=float)
    assert abs(round(np.linalg.det(U))) == 1
    B = L.reduced_basis
    b1, b2 = B[:, 0], B[:, 1]
    assert np.dot(b1, b1) <= np.dot(b2, b2) * (1 + 1e-12)
    assert abs(np.dot(b1, b2)) <= 0.5 * np.dot(b1, b1) * (1 + 1e-9)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_random_lattices_match_bruteforce(seed):
    rng = np.random.default_rng(seed)
    L = random_unimodular(rng, spread=1.5)
    v, a = shortest_vector(L)
    assert a == shortest_vector_bruteforce(L)
    assert a <= 2 / math.sqrt(3) + 1e-12
    mu = float(rng.uniform(0.1, 4.0))
    assert count_in_disk(L, mu) == count_in_disk_bruteforce(L, mu)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.5, 20.0), st.sampled_from([SQRT2, GOLDEN, fx_from_rational(3, 7)]), st.floats(0.2, 5.0))
def test_sheared_lattices_match_bruteforce(P, alpha, mu):
    L = Lattice2D.delta(P, alpha)
    assert shortest_vector(L)[1] == shortest_vector_bruteforce(L)
    assert count_in_disk(L, mu) == count_in_disk_bruteforce(L, mu)


def test_disk_points_centered():
    pts = disk_points(Z2, 1.0, center=(0.5, 0.5))
    # points v with ||v + u|| <= 1 for u = (1/2, 1/2)
    got = sorted(map(tuple, np.round(pts, 12).tolist()))
    want = sorted((float(x), float(y)) for x in range(-3, 3) for y in range(-3, 3)
                  if (x + 0.5) ** 2 + (y + 0.5) ** 2 <= 1)
    assert len(got) == len(want) == 4


def test_lipschitz():
    chk = check_lipschitz(Z2, 1.0)
    assert chk.count == 5 and chk.bound == 9 and chk.ok
    d = Lattice2D.delta(100, SQRT2)
    a = shortest_vector(d)[1]
    res = check_lipschitz(d, 0.5)
    assert res.ok and res.bound == lipschitz_bound(a, 0.5)
    with pytest.raises(DomainError):
        check_lipschitz(Lattice2D.raw(np.diag([2.0, 1.0])), 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_lipschitz_property(seed):
    rng = np.random.default_rng(seed)
    L = random_unimodular(rng, spread=1.5)
    a = shortest_vector(L)[1]
    assert check_lipschitz(L, float(rng.uniform(a, 10.0))).ok


def test_height_examples():
    h = check_height_bound(SQRT2, 2.0, 0.25, 1000.0)
    assert h.ok and h.bound == pytest.approx(2.0)
    zero = check_height_bound(FixedReal(0), None, None, 10.0)
    assert zero.a_inv == pytest.approx(10.0) and not zero.ok
    invs = [check_height_bound(GOLDEN, None, None, P).a_inv for P in (1e2, 1e3, 1e4)]
    assert max(invs) < 1.7
    with pytest.raises(DomainError):
        check_height_bound(SQRT2, 2.0, 0.25, 1.0)


def test_siegel_sums():
    theta1 = sum(math.exp(-math.pi * k * k) for k in range(-20, 21))
    assert siegel_gaussian_sum(Z2, (0, 0), math.pi) == pytest.approx(theta1**2, rel=1e-13)
    assert siegel_gaussian_sum(Z2, (0.5, 0.5), math.pi) < theta1**2
    assert siegel_gaussian_sum(Z2, (0, 0), 100.0) == pytest.approx(1.0, abs=1e-40)


def test_siegel_first_estimate_instantiation():
    N, sigma, eps = 100, 0.5, 0.1
    top = N ** (1 + sigma + eps)
    chk = check_siegel_estimate(N, 1 / top, SQRT2, (0.0, 0.0), 1 / 16, top, 1 / N)
    assert chk.ok
    assert check_siegel_estimate(1, 1, FixedReal(0), (0, 0), 1.0, 1.0, 1.0).ok


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_siegel_shift_property(u1, u2):
    assert check_siegel_estimate(20, 1 / 400, SQRT2, (u1, u2), 0.5, 30.0, 0.05).ok


def test_first_estimate_guards_and_controls():
    with pytest.raises(DomainError):
        first_estimate_sum(SQRT2, 0.0, 0.1, 100)
    with pytest.raises(RangeError):
        first_estimate_sum(SQRT2, 1.9, 0.1, 10**4)
    third = [first_estimate_sum(fx_from_rational(1, 3), 0.5, 0.1, N) for N in (100, 400)]
    assert third[0].kappa_hat == math.inf
    assert third[1].value > third[0].value  # no decay at a rational
    assert predicted_exponents(0.5, 0.1, 2.0) == pytest.approx((-0.4, -0.7))


def test_fit_exponent():
    xs = np.array([10, 20, 40, 80.0])
    assert fit_exponent(xs, 3 * xs**-0.37) == pytest.approx(-0.37)


def test_row_round_trip():
    for L in (Lattice2D.pq_alpha(3.0, 0.25, GOLDEN), Lattice2D.theta(0.3, 0.7, 1), Z2):
        back = Lattice2D.from_row(L.to_row())
        assert back.provenance[0] == L.provenance[0]
        assert np.array_equal(back.basis, L.basis)
    buf = io.StringIO()
    Z2.to_csv(buf)
    assert buf.getvalue().splitlines()[1] == "1,0,0,1,raw"
