"""Quadratic exponential forms, sheared-lattice theta sums and numeric checks
of the identities that turn the pair-correlation error into lattice sums.

Omega(x, y) = pi i (a (x^2 - y^2) + i b (x^2 + y^2)) + 2 pi i <xi, (x, y)>
Psi(x, y)   = exp(Omega(x + y, x - y))

Identity verifiers truncate every sum by the Euclidean norm of the point at
which Omega is evaluated.  The rearrangements behind the identities are
bijections between such points, so the truncated identities are exact and
the residual measures rounding only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .realnum import FRAC_MASK, ONE, DomainError, FixedReal
from .fixedvec import MASK64, U64, mul_u64, sub, to_float

TWO_PI = 2.0 * math.pi
MIN_B_VERIFY = 0.05


@dataclass(frozen=True)
class ThetaParams:
    frak_a: float
    frak_b: float
    xi: tuple = (0.0, 0.0)
    eta: tuple = (0.0, 0.0)
    parity: int = 0
    frak_a_exact: Optional[FixedReal] = None  # exact real part, when available

    def __post_init__(self):
        if not self.frak_b > 0:
            raise DomainError("imaginary part frak_b must be positive")
        if self.parity not in (0, 1):
            raise DomainError("parity must be 0 or 1")

    def with_shift(self, xi=None, eta=None, parity=None) -> "ThetaParams":
        return ThetaParams(self.frak_a, self.frak_b,
                           self.xi if xi is None else tuple(xi),
                           self.eta if eta is None else tuple(eta),
                           self.parity if parity is None else parity,
                           self.frak_a_exact)


def default_radius(frak_b: float) -> int:
    """Truncation radius with discarded Gaussian mass below e^-45."""
    return int(math.ceil(math.sqrt(45.0 / (math.pi * frak_b))))


def omega(params: ThetaParams, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = params.frak_a, params.frak_b
    xi1, xi2 = params.xi
    return (math.pi * 1j * (a * (x * x - y * y)) - math.pi * b * (x * x + y * y)
            + TWO_PI * 1j * (xi1 * x + xi2 * y))


def psi(params: ThetaParams, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.exp(omega(params, x + y, x - y))


# ---------------------------------------------------------------------------
# truncated sums over affine images of Z^2

def _grid(extent: int):
    r = np.arange(-extent, extent + 1, dtype=float)
    return np.meshgrid(r, r, indexing="ij")


def _sum_exp_omega(params, X, Y, keep, R):
    """Sum of exp(Omega(X, Y)) over kept points with ||(X, Y)|| <= R."""
    mask = keep & (X * X + Y * Y <= R * R + 1e-9)
    if not mask.any():
        return 0j
    return complex(np.exp(omega(params, X[mask], Y[mask])).sum())


def _radius(params, R):
    if R is None:
        return float(default_radius(params.frak_b))
    if R < 0:
        raise DomainError("truncation radius must be non-negative")
    return float(R)


def _check_verify_domain(params):
    if params.frak_b < MIN_B_VERIFY:
        raise DomainError(f"identity verifiers need frak_b >= {MIN_B_VERIFY}")


def lhs_sum(params: ThetaParams, R=None) -> complex:
    """sum over |x| != |y| of exp(Omega(x, y)), ||(x, y)|| <= R."""
    R = _radius(params, R)
    x, y = _grid(int(math.ceil(R)) + 1)
    return _sum_exp_omega(params, x, y, np.abs(x) != np.abs(y), R)


def quarter_rotation_rhs(params: ThetaParams, R=None) -> complex:
    """sum_{xy != 0} Psi(x, y) + sum Psi(x - 1/2, y + 1/2), truncated alike."""
    R = _radius(params, R)
    x, y = _grid(int(math.ceil(R)) + 2)
    first = _sum_exp_omega(params, x + y, x - y, (x != 0) & (y != 0), R)
    second = _sum_exp_omega(params, x + y, x - y - 1.0, np.ones_like(x, dtype=bool), R)
    return first + second


def verify_quarter_rotation(params: ThetaParams, R=None) -> float:
    _check_verify_domain(params)
    return abs(lhs_sum(params, R) - quarter_rotation_rhs(params, R))


def cancellation_terms(params: ThetaParams, R=None) -> dict:
    """The three groups on the right of the cancellation identity."""
    R = _radius(params, R)
    x, y = _grid(2 * int(math.ceil(R)) + 2)
    on = np.ones_like(x, dtype=bool)

    def s(X, Y, keep=on):
        return _sum_exp_omega(params, X, Y, keep, R)

    # Psi(u, v) = exp(Omega(u + v, u - v))
    full = s(x + y, x - y)
    col = s(y, -y, x == 0)  # Psi(0, y), one-variable sum
    row = s(x, x, y == 0)   # Psi(x, 0)
    half_half = s((x + y) / 2, (x - y) / 2)
    one_half = s(x + y / 2, x - y / 2)
    half_one = s(x / 2 + y, x / 2 - y)
    return {
        "origin": complex(np.exp(omega(params, 0.0, 0.0))),
        "integer_group": 2 * full - col - row,
        "half_group": half_half - one_half - half_one,
    }


def verify_cancellation(params: ThetaParams, R=None) -> float:
    _check_verify_domain(params)
    terms = cancellation_terms(params, R)
    return abs(lhs_sum(params, R) - sum(terms.values()))


# ---------------------------------------------------------------------------
# lattice theta sums C_b

def lattice_basis(frak_a: float, frak_b: float, parity: int) -> np.ndarray:
    """g = diag(1/sqrt(2b), sqrt(2b)) [[1, 2a], [0, 1]] diag(2^p, 2^-p)."""
    r = math.sqrt(2.0 * frak_b)
    d = np.diag([1.0 / r, r]) @ np.array([[1.0, 2.0 * frak_a], [0.0, 1.0]])
    return d @ np.diag([2.0**parity, 2.0**-parity])


def _row_offsets(params: ThetaParams, m2: np.ndarray) -> np.ndarray:
    """o(m2) = frak_a * 2^(1 - 2p) * m2, reduced mod 1 when that is allowed."""
    p = params.parity
    if params.frak_a_exact is None or params.eta[0] != 0.0:
        o = params.frak_a * 2.0 ** (1 - 2 * p) * m2
        return o if params.eta[0] != 0.0 else o - np.floor(o)
    # exact register of frac(frak_a * 2^(1-2p)); for p = 1 this halves frak_a
    raw = params.frak_a_exact.raw
    reg = ((raw << 1) if p == 0 else (raw >> 1)) & FRAC_MASK
    mag = np.abs(m2).astype(U64)
    hi, lo = mul_u64(np.full(mag.shape, reg >> 64, U64), np.full(mag.shape, reg & MASK64, U64), mag)
    neg = m2 < 0
    if neg.any():
        nhi, nlo = sub(np.zeros(int(neg.sum()), U64), np.zeros(int(neg.sum()), U64), hi[neg], lo[neg])
        hi = hi.copy()
        lo = lo.copy()
        hi[neg], lo[neg] = nhi, nlo
    return to_float(hi, lo)


def theta_C_many(params: ThetaParams, xi1, eta2=0.0, R=None) -> np.ndarray:
    """C_b(z, (xi1_k, xi_2), (eta_1, eta2_k)) for arrays of xi1 and eta2.

    sqrt(2/b) * sum over v in Lambda_{z,p} with v_2 != 0 of
    exp(-pi ||v + xi/sqrt(2b)||^2 + 2 pi i <v, eta>/sqrt(2b)), restricted to
    ||v + xi/sqrt(2b)|| <= R.  With eta_1 = 0 the row offsets are reduced
    mod 1 (exactly, when frak_a_exact is set) since the phase ignores m1.
    """
    if R is None:
        R = math.sqrt(45.0 / math.pi)
    b, p = params.frak_b, params.parity
    r2b = math.sqrt(2.0 * b)
    xi1 = np.atleast_1d(np.asarray(xi1, dtype=float))
    eta2 = np.broadcast_to(np.asarray(eta2, dtype=float), xi1.shape)
    xi2, eta1 = params.xi[1], params.eta[0]
    step = r2b * 2.0**-p  # v2 = step * m2
    shift2 = xi2 / r2b
    lo_m2 = int(math.floor((-R - shift2) / step))
    hi_m2 = int(math.ceil((R - shift2) / step))
    m2 = np.arange(lo_m2, hi_m2 + 1)
    m2 = m2[m2 != 0]
    w2 = step * m2 + shift2
    ok = np.abs(w2) <= R
    m2, w2 = m2[ok], w2[ok]
    out = np.zeros(xi1.shape, dtype=complex)
    if m2.size == 0:
        return out
    rho = np.sqrt(np.maximum(R * R - w2 * w2, 0.0)) * r2b * 2.0**-p  # half-width in m1 units
    off = _row_offsets(params, m2)
    # w1 = 2^p (m1 + off + xi1 2^-p) / sqrt(2b)
    scale = 2.0**p / r2b
    vert = np.exp(-math.pi * w2 * w2)
    kmax = int(np.max(np.ceil(2 * rho))) + 2
    for k0 in range(0, xi1.size, 64):
        x1 = xi1[k0:k0 + 64]
        e2 = eta2[k0:k0 + 64]
        r = off[:, None] + x1[None, :] * 2.0**-p
        if eta1 == 0.0:
            r = r - np.floor(r)
        start = np.ceil(-r - rho[:, None])
        acc = np.zeros(r.shape, dtype=complex)
        for j in range(kmax):
            m1 = start + j
            t = m1 + r
            inside = np.abs(t) <= rho[:, None]
            if not inside.any():
                continue
            w1 = scale * t
            val = np.exp(-math.pi * w1 * w1) * vert[:, None]
            if eta1 != 0.0:
                v1 = 2.0**p * (m1 + off[:, None]) / r2b
                val = val * np.exp(TWO_PI * 1j * v1 * eta1 / r2b)
            acc += np.where(inside, val, 0.0)
        phase = np.exp(TWO_PI * 1j * np.outer(step * m2, e2) / r2b)
        out[k0:k0 + 64] = (acc * phase).sum(axis=0)
    return math.sqrt(2.0 / b) * out


def theta_C(params: ThetaParams, truncation_radius=None) -> complex:
    return complex(theta_C_many(params, params.xi[0], params.eta[1], truncation_radius)[0])


def theta_C_bruteforce(params: ThetaParams, box: int = 50) -> complex:
    """Direct sum over |m1|, |m2| <= box (oracle for small cases)."""
    g = lattice_basis(params.frak_a, params.frak_b, params.parity)
    r2b = math.sqrt(2.0 * params.frak_b)
    m = np.arange(-box, box + 1, dtype=float)
    m1, m2 = np.meshgrid(m, m, indexing="ij")
    keep = m2 != 0
    v1 = g[0, 0] * m1 + g[0, 1] * m2
    v2 = g[1, 1] * m2
    w1 = v1 + params.xi[0] / r2b
    w2 = v2 + params.xi[1] / r2b
    val = np.exp(-math.pi * (w1 * w1 + w2 * w2) + TWO_PI * 1j * (v1 * params.eta[0] + v2 * params.eta[1]) / r2b)
    return complex(math.sqrt(2.0 / params.frak_b) * val[keep].sum())


# ---------------------------------------------------------------------------
# integrated identity

def odd_string(frak_b: float, s) -> np.ndarray:
    """sqrt(2/b) sum_x exp(-pi (2x + 1 + s)^2 / (2b))."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    span = math.sqrt(2.0 * frak_b * 45.0 / math.pi) + 2.0
    lo = int(math.floor((-span - 1.0 - s.max()) / 2.0))
    hi = int(math.ceil((span - 1.0 - s.min()) / 2.0))
    x = np.arange(lo, hi + 1, dtype=float)
    arg = 2.0 * x[None, :] + 1.0 + s[:, None]
    return math.sqrt(2.0 / frak_b) * np.exp(-math.pi * arg * arg / (2.0 * frak_b)).sum(axis=1)


def bound_rhs_pointwise(params: ThetaParams, xi1, xi2, R_lattice=None) -> np.ndarray:
    """Right-hand integrand at xi: 1 - odd string + C_0(s e1, t e2) - C_1((s+1) e1, t e2),
    s = xi1 + xi2, t = xi1 - xi2.

    The second theta sum carries s + 1: the half-shifted Gaussians in the
    derivation are centred at 2x + 1 + a y + s.
    """
    xi1 = np.asarray(xi1, dtype=float).ravel()
    xi2 = np.asarray(xi2, dtype=float).ravel()
    s = xi1 + xi2
    t = xi1 - xi2
    base = params.with_shift(xi=(0.0, 0.0), eta=(0.0, 0.0))
    c0 = theta_C_many(base.with_shift(parity=0), s, t, R_lattice)
    c1 = theta_C_many(base.with_shift(parity=1), s + 1.0, t, R_lattice)
    return 1.0 - odd_string(params.frak_b, s) + c0 - c1


def lhs_pointwise(params: ThetaParams, xi1, xi2, R=None) -> np.ndarray:
    R = _radius(params, R)
    x, y = _grid(int(math.ceil(R)) + 1)
    keep = (np.abs(x) != np.abs(y)) & (x * x + y * y <= R * R + 1e-9)
    X, Y = x[keep], y[keep]
    base = np.exp(omega(params.with_shift(xi=(0.0, 0.0)), X, Y))
    xi1 = np.asarray(xi1, dtype=float).ravel()
    xi2 = np.asarray(xi2, dtype=float).ravel()
    out = np.empty(xi1.size, dtype=complex)
    for k0 in range(0, xi1.size, 256):
        ph = np.exp(TWO_PI * 1j * (np.outer(xi1[k0:k0 + 256], X) + np.outer(xi2[k0:k0 + 256], Y)))
        out[k0:k0 + 256] = ph @ base
    return out


def _as_weight(F):
    if F is None:
        return lambda u, v: np.zeros(np.shape(u))
    if hasattr(F, "fhat"):
        return lambda u, v: np.real(F.fhat(u, v))
    return F


def _extent(F, default=4.5):
    ext = F.fhat_support() if hasattr(F, "fhat_support") else math.inf
    return float(ext) if math.isfinite(ext) else default


def verify_bound_exp_sum(params: ThetaParams, F, R=None, quad_grid: int = 64,
                         extent=None) -> float:
    """|LHS - RHS| of the integrated identity, both sides by one midpoint rule.

    F is a two-variable test function (its Fourier side psi_hat is the
    weight, as in the reduction step) or a plain callable F(u, v); it must be
    even in the second variable.  The grid is symmetric in xi_2, so the rule
    respects that symmetry exactly.
    """
    weight = _as_weight(F)
    L = _extent(F) if extent is None else float(extent)
    h = 2.0 * L / quad_grid
    c = -L + h * (np.arange(quad_grid) + 0.5)
    u, v = np.meshgrid(c, c, indexing="ij")
    w = np.asarray(weight(u, v), dtype=float)
    if not np.allclose(w, np.asarray(weight(u, -v), dtype=float), rtol=1e-12, atol=1e-14):
        raise DomainError("F must be even in its second variable")
    if not np.any(w):
        return 0.0
    nz = w != 0
    lhs = lhs_pointwise(params, u[nz], v[nz], R)
    rhs = bound_rhs_pointwise(params, u[nz], v[nz])
    return float(abs(np.sum(w[nz] * (lhs - rhs)) * h * h))


# ---------------------------------------------------------------------------
# reduction to lattice sums

def z_for(alpha: FixedReal, n: int, N: int) -> ThetaParams:
    """z = 2 n alpha + i/(pi N^2), with the real part kept exactly."""
    a_exact = FixedReal(2 * n * alpha.raw)
    return ThetaParams(float(a_exact), 1.0 / (math.pi * N * N), frak_a_exact=a_exact)


REDUCTION_MAX_N = 2000


def reduction_error_bound(alpha: FixedReal, sigma: float, eps: float, N: int, psi,
                          quad_grid: int = 32, extent=None) -> float:
    """(1/N^2) int |psi_hat(xi)| sum_{1<=|n|<=N^(sigma+eps)} sum_b
    C_b(z_n, sqrt(pi/2) N <xi, (1,1)> e1, 0) dxi on a coarse midpoint grid.

    The integrand depends on xi only through s = xi1 + xi2, so the grid is
    collapsed onto its distinct values of s.
    """
    if N > REDUCTION_MAX_N:
        raise DomainError(f"cost guard: N <= {REDUCTION_MAX_N}")
    weight = _as_weight(psi)
    L = _extent(psi, default=3.5) if extent is None else float(extent)
    h = 2.0 * L / quad_grid
    idx = np.arange(quad_grid)
    c = -L + h * (idx + 0.5)
    u, v = np.meshgrid(c, c, indexing="ij")
    w = np.abs(np.asarray(weight(u, v), dtype=float)) * h * h
    if not np.any(w):
        return 0.0
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    key = (ii + jj).ravel()
    wsum = np.bincount(key, weights=w.ravel(), minlength=2 * quad_grid - 1)
    s_vals = 2.0 * (-L + h * 0.5) + h * np.arange(2 * quad_grid - 1)
    live = wsum > 0
    s_vals, wsum = s_vals[live], wsum[live]
    M = int(math.floor(N ** (sigma + eps) + 1e-9))
    shift = math.sqrt(math.pi / 2.0) * N * s_vals
    total = 0.0
    for n in range(1, M + 1):
        for sgn in (1, -1):
            z = z_for(alpha, sgn * n, N)
            for p in (0, 1):
                vals = theta_C_many(z.with_shift(parity=p), shift).real
                total += float(np.dot(wsum, vals))
    return total / (N * N)


__all__ = ["ThetaParams", "omega", "psi", "lhs_sum", "lhs_pointwise", "bound_rhs_pointwise", "theta_C", "theta_C_many", "theta_C_bruteforce",
           "verify_quarter_rotation", "verify_cancellation", "cancellation_terms",
           "verify_bound_exp_sum", "reduction_error_bound", "lattice_basis", "default_radius",
           "z_for", "ONE"]
