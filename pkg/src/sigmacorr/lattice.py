"""Two-dimensional lattices: sheared lattices diag(P, Q) [[1, alpha], [0, 1]] Z^2,
Lagrange-Gauss reduction, exact disk counts and numeric checks of the
counting, height and Gaussian-sum estimates used for the lattice sums.

Every lattice point is evaluated from its integer coordinates in the
construction basis by one canonical routine, so the fast enumerator and the
brute-force oracles decide membership with identical binary64 values.  For
sheared lattices the first coordinate x + alpha z is formed from the exact
128-bit value of alpha, which keeps full relative precision when it is tiny.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .fixedvec import MASK64, U64, mul_u64, sub, to_float
from .realnum import (FRAC_BITS, FRAC_MASK, DomainError, FixedReal, InsufficientDataError,
                      RangeError, cf_expand, dioph_constant_estimate, dioph_type_estimate)
from .theta import theta_C_many, z_for

COUNT_LIMIT = 1 << 32
POINT_LIMIT = 50_000_000
SIEGEL_TAIL = 1e-12
FIRST_ESTIMATE_MAX_TERMS = 10**6
KAPPA_HEIGHT = 10**12


# ---------------------------------------------------------------------------
# exact evaluation of x + alpha z

def _shear_coordinate(alpha: FixedReal, x, z) -> np.ndarray:
    """x + alpha z in binary64 for int64 arrays x, z, from the exact value of alpha."""
    x = np.asarray(x, dtype=np.int64)
    z = np.asarray(z, dtype=np.int64)
    ip = alpha.raw >> FRAC_BITS
    fr = alpha.raw & FRAC_MASK
    mag = np.abs(z).astype(U64)
    hi, lo = mul_u64(np.full(mag.shape, fr >> 64, U64), np.full(mag.shape, fr & MASK64, U64), mag)
    f = to_float(hi, lo)
    # floor(fr * |z|); the binary64 product is far more accurate than 1/2
    k = np.rint((fr / (1 << FRAC_BITS)) * mag.astype(float) - f).astype(np.int64)
    neg = z < 0
    nonzero = (hi != 0) | (lo != 0)
    # alpha_frac * z = -(k + f) = (-k - 1) + (1 - f) when f != 0
    chi, clo = sub(np.zeros_like(hi), np.zeros_like(lo), hi, lo)
    flip = neg & nonzero
    hi = np.where(flip, chi, hi)
    lo = np.where(flip, clo, lo)
    k = np.where(neg, np.where(nonzero, -k - 1, -k), k)
    n = x + ip * z + k
    f = to_float(hi, lo)
    # n = -1: t = -(1 - f), read from the complement register to avoid cancellation
    chi, clo = sub(np.zeros_like(hi), np.zeros_like(lo), hi, lo)
    comp = to_float(chi, clo)
    return np.where((n == -1) & ((hi != 0) | (lo != 0)), -comp, n + f)


# ---------------------------------------------------------------------------
# lattice type

@dataclass
class Lattice2D:
    """Lattice spanned by the columns of ``basis``.

    ``provenance`` is one of ("pq_alpha", P, Q, alpha), ("theta", a, b, parity)
    or ("raw",).  Sheared lattices evaluate points exactly from alpha.
    """
    basis: np.ndarray
    provenance: tuple = ("raw",)
    _reduced: Optional[tuple] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.basis = np.array(self.basis, dtype=float).reshape(2, 2)
        if not np.all(np.isfinite(self.basis)):
            raise DomainError("basis entries must be finite")
        if self.det == 0.0:
            raise DomainError("singular basis")

    @classmethod
    def pq_alpha(cls, P: float, Q: float, alpha: FixedReal) -> "Lattice2D":
        if not (P > 0 and Q > 0):
            raise DomainError("P and Q must be positive")
        basis = [[P, P * float(alpha)], [0.0, Q]]
        return cls(basis, ("pq_alpha", float(P), float(Q), alpha))

    @classmethod
    def delta(cls, P: float, alpha: FixedReal) -> "Lattice2D":
        """The unimodular member diag(P, 1/P) [[1, alpha], [0, 1]] Z^2."""
        return cls.pq_alpha(P, 1.0 / P, alpha)

    @classmethod
    def theta(cls, frak_a: float, frak_b: float, parity: int = 0) -> "Lattice2D":
        from .theta import lattice_basis
        return cls(lattice_basis(frak_a, frak_b, parity), ("theta", frak_a, frak_b, parity))

    @classmethod
    def raw(cls, basis) -> "Lattice2D":
        return cls(basis, ("raw",))

    @property
    def kind(self) -> str:
        return self.provenance[0]

    @property
    def det(self) -> float:
        if self.provenance[0] == "pq_alpha":
            return self.provenance[1] * self.provenance[2]
        b = self.basis
        return float(b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0])

    def points(self, m1, m2) -> np.ndarray:
        """Lattice points for integer coordinates in the construction basis, shape (..., 2)."""
        m1 = np.asarray(m1, dtype=np.int64)
        m2 = np.asarray(m2, dtype=np.int64)
        if self.provenance[0] == "pq_alpha":
            _, P, Q, alpha = self.provenance
            return np.stack([P * _shear_coordinate(alpha, m1, m2), Q * m2.astype(float)], axis=-1)
        b = self.basis
        f1 = m1.astype(float)
        f2 = m2.astype(float)
        return np.stack([b[0, 0] * f1 + b[0, 1] * f2, b[1, 0] * f1 + b[1, 1] * f2], axis=-1)

    def norm2(self, m1, m2) -> np.ndarray:
        v = self.points(m1, m2)
        return v[..., 0] ** 2 + v[..., 1] ** 2

    @property
    def transform(self) -> np.ndarray:
        """Integer U with reduced_basis = basis @ U (as exact coordinates)."""
        return self._reduce()[0]

    @property
    def reduced_basis(self) -> np.ndarray:
        return self._reduce()[1]

    def _reduce(self):
        if self._reduced is None:
            self._reduced = _lagrange_gauss(self)
        return self._reduced

    def to_row(self) -> list:
        """Four binary64 basis entries (row-major) followed by the provenance tag."""
        tag = self.provenance[0]
        if tag == "pq_alpha":
            _, P, Q, alpha = self.provenance
            tag = f"pq_alpha:{P!r}:{Q!r}:{alpha.to_hex()}"
        elif tag == "theta":
            tag = "theta:{!r}:{!r}:{}".format(*self.provenance[1:])
        return [*map(float, self.basis.ravel()), tag]

    @classmethod
    def from_row(cls, row) -> "Lattice2D":
        basis = np.array([float(v) for v in row[:4]]).reshape(2, 2)
        parts = str(row[4]).split(":")
        if parts[0] == "pq_alpha":
            return cls.pq_alpha(float(parts[1]), float(parts[2]), FixedReal.from_hex(parts[3]))
        if parts[0] == "theta":
            return cls(basis, ("theta", float(parts[1]), float(parts[2]), int(parts[3])))
        return cls(basis, ("raw",))

    def to_csv(self, fh) -> None:
        fh.write("b11,b12,b21,b22,provenance\n")
        row = self.to_row()
        fh.write(",".join(f"{v:.17g}" for v in row[:4]) + f",{row[4]}\n")


def _lagrange_gauss(L: Lattice2D):
    def vec(u):
        return L.points(u[0], u[1])

    def n2(v):
        return float(v[0] * v[0] + v[1] * v[1])

    u1, u2 = [1, 0], [0, 1]
    b1, b2 = vec(u1), vec(u2)
    if n2(b2) < n2(b1):
        u1, u2, b1, b2 = u2, u1, b2, b1
    for _ in range(100_000):
        mu = round(float(b1 @ b2) / n2(b1))
        if mu:
            u2 = [u2[0] - mu * u1[0], u2[1] - mu * u1[1]]
            if max(abs(u2[0]), abs(u2[1])) >= 1 << 62:
                raise RangeError("reduction transform overflowed 64-bit coordinates")
            b2 = vec(u2)
        if n2(b2) < n2(b1) * (1.0 - 1e-12):
            u1, u2, b1, b2 = u2, u1, b2, b1
            continue
        break
    # settle near-ties under the canonical evaluation among short combinations
    best = (n2(b1), u1)
    for i in range(-2, 3):
        for j in range(-2, 3):
            if (i, j) == (0, 0):
                continue
            u = [i * u1[0] + j * u2[0], i * u1[1] + j * u2[1]]
            d = n2(vec(u))
            if d < best[0]:
                best = (d, u)
    if best[1] != u1:
        u = best[1]
        # keep a unimodular pair: the new shortest vector and an old partner
        a = u1 if abs(u[0] * u1[1] - u[1] * u1[0]) == 1 else u2
        u1, u2 = u, a
        b1, b2 = vec(u1), vec(u2)
        mu = round(float(b1 @ b2) / n2(b1))
        u2 = [u2[0] - mu * u1[0], u2[1] - mu * u1[1]]
        b2 = vec(u2)
    if n2(b2) < n2(b1):
        u1, u2, b1, b2 = u2, u1, b2, b1
    U = np.array([[u1[0], u2[0]], [u1[1], u2[1]]], dtype=np.int64)
    return U, np.column_stack([b1, b2])


# ---------------------------------------------------------------------------
# shortest vector and disk enumeration

def shortest_vector(L: Lattice2D):
    """(vector, length) of a shortest nonzero lattice vector."""
    v = L.reduced_basis[:, 0]
    return v.copy(), float(np.sqrt(v[0] * v[0] + v[1] * v[1]))


def _dual_row_norms(B: np.ndarray) -> np.ndarray:
    inv = np.linalg.inv(B)
    return np.hypot(inv[:, 0], inv[:, 1])


def _rows(L: Lattice2D, radius: float, center: np.ndarray):
    """Rows of the ellipse ||B m + center|| <= radius in reduced coordinates.

    Returns (m2, lo, hi) with real bounds for m1 on each row.
    """
    B = L.reduced_basis
    inv = np.linalg.inv(B)
    c = -(inv @ center)  # real coordinates of -center
    dn = _dual_row_norms(B)
    pad = 1e-9 * (1.0 + radius * dn[1])
    m2 = np.arange(math.floor(c[1] - radius * dn[1] - pad), math.ceil(c[1] + radius * dn[1] + pad) + 1,
                   dtype=np.int64)
    r1, r2 = B[:, 0], B[:, 1]
    w = np.outer(m2.astype(float), r2) + center  # m2 r2 + center
    A = float(r1 @ r1)
    Bq = w @ r1
    Cq = np.einsum("ij,ij->i", w, w) - radius * radius
    disc = Bq * Bq - A * Cq
    # rows that only graze the disk still get a boundary check
    root = np.sqrt(np.maximum(disc, 0.0))
    lo = (-Bq - root) / A
    hi = (-Bq + root) / A
    return m2, lo, hi, disc


def _to_construction(L: Lattice2D, m1, m2):
    U = L.transform
    return U[0, 0] * m1 + U[0, 1] * m2, U[1, 0] * m1 + U[1, 1] * m2


def _inside(L: Lattice2D, m1, m2, radius2: float, center) -> np.ndarray:
    x, z = _to_construction(L, m1, m2)
    v = L.points(x, z)
    if center is not None:
        v = v + center
    return v[..., 0] ** 2 + v[..., 1] ** 2 <= radius2


def _estimate_count(L: Lattice2D, radius: float) -> float:
    B = L.reduced_basis
    span = radius * _dual_row_norms(B)
    return math.pi * radius * radius / abs(L.det) + 2.0 * span.sum() + 1.0


def count_in_disk(L: Lattice2D, mu: float, center=None) -> int:
    """#{v in L : ||v + center|| <= mu}, exact under the canonical evaluation."""
    if not mu > 0:
        raise DomainError("mu must be positive")
    if _estimate_count(L, mu) > COUNT_LIMIT:
        raise RangeError(f"cost guard: count would exceed 2**32")
    cvec = np.zeros(2) if center is None else np.asarray(center, dtype=float)
    m2, lo, hi, disc = _rows(L, mu, cvec)
    tol = 1e-7 + 1e-9 * np.maximum(np.abs(lo), np.abs(hi))
    outer_lo = np.ceil(lo - tol).astype(np.int64)
    outer_hi = np.floor(hi + tol).astype(np.int64)
    inner_lo = np.ceil(lo + tol).astype(np.int64)
    inner_hi = np.floor(hi - tol).astype(np.int64)
    sure = disc > 0
    inner = np.where(sure, np.maximum(inner_hi - inner_lo + 1, 0), 0)
    total = int(inner.sum())
    r2 = mu * mu
    cen = None if center is None else cvec
    # ambiguous candidates: near either end, or the whole row when it is short
    has_inner = sure & (inner_hi >= inner_lo)
    left_end = np.where(has_inner, inner_lo - 1, outer_hi)
    width = int(np.max(left_end - outer_lo + 1, initial=0))
    for j in range(max(width, 0)):
        cand = outer_lo + j
        ok = cand <= left_end
        if ok.any():
            total += int(_inside(L, cand[ok], m2[ok], r2, cen).sum())
    right_width = int(np.max(np.where(has_inner, outer_hi - inner_hi, 0), initial=0))
    for j in range(right_width):
        cand = inner_hi + 1 + j
        ok = has_inner & (cand <= outer_hi)
        if ok.any():
            total += int(_inside(L, cand[ok], m2[ok], r2, cen).sum())
    return total


def disk_points(L: Lattice2D, radius: float, center=None) -> np.ndarray:
    """All points v + center with ||v + center|| <= radius, shape (k, 2)."""
    cvec = np.zeros(2) if center is None else np.asarray(center, dtype=float)
    if _estimate_count(L, radius) > POINT_LIMIT:
        raise RangeError("cost guard: too many lattice points to materialise")
    m2, lo, hi, _ = _rows(L, radius, cvec)
    a = np.ceil(lo - 1e-7).astype(np.int64)
    b = np.floor(hi + 1e-7).astype(np.int64)
    cnt = np.maximum(b - a + 1, 0)
    rows = np.repeat(np.arange(m2.size), cnt)
    start = np.repeat(np.cumsum(cnt) - cnt, cnt)
    m1 = a[rows] + (np.arange(rows.size) - start)
    x, z = _to_construction(L, m1, m2[rows])
    v = L.points(x, z) + cvec
    keep = v[:, 0] ** 2 + v[:, 1] ** 2 <= radius * radius
    return v[keep]


# brute-force oracles over a box of construction coordinates

def _oracle_box(L: Lattice2D, radius: float) -> int:
    box = int(math.ceil(radius * _dual_row_norms(L.basis).max())) + 1
    if box > 3000:
        raise RangeError("brute-force box too large")
    return box


def shortest_vector_bruteforce(L: Lattice2D, box: Optional[int] = None) -> float:
    if box is None:
        box = _oracle_box(L, float(np.sqrt(min(L.norm2(1, 0), L.norm2(0, 1)))))
    m = np.arange(-box, box + 1, dtype=np.int64)
    m1, m2 = np.meshgrid(m, m, indexing="ij")
    d = L.norm2(m1, m2)
    d[box, box] = np.inf
    return float(np.sqrt(d.min()))


def count_in_disk_bruteforce(L: Lattice2D, mu: float, box: Optional[int] = None) -> int:
    if box is None:
        box = _oracle_box(L, mu)
    m = np.arange(-box, box + 1, dtype=np.int64)
    total = 0
    for k0 in range(0, m.size, 256):
        m1, m2 = np.meshgrid(m[k0:k0 + 256], m, indexing="ij")
        total += int((L.norm2(m1, m2) <= mu * mu).sum())
    return total


# ---------------------------------------------------------------------------
# counting and height estimates

class LipschitzCheck(NamedTuple):
    count: int
    bound: float
    ok: bool


def lipschitz_bound(a: float, mu: float) -> float:
    """Explicit bound on #{v : ||v|| <= mu} for a unimodular lattice with minimum a."""
    if mu >= 1.0 / a:
        return (1.0 + 2.0 * a * mu) * (1.0 + 2.0 * mu / a)
    if mu >= a:
        return 1.0 + 2.0 * mu / a
    return 1.0


def check_lipschitz(L: Lattice2D, mu: float) -> LipschitzCheck:
    if abs(abs(L.det) - 1.0) > 1e-9:
        raise DomainError("lattice must be unimodular (|det| = 1 within 1e-9)")
    _, a = shortest_vector(L)
    count = count_in_disk(L, mu)
    bound = lipschitz_bound(a, mu)
    return LipschitzCheck(count, bound, count <= bound)


class HeightCheck(NamedTuple):
    a_inv: float
    bound: float
    ok: bool


def empirical_type(alpha: FixedReal, q_max: int = KAPPA_HEIGHT):
    """(kappa_hat, c_hat) from the convergents up to q_max; raises when too few."""
    cf = cf_expand(alpha)
    kappa = dioph_type_estimate(cf, q_max)
    return kappa, dioph_constant_estimate(cf, kappa, q_max)


def check_height_bound(alpha: FixedReal, kappa_hat: Optional[float], c_hat: Optional[float],
                       P: float) -> HeightCheck:
    """a(Delta_P)^-1 against c^(-1/kappa) P^(1 - 2/kappa).

    Missing (kappa_hat, c_hat) are estimated from continued fractions; when
    that is impossible (alpha rational with few convergents) the bound is
    reported as nan and ok is False.
    """
    if not P > 2.0 / math.sqrt(3.0):
        raise DomainError("P must exceed 2/sqrt(3)")
    _, a = shortest_vector(Lattice2D.delta(P, alpha))
    a_inv = 1.0 / a
    if kappa_hat is None or c_hat is None:
        try:
            k_est, c_est = empirical_type(alpha)
        except InsufficientDataError:
            return HeightCheck(a_inv, math.nan, False)
        kappa_hat = k_est if kappa_hat is None else kappa_hat
        c_hat = c_est if c_hat is None else c_hat
    bound = c_hat ** (-1.0 / kappa_hat) * P ** (1.0 - 2.0 / kappa_hat)
    return HeightCheck(a_inv, bound, a_inv <= bound * (1.0 + 1e-12))


# ---------------------------------------------------------------------------
# Gaussian lattice sums

def siegel_radius(L: Lattice2D, C: float, tail: float = SIEGEL_TAIL) -> float:
    """Radius beyond which sum e^(-C ||v + u||^2) is below ``tail``.

    The points outside radius rho are covered by fundamental cells lying
    outside rho - diam, which bounds the tail by the Gaussian integral
    pi/(C det) e^(-C (rho - diam)^2).
    """
    B = L.reduced_basis
    diam = float(np.hypot(*B[:, 0]) + np.hypot(*B[:, 1]))
    ratio = math.pi / (C * abs(L.det) * tail)
    core = math.sqrt(max(math.log(ratio), 0.0) / C) if ratio > 1 else 0.0
    return core + diam


def siegel_gaussian_sum(L: Lattice2D, u, C: float) -> float:
    """sum_{v in L} exp(-C ||v + u||^2) with truncation tail below 1e-12."""
    if not C > 0:
        raise DomainError("C must be positive")
    u = np.asarray(u, dtype=float).reshape(2)
    rho = siegel_radius(L, C)
    v = disk_points(L, rho, center=u)
    r2 = v[:, 0] ** 2 + v[:, 1] ** 2
    return float(np.sort(np.exp(-C * r2)).sum())


class SiegelCheck(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def siegel_rhs(P: float, Q: float, alpha: FixedReal, C: float, Z: float, zeta: float) -> float:
    """(1 + N_{Delta_X}(sqrt(2) (Z zeta)^(1/2))) * sum_{Delta^0_{P zeta, Q Z}} e^(-C ||v||^2 / 4)
    with X = (Z / zeta)^(1/2)."""
    X = math.sqrt(Z / zeta)
    count = count_in_disk(Lattice2D.delta(X, alpha), math.sqrt(2.0 * Z * zeta))
    base = Lattice2D.pq_alpha(P * zeta, Q * Z, FixedReal(0))
    return (1.0 + count) * siegel_gaussian_sum(base, (0.0, 0.0), C / 4.0)


def check_siegel_estimate(P: float, Q: float, alpha: FixedReal, u, C: float, Z: float,
                          zeta: float) -> SiegelCheck:
    if not (Z > 0 and zeta > 0):
        raise DomainError("Z and zeta must be positive")
    lhs = siegel_gaussian_sum(Lattice2D.pq_alpha(P, Q, alpha), u, C)
    rhs = siegel_rhs(P, Q, alpha, C, Z, zeta)
    return SiegelCheck(lhs, rhs, lhs <= rhs)


# ---------------------------------------------------------------------------
# first estimate

class FirstEstimate(NamedTuple):
    value: float
    exponents: tuple  # (sigma - 1 + eps, sigma - (2 + sigma)/kappa + eps (1 - 1/kappa))
    kappa_hat: float


def predicted_exponents(sigma: float, eps: float, kappa: float) -> tuple:
    second = sigma - (2.0 + sigma) / kappa + eps * (1.0 - 1.0 / kappa)
    return (sigma - 1.0 + eps, second)


def first_estimate_sum(alpha: FixedReal, sigma: float, eps: float, N: int, u: float = 0.0) -> FirstEstimate:
    """(1/N) sum_{1 <= n <= N^(sigma+eps)} sum_{p in {0,1}} sum_{v in Lambda_n,p, v2 != 0}
    exp(-pi ||v + u e1||^2) for z_n = 2 n alpha + i/(pi N^2).

    The inner sums are the lattice theta sums with xi = u sqrt(2b) e1 scaled by
    sqrt(b/2).  kappa_hat comes from continued fractions up to 10^12 and is
    infinite when too few convergents exist.
    """
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    M = int(math.floor(N ** (sigma + eps) + 1e-9))
    if M > FIRST_ESTIMATE_MAX_TERMS:
        raise RangeError("cost guard: N^(sigma+eps) must not exceed 10^6")
    total = 0.0
    for n in range(1, M + 1):
        z = z_for(alpha, n, N)
        r2b = math.sqrt(2.0 * z.frak_b)
        for p in (0, 1):
            val = theta_C_many(z.with_shift(parity=p), u * r2b)[0].real
            total += math.sqrt(z.frak_b / 2.0) * val
    try:
        kappa = dioph_type_estimate(cf_expand(alpha), KAPPA_HEIGHT)
    except InsufficientDataError:
        kappa = math.inf
    return FirstEstimate(total / N, predicted_exponents(sigma, eps, kappa), kappa)


def fit_exponent(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def random_unimodular(rng: np.random.Generator, spread: float = 3.0) -> Lattice2D:
    """Random basis with log-uniform axis scales and shear, rescaled to det 1."""
    while True:
        b = rng.normal(size=(2, 2)) * np.exp(rng.uniform(-spread, spread, size=2))[None, :]
        det = b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0]
        if abs(det) > 1e-6:
            return Lattice2D.raw(b / math.sqrt(abs(det)))


__all__ = ["Lattice2D", "shortest_vector", "shortest_vector_bruteforce", "count_in_disk",
           "count_in_disk_bruteforce", "disk_points", "check_lipschitz", "lipschitz_bound",
           "LipschitzCheck", "check_height_bound", "HeightCheck", "empirical_type",
           "siegel_gaussian_sum", "siegel_rhs", "check_siegel_estimate", "SiegelCheck",
           "first_estimate_sum", "FirstEstimate", "predicted_exponents", "fit_exponent",
           "random_unimodular", "COUNT_LIMIT"]
