"""Test functions with compactly supported (or Poisson-kernel) Fourier transforms.

Conventions: f_hat(u) = integral f(s) e(-us) ds with e(x) = exp(2 pi i x).
The Gaussian e^{-pi s^2} is self-dual and the Poisson kernel
1/(pi(1+s^2)) has transform e^{-2 pi |u|}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .realnum import DomainError

TWO_PI = 2.0 * math.pi
KINDS = ("gaussian", "poisson_kernel", "fourier_table", "indicator", "callable")


def smooth_cutoff(u):
    """C^2 bump: 1 on [-1, 1], 0 outside [-2, 2], quintic smoothstep between."""
    t = np.clip(np.abs(np.asarray(u, dtype=float)) - 1.0, 0.0, 1.0)
    return 1.0 - t**3 * (10.0 - 15.0 * t + 6.0 * t**2)


@dataclass(frozen=True, eq=False)
class TestFunction:
    kind: str
    P: float = 0.0
    h: float = 0.0
    fhat_grid: Optional[np.ndarray] = field(default=None, repr=False)  # at u_k = (k - K) h
    time_kind: Optional[str] = None  # closed-form time side for tables ("sinc2")
    a: float = 0.0  # indicator window
    b: float = 0.0
    func: Optional[Callable] = field(default=None, repr=False)
    fhat_func: Optional[Callable] = field(default=None, repr=False)
    horizon: Optional[float] = None  # |s| beyond which a callable f is negligible

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown test function kind {self.kind!r}")

    # constructors -------------------------------------------------------
    @classmethod
    def gaussian(cls) -> "TestFunction":
        return cls("gaussian")

    @classmethod
    def poisson_kernel(cls) -> "TestFunction":
        return cls("poisson_kernel")

    @classmethod
    def indicator(cls, a: float, b: float) -> "TestFunction":
        if not a <= b:
            raise DomainError("need a <= b")
        return cls("indicator", a=float(a), b=float(b))

    @classmethod
    def from_table(cls, P: float, h: float, values, time_kind=None) -> "TestFunction":
        values = np.asarray(values)
        K = (len(values) - 1) // 2
        if len(values) != 2 * K + 1 or not math.isclose(K * h, 2.0 * P, rel_tol=1e-9):
            raise DomainError("table must sample [-2P, 2P] at step h, symmetric about 0")
        values = values.copy()
        values.flags.writeable = False
        return cls("fourier_table", P=float(P), h=float(h), fhat_grid=values, time_kind=time_kind)

    @classmethod
    def triangle(cls, h: float = 1e-3) -> "TestFunction":
        """f_hat(u) = max(0, 1 - |u|), f(s) = (sin(pi s) / (pi s))^2."""
        K = int(round(1.0 / h))
        u = (np.arange(2 * K + 1) - K) * h
        return cls.from_table(0.5, h, np.maximum(0.0, 1.0 - np.abs(u)), time_kind="sinc2")

    @classmethod
    def from_callable(cls, func, fhat=None, horizon=None) -> "TestFunction":
        return cls("callable", func=func, fhat_func=fhat, horizon=horizon)

    # evaluation ---------------------------------------------------------
    @property
    def u_grid(self) -> np.ndarray:
        K = (len(self.fhat_grid) - 1) // 2
        return (np.arange(2 * K + 1) - K) * self.h

    @property
    def support(self) -> float:
        """Half-width of the support of f_hat (inf if not compact)."""
        if self.kind == "fourier_table":
            return 2.0 * self.P
        return math.inf

    def fhat(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-math.pi * u * u)
        if self.kind == "poisson_kernel":
            return np.exp(-TWO_PI * np.abs(u))
        if self.kind == "fourier_table":
            grid = self.u_grid
            vals = self.fhat_grid
            if np.iscomplexobj(vals):
                out = np.interp(u, grid, vals.real, left=0.0, right=0.0) + \
                    1j * np.interp(u, grid, vals.imag, left=0.0, right=0.0)
            else:
                out = np.interp(u, grid, vals, left=0.0, right=0.0)
            return out
        if self.kind == "indicator":
            w = self.b - self.a
            safe = np.where(u == 0, 1.0, u)
            val = (np.exp(-2j * math.pi * safe * self.a) - np.exp(-2j * math.pi * safe * self.b)) \
                / (2j * math.pi * safe)
            return np.where(u == 0, w, val)
        if self.fhat_func is None:
            raise DomainError("this test function has no Fourier transform attached")
        return self.fhat_func(u)

    def value(self, s):
        """Pointwise f(s); Fourier tables without a closed form use the
        trapezoidal inverse transform on the stored grid."""
        s = np.asarray(s, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-math.pi * s * s)
        if self.kind == "poisson_kernel":
            return 1.0 / (math.pi * (1.0 + s * s))
        if self.kind == "indicator":
            return ((s >= self.a) & (s <= self.b)).astype(float)
        if self.kind == "callable":
            return self.func(s)
        if self.time_kind == "sinc2":
            return np.sinc(s) ** 2
        return self.quadrature_value(s)

    def quadrature_value(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        u = self.u_grid
        out = np.empty(s.shape)
        for i0 in range(0, s.size, 64):
            blk = s.ravel()[i0:i0 + 64]
            ph = np.exp(TWO_PI * 1j * np.outer(blk, u))
            out.ravel()[i0:i0 + 64] = (ph @ self.fhat_grid).real * self.h
        return out

    def require_decay(self):
        if self.kind == "callable" and self.horizon is None:
            raise DomainError("f has no decay horizon; refusing the periodised sum")

    def decay_horizon(self, tol: float = 1e-14) -> float:
        """t with sum_{|m/c| > t} |f_hat(m/c)| negligible (relative to tol)."""
        if self.kind == "fourier_table":
            return 2.0 * self.P
        if self.kind == "gaussian":
            return math.sqrt(-math.log(tol) / math.pi) + 0.5
        if self.kind == "poisson_kernel":
            return -math.log(tol) / TWO_PI + 1.0
        raise DomainError(f"f_hat of kind {self.kind!r} is not known to decay")

    # periodisation ------------------------------------------------------
    def periodized(self, x, c: float):
        """sum_{n in Z} f(c (x + n)) for x in [0, 1), computed on the time side."""
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            return _periodized_gaussian(x, c)
        if self.kind == "poisson_kernel":
            return _periodized_poisson(x, c)
        if self.kind == "fourier_table" and self.time_kind == "sinc2":
            return _periodized_sinc2(x, c)
        if self.kind == "fourier_table":
            # generic compact tables: the finite dual sum is exact
            return _periodized_dual(self, x, c)
        if self.kind == "indicator":
            lo, hi = self.a / c, self.b / c
            return np.floor(hi - x) - np.ceil(lo - x) + 1.0
        self.require_decay()
        n0 = int(math.ceil(self.horizon / c)) + 1
        n = np.arange(-n0, n0 + 1)
        return self.func(c * (x[..., None] + n)).sum(axis=-1)

    def to_csv(self, fh) -> None:
        fh.write("u,fhat_re,fhat_im\n")
        grid = self.u_grid if self.kind == "fourier_table" else np.linspace(-4, 4, 801)
        vals = np.asarray(self.fhat(grid), dtype=complex)
        for u, v in zip(grid, vals):
            fh.write(f"{u:.17g},{v.real:.17g},{v.imag:.17g}\n")


def eval_time_domain(f: TestFunction, s):
    return f.value(s)


def _periodized_gaussian(x, c):
    y = x - np.round(x)
    n0 = int(math.ceil(math.sqrt(40.0 / math.pi) / c)) + 1
    n = np.arange(-n0, n0 + 1)
    return np.exp(-math.pi * (c * (y[..., None] + n)) ** 2).sum(axis=-1)


def _periodized_poisson(x, c):
    # sum_n 1/(pi(1 + c^2 (x+n)^2)) = sinh(2 pi/c) / (c (cosh(2 pi/c) - cos(2 pi x)))
    t = TWO_PI / c
    if t > 700:
        # c tiny: write the ratio with a scaled denominator to avoid overflow
        return np.full(np.shape(x), 1.0 / c) * (1.0 + 2.0 * np.exp(-t) * np.cos(TWO_PI * x))
    return np.sinh(t) / (c * (np.cosh(t) - np.cos(TWO_PI * x)))


def _periodized_dual(f: TestFunction, x, c):
    M = int(math.floor(f.support * c))
    m = np.arange(-M, M + 1)
    coef = f.fhat(m / c) / c
    return (np.exp(TWO_PI * 1j * np.multiply.outer(x, m)) @ coef).real


def _osc_tail(z, g_rows):
    """sum_{k >= 0} z^k g_k by repeated summation by parts.

    g_rows[i] holds g_i.  With forward differences D^i g the sum equals
    sum_i z^i D^i g_0 / (1 - z)^(i+1) plus a remainder of the order of the
    next difference divided by |1 - z|^(p+1).
    """
    rows = [np.asarray(r) for r in g_rows]
    out = rows[0] / (1.0 - z)
    for i in range(1, len(rows)):
        rows = [rows[k + 1] - rows[k] for k in range(len(rows) - 1)]
        out = out + z**i * rows[0] / (1.0 - z) ** (i + 1)
    return out


def _inv_sin2_minus_pole(y):
    """pi^2 / sin^2(pi y) - 1/y^2 for |y| <= 1/2, without cancellation near 0."""
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 0.05
    ys = np.where(small, 0.0, y)
    safe = np.where(small, 0.5, ys)
    direct = (math.pi / np.sin(math.pi * safe)) ** 2 - 1.0 / safe**2
    # Laurent series of pi^2 csc^2(pi y) beyond the pole: sum_k a_k y^(2k)
    y2 = (y * y) if np.ndim(y) else y * y
    pi2 = math.pi**2
    series = pi2 / 3.0 + y2 * (pi2**2 / 15.0 + y2 * (2.0 * pi2**3 / 189.0
                                                    + y2 * (pi2**4 / 675.0 + y2 * 2.0 * pi2**5 / 10395.0)))
    return np.where(small, series, direct)


def _fejer_sum(x, c, chunk=256):
    # dual form: (1/c) sum_{|m| <= c} (1 - |m|/c) e(m x), exact for the triangle
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, 1.0 / c)
    M = int(math.floor(c))
    for lo in range(1, M + 1, chunk):
        m = np.arange(lo, min(M, lo + chunk - 1) + 1)
        w = 2.0 * (1.0 - m / c) / c
        out = out + np.cos(TWO_PI * np.multiply.outer(x, m)) @ w
    return out


def _periodized_sinc2(x, c):
    """sum_n sinc^2(c (y + n)) with sinc(t) = sin(pi t)/(pi t), y = x mod 1.

    The n = 0 term (nearest to the pole) is evaluated directly.  For the rest
    sin^2(pi c t) = (1 - cos(2 pi c t))/2 splits the sum into
    sum_{n != 0} 1/(y+n)^2, which has a closed form, and an oscillating series
    summed directly near the origin with both tails accelerated by
    summation by parts.  Integer c needs no series at all.
    """
    x = np.asarray(x, dtype=float)
    y = x - np.round(x)  # [-1/2, 1/2]
    ci = round(c)
    if abs(c - ci) < 1e-12 and ci >= 1:
        # sin^2(pi c (y+n)) does not depend on n: Fejer kernel
        sy = np.sin(math.pi * y)
        safe = np.where(sy == 0.0, 1.0, sy)
        val = (np.sin(math.pi * ci * y) / (ci * safe)) ** 2
        return np.where(sy == 0.0, 1.0, val)
    head = np.sinc(c * y) ** 2
    z = np.exp(TWO_PI * 1j * c)
    dist = abs(1.0 - z)
    if dist < 0.5:
        # c is close to an integer: the differences lose too much to rounding
        return _fejer_sum(x, c)
    p = 10
    n0 = 8
    while math.factorial(p + 1) / (n0 ** (p + 2) * dist ** (p + 1)) > 1e-17:
        n0 *= 2
    n = np.concatenate([np.arange(-n0, 0), np.arange(1, n0 + 1)])
    zn = np.exp(TWO_PI * 1j * c * n)
    flat = y.reshape(-1)
    near = np.empty(flat.shape, dtype=complex)
    step = max(1, (1 << 22) // len(n))
    for lo in range(0, flat.size, step):
        t = flat[lo:lo + step, None] + n
        near[lo:lo + step] = (1.0 / (t * t)) @ zn
    near = near.reshape(y.shape) * np.exp(TWO_PI * 1j * c * y)
    # right tail: sum_{n > n0} e(c (y+n)) / (y+n)^2 = e(c (y+n0+1)) sum_k z^k g_k
    g_right = [1.0 / (y + n0 + 1 + k) ** 2 for k in range(p)]
    right = np.exp(TWO_PI * 1j * c * (y + n0 + 1)) * _osc_tail(z, g_right)
    # left tail: sum_{n > n0} e(c (y-n)) / (y-n)^2 = e(c (y-n0-1)) sum_k conj(z)^k g_k
    g_left = [1.0 / (n0 + 1 + k - y) ** 2 for k in range(p)]
    left = np.exp(TWO_PI * 1j * c * (y - n0 - 1)) * _osc_tail(np.conj(z), g_left)
    osc = (near + right + left).real
    rest = (_inv_sin2_minus_pole(y) - osc) / (2.0 * math.pi**2 * c * c)
    return head + rest


# ---------------------------------------------------------------------------
# Fourier-compact sandwich functions

def _triangle_cdf(x, w):
    t = np.clip(np.asarray(x, dtype=float) / w, -1.0, 1.0)
    return np.where(t <= 0, 0.5 * (t + 1.0) ** 2, 1.0 - 0.5 * (1.0 - t) ** 2)


def mollified_indicator(s, p: float, q: float, w: float):
    """1_[p,q] convolved twice with the unit-mass box of width w (C^1)."""
    if q < p:
        return np.zeros(np.shape(s))
    s = np.asarray(s, dtype=float)
    return _triangle_cdf(s - p, w) - _triangle_cdf(s - q, w)


def _mollified_indicator_hat(u, p, q, w):
    u = np.asarray(u, dtype=float)
    if q < p:
        return np.zeros(u.shape, dtype=complex)
    safe = np.where(u == 0, 1.0, u)
    ind = (np.exp(-2j * math.pi * safe * p) - np.exp(-2j * math.pi * safe * q)) / (2j * math.pi * safe)
    ind = np.where(u == 0, q - p, ind)
    return ind * np.sinc(w * u) ** 2


@dataclass
class ApproxPairReport:
    delta: float
    P: float
    h: float
    eps_internal: float
    max_gap_ratio: float  # max |h_P - h_eps| * pi (1+s^2) / eps' on the grid
    integral_gap: float  # integral of chi_+ - chi_-


def _is_constant_one(g) -> bool:
    probe = np.linspace(-3.0, 3.0, 13)
    try:
        vals = np.asarray(g(probe), dtype=float)
    except Exception:
        return False
    return bool(np.all(vals == 1.0))


def build_approx_pair(I, g=None, eps: float = 0.1, *, sample_points: int = 10_000,
                      margin: float = 10.0, max_P: float = 2.0**14,
                      return_report: bool = False):
    """Fourier-compact functions h_- <= g 1_I <= h_+ in the style of the
    classical approximation lemma.

    Internally eps' = eps/3 is used for every construction step, so that the
    3 eps' bracketing of h_hat(0) that the construction yields is the stated
    eps bracketing.  chi_+- are mollified indicators of I grown and shrunk by
    delta (times g); h_eps = chi +- eps' * Poisson kernel; the transform is
    multiplied by smooth_cutoff(u/P), doubling P until the measured deviation
    is below eps'/(pi(1+s^2)) on the sample grid.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    lo_i, hi_i = float(I[0]), float(I[1])
    if not (math.isfinite(lo_i) and math.isfinite(hi_i)) or hi_i < lo_i:
        raise DomainError("I must be a finite interval [lo, hi]")
    if g is None:
        g = lambda s: np.ones(np.shape(s))  # noqa: E731
    const_one = _is_constant_one(g)
    ep = eps / 3.0
    h = min(1e-3, eps / 100.0)

    # margin delta -----------------------------------------------------
    span_lo, span_hi = lo_i - 1.0, hi_i + 1.0
    quad = np.linspace(span_lo, span_hi, 200_001)
    gq = np.asarray(g(quad), dtype=float)
    if np.any(gq < 0):
        raise DomainError("g must be non-negative near I")

    def chi(s, delta, sign):
        w = delta / 2.0
        if sign > 0:
            m = mollified_indicator(s, lo_i - delta, hi_i + delta, w)
        else:
            m = mollified_indicator(s, lo_i + delta, hi_i - delta, w)
        return m * np.asarray(g(s), dtype=float)

    def gap(delta):
        if const_one:
            # mollifying keeps the mass q - p of each indicator
            return (hi_i - lo_i + 2 * delta) - max(0.0, hi_i - lo_i - 2 * delta)
        return float(np.trapezoid(chi(quad, delta, 1) - chi(quad, delta, -1), quad))

    d_lo, d_hi = 0.0, 0.5
    while gap(d_hi) >= 0.9 * ep and d_hi > 1e-9:
        d_hi /= 2.0
    d_lo = d_hi
    d_hi_try = d_hi * 2.0
    for _ in range(40):  # bisection for the largest admissible delta
        if gap(d_hi_try) < 0.9 * ep and d_hi_try < 0.5:
            d_lo = d_hi_try
            d_hi_try *= 2.0
            continue
        mid = 0.5 * (d_lo + d_hi_try)
        if gap(mid) < 0.9 * ep:
            d_lo = mid
        else:
            d_hi_try = mid
        if d_hi_try - d_lo < 1e-6 * d_lo:
            break
    delta = d_lo
    w = delta / 2.0
    integral_gap = gap(delta)

    # transforms of chi_+- on the u grid -------------------------------
    def chi_hat_factory(sign):
        if const_one:
            p, q = (lo_i - delta, hi_i + delta) if sign > 0 else (lo_i + delta, hi_i - delta)
            return lambda u: _mollified_indicator_hat(u, p, q, w)
        return _sampled_transform(lambda s: chi(s, delta, sign), lo_i - 2 * delta, hi_i + 2 * delta,
                                  h, ds_max=w / 8.0)

    hats = {1: chi_hat_factory(1), -1: chi_hat_factory(-1)}

    span = (hi_i - lo_i) + 2.0 * margin
    P = 1.0
    while True:
        K = int(round(2.0 * P / h))
        u = (np.arange(2 * K + 1) - K) * h
        cut = smooth_cutoff(u / P)
        tables = {}
        for sign in (1, -1):
            tables[sign] = (hats[sign](u) + sign * ep * np.exp(-TWO_PI * np.abs(u))) * cut
        s_grid, idx = _fft_grid(K, h, lo_i - margin, hi_i + margin, sample_points)
        ratio = 0.0
        for sign in (1, -1):
            hp = _fft_eval(tables[sign], h, idx, len(s_grid.base) if s_grid.base is not None else None)
            exact = chi(s_grid, delta, sign) + sign * ep / (math.pi * (1.0 + s_grid**2))
            r = np.max(np.abs(hp - exact) * math.pi * (1.0 + s_grid**2) / ep)
            ratio = max(ratio, float(r))
        if ratio <= 0.9 or P >= max_P:
            break
        P *= 2.0
    if ratio > 0.9:
        raise DomainError(f"could not reach the pointwise budget (ratio {ratio:.3g} at P = {P})")
    h_minus = TestFunction.from_table(P, h, tables[-1])
    h_plus = TestFunction.from_table(P, h, tables[1])
    report = ApproxPairReport(delta, P, h, ep, ratio, integral_gap)
    if return_report:
        return h_minus, h_plus, report
    return h_minus, h_plus


def _sampled_transform(func, s_lo, s_hi, h, ds_max):
    """Return u -> integral func(s) e(-us) ds for u on the h-grid, by FFT of
    samples on [s_lo, s_hi] (func vanishes outside)."""
    L = 1.0 / h
    n = 1 << int(math.ceil(math.log2(L / ds_max)))
    ds = L / n
    j0 = int(math.floor(s_lo / ds)) - 2
    j1 = int(math.ceil(s_hi / ds)) + 2
    js = np.arange(j0, j1 + 1)
    vals = func(js * ds)
    buf = np.zeros(n)
    buf[js % n] += vals
    spec = np.fft.fft(buf) * ds  # spec[k] = sum_j f(j ds) e(-k h j ds) ds

    def hat(u):
        k = np.rint(np.asarray(u) / h).astype(np.int64)
        return spec[k % n]

    return hat


def _fft_grid(K, h, s_lo, s_hi, points):
    n = 1 << int(math.ceil(math.log2(max(2 * K + 1, points / ((s_hi - s_lo) * h)))))
    ds = 1.0 / (n * h)
    j0 = int(math.ceil(s_lo / ds))
    j1 = int(math.floor(s_hi / ds))
    idx = np.arange(j0, j1 + 1)
    return idx * ds, (idx, n)


def _fft_eval(table, h, idx_n, _unused=None):
    """Trapezoidal inverse transform of a table on the grid s_j = j / (n h)."""
    idx, n = idx_n
    K = (len(table) - 1) // 2
    buf = np.zeros(n, dtype=complex)
    k = np.arange(-K, K + 1)
    buf[k % n] = table
    vals = np.fft.ifft(buf) * n * h  # sum_k table_k e(k j / n) h
    return vals[idx % n].real


def sample_pair(h_minus: TestFunction, h_plus: TestFunction, s_lo: float, s_hi: float,
                points: int = 10_000):
    """Evaluate both members on a common grid of at least ``points`` samples."""
    K = (len(h_plus.fhat_grid) - 1) // 2
    s, idx_n = _fft_grid(K, h_plus.h, s_lo, s_hi, points)
    return s, _fft_eval(h_minus.fhat_grid, h_minus.h, idx_n), _fft_eval(h_plus.fhat_grid, h_plus.h, idx_n)


# ---------------------------------------------------------------------------
# two-variable test functions

KINDS_2D = ("gaussian_window", "indicator_square", "fourier_table_2d")


@dataclass(frozen=True, eq=False)
class TestFunction2D:
    kind: str
    lo: float = 0.0
    hi: float = 0.0
    terms: tuple = ()  # (coef, f1, f2) tensor terms for fourier_table_2d
    radius: Optional[float] = None  # index-domain truncation for slowly decaying tables

    __test__ = False

    def __post_init__(self):
        if self.kind not in KINDS_2D:
            raise DomainError(f"unknown 2D test function kind {self.kind!r}")

    @classmethod
    def gaussian_window(cls) -> "TestFunction2D":
        return cls("gaussian_window")

    @classmethod
    def indicator_square(cls, lo: float, hi: float) -> "TestFunction2D":
        return cls("indicator_square", lo=float(lo), hi=float(hi))

    @classmethod
    def index_square(cls, N: int) -> "TestFunction2D":
        """Indicator of 1 <= j, k <= N in the scaled variables (j, k)/N."""
        return cls("indicator_square", lo=1.0 / N, hi=1.0)

    @classmethod
    def tensor(cls, terms, radius=None) -> "TestFunction2D":
        return cls("fourier_table_2d", terms=tuple(terms), radius=radius)

    def value(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "gaussian_window":
            return np.exp(-math.pi * (x * x + y * y))
        if self.kind == "indicator_square":
            return ((x >= self.lo) & (x <= self.hi) & (y >= self.lo) & (y <= self.hi)).astype(float)
        x, y = np.broadcast_arrays(x, y)
        # on meshgrids only the distinct coordinates need the (costly) inverse transform
        ux, ix = np.unique(x, return_inverse=True)
        uy, iy = np.unique(y, return_inverse=True)
        out = np.zeros(x.shape)
        for c, f1, f2 in self.terms:
            out += c * np.asarray(f1.value(ux)).reshape(-1)[ix.reshape(x.shape)] \
                * np.asarray(f2.value(uy)).reshape(-1)[iy.reshape(y.shape)]
        return out

    def fhat(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind == "gaussian_window":
            return np.exp(-math.pi * (u * u + v * v))
        if self.kind == "indicator_square":
            one = TestFunction.indicator(self.lo, self.hi)
            return one.fhat(u) * one.fhat(v)
        return sum(c * f1.fhat(u) * f2.fhat(v) for c, f1, f2 in self.terms)

    def fhat_support(self) -> float:
        """Half-width of a box containing the support of psi_hat (inf if none)."""
        if self.kind == "fourier_table_2d":
            return max(max(f1.support, f2.support) for _, f1, f2 in self.terms) if self.terms else 0.0
        return math.inf

    def index_radius(self, N: int) -> int:
        """Largest |j| with psi(j/N, .) possibly non-zero."""
        if self.kind == "indicator_square":
            return int(math.floor(max(abs(self.lo), abs(self.hi)) * N + 1e-9))
        if self.kind == "gaussian_window":
            return int(math.ceil(6.5 * N))
        if self.radius is None:
            raise DomainError("psi decays too slowly; give an explicit truncation radius")
        return int(math.floor(self.radius * N))


def build_tensor_pair(I, g=None, eps: float = 0.1, **kw):
    """psi_- <= (g 1_I) x (g 1_I) <= psi_+ from the one-variable pair.

    psi_+ = h_+ x h_+ and psi_- = h_- x h_+ + h_+ x h_- - h_+ x h_+.
    """
    hm, hp = build_approx_pair(I, g, eps, **kw)
    plus = TestFunction2D.tensor([(1.0, hp, hp)])
    minus = TestFunction2D.tensor([(1.0, hm, hp), (1.0, hp, hm), (-1.0, hp, hp)])
    return minus, plus, hm, hp
