"""Quadratic Weyl sums and the frequency-side view of the pair correlation.

S(n, N) = sum_{j<=N} e(n alpha j^2).  The phases frac(n alpha j^2) are formed
exactly on the 128-bit register before being exponentiated in binary64.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import fixedvec as fv
from .paircount import pair_corr_functional
from .realnum import (INT_LIMIT, DomainError, FixedReal, InsufficientDataError, RangeError,
                      cf_expand, dioph_type_estimate)
from .seqgen import SequenceSpec, generate
from .testfn import TestFunction, TestFunction2D

TWO_PI = 2.0 * math.pi
XN_DIRECT_MAX_N = 3000
OSCILLATION_EXHAUSTIVE_MAX_N = 2000


@dataclass(frozen=True)
class WeylSumResult:
    n: int
    N: int
    value: complex


@dataclass(frozen=True)
class XnResult:
    N: int
    sigma: float
    value: float
    method: str
    M: Optional[int] = None
    tail_bound: float = 0.0


def _square_registers(alpha: FixedReal, N: int):
    """(hi, lo) of frac(alpha * j^2) for j = 1..N."""
    if N * N >= INT_LIMIT:
        raise RangeError("N^2 must be below 2^63")
    j = np.arange(1, N + 1, dtype=fv.U64)
    return fv.frac_times_int(alpha, j * j)


def weyl_sums(alpha: FixedReal, ns, N: int, block: int = 64) -> np.ndarray:
    """S(n, N) for every n in ``ns``; negative n give complex conjugates."""
    ns = np.asarray(ns, dtype=np.int64)
    if N < 1:
        raise DomainError("N must be positive")
    if ns.size and int(np.abs(ns).max()) * N * N >= INT_LIMIT:
        raise RangeError("|n| N^2 must be below 2^63")
    hi, lo = _square_registers(alpha, N)
    out = np.empty(ns.shape, dtype=complex)
    flat = ns.ravel()
    res = out.reshape(-1)
    for i0 in range(0, flat.size, block):
        chunk = flat[i0:i0 + block]
        mag = np.abs(chunk).astype(fv.U64)
        phi, plo = fv.mul_u64(hi[None, :], lo[None, :], mag[:, None])
        ph = fv.to_float(phi, plo)
        s = np.exp(TWO_PI * 1j * ph).sum(axis=1)
        res[i0:i0 + block] = np.where(chunk < 0, np.conj(s), s)
    return out


def weyl_sum(alpha: FixedReal, n: int, N: int) -> WeylSumResult:
    return WeylSumResult(int(n), int(N), complex(weyl_sums(alpha, [n], N)[0]))


def partial_weyl_sums(alpha: FixedReal, ns, N_max: int, block: int = 64) -> np.ndarray:
    """Cumulative sums: out[i, N-1] = S(ns[i], N) for N = 1..N_max."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and int(np.abs(ns).max()) * N_max * N_max >= INT_LIMIT:
        raise RangeError("|n| N^2 must be below 2^63")
    hi, lo = _square_registers(alpha, N_max)
    out = np.empty((ns.size, N_max), dtype=complex)
    for i0 in range(0, ns.size, block):
        chunk = ns[i0:i0 + block]
        mag = np.abs(chunk).astype(fv.U64)
        phi, plo = fv.mul_u64(hi[None, :], lo[None, :], mag[:, None])
        e = np.exp(TWO_PI * 1j * fv.to_float(phi, plo))
        e = np.where((chunk < 0)[:, None], np.conj(e), e)
        out[i0:i0 + block] = np.cumsum(e, axis=1)
    return out


# ---------------------------------------------------------------------------
# Weyl's inequality

class WeylCheck(NamedTuple):
    lhs: float            # sum_{n<=M} |S(n, N)|^2
    exponent: float       # slope of log lhs against log N at fixed M
    ratio_exponent: float  # log(lhs) / log(N M)
    violation: bool
    diophantine: bool


def _is_diophantine(alpha: FixedReal, limit: float = 2.5) -> bool:
    try:
        return dioph_type_estimate(cf_expand(alpha), 10**12) <= limit
    except InsufficientDataError:
        return False


def weyl_inequality_check(alpha: FixedReal, M: int, N: int, eps: float = 0.1) -> WeylCheck:
    """Mean square of Weyl sums against the (N M)^(1+eps) bound.

    The growth exponent is measured in N: the slope of
    log sum_{n<=M} |S(n, N')|^2 over N' in {N/4, N/2, N}.  For square-root
    cancellation this slope is 1, for alpha = 0 it is 2.  The plain ratio
    log(lhs)/log(NM) is reported too but mixes the M and N growth rates.
    """
    if M < 1 or N < 4:
        raise DomainError("need M >= 1 and N >= 4")
    ns = np.arange(1, M + 1)
    sizes = [max(1, N // 4), max(1, N // 2), N]
    vals = []
    for n_ in sizes:
        s = weyl_sums(alpha, ns, n_)
        vals.append(float(np.sum(np.abs(s) ** 2)))
    lhs = vals[-1]
    x = np.log(sizes)
    y = np.log(np.maximum(vals, 1e-300))
    slope = float(np.polyfit(x, y, 1)[0])
    ratio = math.log(lhs) / math.log(N * M) if N * M > 1 else float("nan")
    return WeylCheck(lhs, slope, ratio, slope > 1.0 + eps + 0.1, _is_diophantine(alpha))


# ---------------------------------------------------------------------------
# X_N(alpha) = R_2^sigma(f, 1_[1,N]^2) - f_hat(0)

def _fhat0(f) -> float:
    return float(np.real(f.fhat(0.0)))


def xn_direct(alpha: FixedReal, f: TestFunction, sigma: float, N: int) -> XnResult:
    """Direct double sum over 1 <= j != k <= N of the periodised f."""
    if N > XN_DIRECT_MAX_N:
        raise DomainError(f"direct evaluation refused above N = {XN_DIRECT_MAX_N}")
    theta = generate(SequenceSpec("power", N, alpha=alpha, d=2))
    r = pair_corr_functional(f, TestFunction2D.index_square(N), theta, sigma, N)
    return XnResult(N, sigma, r - _fhat0(f), "direct")


def spectral_cutoff(f: TestFunction, sigma: float, N: int, cutoff_eps: float = 0.1) -> int:
    c = float(N) ** sigma
    base = int(math.ceil(N ** (sigma + cutoff_eps)))
    if f.kind == "fourier_table":
        return int(math.floor(f.support * c))  # nothing beyond the support
    return max(base, int(math.ceil(f.decay_horizon() * c)))


def _tail_bound(f, c, M) -> float:
    if f.kind == "fourier_table":
        return 0.0
    m = np.arange(M + 1, M + 1 + int(50 * c) + 10)
    # ||S|^2 - N| <= N^2, so each dropped frequency costs at most |f_hat|
    return float(2.0 * np.abs(f.fhat(m / c)).sum())


def xn_spectral(alpha: FixedReal, f: TestFunction, sigma: float, N: int,
                cutoff_eps: float = 0.1, M: Optional[int] = None) -> XnResult:
    """-f_hat(0)/N + N^-2 sum_{0<|m|<=M} f_hat(m/N^sigma)(|S(m, N)|^2 - N).

    M is N^(sigma+cutoff_eps), raised where needed so that f_hat(m/N^sigma) is
    negligible beyond it; the dropped part is bounded by ``tail_bound``.
    """
    c = float(N) ** sigma
    if M is None:
        M = spectral_cutoff(f, sigma, N, cutoff_eps)
    value = -_fhat0(f) / N
    if M >= 1:
        m = np.arange(1, M + 1)
        s2 = np.abs(weyl_sums(alpha, m, N)) ** 2
        w = np.real(f.fhat(m / c) + f.fhat(-m / c))
        value += float(np.dot(w, s2 - N)) / (N * N)
    return XnResult(N, sigma, value, "spectral", M, _tail_bound(f, c, M))


# ---------------------------------------------------------------------------
# Fourier coefficients of X_N in alpha

def _factorize(n: int) -> dict:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list:
    if n < 1:
        raise DomainError("n must be positive")
    divs = [1]
    for p, e in _factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _difference_of_squares_count(e: int, N: int) -> int:
    """#{1 <= k < j <= N : j^2 - k^2 = e} for e > 0."""
    count = 0
    for u in divisors(e):
        v = e // u
        if u < v and (u - v) % 2 == 0 and (u + v) // 2 <= N:
            count += 1
    return count


FOURIER_COEFF_MAX_L = 10**12


def _as_fhat(fhat):
    return fhat.fhat if hasattr(fhat, "fhat") else fhat


def fourier_coeff_cl(fhat, sigma: float, N: int, l: int) -> float:
    """c_l(N) = N^-2 sum_{n != 0} sum_{1<=j!=k<=N, (j^2-k^2) n = l} f_hat(n/N^sigma).

    l = 0 is the separate constant term -f_hat(0)/N.
    """
    g = _as_fhat(fhat)
    c = float(N) ** sigma
    if l == 0:
        return -float(np.real(g(0.0))) / N
    if abs(l) > FOURIER_COEFF_MAX_L:
        raise DomainError(f"|l| above {FOURIER_COEFF_MAX_L} is not enumerated")
    total = 0.0
    for d in divisors(abs(l)):
        cnt = _difference_of_squares_count(abs(l) // d, N)
        if cnt:
            for n in (d, -d):
                total += cnt * float(np.real(g(n / c)))
    return total / (N * N)


def fourier_coefficients(fhat, sigma: float, N: int, M: int) -> dict:
    """All non-zero c_l with frequencies |n| <= M, by direct enumeration."""
    g = _as_fhat(fhat)
    c = float(N) ** sigma
    j = np.arange(1, N + 1, dtype=np.int64)
    diff = (j[:, None] ** 2 - j[None, :] ** 2)
    diff = diff[diff != 0]
    out = {0: -float(np.real(g(0.0))) / N}
    acc = {}
    for n in range(-M, M + 1):
        if n == 0:
            continue
        w = float(np.real(g(n / c)))
        if w == 0.0:
            continue
        ls, counts = np.unique(n * diff, return_counts=True)
        for l_, k in zip(ls.tolist(), counts.tolist()):
            acc[l_] = acc.get(l_, 0.0) + k * w
    for l_, v in acc.items():
        out[l_] = v / (N * N)
    return out


class ParsevalCheck(NamedTuple):
    coeff_sq_sum: float
    grid_integral: float
    relative_gap: float
    grid_size: int


def parseval_check(alpha_grid_size: Optional[int], f: TestFunction, sigma: float, N: int) -> ParsevalCheck:
    """sum_l |c_l|^2 against the mean of |X_N(k/K)|^2 over k < K.

    Phases at rational alpha = k/K are exact integers mod K.  When K is not
    given it is the least power of two above twice the largest frequency,
    for which the grid mean is the integral (no aliasing).
    """
    if f.kind != "fourier_table":
        raise DomainError("Parseval check needs compactly supported f_hat")
    c = float(N) ** sigma
    M = int(math.floor(f.support * c))
    coeffs = fourier_coefficients(f, sigma, N, M)
    sq = float(sum(v * v for v in coeffs.values()))
    lmax = max(abs(k) for k in coeffs)
    K = alpha_grid_size or 1 << int(math.ceil(math.log2(2 * lmax + 1)))
    j2 = (np.arange(1, N + 1, dtype=np.int64) ** 2) % K
    ms = np.arange(1, M + 1)
    w = np.real(f.fhat(ms / c) + f.fhat(-ms / c))
    ks = np.arange(K, dtype=np.int64)
    total = 0.0
    for k0 in range(0, K, 4096):
        kk = ks[k0:k0 + 4096]
        x = np.full(kk.size, -float(np.real(f.fhat(0.0))) / N)
        for m, wm in zip(ms, w):
            if wm == 0.0:
                continue
            ph = (kk[:, None] * ((m * j2) % K)[None, :]) % K
            s = np.exp(TWO_PI * 1j * ph / K).sum(axis=1)
            x += wm * (np.abs(s) ** 2 - N) / (N * N)
        total += float(np.sum(x * x))
    integral = total / K
    return ParsevalCheck(sq, integral, abs(sq - integral) / sq, K)


# ---------------------------------------------------------------------------
# oscillation of X_N under small shifts of N

def oscillation_experiment(alpha: FixedReal, f: TestFunction, sigma: float, delta: float,
                           N_list, samples: int = 32, exhaustive: bool = False) -> list:
    """Rows (N, L, max_l |X_{N+l} - X_N|) with l over a sample of 0..L, L = floor(N^delta)."""
    if not (-2 + sigma + 2 * delta < 0 and -1.5 + sigma + delta < 0):
        warnings.warn("delta violates -2+sigma+2 delta < 0 or -3/2+sigma+delta < 0", stacklevel=2)
    rows = []
    for N in N_list:
        L = int(math.floor(N ** delta + 1e-12))
        if exhaustive:
            if N > OSCILLATION_EXHAUSTIVE_MAX_N:
                raise DomainError(f"exhaustive l refused above N = {OSCILLATION_EXHAUSTIVE_MAX_N}")
            ls = np.arange(L + 1)
        else:
            ls = np.unique(np.rint(np.linspace(0, L, samples)).astype(int))
        xs = xn_family(alpha, f, sigma, [N + int(l) for l in ls])
        rows.append((N, L, float(np.max(np.abs(xs - xs[0])))))
    return rows


def xn_family(alpha: FixedReal, f: TestFunction, sigma: float, N_values, cutoff_eps: float = 0.1) -> np.ndarray:
    """xn_spectral for several N sharing one pass of cumulative Weyl sums.

    The cutoff of the largest N is used for all of them.
    """
    N_values = [int(n) for n in N_values]
    top = max(N_values)
    M = max(spectral_cutoff(f, sigma, n, cutoff_eps) for n in N_values)
    if M < 1:
        return np.array([-_fhat0(f) / n for n in N_values])
    m = np.arange(1, M + 1)
    S = partial_weyl_sums(alpha, m, top)
    out = []
    for n in N_values:
        c = float(n) ** sigma
        w = np.real(f.fhat(m / c) + f.fhat(-m / c))
        s2 = np.abs(S[:, n - 1]) ** 2
        out.append(-_fhat0(f) / n + float(np.dot(w, s2 - n)) / (n * n))
    return np.array(out)


def emit_weyl_rows(alpha: FixedReal, ns, N: int, fh) -> None:
    fh.write("n,re,im,abs2\n")
    for n, s in zip(ns, weyl_sums(alpha, ns, N)):
        fh.write(f"{n},{s.real:.17g},{s.imag:.17g},{abs(s) ** 2:.17g}\n")
