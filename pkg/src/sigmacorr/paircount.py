"""Pair counts, spacings, gap structure and higher correlations on the circle.

Membership of a difference theta_j - theta_k in [A, B] + Z is decided exactly:
the binary64 endpoints A = a/N**sigma, B = b/N**sigma are rounded inward to
the 2**-128 grid on which every theta lives, which is equivalent to comparing
the exact real numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from . import fixedvec as fv
from .fixedvec import FracArray, as_frac_array
from .realnum import ONE, DomainError

BRUTE_FORCE_MAX_N = 10_000


@dataclass(frozen=True)
class CorrelationQuery:
    sigma: float
    a: float
    b: float
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise DomainError("N must be at least 1")
        if not 0.0 <= self.sigma < 2.0:
            raise DomainError("sigma must lie in [0, 2)")
        if not self.a <= self.b:
            raise DomainError("need a <= b")
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("window endpoints must be finite")

    def endpoints(self) -> tuple:
        scale = float(self.N) ** self.sigma
        return self.a / scale, self.b / scale, (self.b - self.a) / scale


@dataclass(frozen=True)
class CorrelationEstimate:
    ordered_pair_count: int
    value: float
    window_covers_circle: bool


@dataclass(frozen=True)
class Window:
    """Closed window [start, start + width] on the 2**128 grid, mod 2**128."""
    start: int
    width: int  # -1 encodes an empty window
    covers: bool

    @property
    def empty(self) -> bool:
        return self.width < 0

    @property
    def contains_zero(self) -> bool:
        return not self.empty and (self.start == 0 or self.start + self.width >= ONE)


def make_window(lo: float, hi: float, width_f: float | None = None) -> Window:
    """Quantize the binary64 interval [lo, hi] + Z to the 2**-128 grid."""
    if width_f is None:
        width_f = hi - lo
    aq = math.ceil(Fraction(lo) * ONE)
    bq = math.floor(Fraction(hi) * ONE)
    if width_f >= 1.0 or bq - aq >= ONE - 1:
        return Window(0, ONE - 1, True)
    if bq < aq:
        return Window(0, -1, False)
    shift = aq // ONE
    return Window(aq - shift * ONE, bq - aq, False)


def query_window(query: CorrelationQuery) -> Window:
    lo, hi, width = query.endpoints()
    return make_window(lo, hi, width)


def _estimate(count: int, query: CorrelationQuery, covers: bool) -> CorrelationEstimate:
    return CorrelationEstimate(int(count), count * float(query.N) ** (query.sigma - 2.0), covers)


def _check(theta: FracArray, query: CorrelationQuery):
    if len(theta) != query.N:
        raise DomainError(f"theta has {len(theta)} elements, query expects N = {query.N}")


# sorted route -------------------------------------------------------------

def _searchsorted_total(keys, qhi, qlo, groups, side) -> int:
    # each group of queries is increasing, which keeps the binary searches local
    total = 0
    for sel in groups:
        if sel.any():
            total += int(np.searchsorted(keys, fv.pack(qhi[sel], qlo[sel]), side).sum())
    return total


def count_window_sorted(keys, hi, lo, win: Window, i0: int = 0, i1: int | None = None) -> int:
    """Ordered pairs (i, j), i != j, i in [i0, i1), with s_j - s_i in the window.

    ``keys``/``hi``/``lo`` describe the sorted values s.  For anchor s_i the
    window [K, K + W] with K = s_i + start is split at the wrap point, so the
    count is le(E) - lt(K) + N * [wrapped], E = (K + W) mod 2**128.
    """
    n = len(keys)
    if i1 is None:
        i1 = n
    if i1 <= i0 or win.empty:
        return 0
    if win.covers:
        return (i1 - i0) * (n - 1)
    shi, slo = hi[i0:i1], lo[i0:i1]
    khi, klo, kc = fv.add_const(shi, slo, win.start)
    _, _, wrapped = fv.add_const(khi, klo, win.width)
    ehi, elo, ec = fv.add_const(shi, slo, (win.start + win.width) % ONE)
    lt_k = _searchsorted_total(keys, khi, klo, (kc, ~kc), "left")
    le_e = _searchsorted_total(keys, ehi, elo, (ec, ~ec), "right")
    total = le_e - lt_k + n * int(wrapped.sum())
    if win.contains_zero:
        total -= i1 - i0
    return total


def count_pairs_sorted(theta, query: CorrelationQuery, chunks: int = 1) -> CorrelationEstimate:
    """Exact ordered pair count in O(N log N): one sort, then binary searches.

    ``chunks`` partitions the anchors; partial counts add up to the same total.
    """
    theta = as_frac_array(theta)
    _check(theta, query)
    win = query_window(query)
    if query.N == 1:
        return _estimate(0, query, win.covers)
    keys = np.sort(theta.keys())
    hi, lo = fv.unpack(keys)
    bounds = np.linspace(0, query.N, max(1, chunks) + 1).astype(int)
    count = sum(count_window_sorted(keys, hi, lo, win, int(s), int(e))
                for s, e in zip(bounds[:-1], bounds[1:]))
    return _estimate(count, query, win.covers)


# brute force --------------------------------------------------------------

def member_block(theta: FracArray, rows: slice, win: Window) -> np.ndarray:
    """Boolean block M[j, k] = (theta_j - theta_k mod 1 in window), j in rows."""
    hj, lj = theta.hi[rows][:, None], theta.lo[rows][:, None]
    dhi, dlo = fv.sub(hj, lj, theta.hi[None, :], theta.lo[None, :])
    if win.empty:
        return np.zeros(dhi.shape, dtype=bool)
    if win.covers:
        return np.ones(dhi.shape, dtype=bool)
    shi, slo = np.uint64(win.start >> 64), np.uint64(win.start & fv.MASK64)
    rhi, rlo = fv.sub(dhi, dlo, shi, slo)
    whi, wlo = np.uint64(win.width >> 64), np.uint64(win.width & fv.MASK64)
    return fv.le(rhi, rlo, whi, wlo)


def count_pairs_bruteforce(theta, query: CorrelationQuery, block: int = 256) -> CorrelationEstimate:
    """Definitional O(N^2) double loop (vectorised by row blocks)."""
    theta = as_frac_array(theta)
    _check(theta, query)
    if query.N > BRUTE_FORCE_MAX_N:
        raise DomainError(f"brute force refused above N = {BRUTE_FORCE_MAX_N}")
    win = query_window(query)
    n = query.N
    count = 0
    for r0 in range(0, n, block):
        r1 = min(n, r0 + block)
        m = member_block(theta, slice(r0, r1), win)
        idx = np.arange(r0, r1)
        m[idx - r0, idx] = False
        count += int(m.sum())
    return _estimate(count, query, win.covers)


# spacings -----------------------------------------------------------------

@dataclass(frozen=True)
class SpacingHistogram:
    gaps: np.ndarray
    bin_edges: np.ndarray
    masses: np.ndarray
    ks_distance: float
    exact_gap_total: int  # sum of the gaps in units of 2**-128; always 2**128


def _cyclic_gaps(theta: FracArray):
    s = theta.sorted()
    nhi, nlo = np.roll(s.hi, -1), np.roll(s.lo, -1)
    ghi, glo = fv.sub(nhi, nlo, s.hi, s.lo)
    # all points equal: the single non-trivial gap is the whole circle
    degenerate = s.hi[0] == s.hi[-1] and s.lo[0] == s.lo[-1]
    return ghi, glo, bool(degenerate)


def spacing_measure(theta, bins: int = 50) -> SpacingHistogram:
    theta = as_frac_array(theta)
    n = len(theta)
    if n < 2:
        raise DomainError("spacing measure needs N >= 2")
    if bins < 1:
        raise DomainError("bins must be positive")
    ghi, glo, degenerate = _cyclic_gaps(theta)
    gaps = n * fv.to_float(ghi, glo)
    if degenerate:
        gaps[-1] = float(n)
        total = ONE
    else:
        total = sum((h << 64) | l for h, l in zip(ghi.tolist(), glo.tolist()))
    top = float(gaps.max())
    counts, edges = np.histogram(gaps, bins=bins, range=(0.0, top if top > 0 else 1.0))
    ks = float(stats.kstest(gaps, "expon").statistic)
    return SpacingHistogram(gaps, edges, counts / n, ks, total)


def distinct_gaps(theta) -> int:
    """Number of distinct cyclic gaps, compared exactly."""
    theta = as_frac_array(theta)
    if len(theta) < 2:
        raise DomainError("need N >= 2")
    ghi, glo, degenerate = _cyclic_gaps(theta)
    if degenerate:
        return 2  # N-1 zero gaps and one gap of length 1
    return int(np.unique(fv.pack(ghi, glo)).size)


# higher correlations -------------------------------------------------------

RK_LIMITS = {2: BRUTE_FORCE_MAX_N, 3: 500, 4: 120}


def _box_matrix(theta: FracArray, lo: float, hi: float) -> np.ndarray:
    m = member_block(theta, slice(0, len(theta)), make_window(lo, hi)).astype(np.int64)
    np.fill_diagonal(m, 0)
    return m


def rk_bruteforce(theta, k: int, boxes, scale: float) -> float:
    """(1/N) #{distinct k-tuples x with theta_{x_i} - theta_{x_{i+1}} in scale*box_i + Z}.

    The tuple count is assembled from pairwise membership matrices; coincident
    indices are removed exactly (k <= 4).
    """
    if k < 2:
        raise DomainError("k must be at least 2")
    if k > 4:
        raise DomainError("only k <= 4 is supported")
    boxes = [tuple(map(float, bx)) for bx in boxes]
    if len(boxes) != k - 1:
        raise DomainError(f"need {k - 1} boxes for k = {k}")
    theta = as_frac_array(theta)
    n = len(theta)
    if n > RK_LIMITS[k]:
        raise DomainError(f"N = {n} too large for k = {k} (limit {RK_LIMITS[k]})")
    if n == 0:
        return 0.0
    mats = [_box_matrix(theta, scale * a, scale * b) for a, b in boxes]
    if k == 2:
        count = int(mats[0].sum())
    elif k == 3:
        b1, b2 = mats
        # x1 != x3 removes the x1 = x3 returns
        count = int(b1.sum(axis=0) @ b2.sum(axis=1)) - int(np.einsum("ij,ji->", b1, b2))
    else:
        b1, b2, b3 = mats
        c1 = b1.sum(axis=0)  # c1[x2] = #x1 with B1[x1, x2]
        c3 = b3.sum(axis=1)  # c3[x3] = #x4 with B3[x3, x4]
        s1 = c1[:, None] - b1.T  # excludes x1 = x3
        s4 = c3[None, :] - b3.T  # excludes x4 = x2
        both = (b3 @ b1).T       # x1 = x4 coincidences
        count = int((b2 * (s1 * s4 - both)).sum())
    return count / n


# smoothed functional --------------------------------------------------------

def pair_corr_functional(f, psi, theta, sigma: float, N: int, block: int = 512) -> float:
    """N^(sigma-2) sum_{|j| != |k|} psi((j,k)/N) sum_n f(N^sigma (theta_|j| - theta_|k| + n)).

    Indices run over Z with theta extended evenly (theta_{-j} = theta_j) and
    theta_0 = 0; only indices inside the support of psi contribute, and those
    must be covered by ``theta`` (theta[0] is theta_1).
    """
    from .testfn import TestFunction  # local import keeps module load order simple

    if N < 1:
        raise DomainError("N must be at least 1")
    if not isinstance(f, TestFunction):
        raise DomainError("f must be a TestFunction")
    f.require_decay()
    theta = as_frac_array(theta)
    J = psi.index_radius(N)
    if J > len(theta):
        raise DomainError(f"psi needs theta_1..theta_{J}, only {len(theta)} given")
    zero = np.zeros(1, dtype=np.uint64)
    ext_hi = np.concatenate([zero, theta.hi[:J]])
    ext_lo = np.concatenate([zero, theta.lo[:J]])
    c = float(N) ** sigma
    if f.kind == "indicator":
        win = make_window(f.a / c, f.b / c, (f.b - f.a) / c)
    idx = np.arange(-J, J + 1)
    total = 0.0
    for r0 in range(0, idx.size, block):
        rows = idx[r0:r0 + block]
        jj, kk = np.meshgrid(rows, idx, indexing="ij")
        w = psi.value(jj / N, kk / N) * (np.abs(jj) != np.abs(kk))
        nz = np.nonzero(w)
        if nz[0].size == 0:
            continue
        j_abs, k_abs = np.abs(jj[nz]), np.abs(kk[nz])
        dhi, dlo = fv.sub(ext_hi[j_abs], ext_lo[j_abs], ext_hi[k_abs], ext_lo[k_abs])
        if f.kind == "indicator":
            per = _window_multiplicity(dhi, dlo, f.a / c, f.b / c, win)
        else:
            per = f.periodized(fv.to_float(dhi, dlo), c)
        total += float(np.dot(w[nz], per))
    return total * c / float(N) ** 2


def boundary_correction(theta, query: CorrelationQuery) -> float:
    """Terms of the smoothed functional with a zero index.

    With f = 1_[a,b] and psi = 1_[-1,1]^2 the functional equals
    4 R + 2 N^(sigma-2) (#{k : -theta_k in W} + #{j : theta_j in W}),
    W the scaled window; this returns the second summand.
    """
    theta = as_frac_array(theta)
    win = query_window(query)
    zero = np.zeros(len(theta), dtype=np.uint64)
    neg = fv.sub(zero, zero, theta.hi, theta.lo)
    hits = _in_window(theta.hi, theta.lo, win).sum() + _in_window(*neg, win).sum()
    return 2.0 * float(hits) * float(query.N) ** (query.sigma - 2.0)


def _in_window(hi, lo, win: Window) -> np.ndarray:
    if win.empty:
        return np.zeros(hi.shape, dtype=bool)
    if win.covers:
        return np.ones(hi.shape, dtype=bool)
    shi, slo = np.uint64(win.start >> 64), np.uint64(win.start & fv.MASK64)
    rhi, rlo = fv.sub(hi, lo, shi, slo)
    whi, wlo = np.uint64(win.width >> 64), np.uint64(win.width & fv.MASK64)
    return fv.le(rhi, rlo, whi, wlo)


def _window_multiplicity(dhi, dlo, lo, hi, win: Window) -> np.ndarray:
    """#{n : d + n in [lo, hi]} for exact differences d in [0, 1)."""
    if win.empty:
        return np.zeros(dhi.shape)
    # the window may wrap several times; count whole turns then the remainder
    aq = math.ceil(Fraction(lo) * ONE)
    bq = math.floor(Fraction(hi) * ONE)
    turns, rem = divmod(bq - aq + 1, ONE)
    out = np.full(dhi.shape, float(turns))
    if rem:
        part = Window(aq % ONE, rem - 1, False)
        shi, slo = np.uint64(part.start >> 64), np.uint64(part.start & fv.MASK64)
        rhi, rlo = fv.sub(dhi, dlo, shi, slo)
        whi, wlo = np.uint64(part.width >> 64), np.uint64(part.width & fv.MASK64)
        out += fv.le(rhi, rlo, whi, wlo)
    return out


def emit_rows(rows, fh) -> None:
    """CSV rows (N, sigma, a, b, count, value)."""
    fh.write("N,sigma,a,b,count,value\n")
    for N, sigma, a, b, est in rows:
        fh.write(f"{N},{sigma:.17g},{a:.17g},{b:.17g},{est.ordered_pair_count},{est.value:.17g}\n")
