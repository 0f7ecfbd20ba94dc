"""Vectorised 128-bit fractional registers.

A ``FracArray`` holds values in [0, 1) as two uint64 arrays (high and low
words of the 128-bit register).  Multiplication by 64-bit integers, modular
addition and subtraction are exact.  Big-endian 16-byte packing gives keys
whose byte order equals numeric order, which lets numpy sort and binary-search
128-bit values exactly.
"""
from __future__ import annotations

import numpy as np

from .realnum import FRAC_BITS, FRAC_MASK, FixedReal

U64 = np.uint64
MASK32 = U64(0xFFFFFFFF)
SH32 = U64(32)
MASK64 = (1 << 64) - 1
TWO64 = 2.0**64


def mulhi64(a, b):
    """High 64 bits of the 128-bit product of uint64 arrays."""
    a = np.asarray(a, dtype=U64)
    b = np.asarray(b, dtype=U64)
    a0, a1 = a & MASK32, a >> SH32
    b0, b1 = b & MASK32, b >> SH32
    p00 = a0 * b0
    p01 = a0 * b1
    p10 = a1 * b0
    p11 = a1 * b1
    mid = (p00 >> SH32) + (p01 & MASK32) + (p10 & MASK32)
    return p11 + (p01 >> SH32) + (p10 >> SH32) + (mid >> SH32)


def mul_u64(hi, lo, m):
    """(hi:lo) * m mod 2**128 for uint64 multiplier(s) m."""
    m = np.asarray(m, dtype=U64)
    new_lo = lo * m
    new_hi = hi * m + mulhi64(lo, m)
    return new_hi, new_lo


def add_const(hi, lo, c: int):
    """(hi:lo) + c mod 2**128; also returns the carry out of bit 128."""
    chi, clo = U64(c >> 64), U64(c & MASK64)
    new_lo = lo + clo
    c1 = new_lo < lo
    s = hi + chi
    c2 = s < hi
    new_hi = s + c1.astype(U64)
    c3 = c1 & (new_hi == 0)
    return new_hi, new_lo, c2 | c3


def sub(hi1, lo1, hi2, lo2):
    """(hi1:lo1) - (hi2:lo2) mod 2**128."""
    with np.errstate(over="ignore"):  # numpy scalars warn on the intended wraparound
        lo = lo1 - lo2
        borrow = np.asarray(lo1 < lo2).astype(U64)
        hi = hi1 - hi2 - borrow
    return hi, lo


def le(hi1, lo1, hi2, lo2):
    """Elementwise (hi1:lo1) <= (hi2:lo2)."""
    return (hi1 < hi2) | ((hi1 == hi2) & (lo1 <= lo2))


def to_float(hi, lo):
    return hi.astype(np.float64) / TWO64 + lo.astype(np.float64) / (TWO64 * TWO64)


def pack(hi, lo) -> np.ndarray:
    """Big-endian 16-byte keys ordered like the 128-bit values."""
    words = np.empty((len(hi), 2), dtype=">u8")
    words[:, 0] = hi
    words[:, 1] = lo
    return words.view("S16").ravel()


def unpack(keys: np.ndarray):
    words = np.frombuffer(np.ascontiguousarray(keys).tobytes(), dtype=">u8").reshape(-1, 2)
    return words[:, 0].astype(U64), words[:, 1].astype(U64)


class FracArray:
    """Immutable array of 128-bit fractional parts in [0, 1)."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo):
        hi = np.ascontiguousarray(hi, dtype=U64)
        lo = np.ascontiguousarray(lo, dtype=U64)
        if hi.shape != lo.shape or hi.ndim != 1:
            raise ValueError("hi and lo must be 1-D arrays of equal length")
        hi.flags.writeable = False
        lo.flags.writeable = False
        self.hi = hi
        self.lo = lo

    @classmethod
    def from_raws(cls, raws) -> "FracArray":
        raws = [int(r) & FRAC_MASK for r in raws]
        hi = np.fromiter((r >> 64 for r in raws), dtype=U64, count=len(raws))
        lo = np.fromiter((r & MASK64 for r in raws), dtype=U64, count=len(raws))
        return cls(hi, lo)

    @classmethod
    def from_fixed(cls, values) -> "FracArray":
        if isinstance(values, FracArray):
            return values
        return cls.from_raws(v.raw if isinstance(v, FixedReal) else int(v) for v in values)

    def __len__(self):
        return len(self.hi)

    def raw(self, i: int) -> int:
        return (int(self.hi[i]) << 64) | int(self.lo[i])

    def raws(self) -> list:
        return [(h << 64) | l for h, l in zip(self.hi.tolist(), self.lo.tolist())]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return FracArray(self.hi[i], self.lo[i])
        return FixedReal(self.raw(i))

    def __iter__(self):
        return (FixedReal(r) for r in self.raws())

    def __eq__(self, other):
        if not isinstance(other, FracArray):
            return NotImplemented
        return np.array_equal(self.hi, other.hi) and np.array_equal(self.lo, other.lo)

    def to_float(self) -> np.ndarray:
        return to_float(self.hi, self.lo)

    def keys(self) -> np.ndarray:
        return pack(self.hi, self.lo)

    def sorted(self) -> "FracArray":
        return FracArray(*unpack(np.sort(self.keys())))

    def __repr__(self):
        return f"FracArray(n={len(self)})"


def as_frac_array(theta) -> FracArray:
    return theta if isinstance(theta, FracArray) else FracArray.from_fixed(theta)


def frac_times_int(value: FixedReal, m) -> tuple:
    """frac(value * m) for a uint64 array m, as (hi, lo) words."""
    a = value.frac_part
    ahi = np.full(np.shape(m), a >> 64, dtype=U64)
    alo = np.full(np.shape(m), a & MASK64, dtype=U64)
    return mul_u64(ahi, alo, m)


__all__ = ["FracArray", "as_frac_array", "mulhi64", "mul_u64", "add_const", "sub",
           "le", "pack", "unpack", "to_float", "frac_times_int", "FRAC_BITS"]
