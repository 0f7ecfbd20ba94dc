"""Exact fixed-point reals with 128 fractional bits, continued fractions and
Diophantine type estimation.

A ``FixedReal`` stores ``raw = floor(value * 2**128)`` as a Python int, so the
integer part is ``raw >> 128`` (floor) and the fractional register is
``raw & (2**128 - 1)``.  All arithmetic that can be exact is exact; division
and square roots truncate (or round, where stated) at 2**-128.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction

FRAC_BITS = 128
ONE = 1 << FRAC_BITS
FRAC_MASK = ONE - 1
INT_LIMIT = 1 << 63
MAX_DECIMAL_DIGITS = 45

# stop expanding once |alpha - p/q| drops below this
CF_PRECISION = Fraction(1, 1 << 120)


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class RangeError(OverflowError):
    """Result or intermediate does not fit the fixed-point range."""


class InsufficientDataError(ValueError):
    """Not enough data (e.g. convergents) to form an estimate."""


@dataclass(frozen=True, order=True)
class FixedReal:
    raw: int

    def __post_init__(self):
        if not isinstance(self.raw, int):
            raise TypeError("raw must be an int")
        if not -INT_LIMIT * ONE <= self.raw < INT_LIMIT * ONE:
            raise RangeError("|value| must be below 2**63")

    # construction -------------------------------------------------------
    @classmethod
    def from_parts(cls, int_part: int, frac_part: int) -> "FixedReal":
        if not 0 <= frac_part < ONE:
            raise DomainError("frac_part must lie in [0, 2**128)")
        return cls((int_part << FRAC_BITS) + frac_part)

    @classmethod
    def from_int(cls, k: int) -> "FixedReal":
        return cls(k << FRAC_BITS)

    @classmethod
    def from_fraction(cls, x: Fraction) -> "FixedReal":
        return cls(math.floor(x * ONE))

    @classmethod
    def from_decimal(cls, text: str) -> "FixedReal":
        """Parse a decimal literal with at most 45 significant digits."""
        try:
            dec = Decimal(text.strip())
        except InvalidOperation as exc:
            raise DomainError(f"not a decimal number: {text!r}") from exc
        if not dec.is_finite():
            raise DomainError("value must be finite")
        digits = dec.normalize().as_tuple().digits
        if len(digits) > MAX_DECIMAL_DIGITS:
            raise DomainError(f"at most {MAX_DECIMAL_DIGITS} significant digits accepted")
        return cls.from_fraction(Fraction(dec))

    @classmethod
    def from_hex(cls, text: str) -> "FixedReal":
        """Inverse of :meth:`to_hex`; the ``0x`` prefix is optional."""
        t = text.strip().lower().replace("0x", "", 1)
        try:
            ipart, fpart = t.split(".")
            if len(fpart) != 32:
                raise ValueError
            return cls.from_parts(int(ipart, 16), int(fpart, 16))
        except ValueError as exc:
            raise DomainError(f"malformed fixed-point hex literal: {text!r}") from exc

    # views --------------------------------------------------------------
    @property
    def int_part(self) -> int:
        return self.raw >> FRAC_BITS

    @property
    def frac_part(self) -> int:
        return self.raw & FRAC_MASK

    def frac(self) -> "FixedReal":
        return FixedReal(self.raw & FRAC_MASK)

    def to_fraction(self) -> Fraction:
        return Fraction(self.raw, ONE)

    def __float__(self) -> float:
        return self.raw / ONE

    def to_hex(self) -> str:
        """``"0x<int part>.<32 hex digits>"``; the int part is the floor."""
        ip = self.int_part
        sign = "-" if ip < 0 else ""
        return f"{sign}0x{abs(ip):x}.{self.frac_part:032x}"

    def to_decimal(self, places: int = 40) -> str:
        """Decimal expansion truncated to ``places`` digits after the point."""
        scaled = (self.raw * 10**places) >> FRAC_BITS  # floor
        sign = "-" if scaled < 0 else ""
        scaled = abs(scaled)
        ip, fp = divmod(scaled, 10**places)
        return f"{sign}{ip}.{fp:0{places}d}"

    def __repr__(self) -> str:
        return f"FixedReal({self.to_hex()})"

    # exact arithmetic ---------------------------------------------------
    def __add__(self, other):
        if isinstance(other, int):
            other = FixedReal.from_int(other)
        if not isinstance(other, FixedReal):
            return NotImplemented
        return FixedReal(self.raw + other.raw)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = FixedReal.from_int(other)
        if not isinstance(other, FixedReal):
            return NotImplemented
        return FixedReal(self.raw - other.raw)

    def __neg__(self):
        return FixedReal(-self.raw)

    def __mul__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        return FixedReal(self.raw * k)

    __rmul__ = __mul__


def fx_from_rational(p: int, q: int) -> FixedReal:
    """Truncation of p/q to 128 fractional bits."""
    if q == 0:
        raise DomainError("denominator must be non-zero")
    if q < 0:
        raise DomainError("denominator must be positive")
    return FixedReal((p << FRAC_BITS) // q)


def fx_sqrt_int(m: int) -> FixedReal:
    """sqrt(m) rounded to nearest at 128 fractional bits."""
    if m < 1:
        raise DomainError("m must be a positive integer")
    if m >= INT_LIMIT * INT_LIMIT:
        raise RangeError("sqrt(m) must be below 2**63")
    # r = floor(sqrt(m) * 2**128); round up when sqrt(m)*2**128 >= r + 1/2
    target = m << (2 * FRAC_BITS)
    r = math.isqrt(target)
    if 4 * target >= (2 * r + 1) ** 2:
        r += 1
    return FixedReal(r)


def fx_frac_power(alpha: FixedReal, n: int, d: int) -> FixedReal:
    """frac(alpha * n**d) as (A * n**d) mod 2**128, A the fractional register."""
    if n < 1 or d < 1:
        raise DomainError("n and d must be positive")
    m = n**d
    if m >= INT_LIMIT:
        raise RangeError("n**d must be below 2**63")
    return FixedReal((alpha.frac_part * m) & FRAC_MASK)


def fx_mul(x: FixedReal, y: FixedReal) -> FixedReal:
    """Product truncated (floored) to 128 fractional bits."""
    return FixedReal((x.raw * y.raw) >> FRAC_BITS)


# named constants ---------------------------------------------------------
SQRT2 = fx_sqrt_int(2)
# (1 + sqrt5)/2 = (2**128 + sqrt(5 * 2**256)) / 2**129, floored
GOLDEN = FixedReal((ONE + math.isqrt(5 << (2 * FRAC_BITS))) >> 1)
PI = FixedReal.from_decimal("3.14159265358979323846264338327950288419716939")


@dataclass(frozen=True)
class ContinuedFraction:
    coefficients: tuple
    convergents: tuple  # (p_k, q_k)
    alpha: FixedReal = field(repr=False)
    terminated: bool  # expansion ended exactly or ran out of precision

    def error(self, k: int) -> float:
        """|q_k * alpha - p_k| in binary64 (computed exactly first)."""
        p, q = self.convergents[k]
        return abs(q * self.alpha.raw - p * ONE) / ONE


def cf_expand(alpha: FixedReal, max_terms: int = 200) -> ContinuedFraction:
    """Continued fraction of the stored (exact, rational) value of alpha.

    Stops after ``max_terms`` coefficients, when the expansion terminates, or
    when the current convergent is within 2**-120 of alpha, since later terms
    would describe truncation noise rather than alpha itself.
    """
    if max_terms < 1:
        raise DomainError("max_terms must be positive")
    x = alpha.to_fraction()
    num, den = alpha.raw, ONE
    coeffs, convs = [], []
    p_prev, q_prev, p, q = 0, 1, 1, 0
    terminated = False
    while len(coeffs) < max_terms:
        a, rem = divmod(num, den)
        coeffs.append(a)
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        convs.append((p, q))
        if rem == 0 or abs(x - Fraction(p, q)) < CF_PRECISION:
            terminated = True
            break
        num, den = den, rem
    if terminated and len(coeffs) > 1 and coeffs[-1] == 1:
        # [..., a, 1] and [..., a + 1] name the same rational; keep the short form
        coeffs[-2:] = [coeffs[-2] + 1]
        convs.pop(-2)
    return ContinuedFraction(tuple(coeffs), tuple(convs), alpha, terminated)


def dioph_type_estimate(cf: ContinuedFraction, q_max: int) -> float:
    """Empirical Diophantine type from the convergents with 2 <= q_k <= q_max.

    Along convergents |q_k alpha - p_k| ~ c' * q_k**(1 - kappa), so kappa - 1 is
    the slope of log(1/|q_k alpha - p_k|) against log q_k.  A least-squares
    slope is used instead of a pointwise ratio so that the unknown constant
    drops out.  The result is an empirical lower estimate, not a certificate.
    """
    last = len(cf.convergents) - 1
    xs, ys = [], []
    for k, (p, q) in enumerate(cf.convergents):
        if q < 2 or q > q_max:
            continue
        if cf.terminated and k == last:
            continue  # exact (or precision-limited) final convergent
        err = cf.error(k)
        if err <= 0.0:
            continue
        xs.append(math.log(q))
        ys.append(-math.log(err))
    if len(xs) < 3:
        raise InsufficientDataError(
            f"need at least 3 usable convergents with 2 <= q <= {q_max}, got {len(xs)}")
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return 1.0 + sxy / sxx


def dioph_constant_estimate(cf: ContinuedFraction, kappa: float, q_max: int) -> float:
    """Smallest q**(kappa-1) * |q alpha - p| over usable convergents.

    This is the empirical c in |alpha - p/q| >= c / q**kappa.
    """
    last = len(cf.convergents) - 1
    vals = []
    for k, (p, q) in enumerate(cf.convergents):
        if q < 1 or q > q_max or (cf.terminated and k == last):
            continue
        vals.append(q ** (kappa - 1.0) * cf.error(k))
    if not vals:
        raise InsufficientDataError("no usable convergents")
    return min(vals)


def parse_real(text: str) -> FixedReal:
    """Resolve a named constant, ``p/q``, a hex literal, or a decimal."""
    t = text.strip()
    named = {"sqrt2": SQRT2, "golden": GOLDEN, "pi": PI, "zero": FixedReal(0)}
    if t.lower() in named:
        return named[t.lower()]
    if t.lower().startswith("sqrt(") and t.endswith(")"):
        return fx_sqrt_int(int(t[5:-1]))
    if "/" in t:
        p, q = t.split("/", 1)
        return fx_from_rational(int(p), int(q))
    if "0x" in t.lower():
        return FixedReal.from_hex(t)
    return FixedReal.from_decimal(t)
