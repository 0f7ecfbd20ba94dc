"""Sequences modulo one: {alpha n^d}, {alpha n^2 / N} and a seeded uniform model."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fixedvec import U64, FracArray, frac_times_int
from .realnum import FRAC_BITS, FRAC_MASK, INT_LIMIT, DomainError, FixedReal, RangeError

FAMILIES = ("power", "scaled_square", "uniform_random")


@dataclass(frozen=True)
class SequenceSpec:
    family: str
    N: int
    alpha: FixedReal = field(default_factory=lambda: FixedReal(0))
    d: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.N < 1:
            raise DomainError("N must be at least 1")
        if self.family == "power":
            if self.d < 1:
                raise DomainError("d must be at least 1")
            if self.N**self.d >= INT_LIMIT:
                raise RangeError("N**d must be below 2**63")
        if self.family == "scaled_square" and self.N**2 >= INT_LIMIT:
            raise RangeError("N**2 must be below 2**63")
        if self.family == "uniform_random" and not 0 <= self.seed < 2**128:
            raise DomainError("seed must lie in [0, 2**128)")


def generate(spec: SequenceSpec) -> FracArray:
    """Elements n = 1..N of the sequence as exact 128-bit fractional parts."""
    return generate_chunk(spec, 0, spec.N)


def generate_chunk(spec: SequenceSpec, start: int, stop: int) -> FracArray:
    """Elements with 0-based positions start..stop-1 (n = start+1..stop).

    Any partition into chunks reproduces the serial output bit for bit.
    """
    if not 0 <= start <= stop <= spec.N:
        raise DomainError("chunk bounds must satisfy 0 <= start <= stop <= N")
    n = np.arange(start + 1, stop + 1, dtype=U64)
    if spec.family == "power":
        m = n**U64(spec.d)
        return FracArray(*frac_times_int(spec.alpha, m))
    if spec.family == "scaled_square":
        raw = spec.alpha.raw
        N = spec.N
        vals = [((raw * k * k) // N) & FRAC_MASK for k in range(start + 1, stop + 1)]
        return FracArray.from_raws(vals)
    return _uniform_chunk(spec.seed, start, stop)


def _uniform_chunk(seed: int, start: int, stop: int) -> FracArray:
    # Philox4x64-10 keyed by the seed.  Element n (1-based) takes raw words
    # 2(n-1) (high) and 2(n-1)+1 (low).  Counter c starts at word 4c, so a
    # chunk is reached directly without generating its predecessors.
    count = stop - start
    if count == 0:
        return FracArray(np.zeros(0, U64), np.zeros(0, U64))
    offset = 2 * (start % 2)
    bitgen = np.random.Philox(key=seed, counter=start // 2)
    words = bitgen.random_raw(2 * count + offset)[offset:].astype(U64)
    return FracArray(words[0::2], words[1::2])


def dump_csv(theta: FracArray, path_or_file, places: int = 40) -> None:
    """One value per line as a decimal with ``places`` digits."""
    close = False
    if isinstance(path_or_file, str):
        fh = open(path_or_file, "w", encoding="ascii")
        close = True
    else:
        fh = path_or_file
    try:
        fh.write("theta\n")
        for x in theta:
            fh.write(x.to_decimal(places) + "\n")
    finally:
        if close:
            fh.close()


__all__ = ["SequenceSpec", "generate", "generate_chunk", "dump_csv", "FracArray", "FRAC_BITS"]
