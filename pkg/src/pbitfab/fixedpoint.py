"""Two's-complement fixed-point values with saturating, widening arithmetic.

All weights, biases and activation inputs in the emulator are carried as
s[x][y] numbers: a sign bit, x integer bits and y fractional bits, stored
as an integer mantissa ("raw") scaled by 2^-y.  Arithmetic is exact:
additions widen by one integer bit instead of wrapping, multiplication
produces the full-precision product and truncates toward negative
infinity, and saturation is an explicit, separate step.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

_FMT_RE = re.compile(r"^([su])\[(\d+)\]\[(\d+)\]$")


@dataclass(frozen=True)
class FixedFormat:
    """An s[x][y] (or unsigned u[x][y]) fixed-point format.

    Signed formats span [-2^x, 2^x - 2^-y] with resolution 2^-y; e.g.
    s[4][2] spans [-16, 15.75].
    """

    int_bits: int
    frac_bits: int
    signed: bool = True

    def __post_init__(self):
        if self.int_bits < 0 or self.frac_bits < 0:
            raise ValueError("bit counts must be non-negative")

    @property
    def total_bits(self) -> int:
        return self.int_bits + self.frac_bits + (1 if self.signed else 0)

    @property
    def min_raw(self) -> int:
        return -(1 << (self.int_bits + self.frac_bits)) if self.signed else 0

    @property
    def max_raw(self) -> int:
        return (1 << (self.int_bits + self.frac_bits)) - 1

    @property
    def resolution(self) -> Fraction:
        return Fraction(1, 1 << self.frac_bits)

    def widen(self, extra_int_bits: int = 1) -> "FixedFormat":
        return FixedFormat(self.int_bits + extra_int_bits, self.frac_bits, self.signed)

    def __str__(self) -> str:
        return "%s[%d][%d]" % ("s" if self.signed else "u", self.int_bits, self.frac_bits)

    @classmethod
    def parse(cls, text: str) -> "FixedFormat":
        m = _FMT_RE.match(text.strip())
        if m is None:
            raise ValueError(f"not a fixed-point format: {text!r}")
        return cls(int(m.group(2)), int(m.group(3)), signed=m.group(1) == "s")


# Formats used throughout the fabric.
S32 = FixedFormat(3, 2)     # activation-function input domain, [-8, 7.75]
S42 = FixedFormat(4, 2)
U031 = FixedFormat(0, 31, signed=False)  # activation outputs / uniform samples in [0, 1)


@dataclass(frozen=True)
class FixedPoint:
    """An exact fixed-point number: value = raw * 2^-frac_bits."""

    raw: int
    fmt: FixedFormat

    def __post_init__(self):
        if not (self.fmt.min_raw <= self.raw <= self.fmt.max_raw):
            raise ValueError(f"raw {self.raw} out of range for {self.fmt}")

    @property
    def value(self) -> Fraction:
        return Fraction(self.raw, 1 << self.fmt.frac_bits)

    def __float__(self) -> float:
        return self.raw / (1 << self.fmt.frac_bits)

    def __str__(self) -> str:
        return f"{self.value} ({self.fmt})"


def fx(value, fmt: FixedFormat) -> FixedPoint:
    """Exact conversion of an int/Fraction/decimal-string to `fmt`.

    Raises ValueError if the value is not a multiple of the format's
    resolution or falls outside its range.
    """
    frac = Fraction(value)
    raw = frac * (1 << fmt.frac_bits)
    if raw.denominator != 1:
        raise ValueError(f"{frac} not representable at resolution 2^-{fmt.frac_bits}")
    p = FixedPoint(int(raw), fmt)  # range check in __post_init__
    return p


def fx_from_rational(numer: int, denom: int, fmt: FixedFormat,
                     truncate: bool = False) -> FixedPoint:
    """Build numer/denom in `fmt`; denom must be a power of two.

    Exact when representable; with truncate=True, rounds toward negative
    infinity to the nearest representable value.  Out-of-range values
    saturate at the format bounds.
    """
    if denom <= 0 or denom & (denom - 1):
        raise ValueError(f"denominator {denom} is not a positive power of two")
    scaled = numer * (1 << fmt.frac_bits)
    if scaled % denom and not truncate:
        raise ValueError(
            f"{numer}/{denom} not representable in {fmt} (pass truncate=True)")
    raw = scaled // denom  # floor division: truncation toward -inf
    raw = min(max(raw, fmt.min_raw), fmt.max_raw)
    return FixedPoint(raw, fmt)


def fx_add_widened(a: FixedPoint, b: FixedPoint) -> FixedPoint:
    """Exact sum, one integer bit wider than the wider operand."""
    if a.fmt.frac_bits != b.fmt.frac_bits:
        raise ValueError("operands must share frac_bits")
    out = FixedFormat(max(a.fmt.int_bits, b.fmt.int_bits) + 1, a.fmt.frac_bits)
    return FixedPoint(a.raw + b.raw, out)


def fx_saturate(a: FixedPoint, lo: FixedPoint, hi: FixedPoint) -> FixedPoint:
    """Clamp `a` into [lo, hi]; result carries lo's format."""
    if lo.fmt != hi.fmt:
        raise ValueError("saturation bounds must share a format")
    if a.fmt.frac_bits != lo.fmt.frac_bits:
        raise ValueError("operand and bounds must share frac_bits")
    if lo.raw > hi.raw:
        raise ValueError("lo exceeds hi")
    return FixedPoint(min(max(a.raw, lo.raw), hi.raw), lo.fmt)


def fx_scale(a: FixedPoint, k: FixedPoint) -> FixedPoint:
    """Exact product truncated (toward -inf) back to a's fractional width."""
    prod = a.raw * k.raw                  # frac_bits = a.fb + k.fb
    raw = prod >> k.fmt.frac_bits         # arithmetic shift floors negatives
    out = FixedFormat(a.fmt.int_bits + k.fmt.int_bits + 1, a.fmt.frac_bits)
    return FixedPoint(raw, out)
