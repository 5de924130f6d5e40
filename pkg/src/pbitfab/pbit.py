"""The weighted p-bit: weight row, overflow MUX, tanh LUT, comparator, latch.

A weighted p-bit bundles one row of the interconnection matrix and its
bias with a tunable RNG.  One update computes

    I = I0 * (h + sum_j J_ij m_j [+ h_C * m_C])

exactly in widened fixed point, clamps it through the multiplexer into
the activation domain [-8, 7.75], looks the sigmoid value up in a
64-entry table, and latches m = 1 iff a fresh LFSR sample falls below
the table value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .fixedpoint import (
    S32, U031, FixedFormat, FixedPoint, fx, fx_saturate, fx_scale,
)
from .lfsr import Lfsr32

# Activation-domain bounds (Table I's min_tanh / max_tanh).
MIN_TANH = fx(-8, S32)
MAX_TANH = fx("7.75", S32)


class ActivationTable:
    """z = (tanh(u) + 1) / 2 for u on the s[3][2] grid, truncated to 31 bits.

    64 entries for u = -8, -7.75, ..., 7.75.  Entries are strictly
    increasing mantissas in [0, 2^31); the u = 0 entry is exactly 0.5.
    """

    SIZE = 64

    def __init__(self):
        self.entries = []
        for i in range(self.SIZE):
            u = (i - 32) / 4.0
            z = (math.tanh(u) + 1.0) / 2.0
            self.entries.append(math.floor(z * (1 << 31)))

    def lookup_raw(self, u: FixedPoint) -> int:
        if u.fmt.frac_bits != 2:
            raise ValueError("activation input must have 2 fractional bits")
        idx = u.raw + 32
        if not 0 <= idx < self.SIZE:
            raise ValueError(f"input {u} outside activation domain")
        return self.entries[idx]


_DEFAULT_TABLE = ActivationTable()


def activate(table: ActivationTable, u: FixedPoint) -> FixedPoint:
    """Table lookup; exact, no interpolation (u is always a grid point)."""
    return FixedPoint(table.lookup_raw(u), U031)


@dataclass
class WeightedPBit:
    """One composite unit: weight row, bias, clamp controls, LFSR, latch."""

    weights: list          # row J_i as FixedPoint, all sharing frac_bits
    bias: FixedPoint       # h_i
    i0: FixedPoint
    lfsr: Lfsr32
    select: bool = False   # S: when set, output follows `clamp`
    clamp: int = 0         # C
    hc: FixedPoint | None = None  # inter-tile coupling strength
    mc: int = 0            # external coupling input, {0, 1}
    m: int = 0             # latched binary output
    label: str = ""

    def __post_init__(self):
        fb = self.bias.fmt.frac_bits
        for w in self.weights:
            if w.fmt.frac_bits != fb:
                raise ValueError("weight row and bias must share frac_bits")


def weighted_sum(p: WeightedPBit, m_others) -> FixedPoint:
    """I = I0 * (h_i + sum_j J_ij m_j [+ h_C m_C]), exact and widened."""
    if len(m_others) != len(p.weights):
        raise ValueError("m vector length does not match weight row")
    fb = p.bias.fmt.frac_bits
    acc = p.bias.raw
    max_int = p.bias.fmt.int_bits
    for w, m in zip(p.weights, m_others):
        if m not in (0, 1):
            raise ValueError("p-bit outputs must be binary")
        acc += w.raw * m
        max_int = max(max_int, w.fmt.int_bits)
    n_terms = len(p.weights) + 1
    if p.hc is not None:
        acc += p.hc.raw * p.mc
        max_int = max(max_int, p.hc.fmt.int_bits)
        n_terms += 1
    # one extra integer bit per addition keeps the true sum exactly
    wide = FixedFormat(max_int + n_terms, fb)
    return fx_scale(FixedPoint(acc, wide), p.i0)


def mux_threshold(p: WeightedPBit, total: FixedPoint) -> FixedPoint:
    """Table I: clamp override when S is set, saturation otherwise."""
    if p.select:
        return MAX_TANH if p.clamp else MIN_TANH
    return fx_saturate(total, MIN_TANH, MAX_TANH)


def pbit_update(p: WeightedPBit, m_others, table: ActivationTable = _DEFAULT_TABLE) -> int:
    """One full update; steps the LFSR exactly once and latches m.

    m = 1 iff rand < z (strict comparison, ties resolve to 0), so the
    update probability equals the table value exactly under ideal
    uniform rand.
    """
    u = mux_threshold(p, weighted_sum(p, m_others))
    z_raw = table.lookup_raw(u)
    r_raw = p.lfsr.uniform_raw()
    p.m = 1 if r_raw < z_raw else 0
    return p.m
