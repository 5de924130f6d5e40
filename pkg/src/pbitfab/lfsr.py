"""XNOR-feedback linear feedback shift registers.

Each p-bit owns a 32-bit LFSR with taps at positions 32, 22, 2 and 1
(1-indexed, position 1 = LSB).  The register shifts toward the MSB and
the XNOR of the tapped bits enters at bit 0 (Fibonacci configuration).
The all-ones state is the lock-up state and is excluded; from any other
seed the sequence has period 2^32 - 1.
"""

from __future__ import annotations

MASK32 = 0xFFFFFFFF
TAPS32 = (32, 22, 2, 1)

# Maximal-length XNOR tap sets for small widths, used by tests to
# brute-force full-period behaviour cheaply.
TAPS8 = (8, 6, 5, 4)
TAPS16 = (16, 15, 13, 4)


class Lfsr:
    """Fibonacci LFSR of arbitrary width with XNOR feedback."""

    __slots__ = ("width", "taps", "state", "_mask", "_tapmask")

    def __init__(self, seed: int, width: int = 32, taps=TAPS32):
        self._mask = (1 << width) - 1
        if not 0 <= seed <= self._mask:
            raise ValueError(f"seed {seed:#x} does not fit in {width} bits")
        if seed == self._mask:
            raise ValueError("all-ones seed is the XNOR lock-up state")
        self.width = width
        self.taps = tuple(taps)
        self.state = seed
        self._tapmask = 0
        for t in self.taps:
            if not 1 <= t <= width:
                raise ValueError(f"tap {t} outside 1..{width}")
            self._tapmask |= 1 << (t - 1)

    def step(self) -> int:
        """Shift once; returns the post-shift register value."""
        v = self.state & self._tapmask
        # parity of the tapped bits
        parity = 0
        while v:
            v &= v - 1
            parity ^= 1
        feedback = parity ^ 1  # XNOR
        self.state = ((self.state << 1) | feedback) & self._mask
        return self.state


class Lfsr32(Lfsr):
    """The fabric's per-p-bit RNG: 32-bit, taps 32/22/2/1."""

    def __init__(self, seed: int):
        super().__init__(seed, width=32, taps=TAPS32)

    def uniform_raw(self) -> int:
        """One uniform sample as an s[0][31]-style mantissa in [0, 2^31).

        The top 31 bits of the stepped register are the fraction, so the
        value is sample/2^32 rounded down to 31 bits.
        """
        return self.step() >> 1


def lfsr_new(seed: int) -> Lfsr32:
    return Lfsr32(seed)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Per-p-bit 32-bit seed from a master seed and the p-bit's index.

    SplitMix-style mixing guarantees distinct, decorrelated seeds; the
    forbidden all-ones state is remapped.
    """
    z = _splitmix64(((master_seed & 0xFFFFFFFF) << 32) | (index & 0xFFFFFFFF))
    s = z & MASK32
    while s == MASK32:
        z = _splitmix64(z)
        s = z & MASK32
    return s
