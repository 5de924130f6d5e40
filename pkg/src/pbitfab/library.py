"""Canonical gate matrices and circuit constructors.

Gate matrices are kept as exact rationals in the bipolar convention
(m in {-1,+1}) and converted to the binary convention the fabric runs on
(J_binary = 2 J_bipolar, h_binary = h_bipolar - J_bipolar * 1) when a
circuit is built.  Builders cover the three-p-bit AND gate, the 5-p-bit
Full Adder, a 14-p-bit Full Adder reconstruction, N-bit Ripple Carry
Adders and the two-layer Subset Sum instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .circuit import Circuit, DirectedLink, Tile
from .fixedpoint import S32, FixedFormat, fx
from .lfsr import Lfsr32
from .pbit import WeightedPBit

FA_TERMINALS = ("Cin", "B", "A", "S", "Cout")


@dataclass
class GateSpec:
    """Symmetric coupling matrix [J], bias {h} and terminal labels."""

    j: list
    h: list
    names: list
    convention: str = "bipolar"

    def __post_init__(self):
        self.j = [[Fraction(v) for v in row] for row in self.j]
        self.h = [Fraction(v) for v in self.h]
        n = len(self.h)
        if len(self.j) != n or any(len(r) != n for r in self.j):
            raise ValueError("J/h dimensions disagree")
        for i in range(n):
            if self.j[i][i] != 0:
                raise ValueError("J diagonal must be zero")
            for k in range(i):
                if self.j[i][k] != self.j[k][i]:
                    raise ValueError("J must be symmetric")
        if self.convention not in ("bipolar", "binary"):
            raise ValueError(f"unknown convention {self.convention!r}")

    @property
    def size(self) -> int:
        return len(self.h)


def and_gate() -> GateSpec:
    """Invertible AND over terminals [A, B, C]."""
    return GateSpec(
        j=[[0, -1, 2],
           [-1, 0, 2],
           [2, 2, 0]],
        h=[1, 1, -2],
        names=["A", "B", "C"])


def full_adder_5() -> GateSpec:
    """5-p-bit invertible Full Adder; its 8 ground states are the truth table."""
    return GateSpec(
        j=[[0, -1, -1, 1, 2],
           [-1, 0, -1, 1, 2],
           [-1, -1, 0, 1, 2],
           [1, 1, 1, 0, -2],
           [2, 2, 2, -2, 0]],
        h=[0, 0, 0, 0, 0],
        names=list(FA_TERMINALS))


class _GadgetNet:
    """Accumulates pairwise logic-gate penalties into one (J, h)."""

    def __init__(self, names):
        self.names = list(names)
        self.ix = {n: i for i, n in enumerate(self.names)}
        n = len(self.names)
        self.j = [[Fraction(0)] * n for _ in range(n)]
        self.h = [Fraction(0)] * n

    def _add(self, a, b, v):
        i, k = self.ix[a], self.ix[b]
        self.j[i][k] += v
        self.j[k][i] += v

    def not_gate(self, x, y):
        self._add(x, y, Fraction(-1))

    def and_gate(self, a, b, c):
        self._add(a, b, Fraction(-1))
        self._add(a, c, Fraction(2))
        self._add(b, c, Fraction(2))
        self.h[self.ix[a]] += 1
        self.h[self.ix[b]] += 1
        self.h[self.ix[c]] += -2

    def or_gate(self, a, b, c):
        # AND with all terminals complemented: same J, negated h
        self._add(a, b, Fraction(-1))
        self._add(a, c, Fraction(2))
        self._add(b, c, Fraction(2))
        self.h[self.ix[a]] += -1
        self.h[self.ix[b]] += -1
        self.h[self.ix[c]] += 2

    def majority(self, a, b, c, d):
        # balanced so all 8 majority rows share one ground energy
        self._add(a, d, Fraction(1))
        self._add(b, d, Fraction(1))
        self._add(c, d, Fraction(1))
        self._add(a, b, Fraction(-1, 2))
        self._add(a, c, Fraction(-1, 2))
        self._add(b, c, Fraction(-1, 2))


def full_adder_14() -> GateSpec:
    """14-p-bit Full Adder, reconstructed from gate-level subcircuits.

    The published design's exact matrix is unavailable; this network is a
    behavioral reconstruction: S = (A xor B) xor Cin built from
    NOT/AND/OR decompositions of the two XORs (9 auxiliary p-bits) and
    Cout as a balanced majority of (A, B, Cin).  All 8 ground states
    project onto the Full Adder truth table.
    """
    names = list(FA_TERMINALS) + [
        "nA", "nB", "t1", "t2", "S1", "nS1", "nCin", "t3", "t4"]
    net = _GadgetNet(names)
    net.not_gate("A", "nA")
    net.not_gate("B", "nB")
    net.and_gate("A", "nB", "t1")   # t1 = A and not B
    net.and_gate("nA", "B", "t2")   # t2 = not A and B
    net.or_gate("t1", "t2", "S1")   # S1 = A xor B
    net.not_gate("S1", "nS1")
    net.not_gate("Cin", "nCin")
    net.and_gate("S1", "nCin", "t3")
    net.and_gate("nS1", "Cin", "t4")
    net.or_gate("t3", "t4", "S")    # S = S1 xor Cin
    net.majority("A", "B", "Cin", "Cout")
    return GateSpec(j=net.j, h=net.h, names=names)


def to_binary(g: GateSpec) -> GateSpec:
    """J_binary = 2 J, h_binary = h - J*1 (exact)."""
    if g.convention != "bipolar":
        raise ValueError("input must be in the bipolar convention")
    n = g.size
    j = [[2 * g.j[i][k] for k in range(n)] for i in range(n)]
    h = [g.h[i] - sum(g.j[i]) for i in range(n)]
    return GateSpec(j=j, h=h, names=list(g.names), convention="binary")


def to_bipolar(g: GateSpec) -> GateSpec:
    """Inverse of to_binary."""
    if g.convention != "binary":
        raise ValueError("input must be in the binary convention")
    n = g.size
    j = [[g.j[i][k] / 2 for k in range(n)] for i in range(n)]
    h = [g.h[i] + sum(j[i]) for i in range(n)]
    return GateSpec(j=j, h=h, names=list(g.names), convention="bipolar")


# -- circuit construction --------------------------------------------------


def weight_format(values) -> FixedFormat:
    """Smallest s[x][2] format (x >= 3) holding every value exactly."""
    x = 3
    vals = [Fraction(v) for v in values]
    while True:
        fmt = FixedFormat(x, 2)
        lo, hi = -(1 << x), Fraction((1 << x) * 4 - 1, 4)
        if all(lo <= v <= hi for v in vals):
            for v in vals:
                fx(v, fmt)  # raises if not on the 0.25 grid
            return fmt
        x += 1


def gate_tile(g: GateSpec, labels=None) -> Tile:
    """One sequenced tile from a binary-convention gate spec."""
    gb = to_binary(g) if g.convention == "bipolar" else g
    fmt = weight_format([v for row in gb.j for v in row] + list(gb.h))
    labels = list(labels) if labels is not None else list(gb.names)
    pbits = []
    for i in range(gb.size):
        pbits.append(WeightedPBit(
            weights=[fx(v, fmt) for v in gb.j[i]],
            bias=fx(gb.h[i], fmt),
            i0=fx(1, S32),
            lfsr=Lfsr32(0),
            label=labels[i]))
    return Tile(pbits=pbits)


def gate_circuit(g: GateSpec, i0=1, master_seed: int = 0) -> Circuit:
    """Single-tile circuit for a gate, in the binary convention."""
    c = Circuit([gate_tile(g)], i0=fx(i0, S32), master_seed=master_seed)
    c.groups = {name: [c.terminals[name]] for name in g.names}
    return c


def _fa_chain(n_tiles: int, fa: GateSpec, label_map, aux_prefix: str = "fa") -> tuple:
    """n Full Adder tiles plus the directed carry chain (local indices)."""
    gb = to_binary(fa) if fa.convention == "bipolar" else fa
    term = {name: gb.names.index(name) for name in FA_TERMINALS}
    tiles = []
    for k in range(n_tiles):
        labels = [label_map(k, name) if name in FA_TERMINALS
                  else f"{aux_prefix}{k}.{name}"
                  for name in gb.names]
        tiles.append(gate_tile(gb, labels=labels))
    links = [DirectedLink(source=(k, term["Cout"]), dest=(k + 1, term["Cin"]),
                          mode="clamp")
             for k in range(n_tiles - 1)]
    return tiles, links, term


def build_rca(n_bits: int, fa: GateSpec | None = None, i0=1,
              master_seed: int = 0) -> Circuit:
    """N-bit Ripple Carry Adder: directed chain of Full Adder tiles.

    Tile k's Carry-out drives tile k+1's Carry-in (select/clamp follow);
    the first Carry-in is clamped to 0.  Terminal groups A and B are
    n_bits wide; S is n_bits + 1 wide with the final Carry-out as MSB.
    """
    if n_bits < 1:
        raise ValueError("n_bits must be >= 1")
    fa = fa if fa is not None else full_adder_5()
    tiles, links, term = _fa_chain(n_bits, fa, lambda k, nm: f"{nm}{k}")
    c = Circuit(tiles, links, i0=fx(i0, S32), master_seed=master_seed)
    c.set_clamp("Cin0", 0)
    c.groups = {
        "A": [(k, term["A"]) for k in range(n_bits)],
        "B": [(k, term["B"]) for k in range(n_bits)],
        "S": [(k, term["S"]) for k in range(n_bits)] + [(n_bits - 1, term["Cout"])],
    }
    return c


def _encode_set(members) -> set:
    """Free-bit positions for a {0, 2^k, ...} membership set."""
    bits = set()
    for v in members:
        v = int(v)
        if v == 0:
            continue
        if v & (v - 1):
            raise ValueError(f"set member {v} is not a power of two")
        bits.add(v.bit_length() - 1)
    return bits


CARRY_HEADROOM = 3


def build_ssp(target_sum: int, sets, fa: GateSpec | None = None, i0=1,
              width: int | None = None, master_seed: int = 0) -> Circuit:
    """Two-layer adder solving one Subset Sum instance.

    The top layer adds A and B; the bottom layer adds that partial sum to
    C and has its sum clamped to the target.  The bottom layer's
    partial-sum inputs drive the top layer's sum terminals through
    directed (upward) links, so information flows from the clamped sum
    toward the inputs.  Each input is constrained to its set by clamping
    every bit except the set's power-of-two positions to 0.

    The adders are built wider than the target needs (CARRY_HEADROOM
    extra bit positions, all clamped to 0).  With links being one-way,
    the tile holding the highest free bit must not also hold the final
    carry-out clamp: that clamp would veto the carry-generating branch
    of the search locally, skewing the statistics over consistent
    assignments.  Headroom tiles let carries run out of steam downstream
    instead, where the directed chain cannot push back.
    """
    if len(sets) != 3:
        raise ValueError("this two-layer architecture takes exactly 3 input sets")
    if target_sum < 0:
        raise ValueError("target must be non-negative")
    free_bits = [_encode_set(s) for s in sets]
    min_width = max([target_sum.bit_length()] +
                    [b + 1 for bits in free_bits for b in bits] + [1])
    if width is None:
        width = min_width + CARRY_HEADROOM
    elif width < min_width:
        raise ValueError(f"width {width} cannot hold the target and sets "
                         f"(needs >= {min_width})")
    if target_sum >= 1 << (width + 1):
        raise ValueError("target not representable in the output width")
    fa = fa if fa is not None else full_adder_14()

    top_names = {"A": "A{}", "B": "B{}", "S": "P{}",
                 "Cin": "tCin{}", "Cout": "tCout{}"}
    bot_names = {"A": "Pin{}", "B": "C{}", "S": "S{}",
                 "Cin": "bCin{}", "Cout": "bCout{}"}
    top_tiles, top_links, term = _fa_chain(
        width, fa, lambda k, nm: top_names[nm].format(k), aux_prefix="top")
    bot_tiles, bot_links, _ = _fa_chain(
        width, fa, lambda k, nm: bot_names[nm].format(k), aux_prefix="bot")

    links = list(top_links)
    for ln in bot_links:
        links.append(DirectedLink(source=(ln.source[0] + width, ln.source[1]),
                                  dest=(ln.dest[0] + width, ln.dest[1]),
                                  mode="clamp"))
    # upward links: the bottom layer's partial-sum input pins the top sum
    for k in range(width):
        links.append(DirectedLink(source=(width + k, term["A"]),
                                  dest=(k, term["S"]), mode="clamp"))

    c = Circuit(top_tiles + bot_tiles, links, i0=fx(i0, S32),
                master_seed=master_seed)
    c.set_clamp("tCin0", 0)
    c.set_clamp("bCin0", 0)
    # sum terminals carry the target, final carry included
    for k in range(width):
        c.set_clamp(f"S{k}", (target_sum >> k) & 1)
    c.set_clamp(f"bCout{width - 1}", (target_sum >> width) & 1)
    # membership constraints: non-set bits clamped to 0
    for name, bits in zip(("A", "B", "C"), free_bits):
        for k in range(width):
            if k not in bits:
                c.set_clamp(f"{name}{k}", 0)
    c.groups = {
        "A": [c.terminals[f"A{k}"] for k in range(width)],
        "B": [c.terminals[f"B{k}"] for k in range(width)],
        "C": [c.terminals[f"C{k}"] for k in range(width)],
        "P": [c.terminals[f"P{k}"] for k in range(width)],
        "S": [c.terminals[f"S{k}"] for k in range(width)]
             + [c.terminals[f"bCout{width - 1}"]],
    }
    return c


def default_ssp() -> Circuit:
    """The desk-scale instance: target 3584, sets {0,512}, {0,1024}, {0,2048}."""
    return build_ssp(3584, [{0, 512}, {0, 1024}, {0, 2048}])
