"""Tiles, sequencers, directed inter-tile links and the global clock.

Within a tile exactly one p-bit is active at a time: each update takes 2
clock cycles (cycle 1: weighted sum + activation lookup, cycle 2: LFSR
compare + latch) followed by a 1-cycle gap, so a tile of n p-bits sweeps
in 3n cycles.  All tiles advance on the same global clock (the
serial-parallel architecture); sums always read the latched outputs from
the start of the cycle, and directed links propagate latched source
values to their destinations at the end of every cycle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .fixedpoint import FixedPoint, fx, S32
from .lfsr import Lfsr32, derive_seed
from .pbit import ActivationTable, WeightedPBit, activate, mux_threshold, weighted_sum

CYCLES_PER_UPDATE = 2
GAP_CYCLES = 1
SLOT = CYCLES_PER_UPDATE + GAP_CYCLES


@dataclass
class Tile:
    """A sequenced group of p-bits updated serially."""

    pbits: list
    update_order: list | None = None

    def __post_init__(self):
        if self.update_order is None:
            self.update_order = list(range(len(self.pbits)))
        if sorted(self.update_order) != list(range(len(self.pbits))):
            raise ValueError("update_order must be a permutation of the p-bit indices")

    @property
    def sweep_cycles(self) -> int:
        return len(self.pbits) * SLOT


@dataclass
class DirectedLink:
    """One-way tile coupling; no reciprocal back-edge is created."""

    source: tuple  # (tile, pbit)
    dest: tuple
    mode: str = "clamp"          # "clamp" (select/clamp follow) or "weighted"
    strength: FixedPoint | None = None  # h_C, weighted mode only

    def __post_init__(self):
        if self.mode not in ("clamp", "weighted"):
            raise ValueError(f"unknown link mode {self.mode!r}")
        if self.mode == "weighted" and self.strength is None:
            raise ValueError("weighted link needs a strength")
        if self.source[0] == self.dest[0]:
            raise ValueError("links couple distinct tiles; intra-tile coupling uses [J]")


class Circuit:
    """A collection of tiles plus directed links on one global clock."""

    def __init__(self, tiles, links=(), i0: FixedPoint | None = None,
                 table: ActivationTable | None = None, master_seed: int = 0,
                 randomize_order: bool = False):
        self.tiles: list[Tile] = list(tiles)
        self.links: list[DirectedLink] = list(links)
        self.i0 = i0 if i0 is not None else fx(1, S32)
        self.table = table if table is not None else ActivationTable()
        self.clock = 0
        self.master_seed = master_seed
        self.randomize_order = randomize_order
        self._order_rng = None

        self.terminals: dict[str, tuple] = {}
        self.groups: dict[str, list] = {}
        for t, tile in enumerate(self.tiles):
            for i, p in enumerate(tile.pbits):
                p.i0 = self.i0
                if p.label:
                    if p.label in self.terminals:
                        raise ValueError(f"duplicate terminal label {p.label!r}")
                    self.terminals[p.label] = (t, i)
        for link in self.links:
            dt, di = link.dest
            dest = self.tiles[dt].pbits[di]
            if link.mode == "clamp":
                dest.select = True
            else:
                dest.hc = link.strength
        self.seed(master_seed)
        # per-tile activation latched on the sum cycle
        self._pending = [[0] * len(t.pbits) for t in self.tiles]
        self.last_activity: list = []

    # -- indexing ---------------------------------------------------------

    @property
    def n_pbits(self) -> int:
        return sum(len(t.pbits) for t in self.tiles)

    def global_index(self, t: int, i: int) -> int:
        return sum(len(x.pbits) for x in self.tiles[:t]) + i

    def pbit_at(self, idx) -> WeightedPBit:
        t, i = self._resolve(idx)
        return self.tiles[t].pbits[i]

    def _resolve(self, idx) -> tuple:
        if isinstance(idx, str):
            try:
                return self.terminals[idx]
            except KeyError:
                raise KeyError(f"unknown terminal {idx!r}") from None
        if isinstance(idx, tuple):
            t, i = idx
        else:
            n = int(idx)
            if not 0 <= n < self.n_pbits:
                raise IndexError(f"p-bit index {n} out of range")
            for t, tile in enumerate(self.tiles):
                if n < len(tile.pbits):
                    return (t, n)
                n -= len(tile.pbits)
        if not (0 <= t < len(self.tiles) and 0 <= i < len(self.tiles[t].pbits)):
            raise IndexError(f"p-bit ({t},{i}) out of range")
        return (t, i)

    # -- control ----------------------------------------------------------

    def seed(self, master_seed: int):
        """Deterministic reset: unique LFSR seed per p-bit, outputs cleared."""
        self.master_seed = master_seed
        g = 0
        for tile in self.tiles:
            for p in tile.pbits:
                p.lfsr = Lfsr32(derive_seed(master_seed, g))
                p.m = 0
                p.mc = 0
                g += 1
        self.clock = 0
        self._order_rng = random.Random(master_seed ^ 0x5EB0)

    def set_clamp(self, target, value):
        """Clamp a p-bit to 0/1, or release it with value="float"."""
        t, i = self._resolve(target)
        p = self.tiles[t].pbits[i]
        if value == "float" or value is None:
            p.select = False
        elif value in (0, 1):
            p.select = True
            p.clamp = int(value)
        else:
            raise ValueError(f"clamp value must be 0, 1 or 'float', got {value!r}")

    def state(self) -> tuple:
        return tuple(p.m for t in self.tiles for p in t.pbits)

    @property
    def sweep_cycles(self) -> int:
        return max((t.sweep_cycles for t in self.tiles), default=0)

    # -- clock model -------------------------------------------------------

    def step_clock(self):
        """Advance one global clock cycle.

        Every p-bit's LFSR free-runs (one shift per clock cycle, as in
        hardware) so successive comparator samples are decorrelated by a
        full tile period.  Sums are computed for every tile before any
        latch happens, so all tiles see a consistent snapshot of the
        pre-cycle outputs; link propagation runs last.
        """
        self.last_activity = []
        for tile in self.tiles:
            for p in tile.pbits:
                p.lfsr.step()
        # pass 1: sum + activation lookup for tiles on their sum cycle
        for t, tile in enumerate(self.tiles):
            if not tile.pbits:
                continue
            phase = self.clock % tile.sweep_cycles
            if phase == 0 and self.randomize_order:
                self._order_rng.shuffle(tile.update_order)
            k, sub = divmod(phase, SLOT)
            i = tile.update_order[k]
            p = tile.pbits[i]
            if sub == 0:
                m_local = [q.m for q in tile.pbits]
                u = mux_threshold(p, weighted_sum(p, m_local))
                self._pending[t][i] = self.table.lookup_raw(u)
                self.last_activity.append((t, i, "sum"))
            elif sub == 1:
                self.last_activity.append((t, i, "latch"))
        # pass 2: compare + latch
        for t, i, action in self.last_activity:
            if action != "latch":
                continue
            p = self.tiles[t].pbits[i]
            # comparator reads the free-running register's top 31 bits
            p.m = 1 if (p.lfsr.state >> 1) < self._pending[t][i] else 0
        # pass 3: directed links propagate end-of-cycle
        for link in self.links:
            st, si = link.source
            dt, di = link.dest
            m_src = self.tiles[st].pbits[si].m
            dest = self.tiles[dt].pbits[di]
            if link.mode == "clamp":
                dest.clamp = m_src
            else:
                dest.mc = m_src
        self.clock += 1

    def sweep(self) -> tuple:
        """Advance one full sweep (every p-bit of every tile updates at
        least once) and return the recorded state vector."""
        for _ in range(self.sweep_cycles):
            self.step_clock()
        return self.state()

    def run_sweeps(self, n_sweeps: int, force_python: bool = False) -> np.ndarray:
        """Record `n_sweeps` samples via the compiled kernel.

        Bit-identical to calling sweep() n times (checked by tests);
        circuit state (outputs, LFSRs, clock) is synchronized afterwards.
        """
        from . import kernel
        if self.n_pbits == 0:
            return np.zeros((n_sweeps, 0), dtype=np.uint8)
        if self.randomize_order:
            # per-sweep reshuffling lives in the reference engine only
            out = np.zeros((n_sweeps, self.n_pbits), dtype=np.uint8)
            for s in range(n_sweeps):
                out[s] = self.sweep()
            return out
        state = kernel.compile_circuit(self)
        out = kernel.run(state, n_sweeps, force_python=force_python)
        kernel.sync_back(self, state)
        return out
