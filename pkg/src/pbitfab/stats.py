"""Sample logs, histograms, sweep statistics and distribution distances."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Tile
from .fixedpoint import S32, fx
from .lfsr import Lfsr32
from .pbit import WeightedPBit

_TERM_RE = re.compile(r"([+-]?)\s*([A-Za-z_]\w*)")


@dataclass
class SampleLog:
    """Recorded state vectors plus named bit-groups.

    Groups map a name to the global bit positions of a little-endian
    integer (element 0 = LSB, matching bit counting "from the LSB side").
    """

    samples: np.ndarray                       # (n_samples, width) of 0/1
    groups: dict = field(default_factory=dict)  # name -> [bit index, ...]

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.uint8)
        if self.samples.ndim != 2:
            raise ValueError("samples must be 2-D")
        for name, bits in self.groups.items():
            if any(not 0 <= b < self.samples.shape[1] for b in bits):
                raise ValueError(f"group {name!r} indexes outside the state width")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    def decode(self, name: str) -> np.ndarray:
        """Per-sample integers for one group (little-endian)."""
        try:
            bits = self.groups[name]
        except KeyError:
            raise KeyError(f"unknown group {name!r}") from None
        if len(bits) > 62:
            # arbitrary-precision fallback; group widths here never need it
            out = [sum(int(row[b]) << k for k, b in enumerate(bits))
                   for row in self.samples]
            return np.asarray(out, dtype=object)
        weights = (np.int64(1) << np.arange(len(bits), dtype=np.int64))
        return self.samples[:, bits].astype(np.int64) @ weights


def log_from_circuit(circuit: Circuit, samples: np.ndarray) -> SampleLog:
    """Attach the circuit's terminal groups to a recorded sample block."""
    groups = {name: [circuit.global_index(t, i) for (t, i) in addrs]
              for name, addrs in circuit.groups.items()}
    return SampleLog(samples=samples, groups=groups)


def histogram(log: SampleLog, group_expr: str) -> dict:
    """Exact counts of a signed group expression, e.g. "S-A-B" or "A+B+C".

    Signed arithmetic is done in Python integers; no wraparound.
    """
    terms = _TERM_RE.findall(group_expr)
    if not terms or "".join(s + n for s, n in terms).replace(" ", "") != \
            group_expr.replace(" ", ""):
        raise ValueError(f"cannot parse group expression {group_expr!r}")
    total = None
    for sign, name in terms:
        vals = log.decode(name)
        vals = vals if vals.dtype == object else vals.astype(object)
        signed = -vals if sign == "-" else vals
        total = signed if total is None else total + signed
    counts: dict = {}
    for v in total:
        v = int(v)
        counts[v] = counts.get(v, 0) + 1
    return counts


def state_histogram(samples: np.ndarray) -> dict:
    """Counts of full state tuples."""
    counts: dict = {}
    for row in np.asarray(samples):
        key = tuple(int(v) for v in row)
        counts[key] = counts.get(key, 0) + 1
    return counts


def to_distribution(counts: dict) -> dict:
    total = sum(counts.values())
    if total == 0:
        return {}
    return {k: v / total for k, v in counts.items()}


def tv_distance(p: dict, q: dict) -> float:
    """Total-variation distance (1/2) sum |p - q| over the union support."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def sigmoid_grid():
    """The 64 representable activation inputs, -8 to 7.75 in steps of 0.25."""
    return [(i - 32) / 4.0 for i in range(64)]


def sigmoid_sweep(n_updates: int, master_seed: int = 0, grid=None, i0=1):
    """Time-averaged output of a single clamp-free p-bit per input point.

    The p-bit's bias pins its input; each grid point gets its own
    deterministic seed.  Returns a list of (input, mean output) pairs.
    """
    grid = sigmoid_grid() if grid is None else list(grid)
    out = []
    for idx, u in enumerate(grid):
        p = WeightedPBit(weights=[fx(0, S32)], bias=fx(u, S32),
                         i0=fx(i0, S32), lfsr=Lfsr32(0), label="m")
        c = Circuit([Tile(pbits=[p])], i0=fx(i0, S32),
                    master_seed=master_seed * 1000003 + idx)
        samples = c.run_sweeps(n_updates)
        out.append((u, float(samples[:, 0].mean())))
    return out
