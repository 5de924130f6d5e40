"""Ground-truth references, independent of the fixed-point fabric.

Two routes: exact Boltzmann enumeration for reciprocal networks, and an
ideal floating-point sequential sampler of the defining update rule

    m_i = sgn( rand(-1,1) + tanh(I_i) ),   I_i = I0 (h_i + sum_j J_ij m_j)

with a high-quality RNG and no fixed-point rounding anywhere.

Distributions are keyed by binary {0,1} state tuples regardless of the
gate convention so emulator histograms and both conventions compare
state-for-state.  For a binary-convention network the energy carries an
extra factor of 2: the comparator activation (tanh(I)+1)/2 equals
logistic(2 I), so the chain's stationary law is exp(+2 I0 (...)) in the
binary coordinates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

ENUMERATION_BUDGET = 24  # max free p-bits for exact enumeration


class BudgetExceededError(Exception):
    pass


@dataclass
class BoltzmannDistribution:
    """Exact stationary probabilities, keyed by binary state tuples."""

    probs: dict
    i0: float

    def __post_init__(self):
        total = sum(self.probs.values())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total}, not 1")
        if any(p < 0 for p in self.probs.values()):
            raise ValueError("negative probability")


def _check_reciprocal(g):
    j = np.asarray([[float(v) for v in row] for row in g.j], dtype=float)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise ValueError("J must be square")
    if not np.array_equal(j, j.T):
        raise ValueError("J must be symmetric")
    if np.any(np.diag(j) != 0):
        raise ValueError("J must have a zero diagonal")
    h = np.asarray([float(v) for v in g.h], dtype=float)
    if h.shape[0] != j.shape[0]:
        raise ValueError("h length must match J")
    return j, h


def _beta(g, i0: float) -> float:
    # binary-convention chains run at twice the naive inverse temperature
    return 2.0 * i0 if g.convention == "binary" else i0


def energy(g, state, i0: float = 1.0) -> float:
    """E for one state in the gate's native convention (unordered pairs)."""
    j, h = _check_reciprocal(g)
    m = np.asarray(state, dtype=float)
    expected = {-1.0, 1.0} if g.convention == "bipolar" else {0.0, 1.0}
    if not set(np.unique(m)) <= expected:
        raise ValueError(f"state values must be in {sorted(expected)}")
    return -_beta(g, i0) * (0.5 * m @ j @ m + h @ m)


def _to_native(bit: int, convention: str):
    return (2 * bit - 1) if convention == "bipolar" else bit


def _resolve_clamps(g, clamps) -> dict:
    out = {}
    for key, val in (clamps or {}).items():
        idx = g.names.index(key) if isinstance(key, str) else int(key)
        if val not in (0, 1):
            raise ValueError("clamp values are binary")
        out[idx] = val
    return out


def enumerate_distribution(g, i0: float = 1.0, clamps=None) -> BoltzmannDistribution:
    """Exact Boltzmann law over the free p-bits, clamped bits conditioned out."""
    j, h = _check_reciprocal(g)
    n = len(g.h)
    fixed = _resolve_clamps(g, clamps)
    free = [i for i in range(n) if i not in fixed]
    if len(free) > ENUMERATION_BUDGET:
        raise BudgetExceededError(
            f"{len(free)} free p-bits exceeds 2^{ENUMERATION_BUDGET} budget")

    k = len(free)
    n_states = 1 << k
    bits = ((np.arange(n_states)[:, None] >> np.arange(k)[None, :]) & 1)
    states = np.zeros((n_states, n), dtype=float)
    for idx, val in fixed.items():
        states[:, idx] = _to_native(val, g.convention)
    native = (2.0 * bits - 1.0) if g.convention == "bipolar" else bits.astype(float)
    states[:, free] = native

    e = -_beta(g, i0) * (0.5 * np.einsum("si,ij,sj->s", states, j, states) + states @ h)
    e -= e.min()
    w = np.exp(-e)
    p = w / w.sum()

    binary = ((states + 1) / 2).astype(int) if g.convention == "bipolar" else states.astype(int)
    probs = {tuple(row): float(pi) for row, pi in zip(binary, p)}
    return BoltzmannDistribution(probs=probs, i0=i0)


def reference_sample(g, i0: float = 1.0, clamps=None, n_sweeps: int = 100_000,
                     seed: int = 0) -> dict:
    """Empirical distribution from the ideal real-arithmetic Gibbs sampler.

    One sweep is one sequential pass over the free p-bits in index order.
    Returns binary state tuples -> relative frequency.
    """
    j, h = _check_reciprocal(g)
    n = len(g.h)
    fixed = _resolve_clamps(g, clamps)
    free = [i for i in range(n) if i not in fixed]

    m = np.zeros(n, dtype=float)
    lo = -1.0 if g.convention == "bipolar" else 0.0
    m[:] = lo
    for idx, val in fixed.items():
        m[idx] = _to_native(val, g.convention)

    rng = np.random.default_rng(seed)
    rows = [j[i] for i in range(n)]
    counts: dict = {}
    tanh = math.tanh
    rand_block = rng.uniform(-1.0, 1.0, size=(n_sweeps, max(len(free), 1)))
    for s in range(n_sweeps):
        u = rand_block[s]
        for t, i in enumerate(free):
            field = i0 * (h[i] + rows[i] @ m)
            m[i] = 1.0 if u[t] + tanh(field) > 0.0 else lo
        key = tuple(int(v) for v in ((m + 1) / 2 if g.convention == "bipolar" else m))
        counts[key] = counts.get(key, 0) + 1
    return {k: v / n_sweeps for k, v in counts.items()}
