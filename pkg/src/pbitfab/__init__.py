"""Bit-exact emulator of a tiled FPGA p-bit fabric.

Weighted stochastic units with local fixed-point weight memories,
sequenced tiles, directed tile composition, and exact Boltzmann-law
oracles for invertible-logic experiments (AND, Full Adder, Ripple Carry
Adder, Subset Sum).
"""

from .circuit import Circuit, DirectedLink, Tile
from .fixedpoint import (
    S32, S42, U031, FixedFormat, FixedPoint,
    fx, fx_add_widened, fx_from_rational, fx_saturate, fx_scale,
)
from .lfsr import Lfsr, Lfsr32, derive_seed, lfsr_new
from .library import (
    GateSpec, and_gate, build_rca, build_ssp, default_ssp,
    full_adder_5, full_adder_14, gate_circuit, to_binary, to_bipolar,
)
from .oracle import (
    BoltzmannDistribution, BudgetExceededError,
    energy, enumerate_distribution, reference_sample,
)
from .pbit import (
    MAX_TANH, MIN_TANH, ActivationTable, WeightedPBit,
    activate, mux_threshold, pbit_update, weighted_sum,
)
from .stats import (
    SampleLog, histogram, log_from_circuit, sigmoid_sweep,
    state_histogram, to_distribution, tv_distance,
)

__version__ = "0.1.0"
