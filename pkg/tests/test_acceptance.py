"""Acceptance gate: one test per published behaviour the emulator must hit.

Each test prints a single PASS/FAIL line (visible even under capture) and
then asserts, so a red run still reports every criterion's verdict.
Tolerances are stated inline next to each check.
"""

import math
import random

from pbitfab import (
    and_gate, build_rca, default_ssp, enumerate_distribution, full_adder_5,
    full_adder_14, gate_circuit, to_binary,
)
from pbitfab.lfsr import TAPS8, Lfsr
from pbitfab.pbit import MAX_TANH, MIN_TANH, ActivationTable, mux_threshold
from pbitfab.fixedpoint import S32, FixedFormat, FixedPoint, fx, fx_saturate
from pbitfab import stats

from conftest import fa_truth_rows


def report(capsys, num, name, ok, detail):
    with capsys.disabled():
        print(f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def empirical_states(circuit, sweeps, seed=0):
    circuit.seed(seed)
    samples = circuit.run_sweeps(sweeps)
    return stats.to_distribution(stats.state_histogram(samples))


def test_criterion_01_boltzmann_agreement(capsys):
    # floating AND, 10^6 sweeps: TV < 0.01 against exact enumeration and
    # each truth-table state at 0.2466 +/- 0.01
    c = gate_circuit(and_gate())
    emp = empirical_states(c, 1_000_000, seed=1)
    exact = enumerate_distribution(to_binary(and_gate()), i0=1.0).probs
    tv = stats.tv_distance(emp, exact)
    truth = [(0, 0, 0), (0, 1, 0), (1, 0, 0), (1, 1, 1)]
    worst = max(abs(emp.get(s, 0.0) - 0.2466) for s in truth)
    ok = tv < 0.01 and worst < 0.01
    report(capsys, 1, "AND matches Boltzmann law", ok,
           f"TV={tv:.4f} (<0.01), max |p-0.2466|={worst:.4f} (<0.01)")


def test_criterion_02_forward_mode(capsys):
    c = gate_circuit(and_gate())
    c.set_clamp("A", 1)
    c.set_clamp("B", 1)
    c.seed(2)
    samples = c.run_sweeps(1_000_000)
    p_high = samples[:, 2].mean()
    ok = p_high >= 0.90
    report(capsys, 2, "forward AND drives C high", ok,
           f"P(C=1)={p_high:.4f} (>=0.90)")


def test_criterion_03_invertible_mode(capsys):
    c = gate_circuit(and_gate())
    c.set_clamp("C", 0)
    emp = empirical_states(c, 1_000_000, seed=3)
    rows = [(0, 0, 0), (0, 1, 0), (1, 0, 0)]
    worst = max(abs(emp.get(s, 0.0) - 0.3313) for s in rows)
    p_bad = emp.get((1, 1, 0), 0.0)
    ok = worst < 0.02 and p_bad < 0.02
    report(capsys, 3, "inverted AND visits its three factors", ok,
           f"max |p-0.3313|={worst:.4f} (<0.02), P(1,1)={p_bad:.4f} (<0.02)")


def test_criterion_04_full_adder(capsys):
    emp5 = empirical_states(gate_circuit(full_adder_5()), 1_000_000, seed=4)
    exact = enumerate_distribution(to_binary(full_adder_5()), i0=1.0).probs
    tv = stats.tv_distance(emp5, exact)
    top8 = {s for s, _ in sorted(emp5.items(), key=lambda kv: -kv[1])[:8]}
    ok5 = tv < 0.02 and top8 == fa_truth_rows()

    emp14 = empirical_states(gate_circuit(full_adder_14()), 1_000_000, seed=4)
    top8_14 = [s for s, _ in sorted(emp14.items(), key=lambda kv: -kv[1])[:8]]
    projected = {s[:5] for s in top8_14}
    ok14 = projected == fa_truth_rows()

    report(capsys, 4, "Full Adder truth tables dominate", ok5 and ok14,
           f"FA-5 TV={tv:.4f} (<0.02), FA-5 top-8 truth rows: {ok5}, "
           f"FA-14 top-8 project to truth rows: {ok14}")


def test_criterion_05_rca_floating_mode(capsys):
    c = build_rca(8)
    c.seed(5)
    samples = c.run_sweeps(100_000)
    h = stats.histogram(stats.log_from_circuit(c, samples), "S-A-B")
    ranked = sorted(h.items(), key=lambda kv: -kv[1])
    mode, runner = ranked[0], ranked[1]
    ok = mode[0] == 0 and mode[1] >= 2 * runner[1]
    report(capsys, 5, "floating 8-bit RCA selects S-A-B=0", ok,
           f"mode={mode[0]} at {mode[1]} counts, runner-up {runner[0]} at "
           f"{runner[1]} (ratio {mode[1] / runner[1]:.1f}x >= 2x)")


def test_criterion_06_adder_subtractor(capsys):
    rng = random.Random(66)
    sweeps = 20_000  # criterion floor is 10^4 per pair
    add_ok = sub_ok = 0
    n_pairs = 20
    for trial in range(n_pairs):
        a, b = rng.randrange(256), rng.randrange(256)
        c = build_rca(8)
        for k in range(8):
            c.set_clamp(f"A{k}", (a >> k) & 1)
            c.set_clamp(f"B{k}", (b >> k) & 1)
        c.seed(600 + trial)
        log = stats.log_from_circuit(c, c.run_sweeps(sweeps))
        h = stats.histogram(log, "S")
        add_ok += max(h, key=h.get) == a + b

        a2, b2 = rng.randrange(256), rng.randrange(256)
        s = a2 + b2  # clamp A and S; the mode of B must be S - A
        c = build_rca(8)
        for k in range(8):
            c.set_clamp(f"A{k}", (a2 >> k) & 1)
            c.set_clamp(f"S{k}", (s >> k) & 1)
        c.set_clamp("Cout7", (s >> 8) & 1)
        c.seed(700 + trial)
        log = stats.log_from_circuit(c, c.run_sweeps(sweeps))
        h = stats.histogram(log, "B")
        sub_ok += max(h, key=h.get) == b2
    ok = add_ok == n_pairs and sub_ok == n_pairs
    report(capsys, 6, "RCA adds and subtracts", ok,
           f"adder {add_ok}/{n_pairs} correct modes, "
           f"subtractor {sub_ok}/{n_pairs}")


def test_criterion_07_subset_sum(capsys):
    c = default_ssp()
    c.seed(7)
    samples = c.run_sweeps(100_000)
    h = stats.histogram(stats.log_from_circuit(c, samples), "A+B+C")
    total = sum(h.values())
    pair = h.get(3584, 0) + h.get(1536, 0)
    tallest = max(h, key=h.get)
    ok = tallest == 3584 and pair > total - pair
    report(capsys, 7, "SSP finds 512+1024+2048=3584", ok,
           f"tallest bin {tallest} ({h.get(3584, 0)} vs {h.get(1536, 0)} "
           f"for 1536), pair {pair} vs rest {total - pair}")


def test_criterion_08_sigmoid_characteristic(capsys):
    pts = stats.sigmoid_sweep(100_000, master_seed=8)
    worst = max(abs(mean - (math.tanh(u) + 1) / 2) for u, mean in pts)
    mid = next(mean for u, mean in pts if u == 0.0)
    ok = worst < 0.01 and abs(mid - 0.5) < 0.005
    report(capsys, 8, "single p-bit traces the sigmoid", ok,
           f"max pointwise error {worst:.4f} (<0.01), "
           f"mean(m|u=0)={mid:.4f} (0.5 +/- 0.005)")


def test_criterion_09_cycle_accounting(capsys):
    and_cycles = gate_circuit(and_gate()).sweep_cycles
    fa_cycles = gate_circuit(full_adder_14()).sweep_cycles
    rca_cycles = [build_rca(n, fa=full_adder_14()).sweep_cycles
                  for n in (1, 4, 32)]
    ok = and_cycles == 9 and fa_cycles == 42 and rca_cycles == [42, 42, 42]
    report(capsys, 9, "2+1 cycle sequencing", ok,
           f"AND sweep={and_cycles} (9), FA-14 sweep={fa_cycles} (42), "
           f"RCA sweeps N=1/4/32: {rca_cycles} (42 each)")


def test_criterion_10_component_properties(capsys):
    lfsr = Lfsr(0, width=8, taps=TAPS8)
    seen = {lfsr.step() for _ in range(255)}
    lfsr_ok = len(seen) == 255 and 0xFF not in seen

    table = ActivationTable()
    mono_ok = all(a < b for a, b in zip(table.entries, table.entries[1:]))
    center_ok = table.entries[32] == 1 << 30

    from pbitfab.pbit import WeightedPBit
    from pbitfab.lfsr import Lfsr32
    p = WeightedPBit(weights=[fx(0, S32)], bias=fx(0, S32), i0=fx(1, S32),
                     lfsr=Lfsr32(0))
    wide = FixedFormat(6, 2)
    rows = [
        (True, 1, 0, MAX_TANH.raw),    # select overrides with clamp=1
        (True, 0, 0, MIN_TANH.raw),    # select overrides with clamp=0
        (False, 0, 100, MAX_TANH.raw),  # overflow saturates high
        (False, 0, -100, MIN_TANH.raw),  # underflow saturates low
        (False, 0, 5, 5),              # in-range passes through
    ]
    mux_ok = True
    for select, clamp, raw, want in rows:
        p.select, p.clamp = select, clamp
        mux_ok &= mux_threshold(p, FixedPoint(raw, wide)).raw == want

    lo, hi = fx(-8, S32), fx("7.75", S32)
    sat_ok = all(
        fx_saturate(fx_saturate(FixedPoint(r, FixedFormat(7, 2)), lo, hi),
                    lo, hi).raw
        == fx_saturate(FixedPoint(r, FixedFormat(7, 2)), lo, hi).raw
        for r in range(-512, 512))

    ok = lfsr_ok and mono_ok and center_ok and mux_ok and sat_ok
    report(capsys, 10, "component invariants", ok,
           f"LFSR full period: {lfsr_ok}, table monotone: {mono_ok}, "
           f"table(0)=0.5: {center_ok}, MUX rows: {mux_ok}, "
           f"saturation idempotent: {sat_ok}")


def test_criterion_11_convention_equivalence(capsys):
    worst = 0.0
    for g in (and_gate(), full_adder_5()):
        da = enumerate_distribution(g, i0=1.0).probs
        db = enumerate_distribution(to_binary(g), i0=1.0).probs
        assert set(da) == set(db)
        worst = max(worst, max(abs(da[s] - db[s]) for s in da))
    ok = worst < 1e-12
    report(capsys, 11, "binary/bipolar conventions agree", ok,
           f"max state probability difference {worst:.2e} (<1e-12)")
