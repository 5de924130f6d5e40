"""Experiment runner: build or load circuits, sweep, clamp, report.

Replaces the reference hardware's serial I/O path with files: histograms
go to CSV (value,count,probability), run metadata and verification
metrics to JSON.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import library, netlist, oracle, stats
from .circuit import Circuit
from .oracle import BudgetExceededError
from .pbit import ActivationTable

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VERIFY = 3
EXIT_BUDGET = 4

BUILTIN_CIRCUITS = ("and", "fa5", "fa14", "rca:N", "ssp", "<netlist.json>")


def build_circuit(spec: dict) -> Circuit:
    kind = spec["kind"]
    i0 = Fraction(spec.get("i0", "1"))
    if kind == "and":
        c = library.gate_circuit(library.and_gate(), i0=i0)
    elif kind == "fa5":
        c = library.gate_circuit(library.full_adder_5(), i0=i0)
    elif kind == "fa14":
        c = library.gate_circuit(library.full_adder_14(), i0=i0)
    elif kind == "rca":
        c = library.build_rca(spec["n_bits"], i0=i0)
    elif kind == "ssp":
        sets = spec.get("sets") or [{0, 512}, {0, 1024}, {0, 2048}]
        target = spec.get("target", 3584)
        c = library.build_ssp(target, sets, i0=i0)
    elif kind == "file":
        c = netlist.load_netlist(spec["path"])
        if spec.get("i0") is not None:
            from .fixedpoint import S32, fx
            c.i0 = fx(i0, S32)
            for tile in c.tiles:
                for p in tile.pbits:
                    p.i0 = c.i0
    else:
        raise netlist.NetlistError(f"unknown circuit {kind!r}")
    for target, value in spec.get("clamps", []):
        c.set_clamp(target, value)
    # "all" group: the full state as a little-endian integer
    if "all" not in c.groups:
        c.groups["all"] = [(t, i) for t, tile in enumerate(c.tiles)
                           for i in range(len(tile.pbits))]
    return c


def parse_circuit_arg(arg: str, args) -> dict:
    spec: dict = {"i0": args.i0, "clamps": []}
    for cl in args.clamp or []:
        if "=" not in cl:
            raise netlist.NetlistError(f"--clamp expects NAME=VALUE, got {cl!r}")
        name, _, val = cl.partition("=")
        spec["clamps"].append(
            (name, "float" if val == "float" else int(val)))
    if arg.startswith("rca:"):
        spec.update(kind="rca", n_bits=int(arg.split(":", 1)[1]))
    elif arg in ("and", "fa5", "fa14", "ssp"):
        spec["kind"] = arg
        if arg == "ssp":
            spec["target"] = args.target
            if args.set:
                spec["sets"] = [[int(v) for v in s.split(",")] for s in args.set]
    elif os.path.exists(arg) or arg.endswith(".json"):
        spec.update(kind="file", path=arg)
    else:
        raise netlist.NetlistError(
            f"unknown circuit {arg!r}; expected one of {BUILTIN_CIRCUITS}")
    return spec


def default_group_expr(spec: dict) -> str:
    return {"rca": "S-A-B", "ssp": "A+B+C"}.get(spec["kind"], "all")


def _replica_counts(spec: dict, sweeps: int, seed: int, expr: str) -> dict:
    c = build_circuit(spec)
    c.seed(seed)
    samples = c.run_sweeps(sweeps)
    return stats.histogram(stats.log_from_circuit(c, samples), expr)


def write_hist_csv(path, counts: dict):
    total = sum(counts.values()) or 1
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["value", "count", "probability"])
        for value in sorted(counts):
            w.writerow([value, counts[value], repr(counts[value] / total)])


def cmd_run(args) -> int:
    spec = parse_circuit_arg(args.circuit, args)
    expr = args.group or default_group_expr(spec)
    seeds = [args.seed + r for r in range(args.replicas)]
    if args.replicas > 1:
        with ProcessPoolExecutor(max_workers=min(args.replicas, os.cpu_count() or 1)) as ex:
            parts = list(ex.map(_replica_counts, [spec] * len(seeds),
                                [args.sweeps] * len(seeds), seeds,
                                [expr] * len(seeds)))
    else:
        parts = [_replica_counts(spec, args.sweeps, seeds[0], expr)]
    counts: dict = {}
    for part in parts:
        for k, v in part.items():
            counts[k] = counts.get(k, 0) + v

    if args.hist:
        write_hist_csv(args.hist, counts)
    report = {
        "circuit": args.circuit,
        "sweeps": args.sweeps,
        "replicas": args.replicas,
        "seed": args.seed,
        "i0": args.i0,
        "clamps": args.clamp or [],
        "group": expr,
        "n_samples": sum(counts.values()),
        "mode": max(counts, key=counts.get) if counts else None,
        "bins": len(counts),
    }
    if args.out:
        with open(args.out, "w") as f:
            json.dump(report, f, indent=2, sort_keys=True)
            f.write("\n")
    print(f"{args.circuit}: {report['n_samples']} samples, "
          f"{report['bins']} bins, mode={report['mode']}")
    return EXIT_OK


def _gatespec_from_circuit(c: Circuit):
    """Single reciprocal tile -> binary-convention gate spec + clamps."""
    if len(c.tiles) != 1 or c.links:
        raise netlist.NetlistError(
            "verify needs a single-tile reciprocal circuit (no directed links)")
    tile = c.tiles[0]
    j = [[w.value for w in p.weights] for p in tile.pbits]
    h = [p.bias.value for p in tile.pbits]
    names = [p.label or str(i) for i, p in enumerate(tile.pbits)]
    g = library.GateSpec(j=j, h=h, names=names, convention="binary")
    clamps = {i: p.clamp for i, p in enumerate(tile.pbits) if p.select}
    return g, clamps


def cmd_verify(args) -> int:
    spec = parse_circuit_arg(args.circuit, args)
    c = build_circuit(spec)
    g, clamps = _gatespec_from_circuit(c)
    exact = oracle.enumerate_distribution(g, i0=float(Fraction(args.i0)), clamps=clamps)
    c.seed(args.seed)
    samples = c.run_sweeps(args.sweeps)
    empirical = stats.to_distribution(stats.state_histogram(samples))
    tv = stats.tv_distance(empirical, exact.probs)
    status = "PASS" if tv < args.tol else "FAIL"
    print(f"{args.circuit}: TV(empirical, Boltzmann) = {tv:.6f} "
          f"[tol {args.tol}] {status}")
    if args.out:
        with open(args.out, "w") as f:
            json.dump({"circuit": args.circuit, "sweeps": args.sweeps,
                       "seed": args.seed, "tv": tv, "tol": args.tol,
                       "status": status}, f, indent=2, sort_keys=True)
            f.write("\n")
    return EXIT_OK if status == "PASS" else EXIT_VERIFY


def cmd_sigmoid(args) -> int:
    points = stats.sigmoid_sweep(args.updates, master_seed=args.seed)
    rows = [(u, mean) for u, mean in points]
    if args.out:
        with open(args.out, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["input", "mean_output"])
            w.writerows(rows)
    mid = next(mean for u, mean in rows if u == 0.0)
    print(f"sigmoid sweep: {len(rows)} points, mean(m | u=0) = {mid:.4f}")
    return EXIT_OK


def cmd_lut(args) -> int:
    table = ActivationTable()
    for i, raw in enumerate(table.entries):
        u = (i - 32) / 4.0
        print(f"{i:2d}  u={u:+6.2f}  0x{raw:08X}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pbitfab",
        description="p-bit fabric emulator: run circuits, verify against "
                    "the Boltzmann oracle, dump characteristics")
    sub = p.add_subparsers(dest="command", required=True)

    def circuit_flags(sp):
        sp.add_argument("--circuit", required=True,
                        help="and | fa5 | fa14 | rca:N | ssp | netlist.json")
        sp.add_argument("--sweeps", type=int, default=100_000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--i0", default="1", help="coupling strength (exact decimal)")
        sp.add_argument("--clamp", action="append", metavar="NAME=VAL",
                        help="clamp a terminal to 0/1, or NAME=float to release")
        sp.add_argument("--target", type=int, default=3584, help="ssp target sum")
        sp.add_argument("--set", action="append", metavar="V0,V1,...",
                        help="ssp input set (repeat 3x), e.g. --set 0,512")
        sp.add_argument("--out", help="JSON report path")

    run = sub.add_parser("run", help="sample a circuit and emit a histogram")
    circuit_flags(run)
    run.add_argument("--hist", help="histogram CSV path")
    run.add_argument("--group", help="histogram expression, e.g. S-A-B")
    run.add_argument("--replicas", type=int, default=1)
    run.set_defaults(fn=cmd_run)

    ver = sub.add_parser("verify", help="compare sampling against the exact oracle")
    circuit_flags(ver)
    ver.add_argument("--tol", type=float, default=0.01)
    ver.set_defaults(fn=cmd_verify)

    sig = sub.add_parser("sigmoid", help="single p-bit transfer characteristic")
    sig.add_argument("--updates", type=int, default=100_000)
    sig.add_argument("--seed", type=int, default=0)
    sig.add_argument("--out", help="CSV path")
    sig.set_defaults(fn=cmd_sigmoid)

    lut = sub.add_parser("lut", help="dump the 64-entry activation table")
    lut.add_argument("--dump", action="store_true")
    lut.set_defaults(fn=cmd_lut)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BudgetExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (netlist.NetlistError, ValueError, KeyError, IndexError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
