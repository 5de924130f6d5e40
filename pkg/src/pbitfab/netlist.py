"""Netlist JSON: the on-disk circuit description.

Weights and biases are exact decimal strings with power-of-two
denominators ("-1.25"), validated against the tile's declared s[x][y]
format, so the file format carries no floating-point drift.
"""

from __future__ import annotations

import json
import warnings
from fractions import Fraction

import jsonschema

from .circuit import Circuit, DirectedLink, Tile
from .fixedpoint import S32, FixedFormat, fx
from .lfsr import Lfsr32
from .pbit import WeightedPBit

_NUM = {"type": "string", "pattern": r"^-?\d+(\.\d+)?$"}
_ADDR = {"type": "array", "items": {"type": "integer", "minimum": 0},
         "minItems": 2, "maxItems": 2}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["tiles"],
    "additionalProperties": False,
    "properties": {
        "i0": _NUM,
        "tiles": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["format", "weights", "biases"],
                "additionalProperties": False,
                "properties": {
                    "format": {"type": "string",
                               "pattern": r"^[su]\[\d+\]\[\d+\]$"},
                    "weights": {"type": "array",
                                "items": {"type": "array", "items": _NUM}},
                    "biases": {"type": "array", "items": _NUM},
                    "update_order": {"type": "array",
                                     "items": {"type": "integer", "minimum": 0}},
                    "labels": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "links": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["source", "dest", "mode"],
                "additionalProperties": False,
                "properties": {
                    "source": _ADDR,
                    "dest": _ADDR,
                    "mode": {"enum": ["clamp", "weighted"]},
                    "strength": _NUM,
                },
            },
        },
        "clamps": {"type": "object",
                   "additionalProperties": {"enum": [0, 1]}},
        "groups": {"type": "object",
                   "additionalProperties": {"type": "array", "items": _ADDR}},
    },
}


class NetlistError(ValueError):
    pass


def _parse_value(text: str, fmt: FixedFormat, where: str):
    frac = Fraction(text)
    try:
        return fx(frac, fmt)
    except ValueError as e:
        raise NetlistError(f"{where}: {e}") from None


def load_netlist(path) -> Circuit:
    """Validate and construct a circuit from a netlist file."""
    with open(path) as f:
        doc = json.load(f)
    return circuit_from_dict(doc)


def circuit_from_dict(doc: dict) -> Circuit:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path)
        raise NetlistError(f"netlist schema violation at '{path}': {e.message}") from None

    tiles = []
    for t, td in enumerate(doc["tiles"]):
        fmt = FixedFormat.parse(td["format"])
        weights = td["weights"]
        biases = td["biases"]
        n = len(biases)
        if len(weights) != n or any(len(r) != n for r in weights):
            raise NetlistError(f"tiles/{t}: weights must be {n}x{n}")
        labels = td.get("labels", [""] * n)
        if len(labels) != n:
            raise NetlistError(f"tiles/{t}: {n} labels expected")
        order = td.get("update_order")
        if order is None and n > 0:
            warnings.warn(f"tiles/{t}: no update_order, defaulting to index order")
        pbits = []
        for i in range(n):
            pbits.append(WeightedPBit(
                weights=[_parse_value(w, fmt, f"tiles/{t}/weights/{i}/{k}")
                         for k, w in enumerate(weights[i])],
                bias=_parse_value(biases[i], fmt, f"tiles/{t}/biases/{i}"),
                i0=fx(1, S32),
                lfsr=Lfsr32(0),
                label=labels[i]))
        try:
            tiles.append(Tile(pbits=pbits, update_order=order))
        except ValueError as e:
            raise NetlistError(f"tiles/{t}: {e}") from None

    links = []
    for k, ld in enumerate(doc.get("links", [])):
        strength = None
        if ld["mode"] == "weighted":
            if "strength" not in ld:
                raise NetlistError(f"links/{k}: weighted link needs a strength")
            strength = _parse_value(ld["strength"], S32, f"links/{k}/strength")
        try:
            links.append(DirectedLink(source=tuple(ld["source"]),
                                      dest=tuple(ld["dest"]),
                                      mode=ld["mode"], strength=strength))
        except ValueError as e:
            raise NetlistError(f"links/{k}: {e}") from None

    i0 = _parse_value(doc.get("i0", "1"), S32, "i0")
    try:
        c = Circuit(tiles, links, i0=i0)
    except (ValueError, IndexError) as e:
        raise NetlistError(str(e)) from None
    for name, addrs in doc.get("groups", {}).items():
        c.groups[name] = [tuple(a) for a in addrs]
    for target, value in doc.get("clamps", {}).items():
        try:
            c.set_clamp(target if target in c.terminals else int(target), value)
        except (KeyError, ValueError, IndexError) as e:
            raise NetlistError(f"clamps/{target}: {e}") from None
    return c


def _decimal(value: Fraction) -> str:
    # exact: denominators are powers of two, so repr(float) terminates
    f = float(value)
    if Fraction(repr(f)) != value:
        raise NetlistError(f"value {value} not exactly serializable")
    return repr(f)


def circuit_to_dict(c: Circuit) -> dict:
    doc: dict = {"i0": _decimal(c.i0.value), "tiles": []}
    clamps = {}
    for t, tile in enumerate(c.tiles):
        fmts = {p.bias.fmt for p in tile.pbits} | \
               {w.fmt for p in tile.pbits for w in p.weights}
        if len(fmts) > 1:
            raise NetlistError(f"tile {t} mixes fixed-point formats")
        fmt = next(iter(fmts)) if fmts else S32
        doc["tiles"].append({
            "format": str(fmt),
            "weights": [[_decimal(w.value) for w in p.weights] for p in tile.pbits],
            "biases": [_decimal(p.bias.value) for p in tile.pbits],
            "update_order": list(tile.update_order),
            "labels": [p.label for p in tile.pbits],
        })
        linked_dests = {ln.dest for ln in c.links if ln.mode == "clamp"}
        for i, p in enumerate(tile.pbits):
            if p.select and (t, i) not in linked_dests:
                clamps[p.label or str(c.global_index(t, i))] = p.clamp
    if c.links:
        doc["links"] = []
        for ln in c.links:
            d = {"source": list(ln.source), "dest": list(ln.dest), "mode": ln.mode}
            if ln.mode == "weighted":
                d["strength"] = _decimal(ln.strength.value)
            doc["links"].append(d)
    if clamps:
        doc["clamps"] = clamps
    if c.groups:
        doc["groups"] = {name: [list(a) for a in addrs]
                         for name, addrs in c.groups.items()}
    return doc


def save_netlist(c: Circuit, path):
    with open(path, "w") as f:
        json.dump(circuit_to_dict(c), f, indent=2, sort_keys=True)
        f.write("\n")
