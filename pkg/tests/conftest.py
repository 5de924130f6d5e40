"""Shared helpers for the test suite."""

import itertools


def fa_truth_rows():
    """All (Cin, B, A, S, Cout) rows of the Full Adder truth table."""
    rows = set()
    for cin, b, a in itertools.product((0, 1), repeat=3):
        s = a ^ b ^ cin
        cout = (a + b + cin) >> 1
        rows.add((cin, b, a, s, cout))
    return rows
