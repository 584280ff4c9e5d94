"""Small worked examples with known answers, used by tests, demos and the CLI docs.

Scalars are written as decimal strings so that every value is exact.
"""
from __future__ import annotations

from fractions import Fraction

from .geometry import PointSet, to_point
from .network import Layer, NetworkSpec
from .tropical import DcpaFunction


def _pts(rows) -> tuple:
    return tuple(to_point(r) for r in rows)


# five affine functions of one variable as dual points (slope, intercept):
# -x+3, -x/2+2, x/2, x-2, 0
FIVE_FUNCTIONS = _pts([("-1", "3"), ("-1/2", "2"), ("1/2", "0"), ("1", "-2"), ("0", "0")])
# only these three attain the maximum somewhere
FIVE_FUNCTIONS_HULL = _pts([("-1", "3"), ("1/2", "0"), ("1", "-2")])

# one input: 5 affine pieces, 3 zeros
DCPA_1D = {
    "P": _pts([("-1/2", "-3/2"), ("1/2", "1/2"), ("2", "1")]),
    "N": _pts([("0", "0"), ("2", "0"), ("3", "-1")]),
}
DCPA_1D_COUNTS = (3, 5)  # (boundary, affine)

# two inputs: 7 affine pieces, 6 boundary pieces
DCPA_2D = {
    "P": _pts([("-1", "1", "4"), ("1", "1", "-2"), ("-2", "-1", "-1")]),
    "N": _pts([("0", "0", "0"), ("2", "-1", "2"), ("-1", "2", "2")]),
}
DCPA_2D_COUNTS = (6, 7)


def dcpa(example: dict) -> DcpaFunction:
    return DcpaFunction(PointSet(example["P"]), PointSet(example["N"]))


# 2-3-1 network with ReLU on both layers, given by its augmented matrices
TWO_LAYER_A1 = (("1", "-0.5", "4"), ("-2", "1", "0"), ("3", "3", "-1"), ("0", "0", "1"))
TWO_LAYER_A2 = (("0.5", "-1", "-0.5", "2"), ("0", "0", "0", "1"))


def _layer(aug, activation="relu") -> Layer:
    rows = [[Fraction(v) for v in r] for r in aug[:-1]]
    return Layer(tuple(tuple(r[:-1]) for r in rows), tuple(r[-1] for r in rows), activation)


def two_layer_network() -> NetworkSpec:
    return NetworkSpec(2, (_layer(TWO_LAYER_A1), _layer(TWO_LAYER_A2)))


# Reference layer states for the network above, reduced to upper hull
# vertices.  Row 3 of P_1 is listed as {(3,3,1), (0,0,1)}, but the positive
# part of A_1's third row is (3, 3, 0), so it should read {(3,3,0), (0,0,1)};
# the slip propagates into N_2 and P_2.
TWO_LAYER_REFERENCE = {
    "N1": [[("0", "0.5", "0")], [("2", "0", "0")], [("0", "0", "1")], [("0", "0", "0")]],
    "P1": [[("1", "0", "4"), ("0", "0.5", "0")], [("0", "1", "0"), ("2", "0", "0")],
           [("3", "3", "1"), ("0", "0", "1")], [("0", "0", "1")]],
    "N2": [[("1.5", "2.75", "0.5"), ("0", "1.25", "0.5"), ("3.5", "1.75", "0.5"), ("2", "0.25", "0.5")],
           [("0", "0", "0")]],
    "P2": [[("2.5", "0", "4.5"), ("1.5", "2.75", "0.5"), ("0", "1.25", "0.5"), ("3.5", "1.75", "0.5")],
           [("0", "0", "1")]],
}

# the same states recomputed with P_1 row 3 = {(3,3,0), (0,0,1)}
TWO_LAYER_CORRECTED = {
    "N1": TWO_LAYER_REFERENCE["N1"],
    "P1": [[("1", "0", "4"), ("0", "0.5", "0")], [("0", "1", "0"), ("2", "0", "0")],
           [("3", "3", "0"), ("0", "0", "1")], [("0", "0", "1")]],
    "N2": [[("1.5", "2.75", "0"), ("0", "1.25", "0.5"), ("3.5", "1.75", "0"), ("2", "0.25", "0.5")],
           [("0", "0", "0")]],
    "P2": [[("2.5", "0", "4.5"), ("1.5", "2.75", "0"), ("0", "1.25", "0.5"), ("3.5", "1.75", "0")],
           [("0", "0", "1")]],
}


def layer_sets(table: dict) -> dict:
    """``{"N1": (PointSet, ...), ...}`` from one of the tables above."""
    return {k: tuple(PointSet(_pts(rows)) for rows in v) for k, v in table.items()}
