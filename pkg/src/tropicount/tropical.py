"""Dual (difference of max-affine) representation of ReLU networks.

Every coordinate of a layer output is ``R(P_i) - R(N_i)`` for two finite dual
point sets.  Biases ride along a constant input channel, so each layer acts
through its augmented matrix ``[W b; 0 1]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import geometry as geo
from .geometry import PointSet
from .network import NetworkSpec


def split_pos_neg(a: Sequence[Sequence]) -> tuple[tuple, tuple]:
    """Entrywise ``(max(a, 0), max(-a, 0))``."""
    rows = [[geo.to_scalar(v) for v in r] for r in a]
    zero = Fraction(0)
    pos = tuple(tuple(max(v, zero) for v in r) for r in rows)
    neg = tuple(tuple(max(-v, zero) for v in r) for r in rows)
    return pos, neg


@dataclass(frozen=True)
class DcpaState:
    P: tuple  # tuple[PointSet, ...]
    N: tuple

    def __post_init__(self):
        if len(self.P) != len(self.N):
            raise ValueError("P and N have different lengths")

    def __len__(self):
        return len(self.P)

    def eval(self, x: Sequence) -> tuple:
        return tuple(geo.eval_max(p, x) - geo.eval_max(n, x) for p, n in zip(self.P, self.N))


@dataclass(frozen=True)
class DcpaFunction:
    P: PointSet
    N: PointSet

    def __post_init__(self):
        if self.P.dim != self.N.dim:
            raise ValueError("P and N live in different dual spaces")
        if not len(self.P) or not len(self.N):
            raise ValueError("P and N must be nonempty")

    @property
    def input_dim(self) -> int:
        return self.P.dim - 1

    def __call__(self, x: Sequence) -> Fraction:
        return dcpa_eval(self, x)


def dcpa_init(d: int) -> DcpaState:
    """State for ``F_0 = (x_1, ..., x_d, 1)``: unit dual points minus zero."""
    if d < 1:
        raise ValueError("input dimension must be at least 1")
    unit = [PointSet([tuple(int(i == j) for j in range(d + 1))]) for i in range(d + 1)]
    return DcpaState(tuple(unit), tuple(geo.origin(d + 1) for _ in range(d + 1)))


def _check(a_aug, s: DcpaState):
    if not a_aug or any(len(r) != len(s) for r in a_aug):
        raise ValueError(f"augmented matrix must have {len(s)} columns")


def _products(a_aug, s: DcpaState):
    pos, neg = split_pos_neg(a_aug)
    mm = geo.minkowski_matrix_product
    return (mm(pos, s.P, True), mm(neg, s.N, True), mm(neg, s.P, True), mm(pos, s.N, True))


def dcpa_linear_layer(a_aug, s: DcpaState) -> DcpaState:
    """``A F = R((A+ P) + (A- N)) - R((A- P) + (A+ N))``."""
    _check(a_aug, s)
    pp, mn, mp, pn = _products(a_aug, s)
    P = tuple(geo.minkowski_sum_reduced(x, y) for x, y in zip(pp, mn))
    N = tuple(geo.minkowski_sum_reduced(x, y) for x, y in zip(mp, pn))
    return DcpaState(P, N)


def dcpa_relu_layer(a_aug, s: DcpaState) -> DcpaState:
    """ReLU step via ``max(u - v, 0) = max(u, v) - v``."""
    lin = dcpa_linear_layer(a_aug, s)
    P = tuple(geo.union_reduced(p, n) for p, n in zip(lin.P, lin.N))
    return DcpaState(P, lin.N)


def dcpa_layers(net: NetworkSpec) -> list[DcpaState]:
    """States after every layer, the input state first."""
    states = [dcpa_init(net.input_dim)]
    for layer in net.layers:
        step = dcpa_relu_layer if layer.activation == "relu" else dcpa_linear_layer
        states.append(step(layer.augmented(), states[-1]))
    return states


def dcpa_extract(net: NetworkSpec) -> DcpaFunction:
    """``(P, N)`` with ``R(P) - R(N)`` equal to the scalar network output."""
    if net.output_dim != 1:
        raise ValueError("dcpa_extract expects a scalar-output network")
    last = dcpa_layers(net)[-1]
    return DcpaFunction(last.P[0], last.N[0])


def dcpa_eval(f: DcpaFunction, x: Sequence) -> Fraction:
    return geo.eval_max(f.P, x) - geo.eval_max(f.N, x)
