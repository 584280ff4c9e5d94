"""Exact feed-forward ReLU networks: construction, evaluation, text format."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .geometry import to_scalar

ACTIVATIONS = ("relu", "linear")


class ParseError(ValueError):
    """Malformed network or point-list document."""


@dataclass(frozen=True)
class Layer:
    weights: tuple  # rows of Fractions, shape (out, in)
    bias: tuple
    activation: str = "relu"

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.weights), len(self.weights[0]) if self.weights else 0

    def augmented(self) -> tuple:
        """Weight matrix with the bias column and the constant row appended."""
        rows = [tuple(r) + (b,) for r, b in zip(self.weights, self.bias)]
        rows.append((Fraction(0),) * len(self.weights[0]) + (Fraction(1),))
        return tuple(rows)


@dataclass(frozen=True)
class NetworkSpec:
    input_dim: int
    layers: tuple

    def __post_init__(self):
        if self.input_dim < 1:
            raise ValueError("input_dim must be positive")
        width = self.input_dim
        for k, layer in enumerate(self.layers):
            if not layer.weights or len(layer.bias) != len(layer.weights):
                raise ValueError(f"layer {k}: bias length does not match row count")
            if any(len(r) != width for r in layer.weights):
                raise ValueError(f"layer {k}: expected {width} columns")
            if layer.activation not in ACTIVATIONS:
                raise ValueError(f"layer {k}: unknown activation {layer.activation!r}")
            width = len(layer.weights)

    @property
    def widths(self) -> tuple[int, ...]:
        return (self.input_dim,) + tuple(len(l.weights) for l in self.layers)

    @property
    def output_dim(self) -> int:
        return self.widths[-1]

    @classmethod
    def from_arrays(cls, weights: Sequence, biases: Sequence, activations: Sequence[str] | None = None,
                    final_activation: str = "linear") -> "NetworkSpec":
        """Exact network from (float or rational) arrays; hidden layers default to ReLU."""
        n = len(weights)
        if activations is None:
            activations = ["relu"] * (n - 1) + [final_activation]
        layers = []
        for w, b, act in zip(weights, biases, activations):
            w = np.asarray(w, dtype=object) if not isinstance(w, np.ndarray) else w
            rows = tuple(tuple(to_scalar(v) for v in row) for row in w)
            layers.append(Layer(rows, tuple(to_scalar(v) for v in b), act))
        return cls(len(layers[0].weights[0]), tuple(layers))

    def float_arrays(self) -> tuple[list[np.ndarray], list[np.ndarray]]:
        ws = [np.array([[float(v) for v in r] for r in l.weights]) for l in self.layers]
        bs = [np.array([float(v) for v in l.bias]) for l in self.layers]
        return ws, bs


def _relu(v: Fraction) -> Fraction:
    return v if v > 0 else Fraction(0)


def layer_outputs(net: NetworkSpec, x: Sequence) -> list[tuple]:
    """Post-activation vectors of every layer (input first), exactly."""
    h = tuple(to_scalar(v) for v in x)
    if len(h) != net.input_dim:
        raise ValueError(f"expected an input of length {net.input_dim}, got {len(h)}")
    outs = [h]
    for layer in net.layers:
        z = tuple(sum((w * v for w, v in zip(row, h)), b) for row, b in zip(layer.weights, layer.bias))
        h = tuple(_relu(v) for v in z) if layer.activation == "relu" else z
        outs.append(h)
    return outs


def net_eval(net: NetworkSpec, x: Sequence) -> Fraction:
    """Exact scalar network output at ``x``."""
    if net.output_dim != 1:
        raise ValueError("net_eval expects a scalar-output network")
    return layer_outputs(net, x)[-1][0]


def random_network(widths: Sequence[int], rng: np.random.Generator, *, denom: int | None = None,
                   final_activation: str = "linear") -> NetworkSpec:
    """Random network with weights uniform on [-1, 1].

    With ``denom`` the entries are rationals ``k / denom``; otherwise they are
    doubles converted exactly, which are generic with probability one.
    """
    ws, bs = [], []
    for a, b in zip(widths[:-1], widths[1:]):
        if denom:
            ws.append([[Fraction(int(v), denom) for v in row] for row in rng.integers(-denom, denom + 1, (b, a))])
            bs.append([Fraction(int(v), denom) for v in rng.integers(-denom, denom + 1, b)])
        else:
            ws.append(rng.uniform(-1, 1, (b, a)))
            bs.append(rng.uniform(-1, 1, b))
    return NetworkSpec.from_arrays(ws, bs, final_activation=final_activation)


# ---------------------------------------------------------------------------
# text formats


def format_scalar(v: Fraction) -> str:
    """Exact decimal string when one exists, else ``p/q``."""
    v = Fraction(v)
    q = v.denominator
    twos = fives = 0
    while q % 2 == 0:
        q //= 2
        twos += 1
    while q % 5 == 0:
        q //= 5
        fives += 1
    if q != 1:
        return f"{v.numerator}/{v.denominator}"
    if v.denominator == 1:
        return str(v.numerator)
    k = max(twos, fives)
    digits = abs(v.numerator) * (10 ** k // v.denominator)
    s = str(digits).rjust(k + 1, "0")
    s = (s[:-k] + "." + s[-k:]).rstrip("0").rstrip(".")
    return ("-" if v < 0 else "") + s


def _parse_scalar(s) -> Fraction:
    try:
        if isinstance(s, float):
            raise ParseError("numbers must be given as decimal strings")
        return to_scalar(s)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad scalar {s!r}") from exc


def network_to_dict(net: NetworkSpec) -> dict:
    return {
        "input_dim": net.input_dim,
        "layers": [
            {
                "rows": len(l.weights),
                "cols": len(l.weights[0]),
                "weights": [format_scalar(v) for row in l.weights for v in row],
                "bias": [format_scalar(v) for v in l.bias],
                "activation": l.activation,
            }
            for l in net.layers
        ],
    }


def network_from_dict(doc: dict) -> NetworkSpec:
    try:
        d = int(doc["input_dim"])
        layers = []
        for k, ld in enumerate(doc["layers"]):
            rows, cols = int(ld["rows"]), int(ld["cols"])
            flat = [_parse_scalar(v) for v in ld["weights"]]
            if len(flat) != rows * cols:
                raise ParseError(f"layer {k}: expected {rows * cols} weights, got {len(flat)}")
            w = tuple(tuple(flat[r * cols:(r + 1) * cols]) for r in range(rows))
            layers.append(Layer(w, tuple(_parse_scalar(v) for v in ld["bias"]), ld.get("activation", "relu")))
        return NetworkSpec(d, tuple(layers))
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed network document: {exc}") from exc


def dumps_network(net: NetworkSpec) -> str:
    return json.dumps(network_to_dict(net), indent=1)


def loads_network(text: str) -> NetworkSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not a network document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("network document must be an object")
    return network_from_dict(doc)


def dumps_points(sections: dict) -> str:
    """Point-list format: a section header line, then one tuple per line."""
    out = []
    for name, pts in sections.items():
        out.append(name)
        out.extend("(" + ", ".join(format_scalar(c) for c in p) + ")" for p in pts)
    return "\n".join(out) + "\n"


def loads_points(text: str, names=("P", "N")) -> dict:
    sections: dict = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in names:
            current = sections.setdefault(line, [])
            continue
        if current is None:
            raise ParseError(f"line {lineno}: point before any section header")
        body = line.strip("()[] ")
        parts = [p for p in body.replace(",", " ").split() if p]
        if not parts:
            raise ParseError(f"line {lineno}: empty tuple")
        try:
            current.append(tuple(to_scalar(p) for p in parts))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    missing = [n for n in names if not sections.get(n)]
    if missing:
        raise ParseError(f"missing or empty section(s): {', '.join(missing)}")
    dims = {len(p) for pts in sections.values() for p in pts}
    if len(dims) != 1:
        raise ParseError("points of differing dimension")
    return sections
