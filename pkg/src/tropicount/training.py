"""Small 2D classification experiments: data, MLP training and trend metrics.

Training runs in float64 numpy; each checkpoint is converted exactly into a
`NetworkSpec` and its boundary and total piece counts come from the exact
counting engine.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields
from typing import Callable, Iterable, Sequence

import numpy as np

from .network import NetworkSpec

REGIMES = ("ce", "noisy", "adv")
CSV_HEADER = ("iteration", "boundary", "total", "fnorm", "train_acc", "test_acc", "robustness")


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class Dataset:
    """Points ``x`` of shape (n, 2) with labels ``y`` in {-1, +1}."""

    x: np.ndarray
    y: np.ndarray
    role: str = "train"

    def __post_init__(self):
        if self.x.ndim != 2 or len(self.x) != len(self.y):
            raise ValueError("x must be (n, d) with one label per row")
        if not np.all(np.isin(self.y, (-1, 1))):
            raise ValueError("labels must be -1 or +1")
        if self.role not in ("train", "test"):
            raise ValueError(f"unknown role {self.role!r}")

    def __len__(self):
        return len(self.y)

    @property
    def points(self) -> list[tuple[tuple[float, ...], int]]:
        return [(tuple(p), int(l)) for p, l in zip(self.x.tolist(), self.y.tolist())]


def _rng(seed: int, role: str) -> np.random.Generator:
    # train and test draws use independent streams of the same seed
    return np.random.default_rng([seed, ("train", "test").index(role)])


def spiral_point(theta, eps=0.0):
    rho = (np.asarray(theta) / (4 * np.pi)) ** 0.8 + eps
    return np.stack([rho * np.sin(theta) + 0.04, rho * np.cos(theta)], axis=-1)


def gen_spiral(n_per_class: int, seed: int, role: str = "train") -> Dataset:
    """Positive class from ``-P``, negative class from ``P``."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be positive")
    rng = _rng(seed, role)
    # uniform on (0, 4pi]
    theta = 4 * np.pi * (1.0 - rng.random(2 * n_per_class))
    eps = rng.uniform(-0.03, 0.03, 2 * n_per_class)
    p = spiral_point(theta, eps)
    x = np.concatenate([-p[:n_per_class], p[n_per_class:]])
    y = np.concatenate([np.ones(n_per_class, int), -np.ones(n_per_class, int)])
    return Dataset(x, y, role)


GRID = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float)


def mixture_label(component: int) -> int:
    i, j = divmod(component, 3)
    return 1 if (i + j) % 2 == 0 else -1


def gen_gaussian_mixture(n_per_class: int, seed: int, role: str = "train", sigma: float = 0.1) -> Dataset:
    """``2 * n_per_class`` equal-weight draws from the 3x3 grid mixture, labelled by parity."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be positive")
    rng = _rng(seed, role)
    comp = rng.integers(0, 9, 2 * n_per_class)
    x = GRID[comp] + sigma * rng.standard_normal((2 * n_per_class, 2))
    y = np.array([mixture_label(c) for c in comp], dtype=int)
    return Dataset(x, y, role)


# ---------------------------------------------------------------------------
# model


@dataclass
class Mlp:
    """ReLU MLP with a single logit; weights have shape (out, in)."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @classmethod
    def init(cls, widths: Sequence[int], rng: np.random.Generator) -> "Mlp":
        ws, bs = [], []
        for n_in, n_out in zip(widths[:-1], widths[1:]):
            bound = math.sqrt(1.0 / n_in)
            ws.append(rng.uniform(-bound, bound, (n_out, n_in)))
            bs.append(rng.uniform(-bound, bound, n_out))
        return cls(ws, bs)

    @classmethod
    def from_spec(cls, net: NetworkSpec) -> "Mlp":
        ws, bs = net.float_arrays()
        return cls(ws, bs)

    def copy(self) -> "Mlp":
        return Mlp([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def to_spec(self) -> NetworkSpec:
        return NetworkSpec.from_arrays(self.weights, self.biases)

    @property
    def widths(self) -> tuple[int, ...]:
        return (self.weights[0].shape[1],) + tuple(w.shape[0] for w in self.weights)

    def params(self) -> list[np.ndarray]:
        return self.weights + self.biases

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        acts = [x]
        h = x
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w.T + b
            if k < len(self.weights) - 1:
                h = np.maximum(h, 0.0)
            acts.append(h)
        return h[:, 0], acts

    def logits(self, x: np.ndarray) -> np.ndarray:
        return self.forward(np.asarray(x, dtype=float))[0]

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.where(self.logits(x) > 0, 1, -1)

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray, *, input_grad: bool = False):
        """Mean logistic loss ``log(1 + exp(-y z))`` and its gradients."""
        z, acts = self.forward(x)
        m = -y * z
        loss = float(np.mean(np.logaddexp(0.0, m)))
        dz = (-y / (1.0 + np.exp(-m)) / len(y))[:, None]
        gw = [None] * len(self.weights)
        gb = [None] * len(self.weights)
        delta = dz
        for k in range(len(self.weights) - 1, -1, -1):
            gw[k] = delta.T @ acts[k]
            gb[k] = delta.sum(axis=0)
            delta = delta @ self.weights[k]
            if k > 0:
                delta = delta * (acts[k] > 0)
        if input_grad:
            return loss, gw, gb, delta
        return loss, gw, gb


def fgsm_perturb(net: Mlp, x: np.ndarray, y: np.ndarray, eps: float) -> np.ndarray:
    """One signed-gradient ascent step of size ``eps`` in the l-infinity ball."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    x = np.asarray(x, dtype=float)
    if eps == 0:
        return x.copy()
    *_, gx = net.loss_and_grads(x, np.asarray(y), input_grad=True)
    return x + eps * np.sign(gx)


def f_norm(net) -> float:
    """Sum of squared weight entries, biases excluded."""
    if isinstance(net, NetworkSpec):
        net = Mlp.from_spec(net)
    return float(sum(np.sum(w * w) for w in net.weights))


def accuracy(net: Mlp, data: Dataset) -> float:
    return 100.0 * float(np.mean(net.predict(data.x) == data.y))


def robustness(net, test: Dataset, sigma: float, n: int = 2000, seed: int = 0) -> float:
    """Percentage of ``n`` Gaussian-perturbed test points still classified correctly."""
    if n < 1:
        raise ValueError("n must be positive")
    if isinstance(net, NetworkSpec):
        net = Mlp.from_spec(net)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(test), n, replace=n > len(test))
    x = test.x[idx] + sigma * rng.standard_normal((n, test.x.shape[1]))
    return 100.0 * float(np.mean(net.predict(x) == test.y[idx]))


def moving_average(series: Sequence[float], window: int) -> list[float]:
    """Centred moving average; near the ends the window is cut off at the series edge."""
    if window < 1:
        raise ValueError("window must be at least 1")
    vals = [float(v) for v in series]
    left, right = (window - 1) // 2, window // 2
    out = []
    for i in range(len(vals)):
        seg = vals[max(0, i - left):i + right + 1]
        out.append(sum(seg) / len(seg))
    return out


# ---------------------------------------------------------------------------
# training


@dataclass(frozen=True)
class TrainConfig:
    widths: tuple[int, ...] = (2, 30, 30, 1)
    regime: str = "ce"
    strength: float = 0.0
    lr: float = 0.1
    momentum: float = 0.9
    weight_decay: float = 0.001
    batch: int = 64
    iters: int = 15000
    stride: int = 250
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(int(w) for w in self.widths))
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}")
        if len(self.widths) < 2 or self.widths[-1] != 1 or min(self.widths) < 1:
            raise ValueError("widths must end in a single output")
        if self.strength < 0 or self.batch < 1 or self.iters < 0 or self.stride < 1:
            raise ValueError("invalid training hyper-parameters")

    def to_text(self) -> str:
        return "".join(f"{k} = {','.join(map(str, v)) if isinstance(v, tuple) else v}\n"
                       for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text: str) -> "TrainConfig":
        types = {f.name: f.type for f in fields(cls)}
        kw = {}
        for line in text.splitlines():
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            key, _, val = (s.strip() for s in line.partition("="))
            if key not in types:
                raise ValueError(f"unknown config key {key!r}")
            if key == "widths":
                kw[key] = tuple(int(v) for v in val.split(","))
            elif key == "regime":
                kw[key] = val
            elif types[key] in ("int", int):
                kw[key] = int(val)
            else:
                kw[key] = float(val)
        return cls(**kw)


@dataclass(frozen=True)
class TrendRecord:
    iteration: int
    boundary: int | None
    total: int | None
    fnorm: float
    train_acc: float
    test_acc: float | None
    robustness: float | None = None

    def row(self) -> list[str]:
        return ["" if v is None else (repr(v) if isinstance(v, float) else str(v)) for v in
                (self.iteration, self.boundary, self.total, self.fnorm, self.train_acc,
                 self.test_acc, self.robustness)]


def write_trend_csv(records: Iterable[TrendRecord], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.row())


def trend_csv(records: Iterable[TrendRecord]) -> str:
    buf = io.StringIO()
    write_trend_csv(records, buf)
    return buf.getvalue()


def read_trend_csv(text: str) -> list[TrendRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(c.strip() for c in rows[0]) != CSV_HEADER:
        raise ValueError("missing or wrong trend CSV header")
    out = []
    for n, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise ValueError(f"line {n}: expected {len(CSV_HEADER)} fields")
        try:
            it, b, t = (None if c == "" else int(c) for c in row[:3])
            fn, tr, te, rb = (None if c == "" else float(c) for c in row[3:])
        except ValueError as exc:
            raise ValueError(f"line {n}: {exc}") from None
        if it is None or fn is None or tr is None:
            raise ValueError(f"line {n}: iteration, fnorm and train_acc are required")
        out.append(TrendRecord(it, b, t, fn, tr, te, rb))
    return out


class TrainingDiverged(RuntimeError):
    def __init__(self, iteration: int, history: list):
        super().__init__(f"loss became non-finite at iteration {iteration}")
        self.iteration = iteration
        self.history = history


def exact_counts(net: NetworkSpec) -> tuple[int, int]:
    """(#Boundary, #Total) of a single-output network."""
    from .counting import count_affine_pieces, count_boundary_pieces
    from .tropical import dcpa_extract

    f = dcpa_extract(net)
    return count_boundary_pieces(f).boundary_piece_count, count_affine_pieces(f)


def _checkpoints(cfg: TrainConfig) -> list[int]:
    its = list(range(0, cfg.iters + 1, cfg.stride))
    if its[-1] != cfg.iters:
        its.append(cfg.iters)
    return its


def train(data: Dataset, cfg: TrainConfig, *, test: Dataset | None = None, count: str = "all",
          robustness_sigma: float | None = None,
          counter: Callable[[NetworkSpec], tuple[int, int]] = exact_counts,
          ) -> list[tuple[NetworkSpec, TrendRecord]]:
    """SGD with momentum; returns one (exact snapshot, metrics) pair per checkpoint.

    ``count`` selects which checkpoints get exact piece counts: ``"all"``,
    ``"last"`` or ``"none"``.
    """
    if count not in ("all", "last", "none"):
        raise ValueError("count must be 'all', 'last' or 'none'")
    if data.x.shape[1] != cfg.widths[0]:
        raise ValueError("input width does not match the data")
    rng = np.random.default_rng(cfg.seed)
    net = Mlp.init(cfg.widths, rng)
    bufs = [np.zeros_like(p) for p in net.params()]
    stops = _checkpoints(cfg)
    history = []

    def checkpoint(it):
        spec = net.to_spec()
        b = t = None
        if count == "all" or (count == "last" and it == cfg.iters):
            b, t = counter(spec)
        rob = None
        if robustness_sigma is not None and test is not None:
            rob = robustness(net, test, robustness_sigma, seed=cfg.seed)
        rec = TrendRecord(it, b, t, f_norm(net), accuracy(net, data),
                          None if test is None else accuracy(net, test), rob)
        history.append((spec, rec))

    order = rng.permutation(len(data))
    pos = 0
    for it in range(cfg.iters + 1):
        if it == stops[0]:
            stops.pop(0)
            checkpoint(it)
        if it == cfg.iters:
            break
        if pos + cfg.batch > len(data):
            order = rng.permutation(len(data))
            pos = 0
        idx = order[pos:pos + cfg.batch]
        pos += cfg.batch
        xb, yb = data.x[idx], data.y[idx]
        if cfg.regime == "noisy":
            xb = xb + cfg.strength * rng.standard_normal(xb.shape)
        elif cfg.regime == "adv":
            xb = fgsm_perturb(net, xb, yb, cfg.strength)
        loss, gw, gb = net.loss_and_grads(xb, yb)
        if not math.isfinite(loss):
            raise TrainingDiverged(it, history)
        for p, g, buf in zip(net.params(), gw + gb, bufs):
            g = g + cfg.weight_decay * p
            buf *= cfg.momentum
            buf += g
            p -= cfg.lr * buf
    return history


@dataclass(frozen=True)
class Preset:
    generator: Callable[..., Dataset]
    widths: tuple[int, ...]
    strength: float  # noise std and FGSM step
    sigma: float  # robustness probe
    n_train: int = 300
    n_test: int = 1000


PRESETS = {
    "spiral": Preset(gen_spiral, (2, 30, 30, 1), 0.01, 0.02),
    "gaussian": Preset(gen_gaussian_mixture, (2, 10, 10, 1), 0.1, 0.2),
}


def preset_config(name: str, regime: str = "ce", seed: int = 0, **overrides) -> TrainConfig:
    p = PRESETS[name]
    kw = dict(widths=p.widths, regime=regime, strength=0.0 if regime == "ce" else p.strength, seed=seed)
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return TrainConfig(**kw)


def preset_data(name: str, seed: int) -> tuple[Dataset, Dataset]:
    p = PRESETS[name]
    return p.generator(p.n_train, seed, "train"), p.generator(p.n_test, seed, "test")


def run_preset(name: str, regime: str = "ce", seed: int = 0, *, count: str = "all", **overrides):
    """Train a preset; returns ``(history, config, train_set, test_set)``."""
    cfg = preset_config(name, regime, seed, **overrides)
    train_set, test_set = preset_data(name, seed)
    hist = train(train_set, cfg, test=test_set, count=count, robustness_sigma=PRESETS[name].sigma)
    return hist, cfg, train_set, test_set
