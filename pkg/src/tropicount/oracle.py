"""Brute-force region enumeration, independent of the dual-space code.

Regions are found by breadth-first search over activation patterns: from a
region, every neuron whose hyperplane carries a facet of the region leads to
the neighbour with that neuron flipped.  All feasibility questions are exact
linear programs.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import _lp
from .network import NetworkSpec

DEFAULT_REGION_CAP = 100_000


class RegionCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ActivationRegion:
    pattern: tuple  # one 0/1 per ReLU neuron, layer by layer
    point: tuple  # rational point strictly inside the region
    slope: tuple  # network restricted to the region: x -> slope.x + intercept
    intercept: Fraction
    neighbours: tuple = ()  # indices of regions across a facet


def _relu_layers(net: NetworkSpec):
    return [k for k, l in enumerate(net.layers) if l.activation == "relu"]


def _affine_system(net: NetworkSpec, pattern: Sequence[int]):
    """Pre-activation forms ``(g, c)`` of every ReLU neuron and the output form, under ``pattern``."""
    d = net.input_dim
    zero = Fraction(0)
    g = [tuple(Fraction(int(i == j)) for j in range(d)) for i in range(d)]
    c = [zero] * d
    forms, pos = [], 0
    for layer in net.layers:
        ng, nc = [], []
        for row, b in zip(layer.weights, layer.bias):
            gi = tuple(sum((w * gk[j] for w, gk in zip(row, g)), zero) for j in range(d))
            ci = sum((w * ck for w, ck in zip(row, c)), b)
            ng.append(gi)
            nc.append(ci)
        if layer.activation == "relu":
            for i in range(len(ng)):
                forms.append((ng[i], nc[i]))
                if not pattern[pos]:
                    ng[i] = (zero,) * d
                    nc[i] = zero
                pos += 1
        g, c = ng, nc
    return forms, g[0], c[0]


def _pattern_at(net: NetworkSpec, x) -> tuple | None:
    """Activation pattern at ``x``; ``None`` if some pre-activation is exactly zero."""
    h = tuple(Fraction(v) for v in x)
    bits = []
    for layer in net.layers:
        z = [sum((w * v for w, v in zip(row, h)), b) for row, b in zip(layer.weights, layer.bias)]
        if layer.activation == "relu":
            if any(v == 0 for v in z):
                return None
            bits.extend(int(v > 0) for v in z)
            h = tuple(v if v > 0 else Fraction(0) for v in z)
        else:
            h = tuple(z)
    return tuple(bits)


def _strict_point(forms, signs, d, equal=None):
    """Point with ``sign * (g.x + c) > 0`` for every form (and ``= 0`` on ``equal``), or ``None``.

    Maximises a common slack ``t <= 1``; the system is strictly feasible iff
    the optimum is positive.
    """
    a_ub, b_ub = [], []
    for k, ((g, c), s) in enumerate(zip(forms, signs)):
        if k == equal or not any(g):
            if k != equal and s * c <= 0:
                return None
            continue
        # -s*(g.x) + t <= s*c
        a_ub.append([-s * v for v in g] + [1])
        b_ub.append(s * c)
    a_ub.append([0] * d + [1])
    b_ub.append(1)
    a_eq, b_eq = (), ()
    if equal is not None:
        g, c = forms[equal]
        if not any(g):
            return None
        a_eq, b_eq = [list(g) + [0]], [-c]
    status, value, x = _lp.maximize([0] * d + [1], a_ub, b_ub, a_eq, b_eq)
    if status != "optimal" or value <= 0:
        return None
    return tuple(x[:d])


def enumerate_activation_regions(net: NetworkSpec, *, cap: int = DEFAULT_REGION_CAP, seeds: int = 16,
                                 rng: np.random.Generator | None = None) -> list[ActivationRegion]:
    """All full-dimensional activation regions of ``net`` over the whole input space."""
    if net.output_dim != 1:
        raise ValueError("oracle expects a scalar-output network")
    rng = rng or np.random.default_rng(0)
    d = net.input_dim
    n_bits = sum(len(net.layers[k].weights) for k in _relu_layers(net))
    found: dict[tuple, int] = {}
    regions: list[dict] = []
    queue = deque()

    def add(pattern, point):
        if pattern in found:
            return found[pattern]
        if len(regions) >= cap:
            raise RegionCapExceeded(f"more than {cap} regions")
        found[pattern] = len(regions)
        regions.append({"pattern": pattern, "point": point, "nbrs": set()})
        queue.append(found[pattern])
        return found[pattern]

    starts = [tuple(Fraction(0) for _ in range(d))]
    starts += [tuple(Fraction(v).limit_denominator(1000) for v in p) for p in rng.normal(0, 3, (seeds, d))]
    for x in starts:
        pat = _pattern_at(net, x)
        if pat is not None:
            add(pat, x)
    if n_bits == 0 and not regions:
        add((), starts[0])
    if not regions:
        raise RuntimeError("no generic seed point found")

    while queue:
        idx = queue.popleft()
        pat = regions[idx]["pattern"]
        forms, _, _ = _affine_system(net, pat)
        signs = [1 if b else -1 for b in pat]
        for k in range(n_bits):
            if _strict_point(forms, signs, d, equal=k) is None:
                continue
            flipped = pat[:k] + (1 - pat[k],) + pat[k + 1:]
            if flipped in found:
                j = found[flipped]
            else:
                nforms, _, _ = _affine_system(net, flipped)
                pt = _strict_point(nforms, [1 if b else -1 for b in flipped], d)
                if pt is None:  # only possible for non-generic weights
                    continue
                j = add(flipped, pt)
            regions[idx]["nbrs"].add(j)
            regions[j]["nbrs"].add(idx)

    out = []
    for r in regions:
        _, slope, intercept = _affine_system(net, r["pattern"])
        out.append(ActivationRegion(r["pattern"], r["point"], tuple(slope), intercept, tuple(sorted(r["nbrs"]))))
    return out


def merge_equal_neighbours(regions: Sequence[ActivationRegion]) -> list[list[int]]:
    """Group regions joined through facets across which the affine form does not change."""
    parent = list(range(len(regions)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, r in enumerate(regions):
        for j in r.neighbours:
            o = regions[j]
            if (o.slope, o.intercept) == (r.slope, r.intercept):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(regions)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def oracle_affine_count(net: NetworkSpec, *, merge: bool = False, cap: int = DEFAULT_REGION_CAP) -> int:
    """Number of linear pieces of ``net``.

    By default every full-dimensional activation region counts.  With
    ``merge``, adjacent regions computing the same affine function count once,
    which gives the number of linear regions of the function itself.
    """
    regions = enumerate_activation_regions(net, cap=cap)
    return len(merge_equal_neighbours(regions)) if merge else len(regions)


def _crosses_zero(net: NetworkSpec, r: ActivationRegion) -> bool:
    if not any(r.slope):
        return False
    forms, _, _ = _affine_system(net, r.pattern)
    forms = forms + [(r.slope, r.intercept)]
    signs = [1 if b else -1 for b in r.pattern] + [1]
    return _strict_point(forms, signs, net.input_dim, equal=len(forms) - 1) is not None


def oracle_boundary_count(net: NetworkSpec, *, merge: bool = False, cap: int = DEFAULT_REGION_CAP) -> int:
    """Number of linear pieces of the zero set ``{net = 0}``.

    A piece is the zero set of the region's affine form inside the region,
    counted when it meets the region's interior.  With ``merge``, pieces in
    adjacent regions carrying the same affine form are one piece.
    """
    regions = enumerate_activation_regions(net, cap=cap)
    groups = merge_equal_neighbours(regions) if merge else [[i] for i in range(len(regions))]
    return sum(1 for grp in groups if any(_crosses_zero(net, regions[i]) for i in grp))


def oracle_counts(net: NetworkSpec, *, merge: bool = False, cap: int = DEFAULT_REGION_CAP) -> tuple[int, int]:
    """``(boundary pieces, affine pieces)`` from a single region enumeration."""
    regions = enumerate_activation_regions(net, cap=cap)
    groups = merge_equal_neighbours(regions) if merge else [[i] for i in range(len(regions))]
    crossing = sum(1 for grp in groups if any(_crosses_zero(net, regions[i]) for i in grp))
    return crossing, len(groups)


# ---------------------------------------------------------------------------
# grid sanity probe


def _near_tie(values: np.ndarray) -> np.ndarray:
    """Rows whose two largest entries agree to rounding precision."""
    if values.shape[1] < 2:
        return np.zeros(len(values), bool)
    top2 = np.partition(values, -2, axis=1)[:, -2:]
    scale = np.abs(values).max(axis=1) + 1.0
    return top2[:, 1] - top2[:, 0] <= 1e-9 * scale


def _grid_values(f, xs, ys):
    """Float values, exact gradients (``None`` where ambiguous) and convex-cell keys at the grid nodes."""
    from .tropical import DcpaFunction

    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    if isinstance(f, DcpaFunction):
        pf, nf = f.P.as_float(), f.N.as_float()
        vp = pts @ pf[:, :2].T + pf[:, 2]
        vn = pts @ nf[:, :2].T + nf[:, 2]
        ip, iN = vp.argmax(axis=1), vn.argmax(axis=1)
        vals = vp.max(axis=1) - vn.max(axis=1)
        ambiguous = _near_tie(vp) | _near_tie(vn)
        grads = [None if amb else tuple(a - b for a, b in zip(f.P.points[i][:2], f.N.points[j][:2]))
                 for i, j, amb in zip(ip, iN, ambiguous)]
        keys = list(zip(ip.tolist(), iN.tolist()))
    else:
        ws, bs = f.float_arrays()
        h = pts
        bits = []
        ambiguous = np.zeros(len(pts), bool)
        for w, b, layer in zip(ws, bs, f.layers):
            z = h @ w.T + b
            if layer.activation == "relu":
                bits.append(z > 0)
                ambiguous |= (np.abs(z) <= 1e-9 * (np.abs(h).sum(axis=1, keepdims=True) + 1)).any(axis=1)
                z = np.maximum(z, 0)
            h = z
        vals = h[:, 0]
        pats = np.concatenate(bits, axis=1) if bits else np.zeros((len(pts), 0), bool)
        cache = {}
        grads = []
        keys = [tuple(row) for row in pats.astype(np.int8).tolist()]
        for row, amb in zip(pats, ambiguous):
            if amb:
                grads.append(None)
                continue
            key = tuple(int(v) for v in row)
            if key not in cache:
                cache[key] = tuple(_affine_system(f, key)[1])
            grads.append(cache[key])
    return vals.reshape(gx.shape), grads, keys


def _gradient_components(grads, keys, shape) -> int:
    """Components of equal gradient under 8-adjacency.

    Nodes sharing an activation pattern (or argmax pair) lie in one convex
    region, so they are joined even when the grid misses a thin part of it.
    """
    ny, nx = shape
    ids: dict = {}
    lab = np.array([-1 if g is None else ids.setdefault(g, len(ids)) for g in grads]).reshape(shape)
    rows, cols = [], []
    node = np.arange(ny * nx).reshape(shape)
    full, head, tail = slice(None), slice(None, -1), slice(1, None)
    # right, down, down-right, down-left neighbours
    for sa, sb in (((full, head), (full, tail)), ((head, full), (tail, full)),
                   ((head, head), (tail, tail)), ((head, tail), (tail, head))):
        same = (lab[sa] == lab[sb]) & (lab[sa] >= 0)
        rows.append(node[sa][same])
        cols.append(node[sb][same])
    kid: dict = {}
    flat = lab.ravel()
    knodes = np.array([ny * nx + kid.setdefault(k, len(kid)) for k in keys])
    valid = flat >= 0
    rows.append(np.flatnonzero(valid))
    cols.append(knodes[valid])
    n = ny * nx + len(kid)
    r, c = np.concatenate(rows), np.concatenate(cols)
    graph = coo_matrix((np.ones(len(r), bool), (r, c)), shape=(n, n))
    _, comp = connected_components(graph, directed=False)
    return len(set(comp[: ny * nx][valid].tolist()))


def grid_probe(f, box: Sequence[float] = (-1, 1, -1, 1), resolution: int = 100):
    """Approximate piece count and zero contours on a grid (a lower-bound sanity check).

    ``f`` may be a :class:`NetworkSpec` or a :class:`DcpaFunction` with planar
    input.  Returns ``(number of connected components of constant gradient,
    list of contour polylines as (k, 2) arrays)``.  Components use
    8-connectivity so thin wedges near vertices stay whole; grid nodes that
    sit on a kink to rounding precision are left unlabelled.
    """
    from skimage.measure import find_contours

    x0, x1, y0, y1 = box
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    vals, grads, keys = _grid_values(f, xs, ys)
    count = _gradient_components(grads, keys, vals.shape)
    contours = []
    if vals.min() < 0 < vals.max():
        for c in find_contours(vals, 0.0):
            # rows index y, columns index x
            contours.append(np.stack([np.interp(c[:, 1], np.arange(resolution), xs),
                                      np.interp(c[:, 0], np.arange(resolution), ys)], axis=1))
    return count, contours
