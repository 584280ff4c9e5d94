"""Exact dual-space primitives.

An affine function ``x -> a.x + b`` on ``R^d`` is identified with the dual
point ``(a, b)`` in ``R^(d+1)``; a finite point set stands for the maximum of
its affine functions.  All coordinates are :class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, isfinite, lcm
from typing import Iterable, Sequence

import numpy as np

from . import _hull, _overlay

Scalar = Fraction
DualPoint = tuple  # tuple[Fraction, ...]


def to_scalar(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Floats convert exactly (they are dyadic rationals); strings are parsed as
    decimals or ``p/q`` fractions without passing through floating point.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans are not scalars")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not isfinite(float(value)):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(float(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {type(value).__name__} to a scalar")


def to_point(coords: Iterable) -> DualPoint:
    return tuple(to_scalar(c) for c in coords)


class PointSet:
    """Immutable finite set of dual points, kept in lexicographic order."""

    __slots__ = ("_points", "dim", "_ints", "_hull3", "_reduced")

    def __init__(self, points: Iterable = (), dim: int | None = None):
        pts = sorted({to_point(p) for p in points})
        if pts:
            d = len(pts[0])
            if any(len(p) != d for p in pts):
                raise ValueError("points of differing dimension")
            if dim is not None and dim != d:
                raise ValueError(f"expected dimension {dim}, got {d}")
            dim = d
        elif dim is None:
            raise ValueError("empty point set needs an explicit dimension")
        self._points = tuple(pts)
        self.dim = dim
        self._ints = None
        self._hull3 = None
        self._reduced = False

    @classmethod
    def _from_ints(cls, ints, denom, dim, hull3=None, reduced=False):
        """Build from integer coordinates already sorted and distinct."""
        g = denom
        for p in ints:
            if g == 1:
                break
            g = gcd(g, *p)
        if g > 1:
            ints = [tuple(c // g for c in p) for p in ints]
            denom //= g
            if hull3 is not None:
                hull3 = _hull.Hull3([(n, o // g, inc) for n, o, inc in hull3.facets], hull3.vertices, hull3.unbounded,
                                     hull3.cycles)
        obj = cls.__new__(cls)
        obj._points = None
        obj.dim = dim
        obj._ints = (list(ints), denom)
        obj._hull3 = hull3
        obj._reduced = reduced
        return obj

    @property
    def points(self) -> tuple:
        """Exact points in lexicographic order."""
        if self._points is None:
            ints, denom = self._ints
            self._points = tuple(tuple(Fraction(c, denom) for c in p) for p in ints)
        return self._points

    def __len__(self):
        return len(self._points) if self._points is not None else len(self._ints[0])

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return to_point(p) in set(self.points)

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.dim == other.dim and self.points == other.points

    def __hash__(self):
        return hash((self.dim, self.points))

    def __repr__(self):
        body = ", ".join("(" + ", ".join(str(c) for c in p) + ")" for p in self.points[:6])
        more = ", ..." if len(self.points) > 6 else ""
        return f"PointSet({{{body}{more}}})"

    def int_coords(self):
        """``(integer points, denominator)`` sharing one common denominator."""
        if self._ints is None:
            denom = 1
            for p in self.points:
                for c in p:
                    denom = lcm(denom, c.denominator)
            ints = [tuple(c.numerator * (denom // c.denominator) for c in p) for p in self.points]
            self._ints = (ints, denom)
        return self._ints

    def as_float(self) -> np.ndarray:
        return np.array([[float(c) for c in p] for p in self.points], dtype=float).reshape(len(self), self.dim)


PointSetVector = tuple  # tuple[PointSet, ...]


def _check_dims(x: PointSet, y: PointSet):
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")


def origin(dim: int) -> PointSet:
    return PointSet([(0,) * dim])


def scalar_mul(lam, s: PointSet) -> PointSet:
    """``{lam * p : p in s}`` for ``lam >= 0``."""
    lam = to_scalar(lam)
    if lam < 0:
        raise ValueError("negative scalar; split the matrix into positive and negative parts")
    if lam == 0:
        return origin(s.dim)
    if lam == 1:
        return s
    ints, denom = s.int_coords()
    p, q = lam.numerator, lam.denominator
    hull3 = None
    if s._hull3 is not None:
        h = s._hull3
        hull3 = _hull.Hull3([(n, o * p, inc) for n, o, inc in h.facets], h.vertices, h.unbounded, h.cycles)
    return PointSet._from_ints([tuple(c * p for c in pt) for pt in ints], denom * q, s.dim, hull3, s._reduced)


def translate(s: PointSet, t) -> PointSet:
    t = to_point(t)
    if len(t) != s.dim:
        raise ValueError("dimension mismatch")
    ints, denom = s.int_coords()
    td = reduce(lcm, (c.denominator for c in t), 1)
    common = lcm(denom, td)
    f = common // denom
    tint = [c.numerator * (common // c.denominator) for c in t]
    new = [tuple(a * f + b for a, b in zip(pt, tint)) for pt in ints]
    hull3 = None
    if s._hull3 is not None:
        h = s._hull3
        hull3 = _hull.Hull3([(n, o * f + _hull._dot(n, tint), inc) for n, o, inc in h.facets],
                            h.vertices, h.unbounded, h.cycles)
    return PointSet._from_ints(new, common, s.dim, hull3, s._reduced)


def _common_ints(x: PointSet, y: PointSet):
    xi, xd = x.int_coords()
    yi, yd = y.int_coords()
    common = lcm(xd, yd)
    fx, fy = common // xd, common // yd
    if fx != 1:
        xi = [tuple(c * fx for c in p) for p in xi]
    if fy != 1:
        yi = [tuple(c * fy for c in p) for p in yi]
    return xi, yi, common


def minkowski_sum(x: PointSet, y: PointSet) -> PointSet:
    """All pairwise sums ``{a + b}``, deduplicated (no hull reduction)."""
    _check_dims(x, y)
    xi, yi, common = _common_ints(x, y)
    sums = sorted({tuple(a + b for a, b in zip(p, q)) for p in xi for q in yi})
    return PointSet._from_ints(sums, common, x.dim)


def union(x: PointSet, y: PointSet) -> PointSet:
    _check_dims(x, y)
    xi, yi, common = _common_ints(x, y)
    return PointSet._from_ints(sorted(set(xi) | set(yi)), common, x.dim)


def eval_max(s: PointSet, x: Sequence) -> Fraction:
    """``max over (a, b) in s of a.x + b``, exactly."""
    if not len(s):
        raise ValueError("empty point set")
    xs = [to_scalar(v) for v in x]
    if len(xs) != s.dim - 1:
        raise ValueError(f"expected an input of length {s.dim - 1}, got {len(xs)}")
    ints, denom = s.int_coords()
    m = reduce(lcm, (v.denominator for v in xs), 1)
    xi = [v.numerator * (m // v.denominator) for v in xs]
    d = len(xi)
    best = max(sum(p[i] * xi[i] for i in range(d)) + p[d] * m for p in ints)
    return Fraction(best, denom * m)


def eval_max_many(s: PointSet, xs: Sequence[Sequence]) -> list[Fraction]:
    return [eval_max(s, x) for x in xs]


# ---------------------------------------------------------------------------
# upper hulls


@dataclass(frozen=True)
class HullCell:
    """One cell of an upper hull: its dimension, corners and incident points."""

    dim: int
    vertices: tuple
    points: tuple


class HullComplex:
    """Cell complex of the upper hull of a point set.

    ``index_sets[i]`` holds the indices (into ``source.points``) of every input
    point lying on cell ``i``; ``cells[i]`` exposes the same as exact points.
    """

    def __init__(self, source: PointSet, faces: dict):
        self.source = source
        order = sorted(faces.items(), key=lambda kv: (kv[1], sorted(kv[0])))
        self.index_sets = tuple(f for f, _ in order)
        self.dims = tuple(d for _, d in order)
        vertex_ids = {next(iter(f)) for f, d in order if d == 0}
        pts = source.points
        self.cells = tuple(
            HullCell(d, tuple(pts[i] for i in sorted(f) if i in vertex_ids), tuple(pts[i] for i in sorted(f)))
            for f, d in order)
        self._lookup = {f: i for i, f in enumerate(self.index_sets)}
        self._down = None

    def __len__(self):
        return len(self.cells)

    def cells_of_dim(self, k: int) -> list[int]:
        return [i for i, d in enumerate(self.dims) if d == k]

    @property
    def vertices(self) -> PointSet:
        return PointSet([self.cells[i].points[0] for i in self.cells_of_dim(0)], dim=self.source.dim)

    def f_vector(self) -> tuple:
        top = max(self.dims)
        return tuple(len(self.cells_of_dim(k)) for k in range(top + 1))

    def _adjacency(self):
        if self._down is None:
            by_vertex = {}
            for i, (f, d) in enumerate(zip(self.index_sets, self.dims)):
                for v in f:
                    by_vertex.setdefault(v, []).append(i)
            down = [[] for _ in self.cells]
            for i, (f, d) in enumerate(zip(self.index_sets, self.dims)):
                if d == 0:
                    continue
                cands = set()
                for v in f:
                    cands.update(by_vertex.get(v, ()))
                down[i] = sorted(j for j in cands if self.dims[j] == d - 1 and self.index_sets[j] <= f)
            self._down = down
        return self._down

    def boundary(self, i: int) -> list[int]:
        """Indices of the (k-1)-cells on the boundary of cell ``i``."""
        return self._adjacency()[i]

    def coboundary(self, i: int) -> list[int]:
        """Indices of the (k+1)-cells having cell ``i`` on their boundary."""
        down = self._adjacency()
        return [j for j, lst in enumerate(down) if i in lst]


def _facet_faces(ints, facets, faces):
    """Faces of a three-dimensional upper hull from its certified facets."""
    for _, _, inc in facets:
        fs = frozenset(inc)
        faces[fs] = 2
        proj = [ints[i][:2] for i in inc]
        corners = _hull.hull_2d(proj)
        for c in corners:
            faces[frozenset([inc[c]])] = 0
        ring = corners + corners[:1]
        for a, b in zip(ring, ring[1:]):
            pa, pb = proj[a], proj[b]
            on = [inc[t] for t, p in enumerate(proj)
                  if _hull._cross(pa, pb, p) == 0
                  and min(pa[0], pb[0]) <= p[0] <= max(pa[0], pb[0])
                  and min(pa[1], pb[1]) <= p[1] <= max(pa[1], pb[1])]
            faces[frozenset(on)] = 1
    return faces


def _hull3_of(s: PointSet):
    """Certified three-dimensional hull data of ``s`` (``None`` if degenerate)."""
    if s._hull3 is None and s.dim == 3 and len(s) >= 3:
        ints, _ = s.int_coords()
        s._hull3 = _hull.hull3_certified(ints)
    return s._hull3


def upper_hull(s: PointSet) -> HullComplex:
    """Full face lattice of the upper hull with per-cell incident points."""
    if not len(s):
        raise ValueError("upper hull of an empty set")
    ints, _ = s.int_coords()
    h = _hull3_of(s) if s.dim == 3 else None
    if h is not None:
        faces = _facet_faces(ints, h.facets, {})
    else:
        faces = _hull.upper_faces_exact(ints)
    return HullComplex(s, faces)


def _restrict(s: PointSet, keep: list[int], hull3=None) -> PointSet:
    ints, denom = s.int_coords()
    if hull3 is not None:
        pos = {v: r for r, v in enumerate(keep)}
        cycles = None if hull3.cycles is None else [tuple(pos[i] for i in c) for c in hull3.cycles]
        hull3 = _hull.Hull3([(n, o, tuple(pos[i] for i in inc if i in pos)) for n, o, inc in hull3.facets],
                            list(range(len(keep))), {pos[v] for v in hull3.unbounded if v in pos}, cycles)
    return PointSet._from_ints([ints[i] for i in keep], denom, s.dim, hull3, reduced=True)


def upper_hull_vertices(s: PointSet) -> PointSet:
    """``U*(s)``: the vertices of the upper hull (same max-function as ``s``)."""
    if not len(s):
        raise ValueError("upper hull of an empty set")
    if s._reduced or len(s) == 1:
        return s
    if s.dim == 3:
        h = _hull3_of(s)
        if h is not None:
            return _restrict(s, h.vertices, h)
    ints, _ = s.int_coords()
    if s.dim == 2:
        keep = _upper_chain(ints)
    else:
        faces = _hull.upper_faces_exact(ints)
        keep = sorted(next(iter(f)) for f, d in faces.items() if d == 0)
    return _restrict(s, keep)


def _upper_chain(ints):
    """Upper hull vertices of planar points (sorted, distinct) by a monotone chain."""
    chain = []
    for i, p in enumerate(ints):
        if chain and ints[chain[-1]][0] == p[0]:
            chain.pop()  # same slope, larger intercept wins
        while len(chain) >= 2 and _hull._cross(ints[chain[-2]], ints[chain[-1]], p) >= 0:
            chain.pop()
        chain.append(i)
    return chain


def minkowski_sum_reduced(x: PointSet, y: PointSet) -> PointSet:
    """``U*(x (+) y)`` without materialising non-vertex sums where avoidable."""
    _check_dims(x, y)
    if len(x) == 1:
        return translate(upper_hull_vertices(y), x.points[0])
    if len(y) == 1:
        return translate(upper_hull_vertices(x), y.points[0])
    x = upper_hull_vertices(x)
    y = upper_hull_vertices(y)
    if len(x) == 1 or len(y) == 1:
        return minkowski_sum_reduced(x, y)
    if x.dim == 3:
        hx, hy = _hull3_of(x), _hull3_of(y)
        if hx is not None or hy is not None:
            xs, ys, common = _common_ints(x, y)
            res = _overlay.minkowski_overlay(xs, hx, ys, hy)
            if res is not None:
                pairs, h = _hull._assemble_sum(xs, ys, *res)
                pts = [tuple(a + b for a, b in zip(xs[i], ys[j])) for i, j in pairs]
                return PointSet._from_ints(pts, common, 3, h, reduced=True)
    return upper_hull_vertices(minkowski_sum(x, y))


def _union_hull3(x: PointSet, y: PointSet) -> PointSet | None:
    """``x u y`` carrying its certified hull, built from the tessellation overlay."""
    x = upper_hull_vertices(x)
    y = upper_hull_vertices(y)
    hx, hy = _hull3_of(x), _hull3_of(y)
    if hx is None or hy is None:
        return None
    xs, ys, common = _common_ints(x, y)
    res = _overlay.minkowski_overlay(xs, hx, ys, hy)
    if res is None:
        return None
    pairs, hs = _hull._assemble_sum(xs, ys, *res)
    sum_pts = [tuple(a + b for a, b in zip(xs[i], ys[j])) for i, j in pairs]
    pts = sorted(set(xs) | set(ys))
    h = _overlay.union_overlay(pts, xs, hx, ys, hy, pairs, _overlay.hull_edges(sum_pts, hs))
    if h is None:
        return None
    return PointSet._from_ints(pts, common, 3, h)


def union_reduced(x: PointSet, y: PointSet) -> PointSet:
    """``U*(x u y)``."""
    _check_dims(x, y)
    if x.dim == 3 and len(x) > 1 and len(y) > 1:
        s = _union_hull3(x, y)
        if s is not None:
            return upper_hull_vertices(s)
    return upper_hull_vertices(union(upper_hull_vertices(x), upper_hull_vertices(y)))


def minkowski_matrix_product(a, xs: Sequence[PointSet], reduce_hull: bool = False) -> tuple:
    """Row ``i`` is the Minkowski sum over ``j`` of ``a[i][j] * xs[j]``.

    ``a`` must be non-negative.  With ``reduce_hull`` every partial sum is
    reduced to its upper hull vertices, which leaves the max-functions intact.
    """
    rows = [[to_scalar(v) for v in row] for row in a]
    if any(len(r) != len(xs) for r in rows):
        raise ValueError("matrix column count does not match the vector length")
    if any(v < 0 for r in rows for v in r):
        raise ValueError("Minkowski matrix product needs a non-negative matrix")
    if not xs:
        raise ValueError("empty point-set vector")
    dim = xs[0].dim
    out = []
    for row in rows:
        acc = origin(dim)
        terms = sorted((scalar_mul(c, x) for c, x in zip(row, xs) if c != 0), key=len)
        for t in terms:
            acc = minkowski_sum_reduced(acc, t) if reduce_hull else minkowski_sum(acc, t)
        out.append(acc)
    return tuple(out)


def same_function(x: PointSet, y: PointSet) -> bool:
    """Whether ``x`` and ``y`` define the same max-function (equal ``U*``)."""
    return upper_hull_vertices(x).points == upper_hull_vertices(y).points


# ---------------------------------------------------------------------------
# duality between dual points / hyperplanes and real hyperplanes / points


def affine_of(c: DualPoint):
    """``R(c)`` as ``(slope vector, intercept)``."""
    return tuple(c[:-1]), c[-1]


def dual_of(slope: Sequence, intercept) -> DualPoint:
    """``R^-1`` of the affine function ``x -> slope.x + intercept``."""
    return to_point(tuple(slope) + (intercept,))


@dataclass(frozen=True)
class DualHyperplane:
    """Non-vertical hyperplane ``{(a, b) : b = coef.a + const}`` in dual space."""

    coef: tuple
    const: Fraction

    def height(self, a: Sequence) -> Fraction:
        return sum((c * v for c, v in zip(self.coef, a)), Fraction(0)) + self.const


def dual_hyperplane(z: Sequence) -> DualHyperplane:
    """``R^-1`` of a real point ``z = (x, y)``: the plane ``a -> (-x).a + y``."""
    z = to_point(z)
    return DualHyperplane(tuple(-c for c in z[:-1]), z[-1])


def real_point(h: DualHyperplane) -> tuple:
    """``R(H)``; note the sign flip on the slope part."""
    return tuple(-c for c in h.coef) + (h.const,)


def lies_on(c: DualPoint, h: DualHyperplane) -> bool:
    return c[-1] == h.height(c[:-1])


def lies_above(c: DualPoint, h: DualHyperplane) -> bool:
    return c[-1] > h.height(c[:-1])


def graph_contains(c: DualPoint, z: Sequence) -> bool:
    """Whether the graph of ``R(c)`` contains the real point ``z``."""
    slope, b = affine_of(c)
    return z[-1] == sum((s * v for s, v in zip(slope, z[:-1])), Fraction(0)) + b


def graph_below(c: DualPoint, z: Sequence) -> bool:
    """Whether the real point ``z`` lies strictly below the graph of ``R(c)``."""
    slope, b = affine_of(c)
    return z[-1] < sum((s * v for s, v in zip(slope, z[:-1])), Fraction(0)) + b
