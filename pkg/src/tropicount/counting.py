"""Counting linear pieces of a difference of max-affine functions.

Boundary pieces are the edges of ``U(P u N)`` that touch points of both
``P`` and ``N``; affine pieces are the vertices of ``U(P (+) N)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import geometry as geo
from .geometry import HullComplex, PointSet
from .tropical import DcpaFunction


@dataclass(frozen=True)
class BoundaryReport:
    boundary_piece_count: int
    degenerate_flat_cells: int  # shared P/N points on the hull: full-dimensional zero regions
    mixed_higher_cells: int  # mixed cells of dimension >= 2: zero sets of lower dimension

    @property
    def degenerate(self) -> bool:
        return self.degenerate_flat_cells > 0


def _labelled_hull(f: DcpaFunction) -> tuple[HullComplex, list[bool], list[bool]]:
    s = geo._union_hull3(f.P, f.N) if f.P.dim == 3 and len(f.P) > 1 and len(f.N) > 1 else None
    if s is None:
        s = geo.union(f.P, f.N)
    in_p = set(f.P.points)
    in_n = set(f.N.points)
    return geo.upper_hull(s), [p in in_p for p in s.points], [p in in_n for p in s.points]


def _mixed_cells(hull: HullComplex, in_p, in_n):
    for i, (cell, dim) in enumerate(zip(hull.index_sets, hull.dims)):
        if any(in_p[j] for j in cell) and any(in_n[j] for j in cell):
            yield i, dim


def count_boundary_pieces(f: DcpaFunction) -> BoundaryReport:
    hull, in_p, in_n = _labelled_hull(f)
    counts = {}
    for _, dim in _mixed_cells(hull, in_p, in_n):
        counts[dim] = counts.get(dim, 0) + 1
    return BoundaryReport(counts.get(1, 0), counts.get(0, 0), sum(v for k, v in counts.items() if k >= 2))


def count_affine_pieces(f: DcpaFunction) -> int:
    return len(geo.minkowski_sum_reduced(f.P, f.N))


# ---------------------------------------------------------------------------
# planar geometry of the pieces


@dataclass(frozen=True)
class BoundarySegment2D:
    """Piece of ``{x : normal.x + offset = 0}``, parametrised as ``base + t * direction``.

    ``t_min``/``t_max`` are ``None`` on unbounded sides.
    """

    normal: tuple
    offset: Fraction
    base: tuple
    direction: tuple
    t_min: Fraction | None
    t_max: Fraction | None
    p_point: tuple  # hull-edge endpoint from P
    n_point: tuple  # hull-edge endpoint from N

    @property
    def kind(self) -> str:
        bounded = (self.t_min is not None) + (self.t_max is not None)
        return ("line", "ray", "segment")[bounded]

    def at(self, t) -> tuple:
        return tuple(b + t * d for b, d in zip(self.base, self.direction))

    @property
    def endpoints(self) -> tuple:
        return (None if self.t_min is None else self.at(self.t_min),
                None if self.t_max is None else self.at(self.t_max))

    def interior_point(self) -> tuple:
        lo, hi = self.t_min, self.t_max
        if lo is not None and hi is not None:
            t = (lo + hi) / 2
        elif lo is not None:
            t = lo + 1
        elif hi is not None:
            t = hi - 1
        else:
            t = Fraction(0)
        return self.at(t)


def _interval_on_line(base, direction, v, others):
    """Parameter range where ``v`` stays maximal among ``others`` along the line."""
    lo = hi = None
    for w in others:
        da = [a - b for a, b in zip(v[:-1], w[:-1])]
        alpha = sum((a * x for a, x in zip(da, base)), v[-1] - w[-1])
        beta = sum((a * x for a, x in zip(da, direction)), Fraction(0))
        if beta == 0:
            if alpha < 0:
                return None
            continue
        t = -alpha / beta
        if beta > 0:
            lo = t if lo is None else max(lo, t)
        else:
            hi = t if hi is None else min(hi, t)
    return lo, hi


def boundary_geometry_2d(f: DcpaFunction) -> list[BoundarySegment2D]:
    """One exact segment, ray or line per boundary piece of a planar function."""
    if f.input_dim != 2:
        raise ValueError("boundary geometry needs a two-dimensional input")
    hull, in_p, in_n = _labelled_hull(f)
    pts = hull.source.points
    verts = [hull.cells[i].points[0] for i in hull.cells_of_dim(0)]
    out = []
    for i, dim in _mixed_cells(hull, in_p, in_n):
        if dim != 1:
            continue
        cell = sorted(hull.index_sets[i])
        p = next(pts[j] for j in cell if in_p[j])
        n = next(pts[j] for j in cell if in_n[j] and pts[j] != p)
        normal = (p[0] - n[0], p[1] - n[1])
        offset = p[2] - n[2]
        if normal == (0, 0):
            raise AssertionError("vertical hull edge")
        nn = normal[0] ** 2 + normal[1] ** 2
        base = (-offset * normal[0] / nn, -offset * normal[1] / nn)
        direction = (-normal[1], normal[0])
        rng = _interval_on_line(base, direction, p, verts)
        if rng is None or (rng[0] is not None and rng[1] is not None and rng[0] >= rng[1]):
            raise AssertionError("hull edge with an empty real cell")
        out.append(BoundarySegment2D(normal, offset, base, direction, rng[0], rng[1], p, n))
    return out


@dataclass(frozen=True)
class AffineCell:
    """Region ``{x : a.x + b >= a'.x + b'}`` where the summed function ``vertex`` dominates.

    Each half-space is stored as ``(g, c)`` meaning ``g.x + c >= 0``.
    """

    vertex: tuple
    halfspaces: tuple

    def contains(self, x: Sequence) -> bool:
        return all(sum((g_ * v for g_, v in zip(g, x)), c) >= 0 for g, c in self.halfspaces)


def affine_cell_geometry(f: DcpaFunction) -> list[AffineCell]:
    total = geo.minkowski_sum_reduced(f.P, f.N)
    pts = total.points
    if len(pts) == 1:
        return [AffineCell(pts[0], ())]
    hull = geo.upper_hull(total)
    nbrs = {i: set() for i in range(len(pts))}
    for cell, dim in zip(hull.index_sets, hull.dims):
        if dim == 1:
            for a in cell:
                nbrs[a].update(cell - {a})
    cells = []
    for i, v in enumerate(pts):
        hs = tuple((tuple(a - b for a, b in zip(v[:-1], pts[j][:-1])), v[-1] - pts[j][-1]) for j in sorted(nbrs[i]))
        cells.append(AffineCell(v, hs))
    return cells
