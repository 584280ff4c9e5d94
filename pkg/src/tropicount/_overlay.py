"""Upper hulls of sums and unions of 3D point sets via their planar tessellations.

A dual point ``(a1, a2, b)`` is the affine function ``a.x + b`` on the plane.
The upper hull facets of a set correspond to the vertices of its
tessellation (points where three or more functions tie for the maximum),
and the hull edges to the tessellation edges.  For a sum ``X (+) Y`` the
tessellation is the common refinement of the two tessellations, and for a
union ``X u Y`` it is cut along the tie curve ``max X = max Y``.

Both constructions only *propose* plane normals ``(x1, x2, 1)`` at
candidate tessellation vertices.  Each proposal is turned into an exact
supporting plane by an exact support query, and the result is certified by
checking that the projected facet areas add up to the projected hull area.
Scaling a set never changes its tessellation, so these proposals stay well
conditioned when one summand is tiny next to the other, which is exactly
where a float hull in dual space breaks down.
"""
from __future__ import annotations

import numpy as np

from ._hull import Hull3, _canonical_plane, _float_coords, _projected_boundary, _support_many, \
    area2, hull_2d, polygon


def _float_ratio(p: int, q: int) -> float:
    try:
        return p / q
    except OverflowError:
        return np.inf if (p > 0) == (q > 0) else -np.inf


def hull_edges(pts, hull: Hull3) -> dict:
    """Map each upper-hull edge ``(i, j)`` (``i < j``) to its incident facet indices."""
    edges = {}
    for k, (_, _, inc) in enumerate(hull.facets):
        if hull.cycles is not None:
            cyc = list(hull.cycles[k])
        else:
            cyc = [inc[c] for c in hull_2d([pts[i][:2] for i in inc])] if len(inc) > 3 else list(inc)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            edges.setdefault((min(a, b), max(a, b)), []).append(k)
    return edges


class _Edges:
    """Tessellation edges as float parametrised pieces ``p + s d``, ``lo <= s <= hi``."""

    def __init__(self, pairs, p, d, lo, hi):
        self.pairs = pairs
        self.p = np.asarray(p, dtype=float).reshape(-1, 2)
        self.d = np.asarray(d, dtype=float).reshape(-1, 2)
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)


def _facet_points(hull: Hull3) -> np.ndarray:
    return np.array([[_float_ratio(n[0], n[2]), _float_ratio(n[1], n[2])] for n, _, _ in hull.facets])


def _perp_dir(pts, i, j):
    u = (pts[i][0] - pts[j][0], pts[i][1] - pts[j][1])
    return (-u[1], u[0])


def tessellation_edges(pts, hull: Hull3 | None) -> _Edges | None:
    """Edges of the tessellation of ``pts`` (upper hull vertices only)."""
    if hull is not None:
        xf = _facet_points(hull)
        pairs, ps, ds, los, his = [], [], [], [], []
        for (i, j), ks in hull_edges(pts, hull).items():
            if len(ks) == 2:
                a, b = xf[ks[0]], xf[ks[1]]
                ps.append(a)
                ds.append(b - a)
                los.append(0.0)
                his.append(1.0)
            else:
                _, _, inc = hull.facets[ks[0]]
                u = next(c for c in inc if c != i and c != j)
                d = _perp_dir(pts, i, j)
                # cells i and j beat u beyond the facet point
                if (pts[i][0] - pts[u][0]) * d[0] + (pts[i][1] - pts[u][1]) * d[1] < 0:
                    d = (-d[0], -d[1])
                s = max(abs(d[0]), abs(d[1]))
                ps.append(xf[ks[0]])
                ds.append((d[0] / s, d[1] / s))
                los.append(0.0)
                his.append(np.inf)
            pairs.append((i, j))
        return _Edges(pairs, ps, ds, los, his)
    if len(pts) < 2:
        return None
    # collinear projections: the tessellation is a family of parallel lines
    proj = [p[:2] for p in pts]
    if area2(proj) != 0:
        return None
    order = sorted(range(len(pts)), key=lambda r: proj[r])
    pairs, ps, ds = [], [], []
    for i, j in zip(order, order[1:]):
        u = (pts[i][0] - pts[j][0], pts[i][1] - pts[j][1])
        c = pts[j][2] - pts[i][2]
        nn = u[0] * u[0] + u[1] * u[1]
        ps.append((_float_ratio(c * u[0], nn), _float_ratio(c * u[1], nn)))
        d = (-u[1], u[0])
        s = max(abs(d[0]), abs(d[1]))
        ds.append((d[0] / s, d[1] / s))
        pairs.append((min(i, j), max(i, j)))
    n = len(pairs)
    return _Edges(pairs, ps, ds, [-np.inf] * n, [np.inf] * n)


def _crossing_candidates(ex: _Edges, ey: _Edges, block: int = 256):
    """Index pairs of edges that may cross; generous, never misses a clear crossing."""
    out = []
    if not len(ex.pairs) or not len(ey.pairs):
        return out
    q, e = ey.p, ey.d
    qn = np.abs(q).sum(axis=1)
    en = np.abs(e).sum(axis=1)
    with np.errstate(all="ignore"):
        for start in range(0, len(ex.pairs), block):
            p = ex.p[start:start + block, None, :]
            d = ex.d[start:start + block, None, :]
            lo, hi = ex.lo[start:start + block, None], ex.hi[start:start + block, None]
            w = q[None] - p
            # p + s d = q + u e
            den = d[..., 0] * e[None, :, 1] - d[..., 1] * e[None, :, 0]
            ns = w[..., 0] * e[None, :, 1] - w[..., 1] * e[None, :, 0]
            nu = w[..., 0] * d[..., 1] - w[..., 1] * d[..., 0]
            dn = np.abs(d).sum(axis=2)
            scale = (np.abs(p).sum(axis=2) + qn[None] + dn + en[None]) * (dn + en[None])
            tol = 1e-9 * scale / np.abs(den)
            s = ns / den
            u = nu / den
            ok = (s >= lo - tol) & (s <= hi + tol) & (u >= ey.lo[None] - tol) & (u <= ey.hi[None] + tol)
            flat = np.abs(den) <= 1e-12 * dn * en[None]
            ok |= flat
            ok &= ~(np.isnan(s) & ~flat)
            ii, jj = np.nonzero(ok)
            out.extend(zip((ii + start).tolist(), jj.tolist()))
    return out


def _two_line_normal(f1, f2, g1, g2):
    """Normal ``(X1, X2, D)``, ``D > 0``, at the point where ``f1 = f2`` and ``g1 = g2``."""
    u1, u2, c1 = f1[0] - f2[0], f1[1] - f2[1], f2[2] - f1[2]
    v1, v2, c2 = g1[0] - g2[0], g1[1] - g2[1], g2[2] - g1[2]
    det = u1 * v2 - u2 * v1
    if det == 0:
        return None
    n = (c1 * v2 - u2 * c2, u1 * c2 - c1 * v1, det)
    if det < 0:
        n = (-n[0], -n[1], -n[2])
    return _canonical_plane(n, 0)[0]


def _tie_normal(f1, f2, f3):
    return _two_line_normal(f1, f2, f1, f3)


def _facet_supports(hull: Hull3 | None) -> dict:
    """Canonical facet normal -> (support value, incident indices); facets are their own support."""
    out = {}
    if hull is not None:
        for n, o, inc in hull.facets:
            c = _canonical_plane(n, 0)[0]
            g = next(a // b for a, b in zip(n, c) if b)
            out[c] = (o // g, tuple(inc))
    return out


def _supports(normals, pts, known):
    todo = [n for n in normals if n not in known]
    pf, _ = _float_coords(pts)
    found = dict(zip(todo, _support_many(todo, pts, pf))) if todo else {}
    return [known[n] if n in known else found[n] for n in normals]


def _sum_area(xs, ys):
    cx = [xs[i][:2] for i in hull_2d([p[:2] for p in xs])]
    cy = [ys[i][:2] for i in hull_2d([p[:2] for p in ys])]
    return area2([(a[0] + b[0], a[1] + b[1]) for a in cx for b in cy])


def minkowski_overlay(xs, hx: Hull3 | None, ys, hy: Hull3 | None):
    """Certified ``(facets, facet_corners)`` of ``U(X (+) Y)`` or ``None``.

    ``xs``/``ys`` hold upper hull vertices only; a missing hull means the set
    has a collinear projection.  Facet incidences are ``(ix, iy)`` pairs.
    """
    total = _sum_area(xs, ys)
    if total == 0:
        return None
    ex = tessellation_edges(xs, hx)
    ey = tessellation_edges(ys, hy)
    if ex is None or ey is None:
        return None
    known_x, known_y = _facet_supports(hx), _facet_supports(hy)
    normals = set(known_x) | set(known_y)
    for a, b in _crossing_candidates(ex, ey):
        i1, i2 = ex.pairs[a]
        j1, j2 = ey.pairs[b]
        n = _two_line_normal(xs[i1], xs[i2], ys[j1], ys[j2])
        if n is not None:
            normals.add(n)
    normals = sorted(normals)
    supx = _supports(normals, xs, known_x)
    supy = _supports(normals, ys, known_y)
    facets, corners = [], []
    covered = 0
    for nrm, (mx, tx), (my, ty) in zip(normals, supx, supy):
        if len(tx) * len(ty) < 3:
            continue
        inc = [(i, j) for i in tx for j in ty]
        cs, a = polygon([(xs[i][0] + ys[j][0], xs[i][1] + ys[j][1]) for i, j in inc])
        if a == 0:
            continue
        facets.append(_canonical_plane(nrm, mx + my) + (inc,))
        corners.append(cs)
        covered += a
    if covered != total:
        return None
    return facets, corners


def union_overlay(pts, xs, hx: Hull3, ys, hy: Hull3, sum_pairs, sum_edges):
    """Certified ``Hull3`` of ``pts = sorted(set(xs) | set(ys))`` or ``None``.

    ``sum_pairs``/``sum_edges`` describe the upper hull of ``X (+) Y``: result
    vertex ``r`` is ``xs[i] + ys[j]`` for ``(i, j) = sum_pairs[r]``, and
    ``sum_edges`` lists its hull edges as result-vertex index pairs.
    """
    proj = [p[:2] for p in pts]
    corners = hull_2d(proj)
    total = area2(proj, corners)
    if total == 0:
        return None
    normals = set()
    for h in (hx, hy):
        normals.update(_canonical_plane(n, 0)[0] for n, _, _ in h.facets)
    for r1, r2 in sum_edges:
        (i1, j1), (i2, j2) = sum_pairs[r1], sum_pairs[r2]
        cands = []
        if i1 != i2:
            cands += [(xs[i1], xs[i2], ys[j1]), (xs[i1], xs[i2], ys[j2])]
        if j1 != j2:
            cands += [(ys[j1], ys[j2], xs[i1]), (ys[j1], ys[j2], xs[i2])]
        for f in cands:
            n = _tie_normal(*f)
            if n is not None:
                normals.add(n)
    normals = sorted(normals)
    pf, _ = _float_coords(pts)
    sup = _support_many(normals, pts, pf)
    facets = []
    covered = 0
    fcorners = []
    for nrm, (m, ties) in zip(normals, sup):
        if len(ties) < 3:
            continue
        cs, a = polygon([proj[i] for i in ties])
        if a == 0:
            continue
        facets.append(_canonical_plane(nrm, m) + (ties,))
        fcorners.append(cs)
        covered += a
    if covered != total:
        return None
    cycles = [tuple(inc[c] for c in cs) for (_, _, inc), cs in zip(facets, fcorners)]
    verts = sorted({v for cyc in cycles for v in cyc})
    return Hull3(facets, verts, _projected_boundary(proj, corners, verts) & set(verts), cycles)
