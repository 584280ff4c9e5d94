"""Exact convex and upper hull machinery on integer coordinates.

Every predicate here is decided in exact integer arithmetic.  Floating point
only appears as a filter (to skip exact work that cannot change a decision)
and as a source of candidate facets from Qhull, which are then certified
exactly before being used.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from itertools import combinations
from math import gcd

import numpy as np

logger = logging.getLogger(__name__)

# Relative slack of the floating filters.  Double rounding error of a dot
# product of length <= 5 is below 1e-15 relative; this leaves a wide margin.
_FILTER_REL = 1e-9


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _det(m):
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = m
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * _det(minor)
    return total


def hyperplane_normal(pts):
    """Normal of the hyperplane through ``k`` points of ``Z^k`` (unoriented)."""
    p0 = pts[0]
    rows = [tuple(a - b for a, b in zip(p, p0)) for p in pts[1:]]
    k = len(p0)
    return tuple((-1) ** j * _det([r[:j] + r[j + 1:] for r in rows]) for j in range(k))


def _canonical_plane(normal, offset):
    g = 0
    for c in normal:
        g = gcd(g, c)
    g = gcd(g, offset)
    if g > 1:
        normal = tuple(c // g for c in normal)
        offset //= g
    return normal, offset


def affine_frame(pts):
    """Indices of a maximal affinely independent subset and the direction rows.

    Returns ``(indices, directions)`` where ``directions[i] = pts[indices[i+1]]
    - pts[indices[0]]``.
    """
    dim = len(pts[0])
    echelon = []  # (pivot column, reduced row as Fractions)
    idx = [0]
    dirs = []
    p0 = pts[0]
    for i in range(1, len(pts)):
        if len(dirs) == dim:
            break
        raw = tuple(a - b for a, b in zip(pts[i], p0))
        v = [Fraction(x) for x in raw]
        for col, row in echelon:
            if v[col]:
                f = v[col] / row[col]
                v = [a - f * b for a, b in zip(v, row)]
        for col, x in enumerate(v):
            if x:
                echelon.append((col, v))
                idx.append(i)
                dirs.append(raw)
                break
    return idx, dirs


def _rank(rows):
    if not rows:
        return 0
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    ncol = len(m[0])
    for col in range(ncol):
        piv = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def vertical_in_span(dirs):
    """Whether the last coordinate axis lies in the span of ``dirs``."""
    if not dirs:
        return False
    return _rank([d[:-1] for d in dirs]) < len(dirs)


def injective_columns(dirs, include_last=False):
    """Coordinate subset on which projection is injective over span(dirs)."""
    k = len(dirs)
    dim = len(dirs[0])
    for cols in combinations(range(dim), k):
        if include_last and cols[-1] != dim - 1:
            continue
        if _det([[d[c] for c in cols] for d in dirs]):
            return cols
    raise ValueError("no injective projection found")


# ---------------------------------------------------------------------------
# full-dimensional hulls


def _initial_simplex(pts, k):
    """k+1 affinely independent points, preferring extremes for speed."""
    first = min(range(len(pts)), key=lambda i: pts[i])
    last = max(range(len(pts)), key=lambda i: pts[i])
    order = [first, last] + [i for i in range(len(pts)) if i not in (first, last)]
    idx, dirs = affine_frame([pts[i] for i in order])
    if len(dirs) < k:
        raise ValueError("point set is not full-dimensional")
    return [order[i] for i in idx]


def _quickhull(pts, k):
    """Facets ``(normal, offset)`` of the hull of full-dimensional ``pts`` (k >= 2).

    Facets come out triangulated (simplicial); coplanar facets are merged by
    the caller.  Points exactly on a facet plane are never treated as outside.
    """
    simplex = _initial_simplex(pts, k)
    centre = [sum(pts[i][j] for i in simplex) for j in range(k)]
    scale = k + 1

    facets = {}
    ridges = {}
    counter = [0]

    def add_facet(verts):
        nrm = hyperplane_normal([pts[v] for v in verts])
        off = _dot(nrm, pts[verts[0]])
        side = _dot(nrm, centre) - off * scale
        if side > 0:
            nrm = tuple(-c for c in nrm)
            off = -off
        elif side == 0:
            raise ArithmeticError("degenerate facet in quickhull")
        fid = counter[0]
        counter[0] += 1
        facets[fid] = [verts, nrm, off, []]
        for j in range(k):
            r = frozenset(verts[:j] + verts[j + 1:])
            ridges.setdefault(r, []).append(fid)
        return fid

    for j in range(k + 1):
        add_facet(tuple(simplex[:j] + simplex[j + 1:]))

    used = set(simplex)
    flist = list(facets)
    for i in range(len(pts)):
        if i in used:
            continue
        p = pts[i]
        for fid in flist:
            _, nrm, off, out = facets[fid]
            if _dot(nrm, p) > off:
                out.append(i)
                break

    stack = [fid for fid in facets if facets[fid][3]]
    while stack:
        fid = stack.pop()
        if fid not in facets or not facets[fid][3]:
            continue
        _, nrm, off, out = facets[fid]
        apex = max(out, key=lambda q: _dot(nrm, pts[q]) - off)
        p = pts[apex]

        visible = {fid}
        frontier = [fid]
        horizon = []
        while frontier:
            f = frontier.pop()
            verts = facets[f][0]
            for j in range(k):
                r = frozenset(verts[:j] + verts[j + 1:])
                other = [g for g in ridges[r] if g != f]
                g = other[0]
                if g in visible:
                    continue
                _, gn, go, _ = facets[g]
                if _dot(gn, p) > go:
                    visible.add(g)
                    frontier.append(g)
                else:
                    horizon.append(r)

        orphans = []
        for f in visible:
            verts, _, _, out_f = facets.pop(f)
            orphans.extend(q for q in out_f if q != apex)
            for j in range(k):
                r = frozenset(verts[:j] + verts[j + 1:])
                lst = ridges[r]
                lst.remove(f)
                if not lst:
                    del ridges[r]

        new = [add_facet(tuple(sorted(r)) + (apex,)) for r in horizon]
        for q in orphans:
            pq = pts[q]
            for f in new:
                _, fn, fo, fout = facets[f]
                if _dot(fn, pq) > fo:
                    fout.append(q)
                    break
        stack.extend(f for f in new if facets[f][3])

    return [(f[1], f[2]) for f in facets.values()]


def _float_coords(pts):
    scale = max(max(abs(c) for c in p) for p in pts) or 1
    return np.array([[c / scale for c in p] for p in pts], dtype=float), scale


def points_on_planes(pts, planes, pts_f=None, scale=None):
    """For each plane ``(normal, offset)``, indices of ``pts`` lying on it (exact)."""
    if not planes:
        return []
    if len(pts) * len(planes) <= 4096:
        return [tuple(i for i, p in enumerate(pts) if _dot(n, p) == o) for n, o in planes]
    if pts_f is None:
        pts_f, scale = _float_coords(pts)
    result = []
    block = 256
    for start in range(0, len(planes), block):
        chunk = planes[start:start + block]
        nf = np.empty((len(chunk), pts_f.shape[1]))
        of = np.empty(len(chunk))
        for r, (n, o) in enumerate(chunk):
            s = max(abs(c) for c in n) or 1
            nf[r] = [c / s for c in n]
            of[r] = o / (s * scale)
        vals = pts_f @ nf.T
        mag = np.abs(pts_f) @ np.abs(nf).T + np.abs(of)
        near = np.abs(vals - of) <= _FILTER_REL * mag + 1e-300
        for r, (n, o) in enumerate(chunk):
            cand = np.nonzero(near[:, r])[0]
            result.append(tuple(int(i) for i in cand if _dot(n, pts[i]) == o))
    return result


def full_facets(pts, k):
    """Facets of the hull of full-dimensional, distinct ``pts`` in ``Z^k``.

    Returns a list of ``(normal, offset, incident)`` with outward normals in
    lowest terms and ``incident`` the sorted indices of all points on the facet.
    """
    if k == 1:
        lo = min(range(len(pts)), key=lambda i: pts[i][0])
        hi = max(range(len(pts)), key=lambda i: pts[i][0])
        return [((-1,), -pts[lo][0], (lo,)), ((1,), pts[hi][0], (hi,))]
    if k == 2:
        return _facets_2d(pts)
    planes = sorted({_canonical_plane(n, o) for n, o in _quickhull(pts, k)})
    incident = points_on_planes(pts, planes)
    return [(n, o, inc) for (n, o), inc in zip(planes, incident)]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_2d(pts):
    """Counter-clockwise corner indices of the 2D hull (collinear points dropped)."""
    order = sorted(range(len(pts)), key=pts.__getitem__)
    if len(order) <= 2:
        return order

    def chain(seq):
        out = []
        for i in seq:
            px, py = pts[i]
            while len(out) >= 2:
                ox, oy = pts[out[-2]]
                ax, ay = pts[out[-1]]
                if (ax - ox) * (py - oy) - (ay - oy) * (px - ox) > 0:
                    break
                out.pop()
            out.append(i)
        return out

    return chain(order)[:-1] + chain(reversed(order))[:-1]


def area2(pts, corners=None):
    """Twice the area of the convex hull of 2D points."""
    if corners is None and len(pts) == 3:
        return abs(_cross(pts[0], pts[1], pts[2]))
    if corners is None:
        corners = hull_2d(pts)
    if len(corners) < 3:
        return 0
    total = 0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        total += pts[a][0] * pts[b][1] - pts[b][0] * pts[a][1]
    return total


def polygon(pts):
    """``(corner indices in cyclic order, doubled area)`` of the convex hull of few 2D points."""
    n = len(pts)
    if n == 3:
        a = _cross(pts[0], pts[1], pts[2])
        return ([0, 1, 2] if a else hull_2d(pts)), abs(a)
    if n == 4:
        tri = [_cross(pts[i], pts[j], pts[k]) for i, j, k in ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))]
        if all(tri):
            # point t is a corner unless it lies inside the triangle of the other three
            inside = []
            for t in range(4):
                o = [i for i in range(4) if i != t]
                s1 = _cross(pts[o[0]], pts[o[1]], pts[t])
                s2 = _cross(pts[o[1]], pts[o[2]], pts[t])
                s3 = _cross(pts[o[2]], pts[o[0]], pts[t])
                inside.append((s1 > 0 and s2 > 0 and s3 > 0) or (s1 < 0 and s2 < 0 and s3 < 0))
            if not any(inside):
                p0, p1, p2, p3 = pts
                # the diagonal pairing has the largest cross product, which is the doubled area
                return max((abs((p2[0] - p0[0]) * (p3[1] - p1[1]) - (p2[1] - p0[1]) * (p3[0] - p1[0])), [0, 1, 2, 3]),
                           (abs((p1[0] - p0[0]) * (p3[1] - p2[1]) - (p1[1] - p0[1]) * (p3[0] - p2[0])), [0, 2, 1, 3]),
                           (abs((p3[0] - p0[0]) * (p2[1] - p1[1]) - (p3[1] - p0[1]) * (p2[0] - p1[0])), [0, 1, 3, 2]),
                           key=lambda t: t[0])[::-1]
    corners = hull_2d(pts)
    return corners, area2(pts, corners)


def _facets_2d(pts):
    corners = hull_2d(pts)
    out = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        pa, pb = pts[a], pts[b]
        nrm = (pb[1] - pa[1], pa[0] - pb[0])
        out.append(_canonical_plane(nrm, _dot(nrm, pa)))
    incident = points_on_planes(pts, out)
    return [(n, o, inc) for (n, o), inc in zip(out, incident)]


# ---------------------------------------------------------------------------
# face lattices


def polytope_faces(pts, idx, faces):
    """Add every face of conv(pts[idx]) to ``faces`` (frozenset -> dimension)."""
    if idx in faces:
        return
    sub = sorted(idx)
    if len(sub) == 1:
        faces[idx] = 0
        return
    local = [pts[i] for i in sub]
    _, dirs = affine_frame(local)
    k = len(dirs)
    faces[idx] = k
    cols = injective_columns(dirs)
    proj = [tuple(p[c] for c in cols) for p in local]
    for _, _, inc in full_facets(proj, k):
        polytope_faces(pts, frozenset(sub[t] for t in inc), faces)


def upper_faces_exact(pts):
    """Face lattice of the upper hull of distinct integer points, exactly."""
    faces = {}
    n = len(pts)
    if n == 1:
        return {frozenset([0]): 0}
    _, dirs = affine_frame(pts)
    if not dirs:
        return {frozenset([0]): 0}
    everything = frozenset(range(n))
    if not vertical_in_span(dirs):
        # no vertical segment inside conv(S): the whole hull is upper
        polytope_faces(pts, everything, faces)
        return faces
    k = len(dirs)
    cols = injective_columns(dirs, include_last=True)
    proj = [tuple(p[c] for c in cols) for p in pts]
    for nrm, _, inc in full_facets(proj, k):
        if nrm[-1] > 0:
            polytope_faces(pts, frozenset(inc), faces)
    return faces


# ---------------------------------------------------------------------------
# certified fast path for three-dimensional dual space


class Hull3:
    """Certified upper hull of a finite set in ``Z^3`` with 2D-full projection.

    Attributes
    ----------
    facets : list of (normal, offset, incident)
        Upper facets; ``normal[2] > 0``; ``incident`` holds indices of all
        points of the underlying set lying on the facet.
    vertices : sorted list of vertex indices.
    unbounded : set of vertex indices whose projection is on the boundary of
        the projected hull (their tessellation cell is unbounded).
    """

    __slots__ = ("facets", "vertices", "unbounded", "cycles")

    def __init__(self, facets, vertices, unbounded, cycles=None):
        self.facets = facets
        self.vertices = vertices
        self.unbounded = unbounded
        self.cycles = cycles  # per facet, its corner indices in cyclic order


def _support(nrm, pts, pts_f, scale):
    """Exact ``max_i nrm . pts[i]`` and the tying indices, float-filtered."""
    if len(pts) <= 8:
        vals = [_dot(nrm, p) for p in pts]
        m = max(vals)
        return m, tuple(i for i, v in enumerate(vals) if v == m)
    s = max(abs(c) for c in nrm)
    nf = np.array([c / s for c in nrm])
    vals = pts_f @ nf
    mag = np.abs(pts_f) @ np.abs(nf)
    top = vals.max()
    tol = _FILTER_REL * (mag + abs(top)) + 1e-300
    cand = np.nonzero(vals >= top - 2 * tol.max())[0]
    exact = [(_dot(nrm, pts[i]), int(i)) for i in cand]
    m = max(v for v, _ in exact)
    return m, tuple(sorted(i for v, i in exact if v == m))


def _support_many(normals, pts, pts_f):
    """Vectorised ``_support`` over many normals."""
    out = [None] * len(normals)
    if len(pts) <= 8:
        for r, nrm in enumerate(normals):
            out[r] = _support(nrm, pts, pts_f, None)
        return out
    block = max(1, min(512, 2_000_000 // len(pts)))
    absp = np.abs(pts_f)
    for start in range(0, len(normals), block):
        chunk = normals[start:start + block]
        nf = np.array([[c / max(abs(x) for x in n) for c in n] for n in chunk])
        vals = pts_f @ nf.T
        mag = absp @ np.abs(nf).T
        top = vals.max(axis=0)
        tol = _FILTER_REL * (mag.max(axis=0) + np.abs(top)) + 1e-300
        near = vals >= top - 2 * tol
        for r, nrm in enumerate(chunk):
            cand = np.nonzero(near[:, r])[0]
            exact = [(_dot(nrm, pts[i]), int(i)) for i in cand]
            m = max(v for v, _ in exact)
            out[start + r] = (m, tuple(sorted(i for v, i in exact if v == m)))
    return out


def _qhull_planes(cand_f, cand_exact):
    """Candidate upper planes from Qhull on the float candidates, exact-ified."""
    from scipy.spatial import ConvexHull, QhullError

    if len(cand_exact) < 4:
        return None
    try:
        hull = ConvexHull(cand_f)
    except (QhullError, ValueError):
        return None
    eqs = hull.equations
    upper = np.nonzero(eqs[:, 2] > 0)[0]
    # triangles of one facet share a plane: build each exact plane once; a
    # wrong merge only loses area, which the caller's certification catches
    keys = np.round(eqs[upper] / np.linalg.norm(eqs[upper, :3], axis=1)[:, None], 11)
    _, first = np.unique(keys, axis=0, return_index=True)
    planes = set()
    for t in upper[np.sort(first)]:
        a, b, c = (cand_exact[int(v)] for v in hull.simplices[t])
        nrm = hyperplane_normal([a, b, c])
        if nrm[2] < 0:
            nrm = tuple(-x for x in nrm)
        if nrm[2] == 0:
            continue
        planes.add(_canonical_plane(nrm, _dot(nrm, a)))
    return sorted(planes)


def _projected_boundary(pts2, corners, subset=None):
    """Indices (among ``subset``) of 2D points on the boundary of their hull."""
    on = set(corners)
    idx = [i for i in (range(len(pts2)) if subset is None else subset) if i not in on]
    if not idx or len(corners) < 2:
        return on
    ring = corners + corners[:1]
    edges = list(zip(ring, ring[1:]))
    scale = max(max(abs(c) for c in pts2[i]) for i in set(idx) | on) or 1
    pf = np.array([[c / scale for c in pts2[i]] for i in idx])
    ef = np.array([[c / scale for c in pts2[a]] + [c / scale for c in pts2[b]] for a, b in edges])
    ax, ay, bx, by = (ef[:, k][None, :] for k in range(4))
    px, py = pf[:, 0:1], pf[:, 1:2]
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    size = (np.abs(bx - ax) + np.abs(by - ay)) * (np.abs(px - ax) + np.abs(py - ay)) + 1e-300
    near = np.abs(cross) <= 1e-9 * size
    for r, e in zip(*np.nonzero(near)):
        i = idx[r]
        if i in on:
            continue
        a, b = edges[e]
        pa, pb, p = pts2[a], pts2[b], pts2[i]
        if _cross(pa, pb, p) == 0 and min(pa[0], pb[0]) <= p[0] <= max(pa[0], pb[0]) \
                and min(pa[1], pb[1]) <= p[1] <= max(pa[1], pb[1]):
            on.add(i)
    return on


def _finish(pts, facets, proj, corners, facet_corners=None):
    """Vertices from certified facets: corners of each facet's projected polygon."""
    cycles = []
    for k, (_, _, inc) in enumerate(facets):
        if facet_corners is not None:
            cs = facet_corners[k]
        elif len(inc) == 3:
            cs = (0, 1, 2)
        else:
            cs = polygon([proj[i] for i in inc])[0]
        cycles.append(tuple(inc[c] for c in cs))
    verts = sorted({v for cyc in cycles for v in cyc})
    return Hull3(facets, verts, _projected_boundary(proj, corners, verts) & set(verts), cycles)


def hull3_certified(pts, pts_f=None):
    """Certified upper hull of explicit ``pts`` in ``Z^3``; ``None`` if not 2D-full."""
    proj = [p[:2] for p in pts]
    corners = hull_2d(proj)
    total = area2(proj, corners)
    if total == 0:
        return None
    if pts_f is None:
        pts_f, scale = _float_coords(pts)
    planes = _qhull_planes(pts_f, pts) if len(pts) >= 16 else None
    if planes is not None:
        sup = _support_many([n for n, _ in planes], pts, pts_f)
        facets, fcorners = [], []
        covered = 0
        ok = True
        for (nrm, off), (m, ties) in zip(planes, sup):
            if m != off:
                ok = False
                break
            cs, a = polygon([proj[i] for i in ties])
            facets.append((nrm, off, ties))
            fcorners.append(cs)
            covered += a
        if ok and covered == total:
            return _finish(pts, facets, proj, corners, fcorners)
        logger.debug("qhull certification failed (%d points); exact fallback", len(pts))
    faces = upper_faces_exact(pts)
    facets = []
    for face, dim in faces.items():
        if dim != 2:
            continue
        inc = tuple(sorted(face))
        a = pts[inc[0]]
        idx, _ = affine_frame([pts[i] for i in inc])
        nrm = hyperplane_normal([pts[inc[t]] for t in idx[:3]])
        if nrm[2] < 0:
            nrm = tuple(-x for x in nrm)
        nrm, off = _canonical_plane(nrm, _dot(nrm, a))
        facets.append((nrm, off, inc))
    return _finish(pts, facets, proj, corners)


def _assemble_sum(xs, ys, facets, facet_corners):
    """Turn pair-indexed facets into a ``Hull3`` over the result vertices."""
    def pt(pr):
        i, j = pr
        return (xs[i][0] + ys[j][0], xs[i][1] + ys[j][1], xs[i][2] + ys[j][2])

    cycles = [[inc[c] for c in cs] for (_, _, inc), cs in zip(facets, facet_corners)]
    pairs = sorted({pr for cyc in cycles for pr in cyc}, key=pt)
    pos = {pr: r for r, pr in enumerate(pairs)}
    out_facets = [(n, o, tuple(sorted(pos[pr] for pr in inc if pr in pos))) for n, o, inc in facets]
    pts2 = [pt(pr)[:2] for pr in pairs]
    boundary = _projected_boundary(pts2, hull_2d(pts2))
    return pairs, Hull3(out_facets, list(range(len(pairs))), boundary,
                        [tuple(pos[pr] for pr in cyc) for cyc in cycles])
