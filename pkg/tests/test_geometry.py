from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from scipy.optimize import linprog

from tropicount import fixtures as fx
from tropicount import geometry as geo
from tropicount.geometry import PointSet
from tropicount.tropical import split_pos_neg

from conftest import inputs, point_sets


def ps(*rows):
    return PointSet([tuple(F(c) for c in r) for r in rows])


def lp_is_vertex(p, others) -> bool:
    """``p`` is an upper-hull vertex iff no convex combination of the others reaches it from above."""
    if not others:
        return True
    pts = np.array(others, dtype=float)
    d = pts.shape[1] - 1
    a_eq = np.vstack([pts[:, :d].T, np.ones(len(pts))])
    b_eq = np.append(np.array(p[:d], dtype=float), 1.0)
    res = linprog(-pts[:, d], A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    return res.status != 0 or -res.fun < float(p[d]) - 1e-9


def test_to_scalar_is_exact():
    assert geo.to_scalar("0.1") == F(1, 10)
    assert geo.to_scalar(0.1) == F(0.1)
    assert geo.to_scalar("3/4") == F(3, 4)
    with pytest.raises(TypeError):
        geo.to_scalar(True)
    with pytest.raises(ValueError):
        geo.to_scalar(float("nan"))


def test_scalar_mul_examples():
    assert geo.scalar_mul(F(1, 2), ps((1, 0, 4), (0, "0.5", 0))) == ps(("0.5", 0, 2), (0, "0.25", 0))
    assert geo.scalar_mul(0, ps((3, 7))) == ps((0, 0))
    s = ps((1, 2), (3, -1))
    assert geo.scalar_mul(1, s) == s
    with pytest.raises(ValueError):
        geo.scalar_mul(-1, s)


def test_minkowski_sum_examples():
    x = ps((0, "0.25", 0))
    y = ps(("1.5", "2.5", "0.5"), (0, 1, "0.5"), ("3.5", "1.5", "0.5"), (2, 0, "0.5"))
    want = ps(("1.5", "2.75", "0.5"), (0, "1.25", "0.5"), ("3.5", "1.75", "0.5"), (2, "0.25", "0.5"))
    assert geo.minkowski_sum(x, y) == want
    assert geo.minkowski_sum(y, geo.origin(3)) == y
    with pytest.raises(ValueError):
        geo.minkowski_sum(ps((1, 2)), ps((1, 2, 3)))


def test_union_examples():
    assert geo.union(ps((1, 0, 4)), ps((0, "0.5", 0))) == ps((1, 0, 4), (0, "0.5", 0))
    x = ps((1, 2), (0, 0))
    assert geo.union(x, x) == x


def test_point_set_canonical():
    s = ps((2, 1), (1, 5), (2, 1))
    assert len(s) == 2
    assert s.points == ((F(1), F(5)), (F(2), F(1)))
    with pytest.raises(ValueError):
        PointSet([(1, 2), (1, 2, 3)])
    with pytest.raises(ValueError):
        PointSet([])


def test_matrix_product_examples():
    p0 = (ps((1, 0, 0)), ps((0, 1, 0)), ps((0, 0, 1)))
    _, neg = split_pos_neg(fx.TWO_LAYER_A1)
    got = geo.minkowski_matrix_product(neg, p0)
    assert got == (ps((0, "0.5", 0)), ps((2, 0, 0)), ps((0, 0, 1)), ps((0, 0, 0)))
    eye = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert geo.minkowski_matrix_product(eye, p0) == p0
    with pytest.raises(ValueError):
        geo.minkowski_matrix_product([[1, -1, 0]], p0)
    with pytest.raises(ValueError):
        geo.minkowski_matrix_product([[1, 1]], p0)


def test_matrix_product_commutes_with_evaluation(rng):
    xs = [PointSet(rng.integers(-5, 6, (4, 3)).tolist()) for _ in range(3)]
    a = rng.integers(0, 4, (2, 3)) / 2
    prod = geo.minkowski_matrix_product(a, xs, reduce_hull=True)
    for z in rng.integers(-10, 11, (100, 2)).tolist():
        vals = [geo.eval_max(x, z) for x in xs]
        for row, p in zip(a, prod):
            assert geo.eval_max(p, z) == sum(geo.to_scalar(c) * v for c, v in zip(row, vals))


def test_five_functions_hull():
    s = PointSet(fx.FIVE_FUNCTIONS)
    h = geo.upper_hull(s)
    assert h.vertices == PointSet(fx.FIVE_FUNCTIONS_HULL)
    on_edge = (F(-1, 2), F(2))
    edges = [h.cells[i] for i in h.cells_of_dim(1)]
    assert any(on_edge in c.points for c in edges)
    assert not any((F(0), F(0)) in c.points for c in h.cells)
    assert geo.upper_hull_vertices(s) == PointSet(fx.FIVE_FUNCTIONS_HULL)
    assert geo.eval_max(s, [0]) == 3


def test_hull_single_point_and_simplex():
    h = geo.upper_hull(ps((1, 2, 3)))
    assert h.dims == (0,)
    simplex = ps((0, 0, 0), (1, 0, 0), (0, 1, 0))
    assert geo.upper_hull_vertices(simplex) == simplex
    with pytest.raises(ValueError):
        geo.upper_hull(PointSet([], dim=3))


def test_hull_adjacency_is_consistent():
    h = geo.upper_hull(PointSet(fx.DCPA_2D["P"] + fx.DCPA_2D["N"]))
    for i in range(len(h)):
        for j in h.boundary(i):
            assert h.dims[j] == h.dims[i] - 1
            assert i in h.coboundary(j)
            assert h.index_sets[j] <= h.index_sets[i]


def test_eval_max_examples():
    assert geo.eval_max(ps((0, 0, 5)), [7, -3]) == 5
    with pytest.raises(ValueError):
        geo.eval_max(ps((0, 0, 5)), [7])


@settings(max_examples=150, deadline=None)
@given(point_sets(3, max_size=10))
def test_vertices_match_lp_support_oracle(s):
    verts = set(geo.upper_hull_vertices(s).points)
    pts = s.points
    for p in pts:
        others = [q for q in pts if q != p]
        assert (p in verts) == lp_is_vertex(p, others)


@settings(max_examples=150, deadline=None)
@given(point_sets(3, max_size=8), point_sets(3, max_size=8))
def test_minkowski_sum_matches_double_loop(x, y):
    brute = {tuple(a + b for a, b in zip(p, q)) for p in x for q in y}
    assert set(geo.minkowski_sum(x, y).points) == brute
    assert geo.minkowski_sum_reduced(x, y) == geo.upper_hull_vertices(PointSet(brute))


@settings(max_examples=150, deadline=None)
@given(point_sets(3, max_size=8), point_sets(3, max_size=8), inputs(2))
def test_union_reduced_matches_max(x, y, z):
    u = geo.union_reduced(x, y)
    assert u == geo.upper_hull_vertices(geo.union(x, y))
    assert geo.eval_max(u, z) == max(geo.eval_max(x, z), geo.eval_max(y, z))


def test_duality_examples():
    c = geo.dual_of([2, -1], 3)
    assert geo.affine_of(c) == ((F(2), F(-1)), F(3))
    h = geo.dual_hyperplane([1, 2, 3])
    assert geo.real_point(h) == (F(1), F(2), F(3))
    # the graph of 2x - y + 3 passes through (1, 2, 3)
    assert geo.graph_contains(c, (1, 2, 3)) and geo.lies_on(c, h)
