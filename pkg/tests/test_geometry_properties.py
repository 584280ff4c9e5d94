"""Randomised invariants of the dual-space kernel, 1000 trials each.

Runnable on its own: ``pytest tests/test_geometry_properties.py``.
"""
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from tropicount import geometry as geo
from tropicount.geometry import PointSet

from conftest import inputs, nonneg, point_sets, points, rationals

TRIALS = settings(max_examples=1000, deadline=None)


@TRIALS
@given(st.lists(rationals, min_size=1, max_size=3), rationals)
def test_duality_involution(slope, intercept):
    assert geo.affine_of(geo.dual_of(slope, intercept)) == (tuple(slope), intercept)


@TRIALS
@given(st.integers(1, 3).flatmap(lambda d: st.tuples(points(d + 1), points(d + 1))))
def test_incidence_duality(pair):
    c, z = pair
    h = geo.dual_hyperplane(z)
    assert geo.lies_on(c, h) == geo.graph_contains(c, geo.real_point(h))


@TRIALS
@given(st.integers(1, 3).flatmap(lambda d: st.tuples(points(d + 1), points(d + 1))))
def test_above_below_flip(pair):
    c, z = pair
    h = geo.dual_hyperplane(z)
    r = geo.real_point(h)
    height = sum((a * x for a, x in zip(c[:-1], r[:-1])), Fraction(0)) + c[-1]
    assert geo.lies_above(c, h) == (height > r[-1])
    assert geo.lies_above(c, h) == geo.graph_below(c, r)


@TRIALS
@given(point_sets(3, max_size=7), st.lists(nonneg, min_size=7, max_size=7), st.lists(inputs(2), min_size=20,
                                                                                     max_size=20))
def test_max_hull_domination(s, weights, xs):
    # a convex combination of S pushed downwards lies below U(S)
    pts = s.points
    w = weights[:len(pts)]
    if not any(w):
        w = [Fraction(1)] + [Fraction(0)] * (len(pts) - 1)
    tot = sum(w)
    below = tuple(sum((wi * p[k] for wi, p in zip(w, pts)), Fraction(0)) / tot for k in range(3))
    below = below[:2] + (below[2] - Fraction(1, 7),)
    for x in xs:
        assert geo.eval_max(PointSet([below]), x) <= geo.eval_max(s, x)


@TRIALS
@given(point_sets(3, max_size=9), st.lists(inputs(2), min_size=10, max_size=10))
def test_hull_reduction_soundness(s, xs):
    r = geo.upper_hull_vertices(s)
    assert set(r.points) <= set(s.points)
    for x in xs:
        assert geo.eval_max(r, x) == geo.eval_max(s, x)


@TRIALS
@given(point_sets(2, max_size=9), st.lists(inputs(1), min_size=10, max_size=10))
def test_hull_reduction_soundness_1d(s, xs):
    r = geo.upper_hull_vertices(s)
    for x in xs:
        assert geo.eval_max(r, x) == geo.eval_max(s, x)


U = geo.upper_hull_vertices


def mmp(a, xs):
    return tuple(U(p) for p in geo.minkowski_matrix_product(a, xs))


def vec(n):
    return st.lists(point_sets(3, max_size=4), min_size=n, max_size=n)


def mat(r, c):
    return st.lists(st.lists(nonneg, min_size=c, max_size=c), min_size=r, max_size=r)


@TRIALS
@given(mat(2, 2), mat(2, 2), vec(2))
def test_matrix_product_distributes_over_matrix_sum(a, b, xs):
    ab = [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]
    left = mmp(ab, xs)
    right = tuple(U(geo.minkowski_sum(p, q)) for p, q in zip(mmp(a, xs), mmp(b, xs)))
    assert left == right


@TRIALS
@given(mat(2, 2), vec(2), vec(2))
def test_matrix_product_distributes_over_minkowski_sum(a, y1, y2):
    ys = [geo.minkowski_sum(p, q) for p, q in zip(y1, y2)]
    left = mmp(a, ys)
    right = tuple(U(geo.minkowski_sum(p, q)) for p, q in zip(mmp(a, y1), mmp(a, y2)))
    assert left == right


@TRIALS
@given(mat(2, 2), mat(2, 2), vec(2))
def test_matrix_product_associates(a, b, xs):
    prod = [[sum((a[i][k] * b[k][j] for k in range(2)), Fraction(0)) for j in range(2)] for i in range(2)]
    assert mmp(prod, xs) == mmp(a, mmp(b, xs))


@TRIALS
@given(point_sets(3, max_size=5), point_sets(3, max_size=5), point_sets(3, max_size=5))
def test_minkowski_sum_distributes_over_union(x, y1, y2):
    left = U(geo.minkowski_sum(x, geo.union(y1, y2)))
    right = U(geo.union(geo.minkowski_sum(x, y1), geo.minkowski_sum(x, y2)))
    assert left == right
