from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tropicount import fixtures as fx
from tropicount import geometry as geo
from tropicount.geometry import PointSet
from tropicount.network import Layer, NetworkSpec, layer_outputs, net_eval, random_network
from tropicount.tropical import DcpaFunction, dcpa_eval, dcpa_extract, dcpa_init, dcpa_layers, \
    dcpa_linear_layer, dcpa_relu_layer, split_pos_neg

from conftest import rationals


def rational_points(rng, n, d, denom=16):
    return [tuple(F(int(v), denom) for v in row) for row in rng.integers(-4 * denom, 4 * denom + 1, (n, d))]


def test_split_pos_neg_two_layer():
    pos, neg = split_pos_neg(fx.TWO_LAYER_A1)
    assert pos == tuple(tuple(F(v) for v in r) for r in [(1, 0, 4), (0, 1, 0), (3, 3, 0), (0, 0, 1)])
    assert neg == tuple(tuple(F(v) for v in r) for r in [(0, "0.5", 0), (2, 0, 0), (0, 0, 1), (0, 0, 0)])
    pos, neg = split_pos_neg([[1, 2], [0, 3]])
    assert pos == ((1, 2), (0, 3)) and not any(v for r in neg for v in r)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(rationals, min_size=3, max_size=3), min_size=1, max_size=4))
def test_split_pos_neg_reconstructs(a):
    pos, neg = split_pos_neg(a)
    for r, p, n in zip(a, pos, neg):
        assert all(x == u - v and u >= 0 and v >= 0 for x, u, v in zip(r, p, n))


def test_dcpa_init():
    s = dcpa_init(2)
    assert s.P == (PointSet([(1, 0, 0)]), PointSet([(0, 1, 0)]), PointSet([(0, 0, 1)]))
    assert s.N == (geo.origin(3),) * 3
    assert dcpa_init(1).P == (PointSet([(1, 0)]), PointSet([(0, 1)]))
    assert s.eval((F(3, 2), -7)) == (F(3, 2), F(-7), F(1))
    with pytest.raises(ValueError):
        dcpa_init(0)


def test_two_layer_layers_against_corrected_sets():
    states = dcpa_layers(fx.two_layer_network())
    want = fx.layer_sets(fx.TWO_LAYER_CORRECTED)
    got = {"N1": states[1].N, "P1": states[1].P, "N2": states[2].N, "P2": states[2].P}
    for key in want:
        assert all(geo.same_function(a, b) for a, b in zip(got[key], want[key])), key


def test_two_layer_reference_sets_differ_only_where_the_typo_reaches():
    states = dcpa_layers(fx.two_layer_network())
    reference = fx.layer_sets(fx.TWO_LAYER_REFERENCE)
    got = {"N1": states[1].N, "P1": states[1].P, "N2": states[2].N, "P2": states[2].P}
    agree = {k: [geo.same_function(a, b) for a, b in zip(got[k], reference[k])] for k in reference}
    assert agree == {"N1": [True] * 4, "P1": [True, True, False, True], "N2": [False, True], "P2": [False, True]}


def test_two_layer_value_at_origin():
    net = fx.two_layer_network()
    assert net_eval(net, (0, 0)) == 4
    assert dcpa_eval(dcpa_extract(net), (0, 0)) == 4


def test_zero_matrix_gives_zero_state():
    s = dcpa_relu_layer([[0, 0, 0], [0, 0, 1]], dcpa_init(2))
    assert s.P[0] == geo.origin(3) and s.N[0] == geo.origin(3)


def test_identity_linear_layer():
    s = dcpa_init(2)
    eye = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    t = dcpa_linear_layer(eye, s)
    assert all(geo.same_function(a, b) for a, b in zip(t.P + t.N, s.P + s.N))
    with pytest.raises(ValueError):
        dcpa_linear_layer([[1, 0]], s)


def test_linear_last_layer_matches_forward_pass(rng):
    # two-layer network with the output ReLU switched off
    base = fx.two_layer_network()
    last = base.layers[1]
    net = NetworkSpec(2, (base.layers[0], Layer(last.weights, last.bias, "linear")))
    f = dcpa_extract(net)
    for x in rational_points(rng, 1000, 2):
        assert dcpa_eval(f, x) == net_eval(net, x)


def test_single_linear_neuron():
    net = NetworkSpec.from_arrays([[[F(3), F(1, 2)]]], [[F(2)]])
    f = dcpa_extract(net)
    assert f.P == PointSet([(3, F(1, 2), 2)]) and f.N == geo.origin(3)
    # a negative bias moves to the subtracted side
    f = dcpa_extract(NetworkSpec.from_arrays([[[F(3), F(1, 2)]]], [[F(-2)]]))
    assert f.P == PointSet([(3, F(1, 2), 0)]) and f.N == PointSet([(0, 0, 2)])


def test_extract_rejects_vector_output(rng):
    with pytest.raises(ValueError):
        dcpa_extract(random_network([2, 3, 2], rng))


@pytest.mark.parametrize("seed", range(5))
def test_every_layer_matches_forward_pass(seed):
    rng = np.random.default_rng(seed)
    net = random_network([2, 4, 4, 1], rng, denom=8)
    states = dcpa_layers(net)
    for x in rational_points(rng, 200, 2):
        outs = layer_outputs(net, x)
        for s, h in zip(states, outs):
            assert s.eval(x)[:-1] == h
            if s is not states[0] and s is not states[-1]:
                assert all(v >= 0 for v in s.eval(x))


@pytest.mark.parametrize("seed", range(5))
def test_extract_matches_forward_pass_random_nets(seed):
    rng = np.random.default_rng(100 + seed)
    net = random_network([2, 4, 1], rng)
    f = dcpa_extract(net)
    for x in rational_points(rng, 1000, 2):
        assert dcpa_eval(f, x) == net_eval(net, x)


def test_one_dimensional_input(rng):
    net = random_network([1, 5, 3, 1], rng, denom=4)
    f = dcpa_extract(net)
    for x in rational_points(rng, 300, 1):
        assert dcpa_eval(f, x) == net_eval(net, x)


def unreduced_layers(net):
    """The same recursion with plain sums and unions, never reducing."""
    s = dcpa_init(net.input_dim)
    out = [s]
    for layer in net.layers:
        pos, neg = split_pos_neg(layer.augmented())
        mm = geo.minkowski_matrix_product
        P = [geo.minkowski_sum(a, b) for a, b in zip(mm(pos, s.P), mm(neg, s.N))]
        N = [geo.minkowski_sum(a, b) for a, b in zip(mm(neg, s.P), mm(pos, s.N))]
        if layer.activation == "relu":
            P = [geo.union(a, b) for a, b in zip(P, N)]
        s = type(s)(tuple(P), tuple(N))
        out.append(s)
    return out


def test_reduction_never_changes_channels(rng):
    net = random_network([2, 4, 3, 1], rng, denom=4)
    xs = rational_points(rng, 1000, 2)
    for red, raw in zip(dcpa_layers(net), unreduced_layers(net)):
        for r, p in zip(red.P + red.N, raw.P + raw.N):
            assert set(r.points) <= set(p.points)
            assert geo.eval_max_many(r, xs) == geo.eval_max_many(p, xs)


@pytest.mark.parametrize("seed", range(3))
def test_permutation_equivariance(seed):
    rng = np.random.default_rng(seed)
    net = random_network([2, 4, 3, 1], rng, denom=8)
    perm = rng.permutation(4)
    l0, l1, l2 = net.layers
    w0 = tuple(l0.weights[i] for i in perm)
    b0 = tuple(l0.bias[i] for i in perm)
    w1 = tuple(tuple(r[i] for i in perm) for r in l1.weights)
    permuted = NetworkSpec(2, (Layer(w0, b0), Layer(w1, l1.bias), l2))
    f, g = dcpa_extract(net), dcpa_extract(permuted)
    assert f.P == g.P and f.N == g.N


def test_dcpa_function_validation():
    with pytest.raises(ValueError):
        DcpaFunction(PointSet([(1, 2)]), PointSet([(1, 2, 3)]))
