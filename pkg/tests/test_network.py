from fractions import Fraction as F

import numpy as np
import pytest

from tropicount import fixtures as fx
from tropicount.network import Layer, NetworkSpec, ParseError, dumps_network, dumps_points, format_scalar, \
    layer_outputs, loads_network, loads_points, net_eval, random_network


def test_format_scalar():
    assert format_scalar(F(1, 4)) == "0.25"
    assert format_scalar(F(-3, 40)) == "-0.075"
    assert format_scalar(F(7)) == "7"
    assert format_scalar(F(1, 3)) == "1/3"
    assert format_scalar(F(0.1)) == "0.1000000000000000055511151231257827021181583404541015625"


def test_network_round_trip(rng):
    for net in (fx.two_layer_network(), random_network([2, 5, 3, 1], rng), random_network([1, 2, 1], rng, denom=7)):
        assert loads_network(dumps_network(net)) == net


def test_network_parse_errors():
    for text in ("[1, 2]", "{", '{"input_dim": 2}',
                 '{"input_dim": 1, "layers": [{"rows": 1, "cols": 1, "weights": ["1", "2"], "bias": ["0"]}]}',
                 '{"input_dim": 1, "layers": [{"rows": 1, "cols": 1, "weights": [0.5], "bias": ["0"]}]}',
                 '{"input_dim": 1, "layers": [{"rows": 1, "cols": 1, "weights": ["x"], "bias": ["0"]}]}'):
        with pytest.raises(ParseError):
            loads_network(text)


def test_network_validation():
    with pytest.raises(ValueError):
        NetworkSpec(2, (Layer(((F(1),),), (F(0),)),))
    with pytest.raises(ValueError):
        NetworkSpec(1, (Layer(((F(1),),), (F(0),), "tanh"),))


def test_points_round_trip():
    text = dumps_points(fx.DCPA_2D)
    assert loads_points(text) == {k: list(v) for k, v in fx.DCPA_2D.items()}
    assert loads_points("P\n(1/3, 2)  # comment\n\nN\n0 0\n")["P"] == [(F(1, 3), F(2))]


@pytest.mark.parametrize("text", ["(1, 2)\nP\n(1, 2)\nN\n(0, 0)\n", "P\n(1, 2)\n", "P\n(1, 2)\nN\n(0, 0, 0)\n",
                                  "P\n(1, x)\nN\n(0, 0)\n", "P\n()\nN\n(0,0)\n"])
def test_points_parse_errors(text):
    with pytest.raises(ParseError):
        loads_points(text)


def test_zero_weight_net_is_its_bias_chain():
    net = NetworkSpec.from_arrays([np.zeros((3, 2)), np.array([[1.0, -2.0, 0.5]])], [[1, -1, 2], [F(1, 3)]])
    # hidden outputs relu(1, -1, 2) = (1, 0, 2)
    assert net_eval(net, (5, -7)) == 1 + 1 + F(1, 3)
    assert layer_outputs(net, (5, -7))[1] == (1, 0, 2)
    with pytest.raises(ValueError):
        net_eval(net, (1,))


def test_random_network_generator_is_seeded():
    a = random_network([2, 3, 1], np.random.default_rng(7))
    b = random_network([2, 3, 1], np.random.default_rng(7))
    assert a == b and a.widths == (2, 3, 1)
    c = random_network([2, 3, 1], np.random.default_rng(7), denom=5)
    assert all(v.denominator in (1, 5) for l in c.layers for r in l.weights for v in r)
