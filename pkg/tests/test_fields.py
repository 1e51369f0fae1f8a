import numpy as np
import pytest

from homsphere.fields import (ConformalFactor, bump, bump_factor, constant, constant_factor,
                              coord_square_factor, coordinate, coordinate_product, parse_factor,
                              parse_field)
from homsphere.group import IDENTITY, UnitQuaternion, haar_samples, qmul

P = haar_samples(np.random.default_rng(0), 50)


def test_constant_shape():
    assert constant(2.0)(P).shape == (50,)
    assert constant(2.0)(IDENTITY) == 2.0


def test_coordinate_and_product():
    np.testing.assert_array_equal(coordinate(2)(P), P[:, 2])
    np.testing.assert_array_equal(coordinate_product(0, 3)(P), P[:, 0] * P[:, 3])
    assert coordinate(0).name == "re_z"


def test_bump_peaks_at_center():
    b = bump(k=2.0)
    assert b(IDENTITY) == 1.0
    assert b(UnitQuaternion(-1.0, 0.0)) == pytest.approx(np.exp(-8.0))
    assert np.all((b(P) > 0) & (b(P) <= 1))


def test_compositions():
    a, c = haar_samples(np.random.default_rng(1), 2)
    f = bump(k=1.5)
    np.testing.assert_allclose(f.compose_left(a)(P), f(qmul(a, P)))
    np.testing.assert_allclose(f.compose_right(c)(P), f(qmul(P, c)))


def test_factor_positivity_enforced():
    bad = ConformalFactor(lambda p: p[..., 0], "x0")
    with pytest.raises(ValueError):
        bad(P)
    with pytest.raises(ValueError):
        constant_factor(0.0)
    with pytest.raises(ValueError):
        coord_square_factor(-1.0)
    with pytest.raises(ValueError):
        bump_factor(-2.0)
    with pytest.raises(ValueError):
        constant_factor(1.0).scaled(-1.0)


def test_scaled_factor():
    phi = coord_square_factor(0.5)
    np.testing.assert_allclose(phi.scaled(3.0)(P), 3.0 * phi(P))


@pytest.mark.parametrize("text, probe", [
    ("constant:2", 2.0),
    ("coord:0", float(P[0, 0])),
    ("product:1,2", float(P[0, 1] * P[0, 2])),
    ("bump", float(np.exp(-np.sum((P[0] - [1, 0, 0, 0]) ** 2)))),
    ("bump:3", float(np.exp(-3 * np.sum((P[0] - [1, 0, 0, 0]) ** 2)))),
])
def test_parse_field(text, probe):
    assert parse_field(text)(P[:1])[0] == pytest.approx(probe)


@pytest.mark.parametrize("text", ["", "coord", "product:1", "bump:x", "wave:1"])
def test_parse_field_errors(text):
    with pytest.raises(ValueError):
        parse_field(text)


def test_parse_factor():
    np.testing.assert_allclose(parse_factor("constant:3.5")(P), 3.5)
    np.testing.assert_allclose(parse_factor("coord-square:0.5")(P), 1 + 0.5 * P[:, 0] ** 2)
    np.testing.assert_allclose(parse_factor("coord-square:0.2,3")(P), 1 + 0.2 * P[:, 3] ** 2)
    assert parse_factor("bump:1,2")(P).min() > 1.0
    for bad in ("constant:-1", "coord-square:-3", "nope"):
        with pytest.raises(ValueError):
            parse_factor(bad)
