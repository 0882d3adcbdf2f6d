import random

import pytest
from sympy import Rational

from conftest import random_tpoly_expr
from portrait_engine.errors import DegenerateInputError, PoleAtPlaceError, PreconditionError
from portrait_engine.exactalg import T, tpoly
from portrait_engine.places import (
    INFINITY,
    Place,
    RatFuncT,
    ResidueElem,
    parse_place,
    reduce_point,
    reduce_scalar,
    valuation,
)


def test_ratfunc_is_normalized():
    x = RatFuncT.of(2 * T * (T + 1), 4 * T)
    assert x.num == tpoly((T + 1) / 2)
    assert x.den == tpoly(1)
    assert RatFuncT.of(0, T).den == tpoly(1)


def test_ratfunc_arithmetic():
    total = RatFuncT.of(1, T) + RatFuncT.of(1, T + 1)
    assert total == RatFuncT.of(2 * T + 1, T * (T + 1))
    assert (total - RatFuncT.of(1, T)) == RatFuncT.of(1, T + 1)
    assert RatFuncT.of(T) * RatFuncT.of(1, T) == RatFuncT.of(1)
    assert str(RatFuncT.from_expr((T ** 2 + 1) / T)) == "(t^2+1)/(t)"
    with pytest.raises(DegenerateInputError):
        RatFuncT.of(1) / RatFuncT.of(0)


def test_valuations():
    x = RatFuncT.of(T ** 2 * (T + 1), T + 2)
    assert valuation(x, Place.finite(T)) == 2
    assert valuation(x, Place.finite(T + 2)) == -1
    assert valuation(x, INFINITY) == -2
    assert valuation(RatFuncT.of(0), INFINITY) is None


def test_place_is_monic():
    assert Place.finite(2 * T + 2).modulus == tpoly(T + 1)
    assert Place.finite(T ** 2 + 1).local_degree == 2
    assert INFINITY.local_degree == 1
    with pytest.raises(DegenerateInputError):
        Place.finite(3)


def test_reduce_scalar():
    assert reduce_scalar(RatFuncT.of(T + 1, T - 1), Place.finite(T)) == ResidueElem.of(-1, tpoly(T))
    assert reduce_scalar(RatFuncT.of(2 * T + 1, T + 5), INFINITY) == ResidueElem.of(2, tpoly(T))
    assert reduce_scalar(RatFuncT.of(1, T + 5), INFINITY).is_zero
    with pytest.raises(PoleAtPlaceError):
        reduce_scalar(RatFuncT.of(1, T), Place.finite(T))


def test_residue_field_of_degree_two():
    q = tpoly(T ** 2 + 1)
    i = ResidueElem.of(T, q)
    assert i ** 2 == ResidueElem.of(-1, q)
    assert i.inverse() == ResidueElem.of(-T, q)
    assert (ResidueElem.of(1, q) / i) * i == ResidueElem.of(1, q)


def test_inverse_modulo_reducible_polynomial():
    with pytest.raises(PreconditionError):
        ResidueElem.of(T - 1, tpoly(T ** 2 - 1)).inverse()


def test_reduce_point():
    assert reduce_point(T, T ** 2, Place.finite(T)).is_infinity
    assert reduce_point(T ** 2 + 1, T, INFINITY).is_infinity
    assert reduce_point(T, T ** 2 + 1, INFINITY).x.is_zero
    assert reduce_point(T + 3, 2, Place.finite(T - 1)).x == ResidueElem.of(2, tpoly(T - 1))
    with pytest.raises(DegenerateInputError):
        reduce_point(0, 0, INFINITY)


def test_parse_place():
    assert parse_place("inf") is INFINITY
    assert parse_place("t^2+1") == Place(tpoly(T ** 2 + 1))
    assert parse_place("2*t - 1") == Place(tpoly(T - Rational(1, 2)))
    assert parse_place("t^2-1", trust=True) == Place(tpoly(T ** 2 - 1))
    with pytest.raises(PreconditionError):
        parse_place("t^2-1")
    with pytest.raises(PreconditionError):
        parse_place("3")


def _random_nonzero(rng, max_degree=3):
    while True:
        expr = random_tpoly_expr(rng, max_degree)
        if expr != 0:
            return expr


def test_valuations_sum_to_zero():
    rng = random.Random(8)
    for _ in range(25):
        x = RatFuncT.of(_random_nonzero(rng), _random_nonzero(rng))
        _, factors = (x.num * x.den).factor_list()
        total = sum(q.degree() * valuation(x, Place.finite(q)) for q, _ in factors)
        assert total + valuation(x, INFINITY) == 0


def test_residue_field_axioms():
    rng = random.Random(9)
    modulus = tpoly(T ** 3 - 2)
    one = ResidueElem.of(1, modulus)
    for _ in range(15):
        a, b, c = (ResidueElem.of(random_tpoly_expr(rng, 2), modulus) for _ in range(3))
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c
        assert (a + (-a)).is_zero
        if not a.is_zero:
            assert a * a.inverse() == one


@pytest.mark.parametrize("place", [Place.finite(T), Place.finite(T - 1), Place.finite(T ** 2 + 1), Place.finite(T ** 3 - 2), INFINITY])
def test_reduction_ignores_scaling(place):
    rng = random.Random(10)
    for i in range(15):
        x, y = random_tpoly_expr(rng, 3), _random_nonzero(rng)
        scale = tpoly(_random_nonzero(rng, 2))
        if i % 3 == 0 and not place.is_infinite:
            scale = scale * place.modulus
        assert reduce_point(tpoly(x) * scale, tpoly(y) * scale, place) == reduce_point(x, y, place)
