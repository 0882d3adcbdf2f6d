import random

import pytest
from sympy import Rational

from conftest import random_tpoly_expr
from portrait_engine.dynmap import IterationContext, ProjPointK, apply_map, iterate_point, map_from_expr
from portrait_engine.errors import PreconditionError, ResourceLimitError
from portrait_engine.exactalg import T, Z
from portrait_engine.heights import (
    canonical_height,
    height_comparison_bound,
    iterations_for,
    weil_height,
)
from portrait_engine.places import RatFuncT


def test_weil_height():
    assert weil_height(ProjPointK.from_expr((T ** 2 + 1) / T)) == 2
    assert weil_height(ProjPointK.of(5)) == 0
    assert weil_height(ProjPointK.infinity()) == 0
    assert weil_height(RatFuncT.of(T ** 3, T + 1)) == 3


def test_height_comparison_bound(quadratic):
    assert height_comparison_bound(quadratic) == 2
    assert height_comparison_bound(map_from_expr(Z ** 2 / (Z - T))) == 4
    assert height_comparison_bound(map_from_expr(Z ** 2 + 1)) == 0


def test_heights_along_the_critical_orbit(quadratic):
    ctx = IterationContext()
    for n in range(1, 11):
        assert weil_height(iterate_point(quadratic, ProjPointK.of(0), n, ctx)) == 2 ** (n - 1)


def test_canonical_height_of_the_critical_point(quadratic):
    estimate = canonical_height(quadratic, ProjPointK.of(0), Rational(1, 1024))
    assert estimate.contains(Rational(1, 2))
    assert estimate.radius <= Rational(1, 1024)
    assert estimate.iterations_used == iterations_for(2, 2, Rational(1, 1024)) == 12
    assert estimate.to_dict()["center"] == "1/2"


def test_canonical_height_of_constant_map_is_exact():
    estimate = canonical_height(map_from_expr(Z ** 2 + 1), ProjPointK.of(T), Rational(1, 8))
    assert estimate.iterations_used == 0
    assert estimate.center == 1
    assert estimate.radius == 0


def test_canonical_height_preconditions(quadratic):
    with pytest.raises(PreconditionError):
        canonical_height(map_from_expr(Z + T), ProjPointK.of(0), Rational(1, 2))
    with pytest.raises(PreconditionError):
        canonical_height(quadratic, ProjPointK.of(0), 0)
    with pytest.raises(ResourceLimitError):
        canonical_height(quadratic, ProjPointK.of(0), Rational(1, 1024), IterationContext(64))


@pytest.mark.slow
@pytest.mark.parametrize("expr", [Z ** 2 + T, Z ** 2 / (Z - T), Z ** 3 + T * Z + 1])
def test_height_comparison_holds_on_random_points(expr):
    phi = map_from_expr(expr)
    bound = height_comparison_bound(phi)
    rng = random.Random(1234)
    checked = 0
    while checked < 200:
        x = random_tpoly_expr(rng, 15)
        y = random_tpoly_expr(rng, 15)
        if x == 0 and y == 0:
            continue
        point = ProjPointK.of(x, y)
        if weil_height(point) > 15:
            continue
        image = apply_map(phi, point)
        assert abs(weil_height(image) - phi.degree * weil_height(point)) <= bound
        checked += 1


@pytest.mark.parametrize(
    "expr, epsilon",
    [(Z ** 2 + T, Rational(1, 64)), (Z ** 2 / (Z - T), Rational(1, 32)), (Z ** 3 + T * Z + 1, Rational(1, 27))],
)
@pytest.mark.parametrize("alpha", [0, 1, T, 1 / T])
def test_halving_epsilon_gives_an_overlapping_interval(expr, epsilon, alpha):
    phi = map_from_expr(expr)
    point = ProjPointK.from_expr(alpha)
    coarse = canonical_height(phi, point, epsilon)
    fine = canonical_height(phi, point, epsilon / 2)
    assert fine.iterations_used >= coarse.iterations_used
    assert fine.radius <= coarse.radius
    assert abs(fine.center - coarse.center) <= fine.radius + coarse.radius


@pytest.mark.parametrize(
    "expr, alpha",
    [((T ** 2 - Z ** 2) / T, 0), (Z ** 2 + T * Z - T, 0), ((Z - T) ** 2 + T, T - 1), (1 / Z ** 2, -1)],
)
def test_preperiodic_points_have_height_zero(expr, alpha):
    estimate = canonical_height(map_from_expr(expr), ProjPointK.from_expr(alpha), Rational(1, 64))
    assert estimate.contains(0)
