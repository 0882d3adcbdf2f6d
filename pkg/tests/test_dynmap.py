import random

import pytest
from sympy import Rational

from conftest import random_rational, random_tpoly_expr

from portrait_engine.dynmap import (
    IterationContext,
    PlaceSet,
    Portrait,
    ProjPointK,
    apply_map,
    bad_reduction_divisor,
    global_portrait,
    has_good_reduction,
    iterate_forms,
    iterate_point,
    map_from_expr,
    new_map,
    parse_place_set,
    portrait_mod_place,
    reduce_map,
    same_reduction,
)
from portrait_engine.errors import (
    BadReductionError,
    ConstantMapError,
    DegenerateInputError,
    PreconditionError,
    ResourceLimitError,
)
from portrait_engine.exactalg import T, Z, kpoly, tpoly
from portrait_engine.heights import weil_height
from portrait_engine.places import INFINITY, Place, reduce_point


def test_quadratic_coefficients(quadratic):
    assert quadratic.degree == 2
    assert quadratic.F == (tpoly(T), tpoly(0), tpoly(1))
    assert quadratic.G == (tpoly(1), tpoly(0), tpoly(0))
    assert quadratic.resultant == tpoly(1)
    assert quadratic.is_polynomial


def test_common_factors_cancel():
    phi = map_from_expr((Z ** 2 - T ** 2) / (Z - T))
    assert phi.degree == 1
    assert phi.F == (tpoly(T), tpoly(1))
    assert phi.G == (tpoly(1), tpoly(0))


def test_content_is_removed():
    phi = new_map((T + 1) * Z ** 2, (T + 1) * 2)
    assert phi.F == (tpoly(0), tpoly(0), tpoly(Rational(1, 2)))
    assert phi.G == (tpoly(1), tpoly(0), tpoly(0))


def test_constant_maps_are_rejected():
    with pytest.raises(ConstantMapError):
        map_from_expr(T)
    with pytest.raises(ConstantMapError):
        map_from_expr((Z + 1) / (Z + 1))
    with pytest.raises(DegenerateInputError):
        new_map(Z, 0)


def test_points_are_normalized():
    point = ProjPointK.of(2 * T, 4 * T ** 2)
    assert point == ProjPointK.of(Rational(1, 2), T)
    assert ProjPointK.of(T, 0) == ProjPointK.infinity()
    assert ProjPointK.from_expr(None).is_infinity
    assert str(ProjPointK.from_expr((T ** 2 + 1) / T)) == "(t^2+1)/(t)"
    assert str(ProjPointK.of(1, T ** 2)) == "(1)/(t^2)"
    with pytest.raises(DegenerateInputError):
        ProjPointK.of(0, 0)


def test_iteration(quadratic):
    zero = ProjPointK.of(0)
    assert iterate_point(quadratic, zero, 2) == ProjPointK.of(T ** 2 + T)
    assert apply_map(quadratic, ProjPointK.infinity()).is_infinity
    Fn, Gn = iterate_forms(quadratic, 2)
    assert Fn == kpoly((Z ** 2 + T) ** 2 + T)
    assert Gn == kpoly(1)


def test_rational_iterates_keep_coprime_forms():
    phi = map_from_expr(Z ** 2 / (Z - T))
    point = iterate_point(phi, ProjPointK.of(1), 3)
    assert point.x.gcd(point.y).degree() == 0


def test_degree_cap():
    ctx = IterationContext(16)
    assert ctx.max_steps(2) == 4
    ctx.check(2, 4)
    with pytest.raises(ResourceLimitError) as excinfo:
        ctx.check(2, 5)
    assert excinfo.value.requested == 32
    assert excinfo.value.cap == 16


def test_global_portrait():
    phi = map_from_expr(Z ** 2 - 1)
    assert global_portrait(phi, ProjPointK.of(0), 10) == Portrait(0, 2)
    assert global_portrait(phi, ProjPointK.of(1), 10) == Portrait(1, 2)
    assert global_portrait(map_from_expr(Z ** 2 + T), ProjPointK.of(0), 6) is None


def test_portrait_validation():
    with pytest.raises(PreconditionError):
        Portrait(0, 0)
    with pytest.raises(PreconditionError):
        Portrait(-1, 1)


def test_good_and_bad_reduction(quadratic):
    assert has_good_reduction(quadratic, Place.finite(T))
    assert not has_good_reduction(quadratic, INFINITY)
    phi = map_from_expr(Z ** 2 / (Z - T))
    assert not has_good_reduction(phi, Place.finite(T))
    bad = bad_reduction_divisor(phi)
    assert bad.finite_part == tpoly(T)
    assert bad.include_infinity
    assert has_good_reduction(map_from_expr(Z ** 2 + 1), INFINITY)


def test_reduce_map_refuses_bad_places():
    with pytest.raises(BadReductionError):
        reduce_map(map_from_expr(Z ** 2 / (Z - T)), Place.finite(T))


def test_portrait_mod_place(quadratic):
    zero = ProjPointK.of(0)
    assert portrait_mod_place(quadratic, zero, Place.finite(T + 1)) == Portrait(0, 2)
    assert portrait_mod_place(quadratic, zero, Place.finite(T)) == Portrait(0, 1)
    # residue field Q(i): 0 -> i -> i-1 -> -i -> i-1
    assert portrait_mod_place(quadratic, zero, Place.finite(T ** 2 + 1)) == Portrait(2, 2)
    # 0 -> 2 -> 6 -> 38 -> ... never repeats
    assert portrait_mod_place(quadratic, zero, Place.finite(T - 2), bound=5) is None


def test_portrait_mod_infinity():
    phi = map_from_expr(Z ** 2 - 2 + 1 / T)
    assert has_good_reduction(phi, INFINITY)
    assert portrait_mod_place(phi, ProjPointK.of(0), INFINITY) == Portrait(2, 1)


def test_same_reduction():
    assert same_reduction(ProjPointK.of(T), ProjPointK.of(0), Place.finite(T))
    assert not same_reduction(ProjPointK.of(T), ProjPointK.of(1), Place.finite(T))


def test_place_sets():
    places = parse_place_set("t;t^2+1;inf")
    assert places.include_infinity
    assert places.contains(Place.finite(T))
    assert places.contains(INFINITY)
    assert not places.contains(Place.finite(T - 1))
    merged = PlaceSet.of([T - 1]).union(PlaceSet.of([T]))
    assert merged.finite_part == tpoly(T * (T - 1))
    assert not merged.include_infinity


MAPS = [Z ** 2 + T, Z ** 2 / (Z - T), Z ** 3 + T * Z + 1, Z ** 2 - 2 + 1 / T]
FIXED_PLACES = [Place.finite(T ** 2 + 1), Place.finite(T ** 3 - 2), INFINITY]


def _random_point(rng) -> ProjPointK:
    while True:
        x, y = random_tpoly_expr(rng, 2, 5), random_tpoly_expr(rng, 2, 5)
        if x != 0 or y != 0:
            return ProjPointK.of(x, y)


@pytest.mark.parametrize("expr", MAPS)
def test_iteration_composes(expr):
    rng = random.Random(7)
    phi = map_from_expr(expr)
    for _ in range(6):
        alpha = _random_point(rng)
        for a in range(3):
            for b in range(3 - a):
                assert iterate_point(phi, alpha, a + b) == iterate_point(phi, iterate_point(phi, alpha, b), a)


@pytest.mark.parametrize("expr", MAPS)
def test_reduction_commutes_with_the_map(expr):
    rng = random.Random(11)
    phi = map_from_expr(expr)
    places = [Place.finite(T - random_rational(rng, 6)) for _ in range(6)] + FIXED_PLACES
    places = [p for p in places if has_good_reduction(phi, p)]
    assert places
    for place in places:
        reduced = reduce_map(phi, place)
        for _ in range(5):
            alpha = _random_point(rng)
            image = apply_map(phi, alpha)
            assert reduce_point(image.x, image.y, place) == reduced.apply(reduce_point(alpha.x, alpha.y, place))


@pytest.mark.parametrize(
    "expr, alpha, portrait",
    [
        ((T ** 2 - Z ** 2) / T, 0, Portrait(0, 2)),
        (Z ** 2 + T * Z - T, 0, Portrait(1, 1)),
        ((Z - T) ** 2 + T, T - 1, Portrait(1, 1)),
        (1 / Z ** 2, -1, Portrait(1, 1)),
        (Z ** 2 - 1, 1, Portrait(1, 2)),
        (T / Z ** 2, 0, Portrait(0, 2)),
    ],
)
def test_reduction_can_only_shrink_a_portrait(expr, alpha, portrait):
    phi = map_from_expr(expr)
    point = ProjPointK.from_expr(alpha)
    assert global_portrait(phi, point, 10) == portrait
    places = [Place.finite(T - c) for c in range(-4, 5)] + FIXED_PLACES
    checked = 0
    for place in places:
        if not has_good_reduction(phi, place):
            continue
        reduced = portrait_mod_place(phi, point, place, 10)
        assert reduced.m <= portrait.m
        assert portrait.n % reduced.n == 0
        checked += 1
    assert checked >= 8


def test_points_agree_at_few_places():
    rng = random.Random(5)
    for _ in range(25):
        a, b = _random_point(rng), _random_point(rng)
        if a == b:
            continue
        wronskian = a.x * b.y - b.x * a.y
        assert not wronskian.is_zero
        _, factors = wronskian.factor_list()
        count = 0
        for q, _ in factors:
            assert same_reduction(a, b, Place.finite(q))
            count += q.degree()
        count += same_reduction(a, b, INFINITY)
        assert count <= 2 * (weil_height(a) + weil_height(b))
        c = next(c for c in range(20) if wronskian.eval(c) != 0)
        assert not same_reduction(a, b, Place.finite(T - c))
