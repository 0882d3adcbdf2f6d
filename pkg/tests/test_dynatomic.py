from functools import reduce

import pytest
import sympy

from portrait_engine.dynatomic import (
    PowerMapType,
    detect_power_map_conjugacy,
    exact_period_divisor,
    has_nonconstant_portrait_point,
    is_isotrivial_normal_form,
    normal_form_coefficients,
    period_polynomial,
    portrait_divisor,
    totally_ramified_points,
    w_set,
    x_set,
    y_set,
)
from portrait_engine.dynmap import IterationContext, ProjPointK, iterate_point, map_from_expr
from portrait_engine.errors import NotNormalFormError
from portrait_engine.exactalg import T, Z, k_normalize, k_squarefree_part, kpoly


def test_fixed_point_divisor(quadratic):
    epd = exact_period_divisor(quadratic, 1)
    assert epd.divisor == kpoly(Z ** 2 - Z + T)
    assert epd.includes_infinity


def test_period_two_divisor(quadratic):
    epd = exact_period_divisor(quadratic, 2)
    assert epd.divisor == kpoly(Z ** 2 + Z + T + 1)
    assert not epd.includes_infinity
    assert epd.degree == 2


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_exact_period_divisors_multiply_to_the_period_polynomial(quadratic, n):
    ctx = IterationContext()
    parts = [exact_period_divisor(quadratic, k, ctx) for k in sympy.divisors(n)]
    product = reduce(lambda a, b: a * b, (p.divisor for p in parts), kpoly(1))
    assert k_normalize(product) == k_squarefree_part(period_polynomial(quadratic, n, ctx))
    fixes_infinity = iterate_point(quadratic, ProjPointK.infinity(), n, ctx).is_infinity
    assert any(p.includes_infinity for p in parts) == fixes_infinity


def test_totally_ramified_points(quadratic, inverse_square):
    profile = totally_ramified_points(quadratic)
    assert profile.totally_ramified_finite == (kpoly(Z),)
    assert profile.totally_ramified_infinity
    assert profile.count == 2
    shifted = totally_ramified_points(map_from_expr((Z - T) ** 3 + 1))
    assert shifted.totally_ramified_finite == (kpoly(Z - T),)
    assert totally_ramified_points(inverse_square).count == 2


def test_cubic_with_only_infinity_totally_ramified():
    profile = totally_ramified_points(map_from_expr(Z ** 3 + T * Z))
    assert profile.totally_ramified_finite == ()
    assert profile.totally_ramified_infinity
    assert profile.count == 1


def test_x_set(quadratic, inverse_square):
    assert x_set(inverse_square, 4) == {2}
    assert x_set(quadratic, 4) == set()


def test_power_map_conjugacy(quadratic, inverse_square):
    assert detect_power_map_conjugacy(inverse_square) == PowerMapType.INVERSE_POWER
    assert detect_power_map_conjugacy(map_from_expr(Z ** 2)) == PowerMapType.POWER
    assert detect_power_map_conjugacy(map_from_expr(Z ** 3)) == PowerMapType.POWER
    assert detect_power_map_conjugacy(quadratic) == PowerMapType.NEITHER
    assert PowerMapType.INVERSE_POWER.value == "z^-d-type"


def test_y_set(quadratic):
    assert y_set(quadratic, ProjPointK.of(0), 6) == {1}
    assert y_set(quadratic, ProjPointK.of(1), 4) == set()
    assert y_set(quadratic, ProjPointK.infinity(), 3) == {1, 2, 3}


def test_normal_form(quadratic):
    coeffs = normal_form_coefficients(quadratic)
    assert [str(c) for c in coeffs] == ["t", "0", "1"]
    assert not is_isotrivial_normal_form(quadratic)
    assert is_isotrivial_normal_form(map_from_expr(Z ** 2 + 1))
    with pytest.raises(NotNormalFormError):
        normal_form_coefficients(map_from_expr(Z ** 2 + Z + T))
    with pytest.raises(NotNormalFormError):
        normal_form_coefficients(map_from_expr(2 * Z ** 2 + T))
    with pytest.raises(NotNormalFormError):
        normal_form_coefficients(map_from_expr(1 / Z ** 2))


def test_portrait_divisor(quadratic):
    assert portrait_divisor(quadratic, 1, 1) == kpoly(Z ** 2 + Z + T)
    assert portrait_divisor(quadratic, 0, 2) == kpoly(Z ** 2 + Z + T + 1)
    assert has_nonconstant_portrait_point(quadratic, 1, 2)


def test_w_set(quadratic, inverse_square):
    assert w_set(quadratic, 1, 2) == set()
    assert w_set(inverse_square, 0, 2) == {(0, 1), (0, 2)}


@pytest.mark.parametrize(
    "expr, bound",
    [
        (Z ** 2 + T, 4),
        (1 / Z ** 2, 4),
        (T / Z ** 2, 4),
        (Z ** 2, 4),
        (Z ** 2 / (Z - T), 4),
        (Z ** 3 + T * Z + 1, 3),
        (1 / Z ** 3, 3),
    ],
)
def test_x_set_agrees_with_power_map_detection(expr, bound):
    phi = map_from_expr(expr)
    kind = detect_power_map_conjugacy(phi)
    xs = x_set(phi, bound)
    assert len(xs) <= 1
    if xs:
        assert xs == {2}
        assert phi.degree == 2
        assert kind == PowerMapType.INVERSE_POWER
    if phi.degree == 2 and kind == PowerMapType.INVERSE_POWER:
        assert xs == {2}


@pytest.mark.parametrize(
    "expr, alpha",
    [(Z ** 2 + T, 0), (Z ** 2 + T, 1), (Z ** 2 + T, T), (Z ** 2 / (Z - T), 1), (1 / Z ** 2, 2)],
)
def test_y_set_stabilizes(expr, alpha):
    phi = map_from_expr(expr)
    point = ProjPointK.from_expr(alpha)
    ys = y_set(phi, point, 4)
    assert y_set(phi, point, 7) == ys
    assert y_set(phi, point, 2) == {m for m in ys if m <= 2}


def test_y_set_keeps_growing_at_a_ramified_fixed_point(quadratic):
    # infinity is fixed and totally ramified under z^2 + t
    assert y_set(quadratic, ProjPointK.infinity(), 5) == {1, 2, 3, 4, 5}
