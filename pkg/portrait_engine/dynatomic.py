# portrait_engine/dynatomic.py
"""
Period divisors, totally ramified points and the obstruction sets X, Y, W.

Divisors in z are (z, t) polynomials normalized with ``k_normalize``: their
roots over the algebraic closure of Q(t) are the points in question.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Optional

import sympy
from sympy import Poly, Symbol

from portrait_engine.errors import NotNormalFormError, PreconditionError
from portrait_engine.dynmap import (
    IterationContext,
    ProjPointK,
    RationalMap,
    apply_map,
    iterate_forms,
    iterate_point,
)
from portrait_engine.exactalg import (
    QQ,
    T,
    Z,
    k_divides,
    k_normalize,
    k_squarefree_part,
    k_strip_common_roots,
    kpoly,
    poly_gcd,
    t_slices,
    tpoly,
    z_slices,
)
from portrait_engine.places import RatFuncT

logger = logging.getLogger(__name__)

_X = Symbol("X")
_Y = Symbol("Y")


@dataclass(frozen=True)
class ExactPeriodDivisor:
    divisor: Poly
    includes_infinity: bool

    @property
    def degree(self) -> int:
        return self.divisor.degree(Z)


@dataclass(frozen=True)
class RamificationProfile:
    totally_ramified_finite: tuple
    totally_ramified_infinity: bool

    @property
    def count(self) -> int:
        return sum(r.degree(Z) for r in self.totally_ramified_finite) + int(self.totally_ramified_infinity)

    @property
    def finite_product(self) -> Poly:
        return reduce(lambda a, b: a * b, self.totally_ramified_finite, kpoly(1))


class PowerMapType(str, Enum):
    POWER = "z^d-type"
    INVERSE_POWER = "z^-d-type"
    NEITHER = "neither"


def period_polynomial(phi: RationalMap, n: int, ctx: Optional[IterationContext] = None) -> Poly:
    """z*G_n(z,1) - F_n(z,1): the finite solutions of phi^n(z) = z."""
    Fn, Gn = iterate_forms(phi, n, ctx)
    return kpoly(Z) * Gn - Fn


def cross_forms(phi: RationalMap, a: int, b: int, ctx: Optional[IterationContext] = None) -> Poly:
    """F_a G_b - F_b G_a: the finite solutions of phi^a(z) = phi^b(z)."""
    Fa, Ga = iterate_forms(phi, a, ctx)
    Fb, Gb = iterate_forms(phi, b, ctx)
    return Fa * Gb - Fb * Ga


def _exact_period_of(phi, point, n, ctx) -> bool:
    if iterate_point(phi, point, n, ctx) != point:
        return False
    return all(iterate_point(phi, point, k, ctx) != point for k in range(1, n))


def exact_period_divisor(phi: RationalMap, n: int, ctx: Optional[IterationContext] = None) -> ExactPeriodDivisor:
    if phi.degree < 2:
        raise PreconditionError("period divisors need a map of degree at least 2")
    ctx = ctx or IterationContext()
    divisor = k_squarefree_part(period_polynomial(phi, n, ctx))
    for k in sympy.divisors(n)[:-1]:
        divisor = k_strip_common_roots(divisor, period_polynomial(phi, k, ctx))
    infinity = _exact_period_of(phi, ProjPointK.infinity(), n, ctx)
    return ExactPeriodDivisor(divisor, infinity)


def jacobian_form(phi: RationalMap) -> Poly:
    F = sum(c.as_expr() * _X ** i * _Y ** (phi.degree - i) for i, c in enumerate(phi.F))
    G = sum(c.as_expr() * _X ** i * _Y ** (phi.degree - i) for i, c in enumerate(phi.G))
    jac = sympy.expand(sympy.diff(F, _X) * sympy.diff(G, _Y) - sympy.diff(F, _Y) * sympy.diff(G, _X))
    return Poly(jac, _X, _Y, T, domain=QQ)


def totally_ramified_points(phi: RationalMap) -> RamificationProfile:
    """
    Points with ramification index d.

    The Jacobian F_X G_Y - F_Y G_X is a form of degree 2d - 2 vanishing to
    order e - 1 at a point of ramification index e.
    """
    d = phi.degree
    if d < 2:
        raise PreconditionError("ramification needs a map of degree at least 2")
    jac = jacobian_form(phi)
    affine = kpoly(jac.as_expr().subs({_X: Z, _Y: 1}))
    _, factors = affine.sqf_list()
    finite = tuple(
        k_normalize(factor) for factor, mult in factors if mult == d - 1 and factor.degree(Z) > 0
    )
    infinity = (2 * d - 2) - affine.degree(Z) == d - 1
    profile = RamificationProfile(finite, infinity)
    if profile.count > 2:
        raise AssertionError(f"{phi} reports {profile.count} totally ramified points")
    return profile


def vanishes_at(r: Poly, point: ProjPointK) -> bool:
    """True when the homogenized r vanishes at [x : y]."""
    slices = z_slices(kpoly(r))
    deg = max(slices)
    total = tpoly(0)
    for i, c in slices.items():
        total = total + c * point.x ** i * point.y ** (deg - i)
    return total.is_zero


def is_totally_ramified(profile: RamificationProfile, point: ProjPointK) -> bool:
    if point.is_infinity:
        return profile.totally_ramified_infinity
    return any(vanishes_at(r, point) for r in profile.totally_ramified_finite)


def x_set(phi: RationalMap, bound: int, ctx: Optional[IterationContext] = None) -> set:
    """Periods n <= bound all of whose minimum-period points are totally ramified."""
    ctx = ctx or IterationContext()
    profile = totally_ramified_points(phi)
    ramified = profile.finite_product
    result = set()
    for n in range(1, bound + 1):
        epd = exact_period_divisor(phi, n, ctx)
        if not k_divides(epd.divisor, ramified):
            continue
        if epd.includes_infinity and not profile.totally_ramified_infinity:
            continue
        result.add(n)
    return result


def y_set(phi: RationalMap, alpha: ProjPointK, bound: int, ctx: Optional[IterationContext] = None) -> set:
    """Preperiods m <= bound with phi totally ramified at phi^(m-1)(alpha)."""
    ctx = ctx or IterationContext()
    profile = totally_ramified_points(phi)
    return {
        m for m in range(1, bound + 1) if is_totally_ramified(profile, iterate_point(phi, alpha, m - 1, ctx))
    }


def normal_form_coefficients(phi: RationalMap) -> list:
    """[a_0, ..., a_d] of a monic polynomial map with a_(d-1) = 0."""
    d = phi.degree
    if d < 2 or not phi.is_polynomial:
        raise NotNormalFormError(f"{phi} is not a polynomial of degree at least 2")
    coeffs = [RatFuncT.of(c, phi.G[0]) for c in phi.F]
    if coeffs[d].num != tpoly(1) or coeffs[d].den != tpoly(1):
        raise NotNormalFormError(f"{phi} is not monic")
    if not coeffs[d - 1].is_zero:
        raise NotNormalFormError(f"{phi} has a nonzero z^{d - 1} coefficient")
    return coeffs


def is_isotrivial_normal_form(phi: RationalMap) -> bool:
    return all(c.is_constant for c in normal_form_coefficients(phi))


def portrait_divisor(phi: RationalMap, m: int, n: int, ctx: Optional[IterationContext] = None) -> Poly:
    """Divisor in z of the points with portrait exactly (m, n)."""
    ctx = ctx or IterationContext()
    divisor = k_squarefree_part(cross_forms(phi, m + n, m, ctx))
    for ell in sympy.primefactors(n):
        divisor = k_strip_common_roots(divisor, cross_forms(phi, m + n // ell, m, ctx))
    if m >= 1:
        divisor = k_strip_common_roots(divisor, cross_forms(phi, m + n - 1, m - 1, ctx))
    return divisor


def has_nonconstant_portrait_point(phi: RationalMap, m: int, n: int, ctx: Optional[IterationContext] = None) -> bool:
    divisor = portrait_divisor(phi, m, n, ctx)
    constant_part = reduce(poly_gcd, t_slices(divisor).values())
    return divisor.degree(Z) > constant_part.degree()


def w_set(phi: RationalMap, max_m: int, max_n: int, ctx: Optional[IterationContext] = None) -> set:
    ctx = ctx or IterationContext()
    periods = x_set(phi, max_n, ctx)
    return {
        (m, n)
        for m in range(max_m + 1)
        for n in range(1, max_n + 1)
        if n in periods or not has_nonconstant_portrait_point(phi, m, n, ctx)
    }


def _linear_root(r: Poly) -> ProjPointK:
    slices = z_slices(r)
    return ProjPointK.of(-slices.get(0, tpoly(0)), slices[1])


def detect_power_map_conjugacy(phi: RationalMap) -> PowerMapType:
    """Two totally ramified points, both fixed (z^d) or swapped (z^-d)."""
    profile = totally_ramified_points(phi)
    if profile.count != 2:
        return PowerMapType.NEITHER
    finite = profile.totally_ramified_finite
    if len(finite) == 1 and finite[0].degree(Z) == 2:
        r = finite[0]
        if k_divides(r, period_polynomial(phi, 1)):
            return PowerMapType.POWER
        slices = z_slices(r)
        image = sum(
            (kpoly(c) * phi.numerator_z ** i * phi.denominator_z ** (2 - i) for i, c in slices.items()),
            kpoly(0),
        )
        return PowerMapType.INVERSE_POWER if k_divides(r, image) else PowerMapType.NEITHER
    points = [_linear_root(r) for r in finite]
    if profile.totally_ramified_infinity:
        points.append(ProjPointK.infinity())
    first, second = points
    image_first, image_second = apply_map(phi, first), apply_map(phi, second)
    if image_first == first and image_second == second:
        return PowerMapType.POWER
    if image_first == second and image_second == first:
        return PowerMapType.INVERSE_POWER
    return PowerMapType.NEITHER
