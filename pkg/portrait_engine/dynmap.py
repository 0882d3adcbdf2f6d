# portrait_engine/dynmap.py
"""
Self-maps of P^1 over K = Q(t).

A map is stored as the pair of binary forms (F, G) with coefficients in Q[t];
``F[i]`` is the coefficient of X^i Y^(d-i). Points of P^1(K) are coprime
pairs [x : y] of polynomials in t.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Optional

import sympy
from sympy import Poly

from portrait_engine.config import get_settings
from portrait_engine.errors import (
    BadReductionError,
    ConstantMapError,
    DegenerateInputError,
    NotAMorphismError,
    PreconditionError,
    ResourceLimitError,
)
from portrait_engine.exactalg import (
    T,
    Z,
    form_resultant,
    format_expr,
    format_ratio,
    kpoly,
    poly_gcd,
    squarefree_part,
    tpoly,
    z_content,
    z_slices,
)
from portrait_engine.places import (
    Place,
    RatFuncT,
    ResidueElem,
    ResidueProjPoint,
    parse_place,
    reduce_point,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Portrait:
    """Preperiod m and minimum period n."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 1:
            raise PreconditionError(f"invalid portrait ({self.m},{self.n})")

    def to_list(self) -> list:
        return [self.m, self.n]

    def __str__(self):
        return f"({self.m},{self.n})"


@dataclass(frozen=True)
class ProjPointK:
    x: Poly
    y: Poly

    @classmethod
    def of(cls, x, y=1) -> "ProjPointK":
        x, y = tpoly(x), tpoly(y)
        if x.is_zero and y.is_zero:
            raise DegenerateInputError("[0 : 0] is not a point")
        g = poly_gcd(x, y)
        x, y = x.exquo(g), y.exquo(g)
        if y.is_zero:
            return cls(tpoly(1), y)
        lead = y.LC()
        return cls(x.quo_ground(lead), y.quo_ground(lead))

    @classmethod
    def infinity(cls) -> "ProjPointK":
        return cls(tpoly(1), tpoly(0))

    @classmethod
    def from_expr(cls, expr) -> "ProjPointK":
        """None is the point at infinity."""
        if expr is None:
            return cls.infinity()
        value = RatFuncT.from_expr(expr)
        return cls.of(value.num, value.den)

    @property
    def is_infinity(self) -> bool:
        return self.y.is_zero

    @property
    def is_constant(self) -> bool:
        return self.x.degree() <= 0 and self.y.degree() <= 0

    def as_expr(self):
        if self.is_infinity:
            return sympy.oo
        return self.x.as_expr() / self.y.as_expr()

    def __str__(self):
        if self.is_infinity:
            return "inf"
        return format_ratio(self.as_expr())


@dataclass(frozen=True)
class PlaceSet:
    finite_part: Poly = field(default_factory=lambda: tpoly(1))
    include_infinity: bool = False

    @classmethod
    def of(cls, polys=(), include_infinity=False) -> "PlaceSet":
        product = reduce(lambda a, b: a * b, (tpoly(p) for p in polys), tpoly(1))
        return cls(squarefree_part(product), include_infinity)

    def contains(self, place: Place) -> bool:
        if place.is_infinite:
            return self.include_infinity
        return poly_gcd(self.finite_part, place.modulus).degree() > 0

    def union(self, other: "PlaceSet") -> "PlaceSet":
        return PlaceSet.of(
            (self.finite_part, other.finite_part),
            self.include_infinity or other.include_infinity,
        )

    def __str__(self):
        parts = [format_expr(self.finite_part)] if self.finite_part.degree() > 0 else []
        if self.include_infinity:
            parts.append("inf")
        return ";".join(parts)


def parse_place_set(text: str, trust: bool = False) -> PlaceSet:
    """ "t;t^2+1;inf" """
    polys, infinity = [], False
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        place = parse_place(chunk, trust=trust)
        if place.is_infinite:
            infinity = True
        else:
            polys.append(place.modulus)
    return PlaceSet.of(polys, infinity)


@dataclass(frozen=True)
class RationalMap:
    F: tuple
    G: tuple

    @property
    def degree(self) -> int:
        return len(self.F) - 1

    @cached_property
    def resultant(self) -> Poly:
        return form_resultant(self.F, self.G)

    @cached_property
    def numerator_z(self) -> Poly:
        return kpoly(sum(c.as_expr() * Z ** i for i, c in enumerate(self.F)))

    @cached_property
    def denominator_z(self) -> Poly:
        return kpoly(sum(c.as_expr() * Z ** i for i, c in enumerate(self.G)))

    @property
    def is_polynomial(self) -> bool:
        return all(c.is_zero for c in self.G[1:])

    @property
    def coefficient_degree(self) -> int:
        return max(c.degree() for c in self.F + self.G if not c.is_zero)

    def as_expr(self):
        return self.numerator_z.as_expr() / self.denominator_z.as_expr()

    def __str__(self):
        return format_ratio(self.as_expr())


def map_from_expr(expr) -> RationalMap:
    expr = sympy.cancel(sympy.sympify(expr))
    extra = expr.free_symbols - {Z, T}
    if extra:
        raise PreconditionError(f"unexpected symbols {sorted(map(str, extra))}")
    num, den = sympy.fraction(expr)
    numerator, denominator = kpoly(num), kpoly(den)
    if numerator.is_zero:
        raise ConstantMapError("the zero map is constant")
    d = max(numerator.degree(Z), denominator.degree(Z))
    if d == 0:
        raise ConstantMapError(f"{expr} does not depend on z")
    top, bottom = z_slices(numerator), z_slices(denominator)
    F = [top.get(i, tpoly(0)) for i in range(d + 1)]
    G = [bottom.get(i, tpoly(0)) for i in range(d + 1)]
    content = reduce(poly_gcd, [c for c in F + G if not c.is_zero])
    F = [c.exquo(content) for c in F]
    G = [c.exquo(content) for c in G]
    lead = next(c for c in reversed(G) if not c.is_zero).LC()
    phi = RationalMap(tuple(c.quo_ground(lead) for c in F), tuple(c.quo_ground(lead) for c in G))
    if phi.resultant.is_zero:
        raise NotAMorphismError(f"{expr} has vanishing resultant")
    logger.debug("built map %s of degree %d", phi, d)
    return phi


def new_map(numerator, denominator=1) -> RationalMap:
    """Map z -> numerator/denominator; both are expressions in z and t."""
    numerator, denominator = sympy.sympify(numerator), sympy.sympify(denominator)
    if sympy.cancel(denominator) == 0:
        raise DegenerateInputError("zero denominator")
    return map_from_expr(numerator / denominator)


class IterationContext:
    """Degree cap plus memo tables for one computation; not thread-safe."""

    def __init__(self, degree_cap: Optional[int] = None):
        self.degree_cap = degree_cap or get_settings().degree_cap
        self._orbits = {}
        self._forms = {}

    def check(self, d: int, j: int):
        if d > 1 and d ** j > self.degree_cap:
            raise ResourceLimitError(
                f"degree {d}^{j} exceeds the cap {self.degree_cap}",
                requested=d ** j,
                cap=self.degree_cap,
            )

    def max_steps(self, d: int) -> int:
        if d <= 1:
            return self.degree_cap
        j = 0
        while d ** (j + 1) <= self.degree_cap:
            j += 1
        return j


def _eval_form(coeffs, x, y):
    d = len(coeffs) - 1
    x_powers, y_powers = [x ** 0], [y ** 0]
    for _ in range(d):
        x_powers.append(x_powers[-1] * x)
        y_powers.append(y_powers[-1] * y)
    total = coeffs[0] * y_powers[d]
    for i in range(1, d + 1):
        total = total + coeffs[i] * x_powers[i] * y_powers[d - i]
    return total


def apply_map(phi: RationalMap, point: ProjPointK) -> ProjPointK:
    return ProjPointK.of(_eval_form(phi.F, point.x, point.y), _eval_form(phi.G, point.x, point.y))


def _orbit(phi, alpha, j, ctx) -> list:
    orbit = ctx._orbits.setdefault((phi, alpha), [alpha])
    while len(orbit) <= j:
        orbit.append(apply_map(phi, orbit[-1]))
    return orbit


def iterate_point(phi: RationalMap, alpha: ProjPointK, j: int, ctx: Optional[IterationContext] = None) -> ProjPointK:
    ctx = ctx or IterationContext()
    ctx.check(phi.degree, j)
    return _orbit(phi, alpha, j, ctx)[j]


def iterate_forms(phi: RationalMap, n: int, ctx: Optional[IterationContext] = None):
    """[F_n(z,1) : G_n(z,1)] as (z, t) polynomials without common Q[t]-content."""
    ctx = ctx or IterationContext()
    ctx.check(phi.degree, n)
    forms = ctx._forms.setdefault(phi, [(kpoly(Z), kpoly(1))])
    F = [kpoly(c) for c in phi.F]
    G = [kpoly(c) for c in phi.G]
    while len(forms) <= n:
        Fn, Gn = forms[-1]
        nxt_f, nxt_g = _eval_form(F, Fn, Gn), _eval_form(G, Fn, Gn)
        content = poly_gcd(z_content(nxt_f), z_content(nxt_g))
        if content.degree() > 0:
            nxt_f, nxt_g = nxt_f.exquo(kpoly(content)), nxt_g.exquo(kpoly(content))
        forms.append((nxt_f, nxt_g))
    return forms[n]


def global_portrait(phi: RationalMap, alpha: ProjPointK, bound: int, ctx: Optional[IterationContext] = None) -> Optional[Portrait]:
    """Portrait of alpha over K, or None when no repeat shows up within the bound or the cap."""
    ctx = ctx or IterationContext()
    steps = min(bound, ctx.max_steps(phi.degree))
    orbit = _orbit(phi, alpha, steps, ctx)
    seen = {}
    for j in range(steps + 1):
        point = orbit[j]
        if point in seen:
            return Portrait(seen[point], j - seen[point])
        seen[point] = j
    return None


def _infinity_scaled(phi: RationalMap):
    top = phi.coefficient_degree
    return [c.nth(top) for c in phi.F], [c.nth(top) for c in phi.G]


def has_good_reduction(phi: RationalMap, place: Place) -> bool:
    if place.is_infinite:
        F, G = _infinity_scaled(phi)
        return not form_resultant(F, G).is_zero
    return poly_gcd(phi.resultant, place.modulus).degree() == 0


def bad_reduction_divisor(phi: RationalMap) -> PlaceSet:
    res = phi.resultant
    finite = squarefree_part(res) if res.degree() > 0 else tpoly(1)
    return PlaceSet(finite, not has_good_reduction(phi, Place()))


@dataclass(frozen=True)
class ReducedMap:
    F: tuple
    G: tuple
    place: Place

    def apply(self, point: ResidueProjPoint) -> ResidueProjPoint:
        return ResidueProjPoint.of(_eval_form(self.F, point.x, point.y), _eval_form(self.G, point.x, point.y))


def reduce_map(phi: RationalMap, place: Place) -> ReducedMap:
    if not has_good_reduction(phi, place):
        raise BadReductionError(f"{phi} has bad reduction at {place}")
    modulus = place.residue_modulus
    if place.is_infinite:
        F, G = _infinity_scaled(phi)
    else:
        F, G = phi.F, phi.G
    return ReducedMap(
        tuple(ResidueElem.of(c, modulus) for c in F),
        tuple(ResidueElem.of(c, modulus) for c in G),
        place,
    )


def same_reduction(a: ProjPointK, b: ProjPointK, place: Place) -> bool:
    return reduce_point(a.x, a.y, place) == reduce_point(b.x, b.y, place)


def portrait_mod_place(
    phi: RationalMap,
    alpha: ProjPointK,
    place: Place,
    bound: Optional[int] = None,
) -> Optional[Portrait]:
    """
    Portrait of alpha modulo the place, found by iterating in the residue field.

    None means no repeat within ``bound`` steps, which proves nothing.
    """
    bound = bound or get_settings().portrait_bound
    reduced = reduce_map(phi, place)
    point = reduce_point(alpha.x, alpha.y, place)
    seen = {}
    for j in range(bound + 1):
        if point in seen:
            return Portrait(seen[point], j - seen[point])
        seen[point] = j
        point = reduced.apply(point)
    return None
