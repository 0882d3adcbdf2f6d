# portrait_engine/places.py
"""
Places of Q(t) and reduction into their residue fields.

A finite place is a monic irreducible q in Q[t]; its residue field is the
number field Q[t]/(q), and a place of degree e stands for the e conjugate
geometric places over the algebraic closure. The infinite place has residue
field Q and uniformizer 1/t.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import sympy
from sympy import Poly
from sympy.polys.polyerrors import NotInvertible

from portrait_engine.errors import (
    DegenerateInputError,
    PoleAtPlaceError,
    PreconditionError,
)
from portrait_engine.exactalg import T, format_poly, poly_gcd, tpoly
from portrait_engine.expression import parse_polynomial_expression

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RatFuncT:
    """Element of Q(t) as num/den with gcd 1 and monic den."""

    num: Poly
    den: Poly

    @classmethod
    def of(cls, num, den=1) -> "RatFuncT":
        num, den = tpoly(num), tpoly(den)
        if den.is_zero:
            raise DegenerateInputError("zero denominator")
        if num.is_zero:
            return cls(tpoly(0), tpoly(1))
        g = poly_gcd(num, den)
        num, den = num.exquo(g), den.exquo(g)
        lead = den.LC()
        return cls(num.quo_ground(lead), den.quo_ground(lead))

    @classmethod
    def from_expr(cls, expr) -> "RatFuncT":
        num, den = sympy.fraction(sympy.cancel(sympy.sympify(expr)))
        if not (num.free_symbols | den.free_symbols) <= {T}:
            raise PreconditionError(f"{expr} is not an element of Q(t)")
        return cls.of(num, den)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() == 0

    def as_expr(self):
        return self.num.as_expr() / self.den.as_expr()

    def _coerce(self, other) -> "RatFuncT":
        return other if isinstance(other, RatFuncT) else RatFuncT.of(other)

    def __add__(self, other):
        other = self._coerce(other)
        return RatFuncT.of(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFuncT(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RatFuncT.of(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero:
            raise DegenerateInputError("division by zero in Q(t)")
        return RatFuncT.of(self.num * other.den, self.den * other.num)

    def __str__(self):
        if self.den.degree() == 0:
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"


@dataclass(frozen=True)
class Place:
    """Finite(q) when ``modulus`` is set, otherwise the place at infinity."""

    modulus: Optional[Poly] = None

    @classmethod
    def finite(cls, q) -> "Place":
        q = tpoly(q)
        if q.degree() < 1:
            raise DegenerateInputError("a finite place needs a nonconstant polynomial")
        return cls(q.monic())

    @property
    def is_infinite(self) -> bool:
        return self.modulus is None

    @property
    def local_degree(self) -> int:
        return 1 if self.is_infinite else self.modulus.degree()

    @property
    def residue_modulus(self) -> Poly:
        # residue field at infinity is Q, represented as Q[t]/(t)
        return tpoly(T) if self.is_infinite else self.modulus

    def __str__(self):
        return "inf" if self.is_infinite else format_poly(self.modulus)


INFINITY = Place()


def _multiplicity(f: Poly, q: Poly) -> int:
    k = 0
    while True:
        quo, rem = f.div(q)
        if not rem.is_zero:
            return k
        f, k = quo, k + 1


def valuation(x: RatFuncT, place: Place) -> Optional[int]:
    """v_p(x); None stands for +infinity (x = 0)."""
    if x.is_zero:
        return None
    if place.is_infinite:
        return x.den.degree() - x.num.degree()
    return _multiplicity(x.num, place.modulus) - _multiplicity(x.den, place.modulus)


@dataclass(frozen=True)
class ResidueElem:
    value: Poly
    modulus: Poly

    @classmethod
    def of(cls, value, modulus: Poly) -> "ResidueElem":
        return cls(tpoly(value).rem(modulus), modulus)

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero

    def _lift(self, other) -> "ResidueElem":
        if isinstance(other, ResidueElem):
            return other
        return ResidueElem.of(other, self.modulus)

    def __add__(self, other):
        return ResidueElem.of(self.value + self._lift(other).value, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return ResidueElem(-self.value, self.modulus)

    def __sub__(self, other):
        return ResidueElem.of(self.value - self._lift(other).value, self.modulus)

    def __mul__(self, other):
        return ResidueElem.of(self.value * self._lift(other).value, self.modulus)

    __rmul__ = __mul__

    def inverse(self) -> "ResidueElem":
        if self.is_zero:
            raise DegenerateInputError("zero has no inverse in the residue field")
        try:
            return ResidueElem(self.value.invert(self.modulus), self.modulus)
        except NotInvertible as e:
            raise PreconditionError(f"modulus {format_poly(self.modulus)} is not irreducible") from e

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __pow__(self, k: int):
        result = ResidueElem.of(1, self.modulus)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __str__(self):
        return format_poly(self.value)


@dataclass(frozen=True)
class ResidueProjPoint:
    """[x : y] over a residue field with y = 1, or [1 : 0]."""

    x: ResidueElem
    y: ResidueElem

    @classmethod
    def of(cls, x: ResidueElem, y: ResidueElem) -> "ResidueProjPoint":
        if x.is_zero and y.is_zero:
            raise DegenerateInputError("[0 : 0] is not a point")
        one = ResidueElem.of(1, x.modulus)
        if y.is_zero:
            return cls(one, ResidueElem.of(0, x.modulus))
        return cls(x / y, one)

    @property
    def is_infinity(self) -> bool:
        return self.y.is_zero

    def __str__(self):
        return "inf" if self.is_infinity else str(self.x)


def reduce_scalar(x: RatFuncT, place: Place) -> ResidueElem:
    modulus = place.residue_modulus
    v = valuation(x, place)
    if v is not None and v < 0:
        raise PoleAtPlaceError(f"{x} has a pole at {place}")
    if place.is_infinite:
        if v is None or v > 0:
            return ResidueElem.of(0, modulus)
        return ResidueElem.of(x.num.LC() / x.den.LC(), modulus)
    return ResidueElem.of(x.num, modulus) / ResidueElem.of(x.den, modulus)


def reduce_point(x, y, place: Place) -> ResidueProjPoint:
    """Reduction of [x : y] with x, y in Q[t]; common factors are cancelled first."""
    x, y = tpoly(x), tpoly(y)
    if x.is_zero and y.is_zero:
        raise DegenerateInputError("[0 : 0] is not a point")
    g = poly_gcd(x, y)
    x, y = x.exquo(g), y.exquo(g)
    modulus = place.residue_modulus
    if place.is_infinite:
        top = max(p.degree() for p in (x, y) if not p.is_zero)
        return ResidueProjPoint.of(ResidueElem.of(x.nth(top), modulus), ResidueElem.of(y.nth(top), modulus))
    return ResidueProjPoint.of(ResidueElem.of(x, modulus), ResidueElem.of(y, modulus))


def parse_place(text: str, trust: bool = False) -> Place:
    """ "inf" or a polynomial in t such as "t^2+1". """
    if text.strip().lower() in ("inf", "infinity"):
        return INFINITY
    q = tpoly(parse_polynomial_expression(text, ("t",)))
    if q.degree() < 1:
        raise PreconditionError(f"place {text.strip()!r} must be a nonconstant polynomial in t")
    q = q.monic()
    if not trust and not q.is_irreducible:
        raise PreconditionError(f"{format_poly(q)} is not irreducible over Q")
    logger.debug("parsed place %s", format_poly(q))
    return Place(q)
