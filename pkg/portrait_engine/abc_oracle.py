# portrait_engine/abc_oracle.py
"""
Mason-Stothers over Q(t), and the lower bound it implies for the number of
zeros of f(gamma).
"""
import logging
from dataclasses import dataclass

import sympy
from sympy import Poly

from portrait_engine.errors import DegenerateInputError, NotCoprimeError, PreconditionError
from portrait_engine.exactalg import T, Z, poly_gcd, squarefree_part, tpoly
from portrait_engine.heights import weil_height
from portrait_engine.places import INFINITY, RatFuncT, valuation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AbcReport:
    lhs: int
    rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def slack(self) -> int:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds, "slack": self.slack}


def mason_stothers_check(a, b) -> AbcReport:
    """max(deg A, deg B, deg C) <= deg rad(ABC) - 1 for coprime A + B = C."""
    a, b = tpoly(a), tpoly(b)
    c = a + b
    if a.is_zero or b.is_zero or c.is_zero:
        raise DegenerateInputError("A, B and A + B must be nonzero")
    if poly_gcd(a, b).degree() > 0:
        raise NotCoprimeError("A and B share a root")
    if max(a.degree(), b.degree(), c.degree()) == 0:
        raise PreconditionError("A, B and A + B are all constant")
    lhs = max(a.degree(), b.degree(), c.degree())
    rhs = squarefree_part(a * b * c).degree() - 1
    report = AbcReport(int(lhs), int(rhs))
    if not report.holds:
        logger.warning("Mason-Stothers fails for A=%s B=%s", a, b)
    return report


def _coefficients(f) -> list:
    expr = sympy.cancel(sympy.sympify(f))
    if not expr.free_symbols <= {Z, T}:
        raise PreconditionError(f"{f} is not a polynomial in z over Q(t)")
    num, den = sympy.fraction(expr)
    if den.has(Z):
        raise PreconditionError(f"{f} is not a polynomial in z")
    coeffs = Poly(num, Z).all_coeffs()
    return [RatFuncT.from_expr(c / den) for c in coeffs]


def zero_place_count_check(f, gamma) -> AbcReport:
    """
    Places where f(gamma) vanishes, against h(gamma) minus the root-height term.

    The sum of root heights is bounded by e times the largest coefficient
    height, which only weakens the inequality being checked.
    """
    coeffs = _coefficients(f)
    e = len(coeffs) - 1
    if e < 3:
        raise PreconditionError("f must have degree at least 3")
    if not coeffs[0].num == tpoly(1) or not coeffs[0].den == tpoly(1):
        raise PreconditionError("f must be monic")
    expr = sympy.sympify(f)
    if sympy.cancel(sympy.discriminant(expr, Z)) == 0:
        raise PreconditionError("f has repeated roots")
    gamma = gamma if isinstance(gamma, RatFuncT) else RatFuncT.from_expr(gamma)
    if gamma.is_constant:
        raise PreconditionError("gamma must be nonconstant")

    value = RatFuncT.from_expr(expr.subs(Z, gamma.as_expr()))
    if value.is_zero:
        raise PreconditionError("gamma is a root of f")
    rhs = squarefree_part(value.num).degree()
    if valuation(value, INFINITY) > 0:
        rhs += 1
    root_heights = e * max(weil_height(c) for c in coeffs if not c.is_zero)
    lhs = weil_height(gamma) - 3 * e * e * root_heights
    report = AbcReport(int(lhs), int(rhs))
    if not report.holds:
        logger.warning("zero count bound fails for f=%s gamma=%s", f, gamma)
    return report
