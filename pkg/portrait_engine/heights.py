# portrait_engine/heights.py
"""
Weil and canonical heights over Q(t), measured in degree units.
"""
import logging
from dataclasses import dataclass
from typing import Optional

from sympy import Rational

from portrait_engine.errors import NotAMorphismError, PreconditionError
from portrait_engine.dynmap import IterationContext, ProjPointK, RationalMap, iterate_point
from portrait_engine.places import RatFuncT

logger = logging.getLogger(__name__)


def weil_height(point) -> int:
    """max(deg x, deg y) for [x : y] coprime; accepts ProjPointK or RatFuncT."""
    if isinstance(point, RatFuncT):
        point = ProjPointK.of(point.num, point.den)
    return max(int(p.degree()) for p in (point.x, point.y) if not p.is_zero)


def height_comparison_bound(phi: RationalMap) -> int:
    """
    C with |h(phi(P)) - d h(P)| <= C for every P in P^1(K).

    deg Res(F, G) + 2 * (largest t-degree among the coefficients).
    """
    res = phi.resultant
    if res.is_zero:
        raise NotAMorphismError(f"{phi} has vanishing resultant")
    return int(res.degree()) + 2 * phi.coefficient_degree


@dataclass(frozen=True)
class CanonicalHeightEstimate:
    center: Rational
    radius: Rational
    iterations_used: int

    @property
    def lower(self) -> Rational:
        return self.center - self.radius

    @property
    def upper(self) -> Rational:
        return self.center + self.radius

    def contains(self, value) -> bool:
        return self.lower <= Rational(value) <= self.upper

    def to_dict(self) -> dict:
        return {
            "center": str(self.center),
            "radius": str(self.radius),
            "iterations": self.iterations_used,
        }


def iterations_for(bound: int, d: int, epsilon) -> int:
    """Smallest N with bound*d / (d^N (d-1)) <= epsilon."""
    n = 0
    while Rational(bound * d, d ** n * (d - 1)) > epsilon:
        n += 1
    return n


def canonical_height(
    phi: RationalMap,
    alpha: ProjPointK,
    epsilon,
    ctx: Optional[IterationContext] = None,
) -> CanonicalHeightEstimate:
    d = phi.degree
    epsilon = Rational(epsilon)
    if d < 2:
        raise PreconditionError("canonical heights need a map of degree at least 2")
    if epsilon <= 0:
        raise PreconditionError("epsilon must be positive")
    bound = height_comparison_bound(phi)
    n = iterations_for(bound, d, epsilon) if bound > 0 else 0
    point = iterate_point(phi, alpha, n, ctx)
    center = Rational(weil_height(point), d ** n)
    radius = epsilon if bound > 0 else Rational(0)
    logger.debug("canonical height of %s: %s +- %s after %d iterations", alpha, center, radius, n)
    return CanonicalHeightEstimate(center, radius, n)
