# portrait_engine/constructor.py
"""
Coefficients of normal-form polynomials realizing prescribed portraits.

Degree 2 reads the answer off the witness divisor of z^2 + t. Degree 3 first
puts one point on a rational component of its portrait curve in the (a, b)-plane
of z^3 + az + b and specializes the other coefficient through the witness
engine; failing that it eliminates b between the two curves. Only points that
verify are returned.
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import sympy
from sympy import Poly, QQ, Rational, Symbol

from portrait_engine.config import get_settings
from portrait_engine.dynmap import (
    IterationContext,
    PlaceSet,
    Portrait,
    ProjPointK,
    global_portrait,
    map_from_expr,
    portrait_mod_place,
)
from portrait_engine.errors import PreconditionError
from portrait_engine.exactalg import (
    T,
    Z,
    format_expr,
    rational_height,
    rational_roots,
    tpoly,
)
from portrait_engine.heights import CanonicalHeightEstimate, canonical_height
from portrait_engine.places import Place, ResidueElem
from portrait_engine.witness import WitnessStatus, find_witness

logger = logging.getLogger(__name__)

A = Symbol("a")
B = Symbol("b")

COMPONENT_SCAN_HEIGHT = 6
STAGE_HEIGHT_EPSILON = Rational(1, 16)


class ConstructionStatus(str, Enum):
    REALIZED = "Realized"
    NOT_REALIZABLE = "NotRealizable"
    NOT_REALIZABLE_AT_CAP = "NotRealizableAtCap"
    CAPPED = "Capped"


@dataclass(frozen=True)
class AlgebraicValue:
    """Any root of ``polynomial`` in ``variable``; coefficients may involve the base value."""

    polynomial: sympy.Expr
    variable: str
    base: Optional["AlgebraicValue"] = None

    @property
    def degree(self) -> int:
        return int(sympy.degree(self.polynomial, Symbol(self.variable)))

    def to_dict(self) -> dict:
        data = {"minimal_polynomial": format_expr(self.polynomial), "variable": self.variable}
        if self.base is not None:
            data["over"] = self.base.to_dict()
        return data


@dataclass(frozen=True)
class CoefficientWitness:
    """Values of (a_(d-2), ..., a_0)."""

    assignment: tuple
    verified: bool

    def to_dict(self) -> dict:
        return {
            "assignment": [v.to_dict() if isinstance(v, AlgebraicValue) else str(v) for v in self.assignment],
            "verified": self.verified,
        }


@dataclass(frozen=True)
class ConstructionReport:
    status: ConstructionStatus
    witness: Optional[CoefficientWitness] = None
    detail: str = ""
    heights: tuple = ()

    def to_dict(self) -> dict:
        data = {
            "status": self.status.value,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "detail": self.detail,
        }
        if self.heights:
            data["heights"] = [stage.to_dict() for stage in self.heights]
        return data


def _algebraic(q: Poly, variable: str, base: Optional[AlgebraicValue] = None) -> AlgebraicValue:
    return AlgebraicValue(q.as_expr().subs(T, Symbol(variable)), variable, base)


def _lowest_factors(p: Poly) -> list:
    """Irreducible factors of degree >= 2, lowest degree first."""
    _, factors = p.factor_list()
    found = [f.monic() for f, _ in factors if f.degree() >= 2]
    return sorted(found, key=lambda f: (f.degree(), str(f.as_expr())))


def _verify_all(phi, points, targets, place) -> bool:
    return all(
        portrait_mod_place(phi, ProjPointK.of(c), place, tgt.m + tgt.n + 1) == tgt
        for c, tgt in zip(points, targets)
    )


def realize_single(c, target: Portrait, d: int = 2, ctx: Optional[IterationContext] = None) -> ConstructionReport:
    """a_0 with c of portrait ``target`` under z^2 + a_0."""
    if d != 2:
        raise PreconditionError("realize_single handles degree 2 only")
    c = Rational(c)
    phi = map_from_expr(Z ** 2 + T)
    report = find_witness(phi, ProjPointK.of(c), target, PlaceSet(tpoly(1), True), ctx)
    if report.status == WitnessStatus.CAPPED:
        return ConstructionReport(ConstructionStatus.CAPPED, detail=report.detail)
    if report.status == WitnessStatus.NOT_REALIZABLE:
        return ConstructionReport(
            ConstructionStatus.NOT_REALIZABLE,
            detail=f"no a_0 gives {c} portrait {target}",
        )
    if report.rational_witnesses:
        a0 = report.rational_witnesses[0]
        return ConstructionReport(ConstructionStatus.REALIZED, CoefficientWitness((a0,), True))
    if report.divisor is None:
        return ConstructionReport(ConstructionStatus.NOT_REALIZABLE_AT_CAP, detail="portrait holds for every a_0 off the exceptional divisor")
    for q in _lowest_factors(report.divisor):
        if _verify_all(phi, [c], [target], Place(q)):
            logger.info("realized %s at %s with a_0 a root of %s", target, c, format_expr(q))
            return ConstructionReport(ConstructionStatus.REALIZED, CoefficientWitness((_algebraic(q, "a"),), True))
        logger.warning("factor %s of the witness divisor failed verification", format_expr(q))
    return ConstructionReport(ConstructionStatus.NOT_REALIZABLE_AT_CAP, detail="no divisor factor verified")


def _ab_poly(expr) -> Poly:
    return Poly(expr, B, A, domain=QQ)


def _strip(h: Poly, x: Poly) -> Poly:
    if x.is_zero:
        return _ab_poly(1)
    g = h.gcd(x)
    while g.total_degree() > 0:
        h = h.exquo(g)
        g = h.gcd(g)
    return h


def portrait_condition(c, target: Portrait) -> Poly:
    """Curve in the (a, b)-plane where c has portrait ``target`` under z^3 + az + b."""
    m, n = target.m, target.n
    a, b = _ab_poly(A), _ab_poly(B)
    values = [_ab_poly(Rational(c))]
    for _ in range(m + n):
        v = values[-1]
        values.append(v ** 3 + a * v + b)
    condition = (values[m + n] - values[m]).sqf_part()
    for ell in sympy.primefactors(n):
        condition = _strip(condition, values[m + n // ell] - values[m])
    if m >= 1:
        condition = _strip(condition, values[m + n - 1] - values[m - 1])
    return condition


def _univariate(p: Poly, var, value) -> Poly:
    other = B if var == A else A
    return Poly(p.as_expr().subs(var, value), other, domain=QQ)


def _b_candidates(G1: Poly, G2: Poly, a) -> Poly:
    g1, g2 = _univariate(G1, A, a), _univariate(G2, A, a)
    if g1.is_zero:
        return g2
    if g2.is_zero:
        return g1
    return g1.gcd(g2)


def _small_rationals(height: int) -> list:
    values = {Rational(p, q) for q in range(1, height + 1) for p in range(-height, height + 1)}
    return sorted(values, key=lambda r: (rational_height(r), r))


def _rational_pairs(G1: Poly, G2: Poly) -> list:
    pairs = []
    common = G1.gcd(G2)
    if common.total_degree() > 0:
        for a in _small_rationals(COMPONENT_SCAN_HEIGHT):
            fiber = _univariate(common, A, a)
            if fiber.is_zero or fiber.degree() < 1:
                continue
            pairs.extend((a, b) for b in rational_roots(fiber))
        G1, G2 = G1.exquo(common), G2.exquo(common)
    if G1.total_degree() == 0 or G2.total_degree() == 0:
        return pairs
    eliminant = Poly(G1.resultant(G2).as_expr(), A, domain=QQ)
    if eliminant.is_zero or eliminant.degree() < 1:
        return pairs
    for a in sorted(rational_roots(eliminant), key=lambda r: (rational_height(r), r)):
        fiber = _b_candidates(G1, G2, a)
        if fiber.is_zero or fiber.degree() < 1:
            continue
        for b in sorted(rational_roots(fiber), key=lambda r: (rational_height(r), r)):
            pairs.append((a, b))
    return pairs


def rational_cubic_candidates(c1, c2, t1: Portrait, t2: Portrait) -> list:
    """Rational (a, b) on both portrait curves, before verification."""
    return _rational_pairs(portrait_condition(c1, t1), portrait_condition(c2, t2))


def _b_from_groebner(q: Poly, G1: Poly, G2: Poly) -> Optional[ResidueElem]:
    """b as an element of Q[a]/(q) when the lex basis has an element linear in b."""
    basis = sympy.groebner([q.as_expr().subs(T, A), G1.as_expr(), G2.as_expr()], B, A, order="lex")
    modulus = tpoly(q)
    for element in basis.exprs:
        poly = Poly(element, B, A, domain=QQ)
        if poly.degree(B) != 1:
            continue
        lead = ResidueElem.of(_coeff_b(poly, 1).as_expr().subs(A, T), modulus)
        rest = ResidueElem.of(_coeff_b(poly, 0).as_expr().subs(A, T), modulus)
        if lead.is_zero:
            continue
        return -rest / lead
    return None


def _coeff_b(poly: Poly, k: int) -> Poly:
    terms = {(j,): c for (i, j), c in poly.terms() if i == k}
    return Poly.from_dict(terms or {(0,): 0}, A, domain=QQ)


def realize_pair_cubic(c1, c2, t1: Portrait, t2: Portrait, construct_cap: Optional[int] = None) -> ConstructionReport:
    """(a, b) such that c_i has portrait t_i under z^3 + az + b."""
    c1, c2 = Rational(c1), Rational(c2)
    if c1 == c2:
        raise PreconditionError("the two starting points must differ")
    cap = construct_cap or get_settings().construct_cap
    size = 3 ** (t1.m + t1.n) * 3 ** (t2.m + t2.n)
    if size > cap:
        return ConstructionReport(ConstructionStatus.CAPPED, detail=f"3^{t1.m + t1.n} * 3^{t2.m + t2.n} exceeds {cap}")
    points, targets = (c1, c2), (t1, t2)
    G1, G2 = portrait_condition(c1, t1), portrait_condition(c2, t2)
    if G1.total_degree() == 0 or G2.total_degree() == 0:
        return ConstructionReport(ConstructionStatus.NOT_REALIZABLE, detail="a portrait condition has no solutions")

    for a, b in _rational_pairs(G1, G2):
        phi = map_from_expr(Z ** 3 + a * Z + b)
        if _verify_all(phi, points, targets, Place.finite(T)):
            logger.info("realized %s, %s with (a, b) = (%s, %s)", t1, t2, a, b)
            return ConstructionReport(ConstructionStatus.REALIZED, CoefficientWitness((a, b), True))
        logger.debug("rational candidate (%s, %s) failed verification", a, b)

    common = G1.gcd(G2)
    H1, H2 = (G1.exquo(common), G2.exquo(common)) if common.total_degree() > 0 else (G1, G2)
    if H1.total_degree() == 0 or H2.total_degree() == 0:
        return ConstructionReport(ConstructionStatus.NOT_REALIZABLE_AT_CAP, detail="no verified point found")
    eliminant = tpoly(Poly(H1.resultant(H2).as_expr(), A, domain=QQ).as_expr().subs(A, T))

    for a in sorted(rational_roots(eliminant), key=lambda r: (rational_height(r), r)):
        fiber = _b_candidates(G1, G2, a)
        if fiber.is_zero or fiber.degree() < 1:
            continue
        for q in _lowest_factors(tpoly(fiber.as_expr().subs(B, T))):
            phi = map_from_expr(Z ** 3 + a * Z + T)
            if _verify_all(phi, points, targets, Place(q)):
                return ConstructionReport(
                    ConstructionStatus.REALIZED,
                    CoefficientWitness((a, _algebraic(q, "b")), True),
                )

    for q in _lowest_factors(eliminant):
        b = _b_from_groebner(q, H1, H2)
        if b is None:
            logger.debug("no b linear over Q[a]/(%s)", format_expr(q))
            continue
        phi = map_from_expr(Z ** 3 + T * Z + b.value.as_expr())
        if _verify_all(phi, points, targets, Place(q)):
            a_value = _algebraic(q, "a")
            b_value = AlgebraicValue(B - b.value.as_expr().subs(T, A), "b", a_value)
            return ConstructionReport(ConstructionStatus.REALIZED, CoefficientWitness((a_value, b_value), True))

    return ConstructionReport(ConstructionStatus.NOT_REALIZABLE_AT_CAP, detail="no verified point found")


@dataclass(frozen=True)
class StageHeight:
    """Canonical height of the next constant point once earlier points are fixed."""

    point: Rational
    estimate: CanonicalHeightEstimate

    def to_dict(self) -> dict:
        return {"point": str(self.point), **self.estimate.to_dict()}


def next_point_height(phi, c, epsilon=STAGE_HEIGHT_EPSILON) -> StageHeight:
    return StageHeight(Rational(c), canonical_height(phi, ProjPointK.of(c), epsilon))


def clears_height_bound(stage: StageHeight, d: int, epsilon=STAGE_HEIGHT_EPSILON) -> bool:
    """A constant point that is not preperiodic has canonical height at least 1/d."""
    return bool(stage.estimate.center >= Rational(1, d) - epsilon)


def _components(G: Poly) -> list:
    """(free, value): factors of G solved for b (free a) or for a (free b), value written in t."""
    found = []
    _, factors = G.factor_list()
    for f, _ in sorted(factors, key=lambda item: (item[0].total_degree(), str(item[0].as_expr()))):
        expr = f.as_expr()
        for free, solved in ((A, B), (B, A)):
            if f.degree(solved) == 1:
                lead, rest = expr.coeff(solved, 1), expr.coeff(solved, 0)
                found.append((free, sympy.cancel(-rest / lead).subs(free, T)))
                break
    return found


def _stage_map(free, value):
    if free == A:
        return map_from_expr(Z ** 3 + T * Z + value)
    return map_from_expr(Z ** 3 + value * Z + T)


def _rational_assignment(free, value, w) -> tuple:
    other = Rational(value.subs(T, w))
    return (w, other) if free == A else (other, w)


def _algebraic_assignment(free, value, q: Poly) -> tuple:
    free_name, other_name = ("a", "b") if free == A else ("b", "a")
    base = _algebraic(q, free_name)
    relation = sympy.numer(sympy.together(Symbol(other_name) - value.subs(T, Symbol(free_name))))
    other = AlgebraicValue(relation, other_name, base)
    return (base, other) if free == A else (other, base)


def _realize_cubic_staged(points, targets) -> Optional[ConstructionReport]:
    """
    Put the first point on a rational component of its portrait curve, then
    specialize the remaining coefficient with the witness engine.
    """
    for first, second in ((0, 1), (1, 0)):
        c1, c2 = points[first], points[second]
        t1, t2 = targets[first], targets[second]
        for free, value in _components(portrait_condition(c1, t1)):
            phi = _stage_map(free, value)
            if global_portrait(phi, ProjPointK.of(c1), t1.m + t1.n + 1) != t1:
                logger.debug("component %s of %s does not keep portrait %s", value, c1, t1)
                continue
            stage = next_point_height(phi, c2)
            if not clears_height_bound(stage, 3):
                logger.info("%s is preperiodic for %s; component skipped", c2, phi)
                continue
            report = find_witness(phi, ProjPointK.of(c2), t2, PlaceSet(tpoly(1), True))
            if report.status != WitnessStatus.REALIZABLE:
                continue
            for w in report.rational_witnesses:
                if _verify_all(phi, points, targets, Place.finite(T - w)):
                    logger.info("staged construction: %s at t = %s", phi, w)
                    return ConstructionReport(
                        ConstructionStatus.REALIZED,
                        CoefficientWitness(_rational_assignment(free, value, w), True),
                        heights=(stage,),
                    )
            if report.divisor is None:
                continue
            for q in _lowest_factors(report.divisor):
                if _verify_all(phi, points, targets, Place(q)):
                    return ConstructionReport(
                        ConstructionStatus.REALIZED,
                        CoefficientWitness(_algebraic_assignment(free, value, q), True),
                        heights=(stage,),
                    )
    return None


def realize_chain(d: int, points, targets, construct_cap: Optional[int] = None) -> ConstructionReport:
    """
    Coefficients (a_(d-2), ..., a_0) realizing targets[i] at points[i].

    Stages run one point at a time; before a later point is specialized its
    canonical height over the partially fixed family must clear 1/d.
    Degree 4 and above is not searched.
    """
    points = [Rational(p) for p in points]
    targets = list(targets)
    if d < 2:
        raise PreconditionError("degree must be at least 2")
    if len(points) != d - 1 or len(targets) != d - 1:
        raise PreconditionError(f"degree {d} needs {d - 1} points and portraits")
    if len(set(points)) != len(points):
        raise PreconditionError("points must be distinct")
    if d == 2:
        report = realize_single(points[0], targets[0])
        if report.status != ConstructionStatus.REALIZED:
            return report
        return replace(report, heights=(next_point_height(map_from_expr(Z ** 2 + T), points[0]),))
    if d == 3:
        cap = construct_cap or get_settings().construct_cap
        size = 3 ** (targets[0].m + targets[0].n) * 3 ** (targets[1].m + targets[1].n)
        if size > cap:
            return ConstructionReport(ConstructionStatus.CAPPED, detail=f"{size} exceeds {cap}")
        if portrait_condition(points[0], targets[0]).total_degree() == 0:
            return ConstructionReport(ConstructionStatus.NOT_REALIZABLE, detail=f"{points[0]} never has portrait {targets[0]}")
        staged = _realize_cubic_staged(points, targets)
        if staged is not None:
            return staged
        return realize_pair_cubic(points[0], points[1], targets[0], targets[1], construct_cap)
    return ConstructionReport(ConstructionStatus.CAPPED, detail=f"degree {d} is beyond the supported range")
