# portrait_engine/witness.py
"""
Places realizing a prescribed portrait.

For alpha in P^1(K) and a target (m, n), the finite places where
phi^(m+n)(alpha) and phi^m(alpha) reduce to the same point are the roots of a
cross-difference polynomial in t. Removing the roots shared with the
wrong-period, wrong-preperiod, bad-reduction and user-excluded polynomials
leaves exactly the places where alpha has portrait (m, n).
"""
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Callable, Optional

import sympy
from sympy import Poly, Rational

from portrait_engine.dynatomic import (
    has_nonconstant_portrait_point,
    is_isotrivial_normal_form,
    x_set,
    y_set,
)
from portrait_engine.dynmap import (
    IterationContext,
    PlaceSet,
    Portrait,
    ProjPointK,
    RationalMap,
    bad_reduction_divisor,
    global_portrait,
    has_good_reduction,
    iterate_point,
    portrait_mod_place,
)
from portrait_engine.errors import (
    NotNormalFormError,
    PreconditionError,
    ResourceLimitError,
    WHypothesisError,
)
from portrait_engine.exactalg import (
    T,
    format_poly,
    rational_height,
    rational_roots,
    squarefree_part,
    strip_common_roots,
    tpoly,
)
from portrait_engine.places import INFINITY, Place

logger = logging.getLogger(__name__)

GENERIC_SAMPLE_RANGE = 12
GENERIC_SAMPLE_COUNT = 5


class WitnessStatus(str, Enum):
    REALIZABLE = "Realizable"
    NOT_REALIZABLE = "NotRealizableByFinitePlaces"
    CAPPED = "Capped"


@dataclass(frozen=True)
class WitnessReport:
    requested: Portrait
    # None when capped, or in the generic branch where exceptional_divisor applies
    divisor: Optional[Poly]
    rational_witnesses: tuple = ()
    infinity_is_witness: bool = False
    status: WitnessStatus = WitnessStatus.NOT_REALIZABLE
    generic: bool = False
    exceptional_divisor: Optional[Poly] = None
    detail: str = ""

    @property
    def sample_witness(self) -> Optional[str]:
        if self.rational_witnesses:
            return str(self.rational_witnesses[0])
        if self.infinity_is_witness:
            return "inf"
        return None

    def to_dict(self) -> dict:
        data = {
            "requested": self.requested.to_list(),
            "divisor": None if self.divisor is None else format_poly(self.divisor),
            "rational_witnesses": [str(c) for c in self.rational_witnesses],
            "infinity_is_witness": self.infinity_is_witness,
            "status": self.status.value,
        }
        if self.generic:
            data["generic"] = True
            data["exceptional_divisor"] = format_poly(self.exceptional_divisor)
        if self.detail:
            data["detail"] = self.detail
        return data


def cross_difference(phi: RationalMap, alpha: ProjPointK, m: int, n: int, ctx: Optional[IterationContext] = None) -> Poly:
    """Monic squarefree A_(m+n) B_m - A_m B_(m+n); zero when phi^(m+n)(alpha) = phi^m(alpha)."""
    ctx = ctx or IterationContext()
    later = iterate_point(phi, alpha, m + n, ctx)
    earlier = iterate_point(phi, alpha, m, ctx)
    value = later.x * earlier.y - earlier.x * later.y
    if value.is_zero:
        return value
    return squarefree_part(value)


def exclusion_polynomials(phi: RationalMap, alpha: ProjPointK, target: Portrait, places: PlaceSet, ctx: IterationContext) -> list:
    m, n = target.m, target.n
    exclusions = [cross_difference(phi, alpha, m, n // ell, ctx) for ell in sympy.primefactors(n)]
    if m >= 1:
        exclusions.append(cross_difference(phi, alpha, m - 1, n, ctx))
    exclusions.append(bad_reduction_divisor(phi).finite_part)
    exclusions.append(places.finite_part)
    return exclusions


def _verify(phi, alpha, target, place) -> bool:
    return portrait_mod_place(phi, alpha, place, target.m + target.n + 1) == target


def _infinity_witness(phi, alpha, target, places) -> bool:
    if places.include_infinity or not has_good_reduction(phi, INFINITY):
        return False
    return _verify(phi, alpha, target, INFINITY)


def _witness_order(c):
    return rational_height(c), c


def _generic_report(phi, alpha, target, places, exclusions) -> WitnessReport:
    exceptional = squarefree_part(reduce(lambda a, b: a * b, exclusions, tpoly(1)))
    witnesses = []
    candidates = sorted((Rational(c) for c in range(-GENERIC_SAMPLE_RANGE, GENERIC_SAMPLE_RANGE + 1)), key=_witness_order)
    for c in candidates:
        if len(witnesses) == GENERIC_SAMPLE_COUNT:
            break
        if exceptional.eval(c) == 0:
            continue
        if _verify(phi, alpha, target, Place.finite(T - c)):
            witnesses.append(c)
    return WitnessReport(
        requested=target,
        divisor=None,
        rational_witnesses=tuple(witnesses),
        infinity_is_witness=_infinity_witness(phi, alpha, target, places),
        status=WitnessStatus.REALIZABLE,
        generic=True,
        exceptional_divisor=exceptional,
        detail="alpha has this portrait over K; every good place off the exceptional divisor realizes it",
    )


def find_witness(
    phi: RationalMap,
    alpha: ProjPointK,
    target: Portrait,
    places: Optional[PlaceSet] = None,
    ctx: Optional[IterationContext] = None,
) -> WitnessReport:
    ctx = ctx or IterationContext()
    places = places or PlaceSet()
    m, n = target.m, target.n
    try:
        ctx.check(phi.degree, m + n)
        cross = cross_difference(phi, alpha, m, n, ctx)
        exclusions = exclusion_polynomials(phi, alpha, target, places, ctx)
    except ResourceLimitError as e:
        logger.debug("cell %s capped: %s", target, e)
        return WitnessReport(target, None, status=WitnessStatus.CAPPED, detail=str(e))

    if cross.is_zero:
        if global_portrait(phi, alpha, m + n, ctx) == target:
            return _generic_report(phi, alpha, target, places, exclusions)
        return WitnessReport(target, tpoly(1), detail="alpha is preperiodic over K with a different portrait")

    divisor = cross
    for poly in exclusions:
        divisor = strip_common_roots(divisor, poly)

    witnesses = []
    for c in sorted(rational_roots(divisor), key=_witness_order):
        if _verify(phi, alpha, target, Place.finite(T - c)):
            witnesses.append(c)
        else:
            logger.warning("witness %s for %s failed re-verification and was dropped", c, target)
    at_infinity = _infinity_witness(phi, alpha, target, places)
    realizable = divisor.degree() >= 1 or at_infinity
    return WitnessReport(
        requested=target,
        divisor=divisor,
        rational_witnesses=tuple(witnesses),
        infinity_is_witness=at_infinity,
        status=WitnessStatus.REALIZABLE if realizable else WitnessStatus.NOT_REALIZABLE,
    )


@dataclass(frozen=True)
class GridCell:
    m: int
    n: int
    report: WitnessReport
    in_y_set: Optional[bool] = None
    in_x_set: Optional[bool] = None

    @property
    def annotations(self) -> list:
        notes = []
        if self.in_y_set:
            notes.append("m in Y(phi,alpha)")
        if self.in_x_set:
            notes.append("n in X(phi)")
        return notes

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "status": self.report.status.value,
            "witness": self.report.sample_witness,
            "annotations": self.annotations,
            "report": self.report.to_dict(),
        }


@dataclass(frozen=True)
class GridReport:
    max_m: int
    max_n: int
    cells: tuple
    x_set: Optional[frozenset] = None
    y_set: Optional[frozenset] = None

    def cell(self, m: int, n: int) -> GridCell:
        return self.cells[m * self.max_n + (n - 1)]

    @property
    def rows(self) -> list:
        return [[self.cell(m, n) for n in range(1, self.max_n + 1)] for m in range(self.max_m + 1)]

    def to_dict(self) -> dict:
        return {
            "max_m": self.max_m,
            "max_n": self.max_n,
            "x_set": None if self.x_set is None else sorted(self.x_set),
            "y_set": None if self.y_set is None else sorted(self.y_set),
            "cells": [c.to_dict() for c in self.cells],
        }


def _annotation_sets(phi, alpha, max_m, max_n, cap):
    try:
        xs = frozenset(x_set(phi, max_n, IterationContext(cap)))
    except ResourceLimitError:
        xs = None
    try:
        ys = frozenset(y_set(phi, alpha, max_m, IterationContext(cap))) if max_m >= 1 else frozenset()
    except ResourceLimitError:
        ys = None
    return xs, ys


def portrait_grid(
    phi: RationalMap,
    alpha: ProjPointK,
    max_m: int,
    max_n: int,
    places: Optional[PlaceSet] = None,
    degree_cap: Optional[int] = None,
    workers: int = 1,
    progress: Optional[Callable[[GridCell], None]] = None,
) -> GridReport:
    """find_witness on every (m, n) with m <= max_m, 1 <= n <= max_n, row-major; (max_m + 1) * max_n cells."""
    if max_m < 0 or max_n < 1:
        raise PreconditionError("grid needs max_m >= 0 and max_n >= 1")
    places = places or PlaceSet()
    cap = IterationContext(degree_cap).degree_cap
    targets = [Portrait(m, n) for m in range(max_m + 1) for n in range(1, max_n + 1)]
    xs, ys = _annotation_sets(phi, alpha, max_m, max_n, cap)
    logger.info("grid %dx%d for %s at %s", max_m + 1, max_n, phi, alpha)

    def annotate(target, report):
        cell = GridCell(
            target.m,
            target.n,
            report,
            None if ys is None else target.m in ys,
            None if xs is None else target.n in xs,
        )
        if progress is not None:
            progress(cell)
        return cell

    cells = [None] * len(targets)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(find_witness, phi, alpha, target, places, IterationContext(cap)): index
                for index, target in enumerate(targets)
            }
            for future in as_completed(futures):
                index = futures[future]
                cells[index] = annotate(targets[index], future.result())
    else:
        ctx = IterationContext(cap)
        for index, target in enumerate(targets):
            cells[index] = annotate(target, find_witness(phi, alpha, target, places, ctx))
    logger.info("grid finished: %d realizable of %d", sum(c.report.status == WitnessStatus.REALIZABLE for c in cells), len(cells))
    return GridReport(max_m, max_n, tuple(cells), xs, ys)


@dataclass(frozen=True)
class SweepReport:
    target: Portrait
    entries: tuple = field(default_factory=tuple)

    @property
    def failing(self) -> list:
        return [c for c, report in self.entries if report.status != WitnessStatus.REALIZABLE]

    def to_dict(self) -> dict:
        return {
            "requested": self.target.to_list(),
            "candidates": [{"alpha": str(c), "report": report.to_dict()} for c, report in self.entries],
            "failing": [str(c) for c in self.failing],
        }


def starting_point_sweep(
    phi: RationalMap,
    target: Portrait,
    places: Optional[PlaceSet],
    candidates,
    ctx: Optional[IterationContext] = None,
) -> SweepReport:
    """find_witness over constant starting points; requires (m, n) outside W(phi)."""
    ctx = ctx or IterationContext()
    try:
        if is_isotrivial_normal_form(phi):
            raise PreconditionError(f"{phi} is isotrivial")
    except NotNormalFormError:
        pass
    if target.n in x_set(phi, target.n, ctx) or not has_nonconstant_portrait_point(phi, target.m, target.n, ctx):
        raise WHypothesisError(f"{target} lies in W(phi): no point of this portrait moves with t")
    entries = []
    for c in candidates:
        alpha = ProjPointK.of(Rational(c))
        entries.append((Rational(c), find_witness(phi, alpha, target, places, ctx)))
    return SweepReport(target, tuple(entries))
