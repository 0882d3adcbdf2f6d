# portrait_engine/exactalg.py
"""
Exact polynomial primitives over Q, Q(t) and residue number fields.

Univariate polynomials are sympy ``Poly`` objects over ``QQ``. Polynomials in z
over K = Q(t) are kept in primitive bivariate form: a ``Poly`` in (z, t) over
``QQ`` whose coefficients, read as polynomials in t, have no common factor.
The ``k_*`` helpers work on that representation; everything else treats its
argument as a polynomial over Q in all of its generators.

Sign convention for resultants: Res(a, b) = det Syl(a, b) with the rows of a
first. Only vanishing and t-degree of resultants are used downstream.
"""
from fractions import Fraction
from functools import reduce

import sympy
from sympy import Matrix, Poly, QQ, Rational, Symbol

from portrait_engine.errors import DegenerateInputError

T = Symbol("t")
Z = Symbol("z")

BigRational = Rational


def tpoly(expr) -> Poly:
    """Polynomial in t over Q."""
    if isinstance(expr, Poly):
        expr = expr.as_expr()
    return Poly(expr, T, domain=QQ)


def kpoly(expr) -> Poly:
    """Polynomial in z with coefficients in Q[t] (bivariate representation)."""
    if isinstance(expr, Poly):
        expr = expr.as_expr()
    return Poly(expr, Z, T, domain=QQ)


def lift(p: Poly, gens) -> Poly:
    return Poly(p.as_expr(), *gens, domain=QQ)


def rational_height(r) -> int:
    r = Rational(r)
    return max(abs(int(r.p)), int(r.q))


def poly_gcd(a: Poly, b: Poly) -> Poly:
    if a.is_zero and b.is_zero:
        raise DegenerateInputError("gcd of two zero polynomials")
    return a.gcd(b).monic()


def resultant(a: Poly, b: Poly):
    if a.is_zero or b.is_zero:
        raise DegenerateInputError("resultant with the zero polynomial")
    return a.resultant(b)


def squarefree_part(p: Poly) -> Poly:
    if p.is_zero:
        raise DegenerateInputError("squarefree part of the zero polynomial")
    return p.sqf_part().monic()


def strip_common_roots(h: Poly, x: Poly) -> Poly:
    """
    Remove from h every factor that shares a root with x.

    A zero x shares every root, so the result is then 1.
    """
    if h.is_zero:
        raise DegenerateInputError("cannot strip roots from the zero polynomial")
    g = poly_gcd(h, x)
    while g.total_degree() > 0:
        h = h.exquo(g)
        g = poly_gcd(h, g)
    return h.monic()


def rational_roots(p: Poly) -> tuple:
    """
    Rational roots of a univariate polynomial over Q, ascending.

    Every rational root a/b of the primitive integer model has b dividing its
    leading coefficient L, so distinct candidates are at least 1/L^2 apart.
    Real roots are isolated exactly, refined below that gap, and the unique
    fraction with denominator <= L nearest to each interval is tested.
    """
    if p.is_zero:
        raise DegenerateInputError("rational roots of the zero polynomial")
    p = squarefree_part(p)
    if p.degree() <= 0:
        return ()
    if p.degree() == 1:
        return (-p.nth(0) / p.nth(1),)
    _, integral = p.clear_denoms(convert=True)
    _, integral = integral.primitive()
    bound = abs(int(integral.LC()))
    eps = Rational(1, 4 * bound * bound)
    roots = []
    for lo, hi in p.intervals(eps=eps, sqf=True):
        mid = (Rational(lo) + Rational(hi)) / 2
        nearest = Fraction(int(mid.p), int(mid.q)).limit_denominator(bound)
        candidate = Rational(nearest.numerator, nearest.denominator)
        if lo <= candidate <= hi and p.eval(candidate) == 0:
            roots.append(candidate)
    return tuple(sorted(roots))


def derivative(p: Poly, gen=None) -> Poly:
    return p.diff(gen or p.gens[0])


def z_slices(p: Poly) -> dict:
    """{i: coefficient of z^i as a polynomial in t} for a (z, t) polynomial."""
    grouped = {}
    for (i, j), c in p.terms():
        grouped.setdefault(i, {})[(j,)] = c
    return {i: Poly.from_dict(terms, T, domain=QQ) for i, terms in grouped.items()}


def t_slices(p: Poly) -> dict:
    """{j: coefficient of t^j as a polynomial in z} for a (z, t) polynomial."""
    grouped = {}
    for (i, j), c in p.terms():
        grouped.setdefault(j, {})[(i,)] = c
    return {j: Poly.from_dict(terms, Z, domain=QQ) for j, terms in grouped.items()}


def z_content(p: Poly) -> Poly:
    if p.is_zero:
        return tpoly(0)
    return reduce(poly_gcd, z_slices(p).values())


def k_normalize(p: Poly) -> Poly:
    """Primitive over Q[t], leading z-coefficient with leading t-coefficient 1."""
    p = kpoly(p)
    if p.is_zero:
        return p
    content = z_content(p)
    if content.degree() > 0:
        p = p.exquo(kpoly(content))
    slices = z_slices(p)
    lead = slices[max(slices)]
    return p.quo_ground(lead.LC())


def k_gcd(a: Poly, b: Poly) -> Poly:
    a, b = kpoly(a), kpoly(b)
    if a.is_zero and b.is_zero:
        raise DegenerateInputError("gcd of two zero polynomials")
    return k_normalize(a.gcd(b))


def k_squarefree_part(p: Poly) -> Poly:
    p = kpoly(p)
    if p.is_zero:
        raise DegenerateInputError("squarefree part of the zero polynomial")
    return k_normalize(p.sqf_part())


def k_strip_common_roots(h: Poly, x: Poly) -> Poly:
    h, x = k_normalize(h), k_normalize(x)
    if h.is_zero:
        raise DegenerateInputError("cannot strip roots from the zero polynomial")
    g = k_gcd(h, x)
    while g.degree(Z) > 0:
        h = k_normalize(h.exquo(g))
        g = k_gcd(h, g)
    return h


def k_divides(a: Poly, b: Poly) -> bool:
    """True when a divides b in K[z]."""
    b = kpoly(b)
    if b.is_zero:
        return True
    return k_gcd(a, b) == k_normalize(a)


def k_degree(p: Poly) -> int:
    p = kpoly(p)
    return -1 if p.is_zero else p.degree(Z)


def form_resultant(f, g) -> Poly:
    """
    Resultant of two binary forms of degree d over Q[t].

    ``f`` and ``g`` are coefficient sequences with index i holding the
    coefficient of X^i Y^(d-i).
    """
    if len(f) != len(g):
        raise DegenerateInputError("forms of different degree")
    d = len(f) - 1
    rows = []
    for coeffs in (f, g):
        ordered = [tpoly(c).as_expr() for c in reversed(coeffs)]
        for shift in range(d):
            rows.append([0] * shift + ordered + [0] * (d - 1 - shift))
    if not rows:
        return tpoly(1)
    return tpoly(sympy.expand(Matrix(rows).det(method="bareiss")))


def format_expr(expr) -> str:
    if isinstance(expr, Poly):
        expr = expr.as_expr()
    return str(expr).replace("**", "^").replace(" ", "")


format_poly = format_expr


def format_ratio(expr) -> str:
    """A rational function as "(num)/(den)", never with negative exponents."""
    num, den = sympy.fraction(sympy.cancel(expr))
    if den == 1:
        return format_expr(num)
    return f"({format_expr(num)})/({format_expr(den)})"
