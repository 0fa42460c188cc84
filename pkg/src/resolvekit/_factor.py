"""Factorization and gcd over Q via sympy, converted to and from Poly."""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

import sympy

from .exactalg import Poly


def _symbols(vars):
    return [sympy.Symbol("v%d" % i) for i in range(len(vars))]


def to_sympy(p: Poly, syms) -> sympy.Poly:
    terms = {e: sympy.Rational(c.numerator, c.denominator) for e, c in p.terms.items()}
    if not terms:
        return sympy.Poly(0, *syms, domain="QQ")
    return sympy.Poly.from_dict(terms, *syms, domain="QQ")


def from_sympy(q: sympy.Poly, vars, trunc=None) -> Poly:
    terms = {}
    for e, c in q.terms():
        c = sympy.Rational(c)
        terms[tuple(int(k) for k in e)] = Fraction(int(c.p), int(c.q))
    return Poly(vars, terms, trunc)


def factor(p: Poly) -> List[Tuple[Poly, int]]:
    """Irreducible factors over Q (the constant content is dropped)."""
    if p.is_zero() or p.is_constant():
        return []
    syms = _symbols(p.vars)
    q = to_sympy(p.reduce_nilpotent() if p.trunc else p, syms)
    _, facs = q.factor_list()
    return [(from_sympy(f, p.vars, p.trunc), int(k)) for f, k in facs]


def gcd(polys: Sequence[Poly]) -> Poly:
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        raise ValueError("gcd of nothing")
    vars = polys[0].vars
    syms = _symbols(vars)
    g = to_sympy(polys[0], syms)
    for p in polys[1:]:
        if g.is_ground:
            break
        g = g.gcd(to_sympy(p, syms))
    return from_sympy(g, vars)


def invert_mod(c: Poly, minpoly: Poly, var: str) -> Poly:
    """Inverse of ``c`` modulo the minimal polynomial; both univariate in ``var``."""
    syms = _symbols(c.vars)
    x = syms[c.vars.index(var)]
    a = to_sympy(c.reduce_nilpotent() if c.trunc else c, syms).as_expr()
    m = to_sympy(minpoly.embed(c.vars, None), syms).as_expr()
    inv = sympy.invert(a, m, x)
    return from_sympy(sympy.Poly(inv, *syms, domain="QQ"), c.vars, c.trunc)
