import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import P, ideal, to_sym
from resolvekit.errors import InputError, ResourceCapError
from resolvekit.exactalg import Poly
from resolvekit.idealkit import (Ideal, MonomialOrder, coefficient_ideal, delta, eliminate,
                                 get_reduction_cap, homogenize, ideal_equal, max_order, member,
                                 monomial_exponents, normal_form, quotient, radical_member,
                                 restrict_to_hyperplane, same_locus, set_reduction_cap,
                                 sing_locus)

V = ("x", "y", "z")
exps = st.tuples(*[st.integers(0, 3)] * 3)
small = st.dictionaries(exps, st.integers(-3, 3).filter(bool), min_size=1, max_size=3)
polys = small.map(lambda d: Poly(V, d))


def sym_gb(I: Ideal):
    syms = sympy.symbols(I.vars)
    return sympy.groebner([to_sym(g) for g in I.gens], *syms, order="grevlex", domain="QQ")


@given(st.lists(polys, min_size=1, max_size=3), polys, polys)
def test_membership_against_sympy(gens, a, f):
    I = Ideal(gens, V)
    G = sym_gb(I)
    inside = gens[0] * a
    assert member(inside, I)
    assert member(f, I) == G.contains(to_sym(f))


@given(st.lists(polys, min_size=1, max_size=3))
def test_groebner_matches_sympy(gens):
    I = Ideal(gens, V)
    ours = I.groebner(MonomialOrder("degrevlex", 3))
    G = sym_gb(I)
    assert len(ours) == len(G.exprs)
    for g in ours:
        assert G.contains(to_sym(g))
    Jo = Ideal(list(ours), V)
    assert ideal_equal(I, Jo)


def test_triviality_and_units():
    assert ideal(["x", "x - 1"], V).is_trivial()
    assert not ideal(["x*y"], V).is_trivial()
    I = Ideal([P("x*y", V)], V, units=[P("x", V)])
    assert member(P("y", V), I)          # x is inverted
    assert not ideal(["x^2 + y^2"], V).is_trivial()


def test_radical_membership():
    I = ideal(["x^2", "y^3"], V)
    assert radical_member(P("x + y", V), I)
    assert not member(P("x + y", V), I)
    assert not radical_member(P("z", V), I)
    assert same_locus(I, ideal(["x", "y"], V))


def test_parameters_are_coefficients():
    I = Ideal([P("t*x", ("x", "t"))], ("x", "t"), params={"t"})
    assert member(P("x", ("x", "t")), I)     # t is a unit of Q(t)
    assert I.fiber_vars() == ("x",)


def test_delta_and_sing():
    I = ideal(["x^2 + y^3"], V)
    assert ideal_equal(delta(I, 1), ideal(["x", "y^2"], V))
    assert ideal_equal(sing_locus(I, 2), ideal(["x", "y^2"], V))
    assert delta(I, 2).is_trivial()
    assert ideal_equal(delta(I, 1, ["x"]), ideal(["x", "y^3"], V))
    with pytest.raises(InputError):
        sing_locus(I, 0)


def test_max_order():
    assert max_order(ideal(["x^2 + y^3"], V)) == 2
    assert max_order(ideal(["x^3*y + z^5"], V)) == 4
    assert max_order(ideal(["1"], V)) == 0
    assert max_order(ideal(["1 + x"], V)) == 1      # order one along x = -1
    m = ideal(["x - 1", "y", "z"], V)
    assert max_order(ideal(["(x-1)^3 + y^4"], V), within=m) == 3


def _taylor_order(f: Poly, point) -> int:
    syms = sympy.symbols(f.vars)
    shifted = sympy.expand(to_sym(f).subs({s: s + p for s, p in zip(syms, point)},
                                          simultaneous=True))
    if shifted == 0:
        return 10 ** 6
    return min(sum(m) for m in sympy.Poly(shifted, *syms).monoms())


@given(st.lists(polys, min_size=1, max_size=2),
       st.tuples(*[st.sampled_from([0, 1, -1, Fraction(1, 2)])] * 3))
def test_max_order_matches_taylor(gens, point):
    I = Ideal(gens, V)
    m = Ideal([Poly.var(v, V) - c for v, c in zip(V, point)], V)
    oracle = min(_taylor_order(g, point) for g in I.gens)
    assert max_order(I, within=m) == oracle


def test_eliminate_against_sympy():
    I = ideal(["x - y^2", "z - y^3"], V)
    E = eliminate(I, ["y"])
    assert E.vars == ("x", "z")
    assert ideal_equal(E, ideal(["x^3 - z^2"], ("x", "z")))


def test_homogenize_keeps_delta():
    I = ideal(["x^2 + y^5", "x*y^3"], V)
    for b in (1, 2, 3):
        assert ideal_equal(delta(I, b - 1), delta(homogenize(I, b), b - 1))


def test_coefficient_ideal_cusp():
    I = ideal(["x^2 + y^3"], ("x", "y"))
    C = coefficient_ideal(I, 2)
    assert C.b == 2
    assert ideal_equal(C.ideal, ideal(["x^2", "x*y^2", "y^3"], ("x", "y")))
    R = restrict_to_hyperplane(C.ideal, "x")
    assert R.vars == ("y",) and ideal_equal(R, ideal(["y^3"], ("y",)))


def test_monomial_exponents():
    assert monomial_exponents(ideal(["x^2*y"], V), ["x", "y"]) == (2, 1)
    assert monomial_exponents(ideal(["x^2*y", "x^3"], V), ["x", "y"]) is None
    I = Ideal([P("x^2*y*(1+z)", V)], V, units=[P("1+z", V)])
    assert monomial_exponents(I, ["x", "y"]) == (2, 1)


def test_normal_form_is_remainder():
    I = ideal(["x^2 - y"], V)
    assert normal_form(P("x^3", V), I, "lex") == P("x*y", V)


def test_reduction_cap():
    old = get_reduction_cap()
    try:
        set_reduction_cap(3)
        gens = ["x^3 - y*z", "y^3 - x*z", "z^3 - x*y", "x*y*z - 1"]
        with pytest.raises(ResourceCapError):
            ideal(gens, V).groebner()
    finally:
        set_reduction_cap(old)


def test_ideal_equal_mixed_presentations():
    a = ideal(["x*y", "x*z"], V)
    b = ideal(["x*(y + z)", "x*(y - z)"], V)
    assert ideal_equal(a, b)
    assert not ideal_equal(a, ideal(["x"], V))


def test_quotient():
    XY = ("x", "y")
    assert ideal_equal(quotient(ideal(["x^2", "x*y"], XY), P("x", XY)), ideal(["x", "y"], XY))
    assert quotient(ideal(["x"], XY), P("x*y", XY)).is_trivial()
    V = ("x", "y", "s")
    I = Ideal([Poly.parse("x", V, ("s", 1))], V, trunc=("s", 1))
    Q = quotient(I, Poly.parse("y*s", V, ("s", 1)))
    assert ideal_equal(Q, I.like([Poly.parse("x", V, ("s", 1)), Poly.parse("s", V, ("s", 1))]))
    loc = ideal(["x^2*(1+y)"], XY, units=[P("1+y", XY)])
    assert ideal_equal(quotient(loc, P("x", XY)), loc.like([P("x", XY)]))


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=3),
       st.integers(0, 2), st.integers(0, 2))
def test_quotient_monomial_ideals(gens, i, j):
    # for monomial ideals the quotient by x^i y^j is generated by the shifted exponents
    XY = ("x", "y")
    I = ideal(["x^%d*y^%d" % g for g in gens], XY)
    Q = quotient(I, P("x^%d*y^%d" % (i, j), XY))
    want = ideal(["x^%d*y^%d" % (max(a - i, 0), max(b - j, 0)) for a, b in gens], XY)
    assert ideal_equal(Q, want)
