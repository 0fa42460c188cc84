from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import ideal, regime_violations
from resolvekit.errors import InputError, ResourceCapError
from resolvekit.geom import MarkedChart
from resolvekit.idealkit import delta, ideal_equal, monomial_exponents, same_locus
from resolvekit.resolver import (Bottom, Monomial, TPair, Top, descend, embedded_index, gamma,
                                 maximal_contact, nice_object, omega_max, path_values, principalize,
                                 resolve, resolve_embedded, resolved_leaves, t_max)

XY = ("x", "y")
XYT = ("x", "y", "t")


def chart(gens, vars, b, **kw):
    return MarkedChart.make(ideal(gens, vars), b, **kw)


fracs = st.fractions(min_value=0, max_value=4, max_denominator=4)


@st.composite
def values(draw, depth=2):
    kind = draw(st.sampled_from(["bottom", "top", "mono"] + (["t"] * 2 if depth else [])))
    if kind == "bottom":
        return Bottom()
    if kind == "top":
        return Top()
    if kind == "mono":
        idx = draw(st.lists(st.integers(1, 5), min_size=1, max_size=3, unique=True))
        return Monomial(len(idx), draw(fracs), sorted(idx))
    return TPair(draw(fracs), draw(st.integers(0, 2)), draw(values(depth=depth - 1)))


@given(values(), values(), values())
def test_value_order_is_total(a, b, c):
    assert (a < b) + (a == b) + (a > b) == 1
    assert (a <= b) == (not a > b)
    if a <= b and b <= c:
        assert a <= c


def test_value_order_examples():
    assert Bottom() < TPair(1, 0, Top()) < Top()
    assert TPair(1, 0, Bottom()) < TPair(1, 0, Top()) < TPair(1, 1, Bottom()) < TPair(2, 0, Bottom())
    # more divisors means a smaller monomial value
    assert Monomial(2, 2, (1, 2)) < Monomial(1, 1, (1,))
    assert Monomial(1, 1, (1,)) < Monomial(1, 2, (1,)) < Monomial(1, 2, (2,))
    assert str(TPair(Fraction(3, 2), 0, Top())) == "(3/2, 0, inf)"
    # a monomial tail outranks any t-pair tail of the same dimension
    assert TPair(1, 0, TPair(2, 0, Top())) < TPair(1, 0, Monomial(1, 1, (1,)))


def test_regime_violations_helper():
    a = TPair(1, 0, TPair(2, 0, Top()))
    b = TPair(1, 0, TPair(Fraction(3, 2), 0, Top()))
    m = TPair(1, 0, Monomial(1, 1, (1,)))
    assert regime_violations([[("t", a), ("t", b), ("t", m)]]) == []
    assert regime_violations([[("t", b), ("t", a)]])
    assert regime_violations([[("t", a), ("t", a)]])
    # top-level t must not grow across a t-regime
    assert regime_violations([[("t", b), ("t", TPair(2, 0, Monomial(1, 1, (1,))))]])


def test_omega_max():
    w, loc = omega_max(chart(["y^2-x^3"], XY, 2))
    assert w == 1 and same_locus(loc, ideal(["x", "y"], XY))
    w, loc = omega_max(chart(["x^2*y^2+t*x^4"], XYT, 2, base=("t",)))
    assert w == 2 and same_locus(loc, ideal(["x", "y"], XYT))
    w, loc = omega_max(chart(["x^2"], XY, 2))
    assert w == 1 and same_locus(loc, ideal(["x"], XY))
    with pytest.raises(InputError):
        omega_max(chart(["x+1"], XY, 2))


def test_t_max_and_gamma():
    (w, n), loc = t_max(chart(["y^2-x^3"], XY, 2))
    assert (w, n) == (1, 0) and same_locus(loc, ideal(["x", "y"], XY))
    val, center = gamma(chart(["x^2*y^3"], XY, 4, E=XY))
    assert (val.p, val.total, val.indices) == (2, Fraction(5, 4), (1, 2))
    assert center == XY
    # alpha(x) = 3/2 alone reaches 1
    val, center = gamma(chart(["x^3*y"], XY, 2, E=XY))
    assert val.p == 1 and center == ("x",)
    with pytest.raises(InputError):
        gamma(chart(["x^2+y^3"], XY, 2, E=XY))


def test_nice_object_and_descent_of_cusp():
    nice = nice_object(chart(["y^2-x^3"], XY, 2))
    assert nice.b == 2 and nice.nbar == 0
    assert same_locus(nice.locus, ideal(["x", "y"], XY))
    assert same_locus(delta(nice.ideal, nice.b - 1), nice.locus)
    z, image = maximal_contact(nice)
    assert (z, image) == ("y", None)
    low = descend(nice)
    assert low.vars == ("x",)
    assert ideal_equal(low.I, ideal(["x^3"], ("x",))) and low.b == 2


@pytest.mark.parametrize("gen,vars,depth", [
    ("y^2-x^3", XY, 1),
    ("y^2-x^4", XY, 2),
    ("x^2-y^2*z", ("x", "y", "z"), 3),
])
def test_resolve_plane_and_surface_singularities(gen, vars, depth):
    tree = resolve(chart([gen], vars, 2))
    assert resolved_leaves(tree)
    assert tree.depth() == depth
    for leaf in tree.leaves():
        assert delta(leaf.chart.I, 1).is_trivial()
        assert leaf.chart.bookkeeping_ok()
    assert regime_violations(path_values(tree)) == []
    assert tree.checked.get("descent", 0) >= 1


def test_resolve_cusp_values():
    tree = resolve(chart(["y^2-x^3"], XY, 2))
    assert str(tree.root.value) == "(1, 0, 3/2, 0, inf)"
    assert tree.root.regime == "t-inductive"


def test_resolve_respects_step_cap():
    with pytest.raises(ResourceCapError) as info:
        resolve(chart(["x^2-y^2*z"], ("x", "y", "z"), 2), max_steps=1)
    assert info.value.step == 1
    assert not resolved_leaves(info.value.tree)


@pytest.mark.parametrize("gen,E", [("x^2*y", XY), ("x^2+y^2", ())])
def test_principalize_leaves_are_monomial(gen, E):
    tree = principalize(chart([gen], XY, 1, E=E))
    for leaf in tree.leaves():
        assert leaf.status == "stopped" and leaf.note == "monomial"
        assert monomial_exponents(leaf.chart.I, leaf.chart.divisor_vars) is not None
        w, _ = omega_max(leaf.chart)
        assert w == 0


@pytest.mark.parametrize("gen,vars,eta", [
    ("y^2-x^3", XY, 3),
    ("x", XY, 0),
    ("x^2-y^2", ("x", "y", "z"), 2),
])
def test_embedded_index(gen, vars, eta):
    tree = resolve_embedded(ideal([gen], vars))
    assert embedded_index(tree) == eta


def test_embedded_needs_hypersurface():
    with pytest.raises(InputError):
        resolve_embedded(ideal(["x", "y"], XY))
    with pytest.raises(InputError):
        embedded_index(resolve(chart(["y^2-x^3"], XY, 2)))
