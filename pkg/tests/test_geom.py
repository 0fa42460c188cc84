from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from conftest import P, ideal, to_sym
from resolvekit.errors import InputError, NotPermissibleError
from resolvekit.exactalg import Poly
from resolvekit.geom import (GENERIC, ChartTree, Center, Divisor, MarkedChart, Truncate, blowup,
                             blowup_chart, change_coordinates, controlled_transform, divide,
                             drop_absent_divisors, extend_scalars, fiberize, localize,
                             proper_transform)
from resolvekit.idealkit import ideal_equal

XY = ("x", "y")
XYT = ("x", "y", "t")


def chart(gens, vars, b, **kw):
    return MarkedChart.make(ideal(gens, vars), b, **kw)


def test_cusp_blowup_charts():
    c = chart(["y^2-x^3"], XY, 2)
    cx, cy = blowup(c, XY)
    assert cx.I.gens == (P("y^2-x", XY),)
    assert cy.I.gens == (P("1-x^3*y", XY),)
    assert cx.E == (Divisor("x", 1, 1),)
    assert cx.a == ((1, 0),)
    assert cx.map_dict()["y"] == P("x*y", XY)
    assert cy.map_dict()["x"] == P("x*y", XY)
    assert cx.bookkeeping_ok() and cy.bookkeeping_ok()


def test_blowup_rejects_bad_centers():
    c = chart(["x^2+y^2*t"], XYT, 2, base=("t",))
    with pytest.raises(InputError):
        blowup(c, ("x",))
    with pytest.raises(InputError):
        blowup(c, ("x", "t"))
    with pytest.raises(InputError):
        blowup(c, ("x", "z"))
    with pytest.raises(InputError):
        blowup_chart(c, ("x", "y"), "t")
    # V(x,y) is not inside Sing of (x, 2)
    with pytest.raises(NotPermissibleError):
        blowup(chart(["x+y^3"], XY, 2), XY)


def test_chart_map_pulls_back_ideal():
    c = chart(["x^2*y^2+x^5-y^7"], XY, 2)
    for ch in blowup(c, XY):
        sub = ch.map_dict()
        pulled = c.I.gens[0].subs(sub)
        e = Poly.var(ch.E[-1].var, XY) ** c.b
        assert pulled == ch.I.gens[0] * e


def test_controlled_and_proper_transform():
    I = ideal(["x^3*y", "x^4"], XY)
    assert controlled_transform(I, 2, "x").gens == (P("x*y", XY), P("x^2", XY))
    Ib, a = proper_transform(I, "x")
    assert a == 3
    assert Ib.gens == (P("y", XY), P("x", XY))
    with pytest.raises(NotPermissibleError):
        controlled_transform(I, 4, "x")


def test_divide_hypersurface():
    c = chart(["x^3*y"], XY, 2, E=("x",))
    d = divide(c, "x")
    assert d.I.gens == (P("x*y", XY),)
    assert d.Ibar.gens == (P("y", XY),)
    assert d.a == ((1, 1),)
    assert d.E == (Divisor("x", 1, 2),)
    assert d.bookkeeping_ok()


def test_exceptional_exponents_accumulate():
    c = chart(["x^4*y^3"], XY, 2)
    cx = blowup_chart(c, XY, "x")          # x^7 y^3 / x^2
    assert cx.I.gens == (P("x^5*y^3", XY),)
    assert cx.Ibar.gens == (P("y^3", XY),)
    assert cx.a == ((1, 5),)
    cxy = blowup_chart(cx, XY, "y")        # (xy)^5 y^3 / y^2, old divisor x passes through
    assert cxy.a == ((1, 5), (2, 6))
    assert cxy.bookkeeping_ok()
    assert [d.var for d in cxy.E] == ["x", "y"]


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 3), st.integers(1, 3))
def test_bookkeeping_random_monomial_chains(i, j, k, b):
    g = "x^%d*y^%d*(x+y^%d)" % (i, j, k + 1)
    c = chart([g, "x^%d" % (i + j + 3)], XY, b)
    try:
        charts = blowup(c, XY)
    except NotPermissibleError:
        return
    for ch in charts:
        assert ch.bookkeeping_ok()
        I0 = c.I.like([g.subs(ch.map_dict()) for g in c.I.gens])
        e = Poly.var(ch.E[-1].var, XY) ** b
        assert ideal_equal(I0, ch.I.like([h * e for h in ch.I.gens]))


def test_change_coordinates():
    c = chart(["y^2-x^3"], XY, 2)
    moved = change_coordinates(c, "y", P("y+x", XY))
    assert sympy.expand(to_sym(moved.I.gens[0]) - (sympy.Symbol("y") + sympy.Symbol("x")) ** 2
                        + sympy.Symbol("x") ** 3) == 0
    assert moved.map_dict()["y"] == P("x+y", XY)
    with pytest.raises(InputError):
        change_coordinates(c, "y", P("y^2", XY))
    with pytest.raises(InputError):
        change_coordinates(c, "y", P("x*y", XY))
    with pytest.raises(InputError):
        change_coordinates(chart(["y^2-x^3"], XY, 2, E=("y",)), "y", P("y+x", XY))


def test_localize_and_drop_divisors():
    c = chart(["x^2*(1+y)"], XY, 2, E=("y",))
    loc = localize(c, [P("y", XY)])
    assert loc.I.units
    dropped = drop_absent_divisors(loc)
    assert dropped.E == ()
    assert drop_absent_divisors(c) is c


def test_extend_scalars():
    c = chart(["x^2-2*y^2"], XY, 2)
    e = extend_scalars(c, "r", Poly.parse("r^2-2", ("r",)))
    assert e.vars == ("x", "y", "r")
    assert e.I.contains(P("(x-r*y)*(x+r*y)", ("x", "y", "r")))
    with pytest.raises(InputError):
        extend_scalars(e, "q", Poly.parse("q^2-3", ("q",)))
    with pytest.raises(InputError):
        extend_scalars(c, "x", Poly.parse("x^2-3", ("x",)))


def test_fiberize_rational_generic_truncated():
    f = chart(["x^2*y^2+t*x^4"], XYT, 2, base=("t",))
    f0 = fiberize(f, 0)
    assert f0.vars == XY and f0.I.gens == (P("x^2*y^2", XY),)
    f1 = fiberize(f, Fraction(-1, 2))
    assert ideal_equal(f1.I, ideal(["2*x^2*y^2-x^4"], XY))
    fg = fiberize(f, GENERIC)
    assert fg.base == () and "t" in fg.I.params
    ft = fiberize(f, Truncate(1))
    assert ft.I.trunc == ("s", 1)
    assert "t" not in ft.derivation_vars
    ft1 = fiberize(f, Truncate(1, Fraction(1)))
    # t = 1 + s
    assert ft1.I.contains(ft1.I.poly(Poly.parse("x^2*y^2+x^4+s*x^4", ft1.vars)))
    with pytest.raises(InputError):
        fiberize(chart(["t*x"], XYT, 1, base=("t",)), 0)
    with pytest.raises(InputError):
        fiberize(chart(["x"], XYT, 1), 0)


def test_fiberize_commutes_with_blowup_san2():
    f = chart(["x^2*y^2+t*x^4"], XYT, 2, base=("t",))
    for v in XY:
        a = fiberize(blowup_chart(f, XY, v), 0)
        b = blowup_chart(fiberize(f, 0), XY, v)
        assert ideal_equal(a.I, b.I) and ideal_equal(a.Ibar, b.Ibar)
        assert a.E == b.E and a.a == b.a and a.chart_map == b.chart_map


def _tree():
    c = chart(["y^2-x^3"], XY, 2)
    tree = ChartTree()
    root = tree.add(c)
    root.center = Center("ct", XY)
    for ch in blowup(c, XY):
        tree.add(ch, parent=root.id, chart_var=ch.E[-1].var, kind="blowup", step=1)
    return tree


def test_tree_json_and_dot():
    tree = _tree()
    assert tree.depth() == 1
    assert [n.id for n in tree.leaves()] == [1, 2]
    doc = tree.to_json()
    assert doc["nodes"][0]["center"] == {"tag": "ct", "vars": ["x", "y"]}
    assert doc["nodes"][1]["chart"]["ideal"] == ["y^2 - x"]
    assert doc["nodes"][1]["chart"]["chart_map"] == {"x": "x", "y": "x*y"}
    dot = tree.to_dot()
    assert dot.startswith("digraph charts {")
    assert 'n0 -> n1 [label="ct x"];' in dot
    assert dot.count("->") == 2
