import pytest
from hypothesis import given, strategies as st

from resolvekit import _pykernel as py
from resolvekit.errors import ResourceCapError
from resolvekit.idealkit import MonomialOrder

ck = pytest.importorskip("resolvekit._ckernel")

N = 3
exps = st.tuples(*[st.integers(0, 3)] * N)
terms = st.dictionaries(exps, st.integers(-5, 5).filter(bool), max_size=5)
KEY = MonomialOrder("degrevlex", N).nkey


@given(terms, terms, st.sampled_from([1, -1]))
def test_add_mul_parity(a, b, sign):
    assert ck.add_terms(a, b, sign) == py.add_terms(a, b, sign)
    assert ck.mul_terms(a, b) == py.mul_terms(a, b)
    assert ck.mul_terms(a, b, 0, 2) == py.mul_terms(a, b, 0, 2)


@given(exps, exps)
def test_exponent_helpers(a, b):
    assert ck.divides(a, b) == py.divides(a, b)
    assert ck.lcm_exp(a, b) == py.lcm_exp(a, b)


@given(terms.filter(bool))
def test_content_primitive(a):
    lead = min(a, key=KEY)
    assert ck.content(a) == py.content(a)
    assert ck.primitive(a, lead) == py.primitive(a, lead)


@given(st.lists(terms.filter(bool), min_size=1, max_size=3), terms.filter(bool))
def test_groebner_and_reduction_parity(polys, f):
    gb_c = ck.buchberger_int(polys, KEY)
    gb_p = py.buchberger_int(polys, KEY)
    assert gb_c == gb_p
    basis = []
    for g in gb_p:
        lead = min(g, key=KEY)
        basis.append((lead, g[lead], g))
    assert ck.reduce_int(f, basis, KEY) == py.reduce_int(f, basis, KEY)


def test_counter_cap():
    polys = [{(2, 0, 0): 1, (0, 1, 1): -1}, {(0, 2, 0): 1, (1, 0, 1): -1},
             {(0, 0, 2): 1, (1, 1, 0): -1}]
    for mod in (ck, py):
        with pytest.raises(ResourceCapError):
            mod.buchberger_int(polys, KEY, cap=1)
