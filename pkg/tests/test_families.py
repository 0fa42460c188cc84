from fractions import Fraction

import pytest

from conftest import ideal
from resolvekit.errors import InputError, NotPermissibleError
from resolvekit.families import (CONDITIONS, GENERIC, ConditionReport, FamilyObject, TauValue,
                                 check_A, check_C, check_E, check_F, check_R, check_tau,
                                 family_transform_sequence, parse_sample, run_conditions, tau,
                                 transform_length)
from resolvekit.idealkit import sing_locus

XYT = ("x", "y", "t")

FIXTURES = {
    "san1": (["x^2+t*y^2"], XYT, 2),
    "san2": (["x^2*y^2+t*x^4"], XYT, 2),
    "cusp": (["y^2-x^3"], XYT, 2),
    "tcusp": (["x^2+(y+t)^3"], XYT, 2),
    "bad": (["x^2-y^2"], XYT, 2),
    "vr": (["t*x+x^3"], ("x", "t"), 3),
}

# name -> verdict and failing step for R, A, F, C, tau, E
EXPECTED = {
    "san1": {c: ("fails", 0) for c in CONDITIONS},
    "san2": {"R": ("fails", 0), "A": ("fails", 0), "F": ("fails", 1), "C": ("fails", 1),
             "tau": ("fails", 1), "E": ("fails", 1)},
    "cusp": {c: ("holds", None) for c in CONDITIONS},
    "tcusp": {c: ("holds", None) for c in CONDITIONS},
    "bad": {c: ("holds", None) for c in CONDITIONS},
    "vr": {c: ("fails", 0) for c in CONDITIONS},
}


def family(name, **kw):
    gens, vars, b = FIXTURES[name]
    return FamilyObject.make(ideal(gens, vars), b, **kw)


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixture_verdicts(name):
    reports = run_conditions(family(name))
    got = {r.name: (r.verdict, r.step) for r in reports}
    assert got == EXPECTED[name]
    for r in reports:
        if r.fails:
            assert r.witness
        doc = r.to_json()
        assert doc["condition"] == r.name and doc["verdict"] == r.verdict


def test_individual_checkers_match_run_conditions():
    F = family("san2")
    assert check_R(F).fails and check_A(F).fails
    assert check_F(F).step == 1 and check_C(F).step == 1
    assert check_tau(F).step == 1
    assert check_E(F, 0, 1).step == 1
    assert check_E(F, 1, 1).holds and check_E(F, -1, 2).holds


def test_vr_witness_shows_empty_absolute_locus():
    r = check_R(family("vr"))
    assert r.witness["absolute_sing"] == "(1)"
    assert r.witness["relative_sing"] == "(x, t)"


def test_san1_loci():
    F = family("san1")
    Sing = sing_locus(F.root.I, 2)
    assert all(Sing.radical_contains(g) for g in ideal(["x", "y"], XYT).gens)
    assert all(ideal(["x", "y"], XYT).radical_contains(g) for g in Sing.gens)
    S0 = sing_locus(F.fiber(0).I, 2)
    assert S0.radical_contains(S0.poly("x")) and ideal(["x"], ("x", "y")).radical_contains(
        S0.gens[0]) and not S0.radical_contains(S0.poly("y"))


def test_tau_values():
    F = family("cusp")
    values = {tau(F, s) for s in F.samples}
    assert len(values) == 1
    v = tau(F, 0)
    assert v.values == (("1", "0", "3/2", "0", "inf"),) and v.counts == (1,)
    assert str(v) == "((1, 0, 3/2, 0, inf), 1, inf, inf, ...)"
    s = family("san2")
    a, g = tau(s, 0), tau(s, GENERIC)
    assert a != g and a.first_difference(g) == 1
    assert TauValue((("1",),), (1,)) == TauValue((("1",),), (1,), (2,), True)


def test_tau_note_on_full_affine_space():
    r = check_tau(family("bad"))
    assert r.holds
    assert any("punctured" in n for n in r.notes)


def test_bad_family_single_center():
    F = family("bad")
    r = check_A(F)
    assert r.holds
    seq = family_transform_sequence(F)
    assert transform_length(seq) == 1


def test_transform_sequence_rejects_non_permissible_center():
    with pytest.raises(NotPermissibleError) as info:
        family_transform_sequence(family("san1"))
    assert info.value.step == 0
    with pytest.raises(NotPermissibleError) as info:
        family_transform_sequence(family("san2"))
    assert info.value.step == 1


def test_family_input_validation():
    with pytest.raises(InputError):
        FamilyObject.make(ideal(["x^2"], XYT), 2, E=("t",))
    with pytest.raises(InputError):
        FamilyObject.make(ideal(["t*x"], XYT), 1)          # fiber at t=0 is zero
    with pytest.raises(InputError):
        check_E(family("cusp"), 0, 0)
    assert parse_sample("Generic") == GENERIC
    assert parse_sample("-1/2") == Fraction(-1, 2)


def test_report_str():
    r = ConditionReport("F", "fails", 1, "0")
    assert str(r) == "F: fails at step 1 (t0=0)"
    assert not r.holds and r.fails
