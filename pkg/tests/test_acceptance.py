"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Time limits are wall-clock budgets for the whole criterion.
"""
import random
import time
from fractions import Fraction

import sympy

from conftest import CRITERIA_LINES, ideal, regime_violations, to_sym
from resolvekit.errors import (InputError, InvariantViolation, MaximalContactNotFound,
                               NonCoordinateCenter, ResourceCapError)
from resolvekit.exactalg import Poly
from resolvekit.families import (FamilyObject, check_A, check_C, check_E, check_E_sampled,
                                 check_F, check_R, check_tau, family_transform_sequence,
                                 transform_length)
from resolvekit.families import _Family
from resolvekit.geom import MarkedChart, blowup, blowup_chart, divide, fiberize
from resolvekit.idealkit import (Ideal, delta, homogenize, ideal_equal, max_order,
                                 monomial_exponents, same_locus, sing_locus)
from resolvekit.resolver import (Level, omega_max, path_values, plan_chart, principalize,
                                 resolve, resolved_leaves)

XY = ("x", "y")
XYT = ("x", "y", "t")

LIMITS = {1: 1.0, 2: 5.0, 3: 5.0, 4: 5.0, 5: 60.0, 6: 30.0, 7: 10.0, 8: 120.0, 9: 10.0}
SEED = 20241016


class Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, kind, exc, tb):
        elapsed = time.perf_counter() - self.start
        limit = LIMITS[self.number]
        ok = kind is None and elapsed < limit
        why = "" if kind is None else " (%s: %s)" % (kind.__name__, exc)
        line = ("CRITERION %d %s: %s in %.2fs (limit %.0fs)%s"
                % (self.number, self.title, "PASS" if ok else "FAIL", elapsed, limit, why))
        CRITERIA_LINES.append(line)
        print("\n" + line)
        if kind is None:
            assert elapsed < limit, "criterion %d took %.2fs" % (self.number, elapsed)
        return False


def fam(gens, b=2, vars=XYT, **kw):
    return FamilyObject.make(ideal(gens, vars), b, **kw)


def test_c1_smooth_total_space_singular_fiber():
    with Criterion(1, "vertical resolution counterexample"):
        vars = ("x", "t")
        I = ideal(["t*x+x^3"], vars)
        assert delta(I, 2).is_trivial()
        assert ideal_equal(delta(I, 2, ("x",)), ideal(["x", "t"], vars))
        F = FamilyObject.make(I, 3)
        S0 = sing_locus(F.fiber(0).I, 3, ("x",))
        assert same_locus(S0, ideal(["x"], ("x",)))
        r = check_R(F)
        assert r.fails and r.witness["absolute_sing"] == "(1)"


def test_c2_san1():
    with Criterion(2, "san1 fails every condition"):
        F = fam(["x^2+t*y^2"])
        assert same_locus(sing_locus(F.root.I, 2), ideal(["x", "y"], XYT))
        assert same_locus(sing_locus(F.fiber(0).I, 2), ideal(["x"], XY))
        cache = _Family(F, 64)
        reports = [check_R(F), check_A(F, cache), check_F(F, cache), check_C(F, cache),
                   check_tau(F, cache), check_E(F, 0, 1)]
        for r in reports:
            assert r.fails and r.witness, r


def test_c3_san2():
    with Criterion(3, "san2 agrees at step 0, fails F and C at step 1"):
        F = fam(["x^2*y^2+t*x^4"])
        fib = F.fiber(0)
        p_fam = plan_chart(F.root, Level.from_chart(F.root))
        p_fib = plan_chart(fib, Level.from_chart(fib))
        assert p_fam.value == p_fib.value and p_fam.omega == p_fib.omega == 2
        assert set(p_fam.center) == set(p_fib.center) == {"x", "y"}
        c1 = blowup_chart(F.root, p_fam.center, "x")
        d1 = blowup_chart(fib, p_fib.center, "x")
        exc = c1.E[-1].var
        assert same_locus(sing_locus(c1.I, 2, c1.derivation_vars), ideal([exc], c1.vars))
        assert same_locus(sing_locus(d1.I, 2), ideal(["x*y"], d1.vars))
        cache = _Family(F, 64)
        rf, rc = check_F(F, cache), check_C(F, cache)
        assert rf.fails and rf.step == 1
        assert rc.fails and rc.step == 1


def test_c4_bad_on_full_space():
    with Criterion(4, "bad family on full affine space"):
        F = fam(["x^2-y^2"])
        assert check_A(F).holds
        seq = family_transform_sequence(F)
        assert transform_length(seq) == 1
        centers = [n.center.vars for n in _Family(F, 64).fam.tree.nodes if n.center is not None]
        assert len(centers) == 1 and set(centers[0]) == {"x", "y"} and "t" not in centers[0]
        r = check_tau(F)
        assert r.holds and any("punctured" in n for n in r.notes)


def random_ideal(rng):
    n = rng.choice([2, 3])
    vs = ("x", "y", "z")[:n]
    gens = []
    for _ in range(rng.choice([1, 1, 2])):
        terms = []
        for _ in range(rng.randint(2, 4)):
            e = [0] * n
            for _ in range(rng.randint(2, 5)):
                e[rng.randrange(n)] += 1
            mono = "*".join("%s^%d" % (v, k) for v, k in zip(vs, e) if k)
            terms.append("%d*%s" % (rng.choice([-3, -2, -1, 1, 2, 3]), mono))
        gens.append(" + ".join(terms))
    return vs, gens, rng.randint(1, 3)


def taylor_order(f: Poly, point) -> int:
    syms = sympy.symbols(f.vars)
    shifted = sympy.expand(to_sym(f).subs({s: s + p for s, p in zip(syms, point)},
                                          simultaneous=True))
    if shifted == 0:
        return 10 ** 6
    return min(sum(m) for m in sympy.Poly(shifted, *syms).monoms())


def test_c5_identity_suite():
    with Criterion(5, "identity suite on random weighted ideals"):
        rng = random.Random(SEED)
        failures, counts, stops = [], {"descent": 0, "nice": 0}, {}
        for case in range(25):
            vs, gens, b = random_ideal(rng)
            I = ideal(gens, vs)
            if not ideal_equal(delta(I, b - 1), delta(homogenize(I, b), b - 1)):
                failures.append((case, "homogenized delta"))
            points = [(0,) * len(vs)]
            for _ in range(2):
                points.append(tuple(Fraction(rng.randint(-2, 2), rng.randint(1, 2)) for _ in vs))
            for p in points:
                m = Ideal([Poly.var(v, vs) - Poly.constant(c, vs) for v, c in zip(vs, p)], vs)
                if max_order(I, within=m) != min(taylor_order(g, p) for g in I.gens):
                    failures.append((case, "order at %s" % (p,)))
            try:
                tree = resolve(MarkedChart.make(I, b), max_steps=8)
            except InvariantViolation as err:
                failures.append((case, str(err)))
                continue
            except (NonCoordinateCenter, MaximalContactNotFound, ResourceCapError) as err:
                tree = err.tree
                stops[type(err).__name__] = stops.get(type(err).__name__, 0) + 1
            for k in counts:
                counts[k] += tree.checked.get(k, 0)
        print("\n  checks %s, stops %s" % (counts, stops))
        assert failures == []
        assert counts["descent"] > 0 and counts["nice"] > 0


def test_c6_termination_and_monotonicity():
    with Criterion(6, "cusp, tacnode, umbrella resolve monotonically"):
        for gen, vars in [("y^2-x^3", XY), ("y^2-x^4", XY), ("x^2-y^2*z", ("x", "y", "z"))]:
            tree = resolve(MarkedChart.make(ideal([gen], vars), 2))
            assert resolved_leaves(tree)
            for leaf in tree.leaves():
                assert delta(leaf.chart.I, 1).is_trivial()
            assert regime_violations(path_values(tree)) == []


def test_c7_principalization():
    with Criterion(7, "principalization leaves are monomial"):
        for gen, E in [("x^2*y", XY), ("x^2+y^2", ())]:
            tree = principalize(MarkedChart.make(ideal([gen], XY), 1, E=E))
            for leaf in tree.leaves():
                assert monomial_exponents(leaf.chart.I, leaf.chart.divisor_vars) is not None
                assert omega_max(leaf.chart)[0] == 0


FIXTURES = {
    "san1": ["x^2+t*y^2"],
    "san2": ["x^2*y^2+t*x^4"],
    "cusp": ["y^2-x^3"],
    "tcusp": ["x^2+(y+t)^3"],
    "bad": ["x^2-y^2"],
}


def test_c8_equivalence_oracle():
    with Criterion(8, "A, F, C, E and tau agree on fixtures"):
        disagreements = []
        for name, gens in FIXTURES.items():
            F = fam(gens)
            cache = _Family(F, 64)
            verdicts = {"A": check_A(F, cache).verdict, "F": check_F(F, cache).verdict,
                        "C": check_C(F, cache).verdict, "E": check_E_sampled(F, 2).verdict,
                        "tau": check_tau(F, cache).verdict}
            if len(set(verdicts.values())) != 1 or "indeterminate" in verdicts.values():
                disagreements.append((name, verdicts))
        assert disagreements == []


def _charts_equal(a, b):
    return (a.vars == b.vars and ideal_equal(a.I, b.I) and ideal_equal(a.Ibar, b.Ibar)
            and a.E == b.E and a.a == b.a and a.chart_map == b.chart_map)


def _random_family(rng, center):
    """Terms all vanish on the center, so it is permissible for mark 1."""
    terms = []
    for _ in range(rng.randint(2, 4)):
        e = [rng.randint(0, 3) for _ in XYT]
        for v in center:
            i = XYT.index(v)
            e[i] = max(e[i], 1)
        mono = "*".join("%s^%d" % (v, k) for v, k in zip(XYT, e) if k)
        terms.append("%d*%s" % (rng.choice([-2, -1, 1, 2]), mono))
    return " + ".join(terms)


def transform(chart, center):
    if len(center) == 1:
        return [divide(chart, center[0])]
    return blowup(chart, center)


def test_c9_base_change_commutes_with_blowup():
    with Criterion(9, "fiberize commutes with blowup"):
        rng = random.Random(SEED)
        cases = [(["x^2*y^2+t*x^4"], XY, [0, 1])]
        for _ in range(10):
            center = rng.choice([XY, ("x",), ("y",)])
            cases.append(([_random_family(rng, center)], center,
                          [Fraction(rng.randint(-3, 3), rng.randint(1, 3))]))
        compared = 0
        for gens, center, samples in cases:
            root = MarkedChart.make(ideal(gens, XYT), 1, E=rng.choice([(), ("y",)]),
                                    base=("t",))
            for t0 in samples:
                try:
                    fib = fiberize(root, t0)
                except InputError:
                    continue
                ups, downs = transform(root, center), transform(fib, center)
                assert len(ups) == len(downs) == len(center)
                for up, down in zip(ups, downs):
                    assert _charts_equal(fiberize(up, t0), down)
                compared += 1
        assert compared >= 11
