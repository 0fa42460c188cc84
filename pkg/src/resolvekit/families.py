"""One-parameter families of basic objects and the equiresolution checks.

A family lives on a root chart whose variables include one base variable
``t``.  The checks run the resolution algorithm on the family itself (in
absolute mode, where ``t`` is differentiated like any other variable) and
on its fibers at a finite set of sample points plus the generic point, and
compare the two.  Verdicts are certificates at the tested points only.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import sympy

from . import _factor
from .errors import (CertificationFailure, InputError, NonCoordinateCenter, NotPermissibleError,
                     ResolveKitError)
from .exactalg import Poly, as_scalar
from .geom import GENERIC, ChartTree, MarkedChart, TreeNode, Truncate, change_coordinates, fiberize
from .idealkit import Ideal, alg_reduce, delta, eliminate, ideal_equal
from .resolver import (Plan, RFValue, _scalar_inverse, loci_equal, locus_ideal, resolve)

SAMPLES = (Fraction(0), Fraction(1), Fraction(-1), GENERIC)
CONDITIONS = ("R", "A", "F", "C", "tau", "E")


def _sample_str(t0) -> str:
    if t0 == GENERIC:
        return GENERIC
    q = Fraction(t0)
    return str(q.numerator) if q.denominator == 1 else "%d/%d" % (q.numerator, q.denominator)


def parse_sample(text) -> object:
    if isinstance(text, str) and text.strip().lower() == GENERIC:
        return GENERIC
    return as_scalar(text)


@dataclass
class FamilyObject:
    """A family over the affine line: a root chart with one base variable."""

    root: MarkedChart
    samples: Tuple = SAMPLES
    name: str = "family"
    step: int = 0

    def __post_init__(self):
        if len(self.root.base) != 1:
            raise InputError("a family needs exactly one base variable")
        t = self.root.base[0]
        for d in self.root.E:
            if d.var == t:
                raise InputError("the base variable cannot be a divisor")
        self.samples = tuple(parse_sample(s) if isinstance(s, str) else s for s in self.samples)
        for t0 in self.samples:
            if t0 != GENERIC:
                fiberize(self.root, t0)

    @classmethod
    def make(cls, I: Ideal, b: int, E: Sequence[str] = (), base: str = "t",
             samples=SAMPLES, name: str = "family") -> "FamilyObject":
        chart = MarkedChart.make(I, b, E, base=(base,), relative=False)
        return cls(chart, tuple(samples), name)

    @property
    def t(self) -> str:
        return self.root.base[0]

    @property
    def fiber_vars(self) -> Tuple[str, ...]:
        return tuple(v for v in self.root.derivation_vars if v != self.t)

    def fiber(self, t0) -> MarkedChart:
        return fiberize(self.root, t0)

    def thickening(self, t0, n: int) -> MarkedChart:
        """The object over Q[s]/(s^(n+1)) induced at ``t0``."""
        return fiberize(self.root, Truncate(n, as_scalar(t0)))


@dataclass
class ConditionReport:
    name: str
    verdict: str                      # holds | fails | indeterminate
    step: Optional[int] = None
    sample: Optional[str] = None
    witness: Dict[str, object] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    @property
    def fails(self) -> bool:
        return self.verdict == "fails"

    def to_json(self):
        out = {"condition": self.name, "verdict": self.verdict, "step": self.step,
               "sample": self.sample, "witness": {k: _jsonable(v) for k, v in self.witness.items()},
               "notes": list(self.notes)}
        return out

    def __str__(self):
        at = ""
        if self.step is not None:
            at = " at step %d" % self.step
        if self.sample is not None:
            at += " (t0=%s)" % self.sample
        return "%s: %s%s" % (self.name, self.verdict, at)


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (int, float, bool)) or v is None:
        return v
    return str(v)


@dataclass(frozen=True)
class TauValue:
    """(max g_0, c_0, max g_1, c_1, ...) up to the resolution length.

    ``counts`` are taken over Q; ``geometric`` counts each conjugate
    component separately and ``split`` marks where the two differ.
    """

    values: Tuple[Tuple[str, ...], ...]
    counts: Tuple[int, ...]
    geometric: Tuple[int, ...] = ()
    split: bool = False

    def entries(self):
        return tuple(zip(self.values, self.counts))

    def __eq__(self, other):
        return isinstance(other, TauValue) and self.entries() == other.entries()

    def __hash__(self):
        return hash(self.entries())

    def first_difference(self, other: "TauValue") -> Optional[int]:
        a, b = self.entries(), other.entries()
        for i in range(max(len(a), len(b))):
            if i >= len(a) or i >= len(b) or a[i] != b[i]:
                return i
        return None

    def __str__(self):
        parts = []
        for v, c in self.entries():
            parts.append("(" + ", ".join(v) + ")")
            parts.append(str(c))
        return "(" + ", ".join(parts + ["inf", "inf", "..."]) + ")"


# ---------------------------------------------------------------------------
# recorded runs


@dataclass
class _Run:
    tree: Optional[ChartTree]
    plans: Dict[int, Plan]
    error: Optional[ResolveKitError] = None

    def planned(self) -> List[TreeNode]:
        if self.tree is None:
            return []
        return [n for n in self.tree.nodes if n.id in self.plans]


def _family_stop(base):
    def check(node, plan, L):
        if plan.pending is not None:
            return "center is not smooth over the base"
        if any(v in base for v in plan.center):
            return "center lies over a point of the base"
        return None
    return check


def _run(chart: MarkedChart, family: bool, max_steps: int = 64, certify: bool = False,
         extra=None) -> _Run:
    plans: Dict[int, Plan] = {}
    base = set(chart.base)
    fstop = _family_stop(base) if family else None

    def stop(node, plan, L):
        plans[node.id] = plan
        if extra is not None:
            reason = extra(node, plan, L)
            if reason:
                return reason
        return fstop(node, plan, L) if fstop else None

    try:
        tree = resolve(chart, max_steps=max_steps, stop=stop, certify=certify)
    except ResolveKitError as err:
        return _Run(getattr(err, "tree", None), plans, err)
    for n in tree.nodes:
        if n.status == "resolved" and n.id not in plans:
            plans[n.id] = None
    return _Run(tree, plans)


def _resolved_nodes(run: _Run) -> List[TreeNode]:
    return [n for n in run.tree.nodes if n.status == "resolved"] if run.tree else []


def _path(tree: ChartTree, node: TreeNode) -> List[TreeNode]:
    out = [node]
    while out[-1].parent is not None:
        out.append(tree.nodes[out[-1].parent])
    return out[::-1]


def _key(tree: ChartTree, node: TreeNode) -> Tuple[str, ...]:
    return tuple(n.chart_var for n in _path(tree, node) if n.kind in ("blowup", "division"))


def _valued(run: _Run) -> List[TreeNode]:
    """Nodes carrying a value: planned charts and resolved leaves."""
    if run.tree is None:
        return []
    return [n for n in run.tree.nodes if n.value is not None]


def _groups(run: _Run) -> Dict[Tuple[int, tuple], List[TreeNode]]:
    out: Dict[Tuple[int, tuple], List[TreeNode]] = {}
    for n in _valued(run):
        out.setdefault((n.step, _key(run.tree, n)), []).append(n)
    return out


def _pre(node: TreeNode) -> MarkedChart:
    return node.pre if node.pre is not None else node.chart


def _inverse_change(v: str, img: Poly, ctx: Ideal) -> Poly:
    img = img.embed(ctx.vars, ctx.trunc)
    co = img.coefficients_in(v)
    inv = _scalar_inverse(co[1], ctx)
    if inv is None:
        raise NotPermissibleError("coordinate change in %s is not invertible" % v)
    g = co.get(0, Poly.zero(img.vars, img.trunc))
    return (Poly.var(v, img.vars, img.trunc) - g) * inv


def _center_components(node: TreeNode, plan: Optional[Plan]) -> List[Ideal]:
    """The chart's Max locus, in the coordinates the chart was handed."""
    ctx = _pre(node).I.like([])
    if plan is None:
        return []
    if plan.pending is not None:
        comps = [ctx.like([g.embed(ctx.vars, ctx.trunc) for g in C.gens])
                 for C in plan.pending.components if isinstance(C, Ideal)]
    else:
        comps = [ctx.like([Poly.var(v, ctx.vars, ctx.trunc) for v in plan.center])]
    for v, img in reversed(list(plan.changes)):
        inv = _inverse_change(v, img, ctx)
        comps = [ctx.like([g.subs({v: inv}) for g in C.gens]) for C in comps]
    return comps


def _sing(chart: MarkedChart, dvars=None) -> Ideal:
    return delta(chart.I, chart.b - 1, dvars if dvars is not None else chart.derivation_vars)


# ---------------------------------------------------------------------------
# moving family data into a fiber chart


class _Frame:
    """A fiber chart's context, intersected with a family chart's open set."""

    def __init__(self, fam: MarkedChart, t: str, t0, fib: MarkedChart):
        self.t, self.t0, self.fib = t, t0, fib
        self.vars = fib.vars
        self.trunc = fib.I.trunc
        base = fib.I
        extra = [self.map(u) for u in fam.I.units]
        self.ctx = Ideal([], base.vars, params=base.params, units=tuple(base.units) + tuple(extra),
                         trunc=base.trunc, alg=base.alg)

    def map(self, g: Poly) -> Poly:
        if self.t0 != GENERIC and self.t in g.vars:
            if isinstance(self.t0, Truncate):
                raise InputError("truncated frames are not used for comparisons")
            g = g.subs({self.t: Poly.constant(self.t0, g.vars, g.trunc)})
        h = g.embed(self.vars, self.trunc)
        alg = self.fib.I.alg
        return alg_reduce(h, alg) if alg else h

    def ideal(self, gens: Iterable[Poly]) -> Ideal:
        return self.ctx.like([self.map(g) for g in gens])

    def local(self, I: Ideal) -> Ideal:
        """A fiber ideal, restricted to this frame's open set."""
        return self.ctx.like([g.embed(self.vars, self.ctx.trunc) for g in I.gens])

    def empty(self) -> bool:
        return self.ctx.like([]).is_trivial()


def _frame(fam: MarkedChart, t: str, t0, fib: MarkedChart) -> Optional[_Frame]:
    try:
        return _Frame(fam, t, t0, fib)
    except (InputError, ValueError, KeyError):
        return None


def _same_coordinates(fr: _Frame, fam: MarkedChart, fib: MarkedChart) -> bool:
    fm = dict(fam.chart_map)
    for v, p in fib.chart_map:
        if v == fr.t or v not in fm:
            continue
        try:
            a = fr.map(fm[v])
        except (InputError, ValueError, KeyError):
            return False
        b = p.embed(fr.vars, fr.ctx.trunc)
        if fib.I.alg:
            b = alg_reduce(b, fib.I.alg)
        if not (a - b).is_zero():
            return False
    return True


def _intersect(C: List[Ideal], ctx: Ideal) -> Ideal:
    return locus_ideal(C, ctx) if C else ctx.like([Poly.one(ctx.vars, ctx.trunc)])


# ---------------------------------------------------------------------------
# the checkers


class _Family:
    """Caches the family run and the fiber runs shared by several checks."""

    def __init__(self, F: FamilyObject, max_steps: int = 64):
        self.F = F
        self.max_steps = max_steps
        self._fam = None
        self._fibers: Dict[str, _Run] = {}

    @property
    def fam(self) -> _Run:
        if self._fam is None:
            self._fam = _run(self.F.root, True, self.max_steps)
        return self._fam

    def fiber(self, t0) -> _Run:
        k = _sample_str(t0)
        if k not in self._fibers:
            self._fibers[k] = _run(self.F.fiber(t0), False, self.max_steps)
        return self._fibers[k]


def _r_mismatch(chart: MarkedChart, fiber_vars) -> Optional[Dict[str, str]]:
    """Witness when absolute and relative singular loci differ."""
    ab = _sing(chart, chart.derivation_vars)
    rel = _sing(chart, fiber_vars)
    if loci_equal([ab], [rel]):
        return None
    return {"absolute_sing": str(ab), "relative_sing": str(rel)}


def check_R(F: FamilyObject) -> ConditionReport:
    w = _r_mismatch(F.root, F.fiber_vars)
    if w is None:
        return ConditionReport("R", "holds", notes=["absolute and relative singular loci agree"])
    return ConditionReport("R", "fails", 0, None, w,
                           ["Sing of the family differs from the union of fiber singular loci"])


def _jacobian_trivial(C: Ideal, fiber_vars: Sequence[str]) -> bool:
    """Relative Jacobian test: the codim-sized minors generate the unit ideal on C."""
    gens = [g for g in C.reduced().gens]
    k = len(gens)
    if k == 0:
        return True
    syms = sympy.symbols("v0:%d" % len(C.vars))
    rows = [[_factor.to_sympy(g.diff(v), syms).as_expr() for v in fiber_vars] for g in gens]
    M = sympy.Matrix(rows)
    minors = []
    for r in _subsets(range(len(fiber_vars)), k):
        d = sympy.expand(M.extract(list(range(k)), list(r)).det())
        if d != 0:
            minors.append(_factor.from_sympy(sympy.Poly(d, *syms, domain="QQ"), C.vars, C.trunc))
    return (C + C.like(minors)).is_trivial()


def _subsets(items, k):
    return itertools.combinations(list(items), k)


def check_A(F: FamilyObject, cache: Optional[_Family] = None) -> ConditionReport:
    fam = (cache or _Family(F)).fam
    t = F.t
    fv = F.fiber_vars
    notes = []
    if fam.error is not None and not isinstance(fam.error, NonCoordinateCenter):
        return ConditionReport("A", "indeterminate", getattr(fam.error, "step", None), None,
                               {"error": str(fam.error)}, ["resolver failed on the family"])
    failures = []
    for n in _valued(fam):
        pre = _pre(n)
        w = _r_mismatch(pre, fv)
        if w is not None:
            failures.append((n.step, "condition (R) fails for the transformed family", w))
        plan = fam.plans.get(n.id)
        if plan is None:
            continue
        comps = _center_components(n, plan)
        I_C = locus_ideal(comps, pre.I.like([])) if comps else None
        if plan.pending is not None or any(v == t for v in plan.center):
            for C in comps:
                if not _jacobian_trivial(C, fv):
                    failures.append((n.step, "center is not smooth over the base",
                                     {"center": str(C)}))
                    break
                img = eliminate(C.like(C.gens), fv) if C.units == () else None
                if img is not None and not img.is_zero():
                    failures.append((n.step, "center does not dominate the base",
                                     {"center": str(C), "image": str(img)}))
                    break
            else:
                failures.append((n.step, "center is not a coordinate subspace over the base",
                                 {"center": str(I_C)}))
    if fam.error is not None:
        failures.append((fam.error.step or 0, str(fam.error),
                         {"centers": [str(C) for C in getattr(fam.error, "components", ())]}))
    for n in _resolved_nodes(fam):
        rel = _sing(n.chart, fv)
        if not rel.is_trivial():
            failures.append((n.step, "relative singular locus is not empty at the end",
                             {"relative_sing": str(rel)}))
    if failures:
        failures.sort(key=lambda f: f[0])
        step, why, w = failures[0]
        return ConditionReport("A", "fails", step, None, w, [why])
    notes.append("every center is a coordinate subspace in fiber variables (smooth and "
                 "surjective over the base); the final relative singular locus is empty")
    return ConditionReport("A", "holds", None, None, {}, notes)


@dataclass
class _Cmp:
    step: int
    why: str
    witness: dict


def _compare_fiber(cache: _Family, t0, scheme: bool) -> Tuple[Optional[_Cmp], List[str], bool]:
    """Walk family and fiber step by step.

    Returns (first failure, notes, complete).  With ``scheme`` centers are
    compared as schemes (condition C), otherwise maximal values and loci
    (condition F).
    """
    F = cache.F
    fam, fib = cache.fam, cache.fiber(t0)
    notes: List[str] = []
    if fib.error is not None:
        return None, ["fiber resolution failed: %s" % fib.error], False
    gf, gb = _groups(fam), _groups(fib)
    steps = sorted({s for s, _ in gf} | {s for s, _ in gb})
    stopped = [n for n in fam.tree.nodes if n.status == "stopped"] if fam.tree else []
    for j in steps:
        keys = sorted({k for s, k in gf if s == j} | {k for s, k in gb if s == j})
        for key in keys:
            A_nodes = gf.get((j, key), [])
            B_nodes = gb.get((j, key), [])
            if not A_nodes:
                if any(_is_prefix(_key(fam.tree, s), key) for s in stopped) or fam.error:
                    continue
                if any(fib.plans.get(b.id) is not None for b in B_nodes):
                    return (_Cmp(j, "the fiber has a center in a chart the family has resolved",
                                 {"chart": list(key)}), notes, True)
                continue
            for A in A_nodes:
                pa = fam.plans.get(A.id)
                if not B_nodes:
                    fr = _frame(_pre(A), F.t, t0, fiberize(_pre(A), t0))
                    if fr is None or fr.empty():
                        continue
                    M = fr.ideal(_intersect(_center_components(A, pa), _pre(A).I.like([])).gens)
                    if pa is not None and not M.is_trivial():
                        return (_Cmp(j, "the family has a center on a fiber chart already resolved",
                                     {"chart": list(key), "family_center": str(M)}), notes, True)
                    continue
                for B in B_nodes:
                    pb = fib.plans.get(B.id)
                    res = _compare_pair(F, t0, A, pa, B, pb, scheme, notes, j, key)
                    if res is not None:
                        return res, notes, True
    complete = fam.error is None and not stopped
    if complete:
        rf = max((n.step for n in fam.tree.nodes), default=0)
        rt = max((n.step for n in fib.tree.nodes), default=0)
        if rf != rt:
            return _Cmp(min(rf, rt), "resolution lengths differ",
                        {"family_length": rf, "fiber_length": rt}), notes, True
    return None, notes, complete


def _is_prefix(a, b) -> bool:
    return len(a) <= len(b) and tuple(b[:len(a)]) == tuple(a)


def _compare_pair(F, t0, A, pa, B, pb, scheme, notes, j, key) -> Optional[_Cmp]:
    famc, fibc = _pre(A), _pre(B)
    fr = _frame(famc, F.t, t0, fibc)
    if fr is None:
        notes.append("step %d chart %s: family chart does not map into the fiber chart"
                     % (j, "/".join(key) or "root"))
        return None
    if fr.empty():
        return None
    same = _same_coordinates(fr, famc, fibc)
    ctx_a = famc.I.like([])
    MA = fr.ideal(_intersect(_center_components(A, pa), ctx_a).gens) if pa is not None \
        else fr.ctx.like([Poly.one(fr.vars, fr.ctx.trunc)])
    MB = fr.local(_intersect(_center_components(B, pb), fibc.I.like([]))) if pb is not None \
        else fr.ctx.like([Poly.one(fr.vars, fr.ctx.trunc)])
    where = {"chart": list(key), "sample": _sample_str(t0)}
    if same:
        SA = fr.ideal(_sing(famc).gens)
        SB = fr.local(_sing(fibc))
        if not loci_equal([SA], [SB]):
            notes.append("step %d chart %s (t0=%s): Sing(family) on the fiber is V(%s), "
                         "Sing(fiber) is V(%s)" % (j, "/".join(key) or "root", _sample_str(t0),
                                                    _gens_str(SA), _gens_str(SB)))
    meets_a = not MA.is_trivial()
    meets_b = not MB.is_trivial()
    if not meets_a and not meets_b:
        return None
    if not same:
        notes.append("step %d chart %s: coordinates differ between family and fiber; "
                     "only values compared" % (j, "/".join(key) or "root"))
        if meets_a and meets_b and not scheme and A.value.flat() != B.value.flat():
            return _Cmp(j, "maximal values differ",
                        dict(where, family_value=str(A.value), fiber_value=str(B.value)))
        return None
    if scheme:
        if meets_a != meets_b or not ideal_equal(MA, MB):
            w = dict(where, family_center=str(MA), fiber_center=str(MB))
            if meets_a and meets_b and loci_equal([MA], [MB]):
                return _Cmp(j, "centers agree as sets only, not as schemes", w)
            return _Cmp(j, "the family center does not cut out the fiber center", w)
        return None
    if not meets_a:
        notes.append("step %d chart %s (t0=%s): the family maximum is not attained on this "
                     "fiber; values there are not compared" % (j, "/".join(key) or "root",
                                                               _sample_str(t0)))
        return None
    if A.value.flat() != B.value.flat():
        return _Cmp(j, "maximal values differ",
                    dict(where, family_value=str(A.value), fiber_value=str(B.value)))
    if not loci_equal([MA], [MB]):
        return _Cmp(j, "maximum loci differ",
                    dict(where, family_max=str(MA), fiber_max=str(MB)))
    return None


def _gens_str(I: Ideal) -> str:
    return ", ".join(str(g) for g in I.gens)


def _check_by_samples(F: FamilyObject, cache: _Family, name: str, scheme: bool) -> ConditionReport:
    fails = []
    notes: List[str] = []
    undecided = []
    for t0 in F.samples:
        res, nts, complete = _compare_fiber(cache, t0, scheme)
        notes.extend(nts)
        if res is not None:
            fails.append((res.step, t0, res))
        elif not complete:
            undecided.append(t0)
    samples = ", ".join(_sample_str(s) for s in F.samples)
    notes.append("samples: " + samples)
    if fails:
        fails.sort(key=lambda f: (f[0], F.samples.index(f[1])))
        step, t0, res = fails[0]
        return ConditionReport(name, "fails", step, _sample_str(t0), res.witness,
                               [res.why] + notes)
    if undecided:
        why = "comparison incomplete at t0=%s" % ", ".join(_sample_str(s) for s in undecided)
        return ConditionReport(name, "indeterminate", None, None, {}, [why] + notes)
    return ConditionReport(name, "holds", None, None, {}, notes)


def check_F(F: FamilyObject, cache: Optional[_Family] = None) -> ConditionReport:
    return _check_by_samples(F, cache or _Family(F), "F", scheme=False)


def check_C(F: FamilyObject, cache: Optional[_Family] = None) -> ConditionReport:
    return _check_by_samples(F, cache or _Family(F), "C", scheme=True)


# ---------------------------------------------------------------------------
# tau


def _pull(tree: ChartTree, f: Poly, path: List[TreeNode], post_last: bool = True) -> Poly:
    """Pull ``f`` back from the frame of ``path[0]`` to the chart ``path[-1]``."""
    for i, node in enumerate(path):
        if i:
            for sub in node.link:
                f = f.subs({v: q.embed(f.vars, f.trunc) for v, q in sub.items()})
            f = f.embed(node.chart.vars, node.chart.I.trunc)
        if node.changes and (i < len(path) - 1 or post_last):
            for v, img in node.changes:
                f = f.subs({v: img.embed(f.vars, f.trunc)})
    return f


def _canonical(tree: ChartTree, node: TreeNode, K: Ideal) -> bool:
    """False when the component is also visible in an earlier sibling chart."""
    path = _path(tree, node)
    for i, B in enumerate(path):
        if B.parent is None:
            continue
        P = tree.nodes[B.parent]
        sub = path[i:]
        if B.kind == "blowup":
            cv = list(P.center.vars)
            for w in cv[:cv.index(B.chart_var)]:
                f = _pull(tree, Poly.var(w, B.chart.vars, B.chart.I.trunc), sub)
                if not K.radical_contains(f):
                    return False
        elif B.kind == "localize":
            own = set(map(str, P.chart.I.units))
            for S in tree.children(P.id):
                if S.kind != "localize" or S.id >= B.id:
                    continue
                us = [u for u in S.chart.I.units if str(u) not in own]
                if not us:
                    continue
                prod = us[0]
                for u in us[1:]:
                    prod = prod * u
                if not K.radical_contains(_pull(tree, prod, sub)):
                    return False
    return True


def tau(F: FamilyObject, t0, cache: Optional[_Family] = None) -> TauValue:
    run = (cache or _Family(F)).fiber(t0)
    if run.error is not None:
        raise run.error
    tree = run.tree
    by_step: Dict[int, List[TreeNode]] = {}
    for n in tree.nodes:
        if n.center is not None:
            by_step.setdefault(n.step, []).append(n)
    values, counts, geo = [], [], []
    split = False
    for j in sorted(by_step):
        nodes = by_step[j]
        vmax = max(n.value for n in nodes)
        rational = irrational = 0
        for n in nodes:
            K = n.chart.I.like([Poly.var(v, n.chart.vars, n.chart.I.trunc) for v in n.center.vars])
            if not _canonical(tree, n, K):
                continue
            if n.chart.I.alg and any(g.degree(n.chart.I.alg[0]) > 0 for g in _rebased(n, K)):
                irrational += 1
            else:
                rational += 1
        if irrational:
            split = True
        values.append(tuple(vmax.flat()))
        counts.append(rational + (irrational + 1) // 2)
        geo.append(rational + irrational)
    return TauValue(tuple(values), tuple(counts), tuple(geo), split)


def _rebased(node: TreeNode, K: Ideal) -> List[Poly]:
    """The component in the chart's incoming coordinates."""
    ctx = _pre(node).I.like([])
    gens = list(K.gens)
    for v, img in reversed(list(node.changes)):
        inv = _inverse_change(v, img, ctx)
        gens = [g.subs({v: inv}) for g in gens]
    return gens


def check_tau(F: FamilyObject, cache: Optional[_Family] = None) -> ConditionReport:
    cache = cache or _Family(F)
    vals = {}
    for t0 in F.samples:
        try:
            vals[t0] = tau(F, t0, cache)
        except ResolveKitError as err:
            return ConditionReport("tau", "indeterminate", getattr(err, "step", None),
                                   _sample_str(t0), {"error": str(err)},
                                   ["fiber resolution failed"])
    ref_pt = GENERIC if GENERIC in vals else F.samples[0]
    ref = vals[ref_pt]
    notes = ["tau(%s) = %s" % (_sample_str(k), v) for k, v in vals.items()]
    if any(v.split for v in vals.values()):
        notes.append("some centers split further over an algebraic extension; counts are over Q")
    notes.append("ambient spaces are full affine spaces, so every center is proper over the "
                 "base; on a punctured ambient (a closed point removed from one fiber) tau can "
                 "hold while A fails")
    for t0 in F.samples:
        i = vals[t0].first_difference(ref)
        if i is not None:
            return ConditionReport("tau", "fails", i, _sample_str(t0),
                                   {"tau_sample": str(vals[t0]), "tau_reference": str(ref),
                                    "reference": _sample_str(ref_pt)}, notes)
    return ConditionReport("tau", "holds", None, None, {}, notes)


# ---------------------------------------------------------------------------
# condition E


def _permissible_over(chart: MarkedChart, center: Sequence[str]) -> Optional[dict]:
    """Witness when the order along the center differs from the closed fiber's."""
    nu = min(g.order_along(center) for g in chart.I.gens)
    gens0 = [g.reduce_nilpotent() for g in chart.I.gens]
    nu0 = min((g.order_along(center) for g in gens0 if not g.is_zero()), default=float("inf"))
    if nu == nu0 and nu >= chart.b:
        return None
    return {"center": list(center), "order_truncated": nu, "order_fiber": nu0, "b": chart.b,
            "ideal": str(chart.I)}


def check_E(F: FamilyObject, t0=Fraction(0), n: int = 2, max_steps: int = 64) -> ConditionReport:
    if n < 1:
        raise InputError("truncation order must be at least 1")
    t0 = as_scalar(t0)
    where = "%s" % _sample_str(t0)
    An = F.thickening(t0, n)
    failures: List[Tuple[int, str, dict]] = []

    def certify(node, plan, L):
        chart = node.chart
        for v, img in plan.changes:
            chart = change_coordinates(chart, v, img)
        if plan.regime == "monomial":
            # monomial near Sing: the proper transform has no zero there
            if not (chart.Ibar + _sing(chart)).is_trivial():
                failures.append((node.step, "the truncated object is not monomial",
                                 {"ideal": str(chart.Ibar)}))
                return "not monomial over the truncated base"
        w = _permissible_over(chart, plan.center)
        if w is not None:
            failures.append((node.step, "the center is not permissible over the truncated base",
                             w))
            return "center not permissible over the truncated base"
        return None

    run = _run(An, False, max_steps, certify=True, extra=certify)
    notes = ["object over Q[s]/(s^%d) at t0=%s" % (n + 1, _sample_str(t0))]
    if run.error is not None:
        err = run.error
        if isinstance(err, CertificationFailure):
            failures.append((err.step or 0, str(err), err.witness))
        else:
            st = getattr(err, "step", None)
            return ConditionReport("E", "indeterminate", st, where, {"error": str(err), "n": n},
                                   notes + ["resolver failed over the truncated base"])
    if failures:
        failures.sort(key=lambda f: f[0])
        step, why, w = failures[0]
        return ConditionReport("E", "fails", step, where, dict(w, n=n), [why] + notes)
    return ConditionReport("E", "holds", None, where, {"n": n},
                           notes + ["every step certified over the truncated base"])


def check_E_sampled(F: FamilyObject, n: int = 2) -> ConditionReport:
    """Condition E at every rational sample point, orders 1..n."""
    reports = []
    for t0 in F.samples:
        if t0 == GENERIC:
            continue
        for k in range(1, n + 1):
            reports.append(check_E(F, t0, k))
    bad = [r for r in reports if r.fails]
    if bad:
        r = min(bad, key=lambda r: (r.step, reports.index(r)))
        return replace(r, notes=r.notes + ["checked: " + ", ".join("t0=%s n=%s" % (x.sample, x.witness.get("n")) for x in reports)])
    und = [r for r in reports if r.verdict == "indeterminate"]
    if und:
        return replace(und[0], notes=und[0].notes + ["checked: " +
                                                     ", ".join("t0=%s n=%s" % (x.sample, x.witness.get("n")) for x in reports)])
    return ConditionReport("E", "holds", None, None, {},
                           ["checked: " + ", ".join("t0=%s n=%s" % (x.sample, x.witness.get("n")) for x in reports)])


# ---------------------------------------------------------------------------
# T-sequences


def family_transform_sequence(F: FamilyObject, max_steps: int = 64) -> List[FamilyObject]:
    """Blow up the family along the algorithm's centers, checking T-permissibility."""
    out: List[FamilyObject] = []
    run = _run(F.root, True, max_steps)
    if run.tree is None:
        raise run.error
    for node in run.tree.nodes:
        if node.id in run.plans and node.status == "stopped":
            plan = run.plans[node.id]
            comps = _center_components(node, plan)
            err = NotPermissibleError("center at step %d is not T-permissible: %s"
                                      % (node.step, node.note))
            err.witness = {"center": [str(C) for C in comps]}
            err.step = node.step
            raise err
    if run.error is not None:
        raise run.error
    for node in run.tree.nodes:
        chart = node.chart
        if node.center is not None:
            for t0 in F.samples:
                if t0 == GENERIC:
                    continue
                fb = fiberize(chart, t0)
                nu = min(g.order_along(node.center.vars) for g in chart.I.gens)
                nu0 = min((g.order_along(node.center.vars) for g in fb.I.gens),
                          default=float("inf"))
                if nu != nu0 or nu < chart.b:
                    err = NotPermissibleError("center %s is not T-permissible at t0=%s"
                                              % (",".join(node.center.vars), _sample_str(t0)))
                    err.witness = {"order": nu, "fiber_order": nu0}
                    err.step = node.step
                    raise err
        out.append(FamilyObject(_pre(node), F.samples, F.name, node.step))
    for node in run.tree.leaves():
        rel = _sing(node.chart, F.fiber_vars)
        if not rel.is_trivial():
            raise NotPermissibleError("relative singular locus is not empty at the end")
    return out


def transform_length(seq: List[FamilyObject]) -> int:
    return max((f.step for f in seq), default=0)


# ---------------------------------------------------------------------------
# all at once


def run_conditions(F: FamilyObject, conditions: Sequence[str] = CONDITIONS, truncation: int = 2,
                   max_steps: int = 64) -> List[ConditionReport]:
    cache = _Family(F, max_steps)
    out = []
    for name in conditions:
        if name == "R":
            out.append(check_R(F))
        elif name == "A":
            out.append(check_A(F, cache))
        elif name == "F":
            out.append(check_F(F, cache))
        elif name == "C":
            out.append(check_C(F, cache))
        elif name == "tau":
            out.append(check_tau(F, cache))
        elif name == "E":
            out.append(check_E_sampled(F, truncation))
        else:
            raise InputError("unknown condition %r" % name)
    return out
