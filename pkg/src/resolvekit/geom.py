"""Affine charts of marked ideals, coordinate blow-ups and transforms."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import InputError, NotPermissibleError, RingMismatchError
from .exactalg import Poly, as_scalar
from .idealkit import Ideal


@dataclass(frozen=True)
class Divisor:
    """A coordinate hypersurface ``var = 0`` of the divisor list.

    ``birth`` is 0 for divisors given with the input and k for the
    exceptional divisor created at transformation k.  ``index`` is the
    position used when comparing divisor subsets lexicographically.
    """

    var: str
    birth: int
    index: int

    def to_json(self):
        return {"var": self.var, "birth": self.birth, "index": self.index}


@dataclass(frozen=True)
class MarkedChart:
    vars: Tuple[str, ...]
    I: Ideal
    b: int
    E: Tuple[Divisor, ...] = ()
    base: Tuple[str, ...] = ()
    derivation_vars: Tuple[str, ...] = ()
    Ibar: Optional[Ideal] = None
    a: Tuple[Tuple[int, int], ...] = ()      # (birth, exponent) of present exceptionals
    chart_map: Tuple[Tuple[str, Poly], ...] = ()
    root_vars: Tuple[str, ...] = ()
    m: int = 0                               # number of input divisors
    depth: int = 0

    # construction ------------------------------------------------------------
    @classmethod
    def make(cls, I: Ideal, b: int, E: Sequence[str] = (), base: Sequence[str] = (),
             relative: bool = True) -> "MarkedChart":
        """Root chart.  With ``relative`` the base variables are not
        differentiated (fiberwise orders); otherwise all variables are."""
        if not isinstance(b, int) or b < 1:
            raise InputError("mark must be a positive integer")
        vars = I.vars
        base = tuple(base)
        for v in base:
            if v not in vars:
                raise InputError("unknown base variable %r" % v)
        E = tuple(E)
        if len(set(E)) != len(E):
            raise InputError("divisor variables must be distinct")
        for v in E:
            if v not in vars:
                raise InputError("unknown divisor variable %r" % v)
            if v in base:
                raise InputError("the base variable %r cannot be a divisor" % v)
            if v in I.params or (I.trunc and I.trunc[0] == v):
                raise InputError("%r cannot be a divisor" % v)
        if I.is_zero():
            raise InputError("the ideal must be nonzero")
        fiber = tuple(v for v in I.fiber_vars() if v not in base)
        dv = fiber if relative else I.fiber_vars()
        divs = tuple(Divisor(v, 0, i + 1) for i, v in enumerate(E))
        cmap = tuple((v, Poly.var(v, vars, I.trunc)) for v in vars)
        return cls(vars, I, b, divs, base, dv, I, (), cmap, vars, len(E), 0)

    # views -----------------------------------------------------------------
    @property
    def fiber_vars(self) -> Tuple[str, ...]:
        skip = set(self.base) | set(self.I.coefficient_vars())
        if self.I.trunc:
            skip.add(self.I.trunc[0])
        return tuple(v for v in self.vars if v not in skip)

    @property
    def divisor_vars(self) -> Tuple[str, ...]:
        return tuple(d.var for d in self.E)

    @property
    def exc_exponents(self) -> Dict[int, int]:
        return dict(self.a)

    def divisor(self, var: str) -> Optional[Divisor]:
        for d in self.E:
            if d.var == var:
                return d
        return None

    def exceptional(self) -> Tuple[Divisor, ...]:
        return tuple(d for d in self.E if d.birth > 0)

    def map_dict(self) -> Dict[str, Poly]:
        return dict(self.chart_map)

    def bookkeeping_ok(self) -> bool:
        """I equals Ibar times the product of exceptional powers."""
        from .idealkit import ideal_equal
        prod = Poly.one(self.vars, self.I.trunc)
        births = {d.birth: d.var for d in self.E}
        for birth, k in self.a:
            prod = prod * Poly.var(births[birth], self.vars, self.I.trunc) ** k
        rebuilt = self.I.like([g * prod for g in self.Ibar.gens])
        return ideal_equal(rebuilt, self.I)

    def with_units(self, units: Sequence[Poly]) -> "MarkedChart":
        return replace(self, I=self.I.with_units(units), Ibar=self.Ibar.with_units(units))

    def label(self) -> str:
        E = ",".join(self.divisor_vars)
        return "%s; %d; (%s)" % (self.I, self.b, E)

    def to_json(self):
        out = {
            "vars": list(self.vars),
            "base": list(self.base),
            "ideal": [str(g) for g in self.I.gens],
            "mark": self.b,
            "E": [d.to_json() for d in self.E],
            "proper_transform": [str(g) for g in self.Ibar.gens],
            "exc_exponents": {str(b): k for b, k in self.a},
            "chart_map": {v: str(p) for v, p in self.chart_map},
        }
        if self.I.units:
            out["units"] = [str(u) for u in self.I.units]
        if self.I.params:
            out["params"] = sorted(self.I.params)
        if self.I.trunc:
            out["truncation"] = {"var": self.I.trunc[0], "n": self.I.trunc[1]}
        if self.I.alg:
            out["algebraic"] = {"var": self.I.alg[0], "minimal_polynomial": str(self.I.alg[1])}
        return out


# ---------------------------------------------------------------------------
# transforms on ideals


def _exc_poly(I: Ideal, exc: str, k: int) -> Poly:
    return Poly.monomial({exc: k}, I.vars, trunc=I.trunc)


def _divide_gens(I: Ideal, exc: str, k: int) -> List[Poly]:
    out = []
    i = I.vars.index(exc)
    for g in I.gens:
        terms = {}
        for e, c in g.terms.items():
            if e[i] < k:
                raise NotPermissibleError(
                    "center was not permissible: %s is not divisible by %s^%d" % (g, exc, k))
            terms[e[:i] + (e[i] - k,) + e[i + 1:]] = c
        out.append(Poly(I.vars, terms, I.trunc))
    return out


def controlled_transform(I: Ideal, b: int, exc: str) -> Ideal:
    """Divide a total transform by ``exc^b``."""
    if exc not in I.vars:
        raise RingMismatchError("unknown variable %r" % exc)
    return I.like(_divide_gens(I, exc, b))


def proper_transform(I: Ideal, exc: str) -> Tuple[Ideal, int]:
    """Divide by the largest power of ``exc`` dividing every generator."""
    if exc not in I.vars:
        raise RingMismatchError("unknown variable %r" % exc)
    a = min((g.order_along([exc]) for g in I.gens), default=0)
    a = int(a)
    return I.like(_divide_gens(I, exc, a)), a


def total_transform(I: Ideal, center_vars: Sequence[str], chart_var: str) -> Ideal:
    sub = chart_substitution(I.vars, center_vars, chart_var, I.trunc)
    return I.remap(lambda g: g.subs(sub))


def chart_substitution(vars, center_vars, chart_var, trunc=None) -> Dict[str, Poly]:
    e = Poly.var(chart_var, vars, trunc)
    return {v: Poly.var(v, vars, trunc) * e for v in center_vars if v != chart_var}


# ---------------------------------------------------------------------------
# chart operations


def _check_center(chart: MarkedChart, center_vars: Sequence[str]):
    for v in center_vars:
        if v not in chart.vars:
            raise InputError("center variable %r is not a coordinate of the chart" % v)
        if v in chart.base:
            raise InputError("the base variable %r cannot lie in a center" % v)
        if v in chart.I.coefficient_vars() or (chart.I.trunc and chart.I.trunc[0] == v):
            raise InputError("%r cannot lie in a center" % v)
    if len(set(center_vars)) != len(center_vars):
        raise InputError("repeated center variable")


def _compose_map(chart: MarkedChart, sub: Dict[str, Poly]) -> Tuple[Tuple[str, Poly], ...]:
    return tuple((v, p.subs(sub)) for v, p in chart.chart_map)


def _new_index(chart: MarkedChart) -> int:
    return chart.m + chart.depth + 1


def blowup(chart: MarkedChart, center_vars: Sequence[str]) -> List[MarkedChart]:
    """Blow up ``V(center_vars)``; one chart per center variable."""
    center_vars = tuple(center_vars)
    if len(center_vars) < 2:
        raise InputError("a blow-up needs a center of codimension at least 2; "
                         "use divide() for a hypersurface")
    _check_center(chart, center_vars)
    return [blowup_chart(chart, center_vars, v) for v in center_vars]


def blowup_chart(chart: MarkedChart, center_vars: Sequence[str], chart_var: str) -> MarkedChart:
    center_vars = tuple(center_vars)
    _check_center(chart, center_vars)
    if chart_var not in center_vars:
        raise InputError("chart variable must lie in the center")
    sub = chart_substitution(chart.vars, center_vars, chart_var, chart.I.trunc)
    total = total_transform(chart.I, center_vars, chart_var)
    I1 = controlled_transform(total, chart.b, chart_var)
    tb = total_transform(chart.Ibar, center_vars, chart_var)
    Ibar1, c = proper_transform(tb, chart_var)
    births = {d.birth: d.var for d in chart.E}
    a_new = c - chart.b
    a1 = []
    for birth, k in chart.a:
        if births[birth] in center_vars:
            a_new += k
        if births[birth] != chart_var:
            a1.append((birth, k))
    birth = chart.depth + 1
    if a_new < 0:
        raise NotPermissibleError("negative exceptional exponent; center was not permissible")
    a1.append((birth, a_new))
    E1 = tuple(d for d in chart.E if d.var != chart_var) + (Divisor(chart_var, birth, _new_index(chart)),)
    return replace(chart, I=I1, Ibar=Ibar1, E=E1, a=tuple(a1),
                   chart_map=_compose_map(chart, sub), depth=chart.depth + 1)


def divide(chart: MarkedChart, var: str) -> MarkedChart:
    """Transform along the hypersurface ``var = 0``: a codimension-one center.

    The ideal is divided by ``var^b``; an input divisor on ``var`` is
    replaced by the new exceptional one.
    """
    _check_center(chart, (var,))
    I1 = controlled_transform(chart.I, chart.b, var)
    Ibar1, c = proper_transform(chart.Ibar, var)
    births = {d.birth: d.var for d in chart.E}
    a_new = c - chart.b
    a1 = []
    for birth, k in chart.a:
        if births[birth] == var:
            a_new += k
        else:
            a1.append((birth, k))
    if a_new < 0:
        raise NotPermissibleError("negative exceptional exponent; center was not permissible")
    birth = chart.depth + 1
    a1.append((birth, a_new))
    E1 = tuple(d for d in chart.E if d.var != var) + (Divisor(var, birth, _new_index(chart)),)
    return replace(chart, I=I1, Ibar=Ibar1, E=E1, a=tuple(a1), depth=chart.depth + 1)


def _unit_coefficient(c: Poly, I: Ideal) -> bool:
    # a nonzero rational, or a unit series in the truncation variable
    if c.is_constant():
        return c.constant_term() != 0
    return bool(I.trunc) and not (set(c.support()) - {I.trunc[0]}) and c.constant_term() != 0


def change_coordinates(chart: MarkedChart, var: str, image: Poly) -> MarkedChart:
    """Apply the automorphism ``var -> image``.

    ``image`` must be ``c*var + g`` with ``c`` a unit scalar and ``g`` free of
    ``var`` so that the map is invertible.
    """
    if var in chart.base or var in chart.divisor_vars:
        raise InputError("cannot change the coordinate %r" % var)
    if var in chart.I.coefficient_vars() or (chart.I.trunc and chart.I.trunc[0] == var):
        raise InputError("cannot change the coordinate %r" % var)
    image = chart.I.poly(image)
    lin = image.coefficients_in(var)
    if set(lin) - {0, 1} or 1 not in lin or not _unit_coefficient(lin[1], chart.I):
        raise InputError("coordinate change is not triangular in %r" % var)
    sub = {var: image}
    I1 = chart.I.remap(lambda g: g.subs(sub))
    Ib = chart.Ibar.remap(lambda g: g.subs(sub))
    return replace(chart, I=I1, Ibar=Ib, chart_map=_compose_map(chart, sub))


def localize(chart: MarkedChart, units: Sequence[Poly]) -> MarkedChart:
    return chart.with_units([chart.I.poly(u) for u in units])


def drop_absent_divisors(chart: MarkedChart) -> MarkedChart:
    """Forget divisors whose variable is a unit on the chart (they do not
    meet it); their powers are units, so ``Ibar`` stays valid."""
    gone = {d.var for d in chart.E
            if chart.I.like([Poly.var(d.var, chart.vars, chart.I.trunc)]).is_trivial()}
    if not gone:
        return chart
    births = {d.birth for d in chart.E if d.var in gone}
    E = tuple(d for d in chart.E if d.var not in gone)
    a = tuple((b, k) for b, k in chart.a if b not in births)
    return replace(chart, E=E, a=a)


def extend_scalars(chart: MarkedChart, name: str, minpoly: Poly) -> MarkedChart:
    """Base change to Q(params)[name]/(minpoly); ``minpoly`` must be monic
    and irreducible in ``name``."""
    if chart.I.alg:
        raise InputError("the chart already carries an algebraic extension")
    if name in chart.vars:
        raise InputError("variable %r already exists" % name)
    vars = chart.vars + (name,)
    tr = chart.I.trunc
    mp = minpoly.embed(vars, None)
    alg = (name, mp)

    def lift(J: Ideal) -> Ideal:
        return Ideal([g.embed(vars, tr) for g in J.gens], vars, params=J.params,
                     units=[u.embed(vars, tr) for u in J.units], trunc=tr, alg=alg)

    cmap = tuple((v, p.embed(vars, tr)) for v, p in chart.chart_map)
    return replace(chart, vars=vars, I=lift(chart.I), Ibar=lift(chart.Ibar), chart_map=cmap)


@dataclass(frozen=True)
class Truncate:
    """Fiber parameter for an infinitesimal neighbourhood of order ``n`` at ``t0``."""

    n: int
    t0: Fraction = Fraction(0)


GENERIC = "generic"


def _fresh_name(base: str, taken) -> str:
    name = base
    k = 0
    while name in taken:
        k += 1
        name = "%s%d" % (base, k)
    return name


def fiberize(chart: MarkedChart, t0) -> MarkedChart:
    """Restrict a family chart to a fiber of its (single) base variable.

    ``t0`` is a rational, :data:`GENERIC`, or a :class:`Truncate`.
    """
    if len(chart.base) != 1:
        raise InputError("fiberize needs exactly one base variable")
    t = chart.base[0]
    I = chart.I
    if t0 == GENERIC or (isinstance(t0, str) and t0.lower() == GENERIC):
        Ig = Ideal(I.gens, I.vars, params=set(I.params) | {t}, units=I.units, trunc=I.trunc,
                   alg=I.alg)
        Ib = Ideal(chart.Ibar.gens, I.vars, params=Ig.params, units=I.units, trunc=I.trunc,
                   alg=I.alg)
        dv = tuple(v for v in chart.derivation_vars if v != t)
        return replace(chart, I=Ig, Ibar=Ib, base=(), derivation_vars=dv)
    if isinstance(t0, Truncate):
        if I.trunc or I.alg:
            raise InputError("chart is already truncated or extended")
        if t0.n < 0:
            raise InputError("truncation order must be >= 0")
        s = _fresh_name("s", set(I.vars) - {t})
        vars = tuple(s if v == t else v for v in I.vars)
        trunc = (s, t0.n)
        shift = Poly.var(t, I.vars) + Poly.constant(as_scalar(t0.t0), I.vars)

        def conv(p: Poly) -> Poly:
            q = p.subs({t: shift}) if t0.t0 else p
            return Poly(vars, q.terms, trunc)

        Is = Ideal([conv(g) for g in I.gens], vars, params=I.params,
                   units=[conv(u) for u in I.units], trunc=trunc)
        Ib = Ideal([conv(g) for g in chart.Ibar.gens], vars, params=I.params,
                   units=Is.units, trunc=trunc)
        cmap = tuple((v, conv(p)) for v, p in chart.chart_map)
        dv = tuple(v for v in chart.derivation_vars if v != t)
        return replace(chart, vars=vars, I=Is, Ibar=Ib, base=(), derivation_vars=dv,
                       chart_map=cmap)
    c = as_scalar(t0)
    keep = tuple(v for v in I.vars if v != t)

    def ev(p: Poly) -> Poly:
        return p.subs({t: c}).embed(keep, p.trunc)

    alg = (I.alg[0], I.alg[1].embed(keep, None)) if I.alg else None
    If = Ideal([ev(g) for g in I.gens], keep, params=I.params,
               units=[ev(u) for u in I.units], trunc=I.trunc, alg=alg)
    if If.is_zero():
        raise InputError("the fiber at t=%s has the zero ideal" % c)
    Ib = Ideal([ev(g) for g in chart.Ibar.gens], keep, params=I.params,
               units=If.units, trunc=I.trunc, alg=alg)
    cmap = tuple((v, ev(p)) for v, p in chart.chart_map)
    dv = tuple(v for v in chart.derivation_vars if v != t)
    return replace(chart, vars=keep, I=If, Ibar=Ib, base=(), derivation_vars=dv,
                   chart_map=cmap)


# ---------------------------------------------------------------------------
# chart trees


@dataclass(frozen=True)
class Center:
    """A center in one chart: the zero set of ``vars`` (after ``changes``)."""

    tag: str
    vars: Tuple[str, ...]
    changes: Tuple[Tuple[str, str], ...] = ()

    def to_json(self):
        out = {"tag": self.tag, "vars": list(self.vars)}
        if self.changes:
            out["changes"] = [{"var": v, "image": img} for v, img in self.changes]
        return out


@dataclass
class TreeNode:
    id: int
    chart: MarkedChart
    parent: Optional[int] = None
    chart_var: Optional[str] = None
    kind: str = "root"                      # root | blowup | division | localize
    step: int = 0
    center: Optional[Center] = None         # center chosen in this node
    value: object = None                    # value at that center
    regime: Optional[str] = None
    status: str = "open"
    note: str = ""
    # coordinate bookkeeping: ``link`` pulls functions back from the parent's
    # frame into this chart, ``changes`` are the chart's own coordinate changes
    link: tuple = field(default=(), repr=False)
    changes: tuple = field(default=(), repr=False)
    pre: Optional[MarkedChart] = field(default=None, repr=False)

    def to_json(self):
        out = {
            "id": self.id,
            "parent": self.parent,
            "kind": self.kind,
            "step": self.step,
            "chart_var": self.chart_var,
            "status": self.status,
            "chart": self.chart.to_json(),
        }
        if self.center is not None:
            out["center"] = self.center.to_json()
        if self.value is not None:
            out["value"] = str(self.value)
        if self.regime:
            out["regime"] = self.regime
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class ChartTree:
    nodes: List[TreeNode] = field(default_factory=list)
    steps: List[dict] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    checked: Dict[str, int] = field(default_factory=dict)   # invariant checks passed, by kind

    def add(self, chart: MarkedChart, parent: Optional[int] = None, **kw) -> TreeNode:
        node = TreeNode(len(self.nodes), chart, parent, **kw)
        self.nodes.append(node)
        return node

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]

    def children(self, node_id: int) -> List[TreeNode]:
        return [n for n in self.nodes if n.parent == node_id]

    def leaves(self) -> List[TreeNode]:
        parents = {n.parent for n in self.nodes}
        return [n for n in self.nodes if n.id not in parents]

    def depth(self) -> int:
        """Number of transformation steps along the longest path."""
        return max((n.step for n in self.nodes), default=0)

    def to_json(self):
        return {
            "nodes": [n.to_json() for n in self.nodes],
            "steps": [{k: (str(v) if k == "max_value" else v) for k, v in s.items()}
                      for s in self.steps],
            "notes": list(self.notes),
        }

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(), **kw)

    def to_dot(self) -> str:
        lines = ["digraph charts {", "  node [shape=box, fontname=monospace];"]
        for n in self.nodes:
            val = str(n.value) if n.value is not None else "-"
            label = "(%s; %s)" % (n.chart.label(), val)
            lines.append('  n%d [label="%s"];' % (n.id, label.replace('"', '\\"')))
        for n in self.nodes:
            if n.parent is not None:
                parent = self.nodes[n.parent]
                tag = parent.center.tag if parent.center is not None else n.kind
                lab = "%s %s" % (tag, n.chart_var or "")
                lines.append('  n%d -> n%d [label="%s"];' % (n.parent, n.id, lab.strip()))
        lines.append("}")
        return "\n".join(lines) + "\n"
