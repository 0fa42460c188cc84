"""Resolution functions and the resolution driver.

The driver works chart by chart.  Every chart carries a stack of levels:
the top level is the marked ideal of the chart; each lower level lives on
a hypersurface of maximal contact of the level above and is kept while
the pair (omega, n) of the upper level stays the same.

Lower levels are stored as finite sums of *parts*.  A part ``(J, c, mu)``
stands for the ideal ``J`` with the (possibly rational) mark ``c`` plus a
fixed bonus ``mu[v]`` along each coordinate hypersurface ``v = 0``; its
normalized order at a point ``x`` is ``ord_x(J)/c + sum of mu[v] over the
v vanishing at x``, and the order of a sum is the minimum over its parts.
Sums of powers such as coefficient ideals are represented this way without
expanding the powers: two marked ideals with the same normalized order
under all permissible transformations define the same resolution values.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import ceil, lcm
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import _factor
from .errors import (CertificationFailure, InputError, ResolveKitError, InvariantViolation, MaximalContactNotFound,
                     NonCoordinateCenter, NotPermissibleError, ResourceCapError)
from .exactalg import Poly
from .idealkit import (Ideal, alg_reduce, coefficient_ideal, delta, homogenize, ideal_equal,
                       exact_quotient, quotient,
                       restrict_to_hyperplane)
from .geom import (Center, ChartTree, Divisor, MarkedChart, TreeNode, blowup_chart,
                   change_coordinates, chart_substitution, divide, drop_absent_divisors,
                   extend_scalars, localize)

DEFAULT_MAX_STEPS = 64
_PAD = 24


# ---------------------------------------------------------------------------
# values


class RFValue:
    rank = 0

    def key(self) -> tuple:
        raise NotImplementedError

    def __lt__(self, other):
        return self.key() < other.key()

    def __le__(self, other):
        return self.key() <= other.key()

    def __gt__(self, other):
        return self.key() > other.key()

    def __ge__(self, other):
        return self.key() >= other.key()

    def __eq__(self, other):
        return isinstance(other, RFValue) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def flat(self) -> list:
        raise NotImplementedError

    def __str__(self):
        return "(" + ", ".join(self.flat()) + ")"

    def __repr__(self):
        return "%s%s" % (type(self).__name__, self)


class Bottom(RFValue):
    """Value below every point of the singular locus (resolved)."""

    def __init__(self, d: int = 0):
        self.d = d

    def key(self):
        return (0,)

    def flat(self):
        return ["0"]

    def to_json(self):
        return {"kind": "bottom", "dim": self.d}


class Top(RFValue):
    """The infinite value closing a codimension-one stratum."""

    def __init__(self, d: int = 0):
        self.d = d

    def key(self):
        return (3,)

    def flat(self):
        return ["inf"]

    def to_json(self):
        return {"kind": "top", "dim": self.d}


def _frac(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else "%d/%d" % (q.numerator, q.denominator)


class TPair(RFValue):
    """(omega, n) followed by the value of the lower-dimensional problem."""

    def __init__(self, omega, n: int, tail: RFValue):
        self.omega = Fraction(omega)
        self.n = int(n)
        self.tail = tail

    def key(self):
        return (1, self.omega, self.n) + (self.tail.key(),)

    def flat(self):
        return [_frac(self.omega), str(self.n)] + self.tail.flat()

    def to_json(self):
        return {"kind": "t", "omega": _frac(self.omega), "n": self.n, "tail": self.tail.to_json()}


class Monomial(RFValue):
    """Value in the monomial case: compared by (-p, total, indices)."""

    def __init__(self, p: int, total, indices: Sequence[int]):
        self.p = int(p)
        self.total = Fraction(total)
        self.indices = tuple(indices)

    def key(self):
        pad = self.indices + (0,) * max(0, _PAD - len(self.indices))
        return (2, -self.p, self.total, pad)

    def flat(self):
        return ["G(%d, %s, (%s))" % (-self.p, _frac(self.total), ",".join(map(str, self.indices)))]

    def to_json(self):
        return {"kind": "monomial", "gamma1": self.p, "gamma2": _frac(self.total),
                "gamma3": list(self.indices)}


# ---------------------------------------------------------------------------
# parts and loci


def _vpoly(ctx: Ideal, v: str) -> Poly:
    return Poly.var(v, ctx.vars, ctx.trunc)


def _nontrivial(I: Ideal) -> bool:
    return not I.is_trivial()


def _piece_key(I: Ideal):
    return tuple(sorted(str(g) for g in I.gens))


def _dedupe(pieces: List[Ideal]) -> List[Ideal]:
    seen = set()
    out = []
    for P in pieces:
        k = _piece_key(P)
        if k not in seen:
            seen.add(k)
            out.append(P)
    return out


def meet(A: List[Ideal], B: List[Ideal]) -> List[Ideal]:
    """Intersection of two unions of closed sets."""
    out = []
    for a in A:
        for b in B:
            s = a + b
            if _nontrivial(s):
                out.append(s.reduced() if len(s.gens) > 1 else s)
    return _dedupe(out)


def locus_ideal(pieces: List[Ideal], ctx: Ideal) -> Ideal:
    """An ideal whose zero set is the union of the pieces."""
    if not pieces:
        return ctx.like([1])
    acc = pieces[0]
    for P in pieces[1:]:
        acc = acc * P
    return acc


def locus_contained(A: List[Ideal], B: List[Ideal]) -> bool:
    if not A:
        return True
    if not B:
        return all(P.is_trivial() for P in A)
    U = locus_ideal(B, B[0])
    return all(all(P.radical_contains(g) for g in U.gens) for P in A)


def loci_equal(A: List[Ideal], B: List[Ideal]) -> bool:
    return locus_contained(A, B) and locus_contained(B, A)


class Part:
    """One summand ``(J, c, mu)`` of a marked sum."""

    __slots__ = ("J", "c", "mu", "_chain")

    def __init__(self, J: Ideal, c, mu=None, chain=None):
        self.J = J
        self.c = Fraction(c)
        self.mu = tuple(sorted((v, Fraction(w)) for v, w in dict(mu or {}).items() if w))
        self._chain = chain if chain is not None else [J]

    def mu_dict(self) -> Dict[str, Fraction]:
        return dict(self.mu)

    def derived(self, k: int, dvars) -> Ideal:
        chain = self._chain
        while len(chain) <= k:
            prev = chain[-1]
            if prev.gens and prev.is_trivial():
                chain.append(prev)
            else:
                chain.append(delta(prev, 1, dvars))
        return chain[k]

    def nilpotent(self) -> bool:
        """True when J vanishes identically on the closed fiber."""
        return bool(self.J.trunc) and all(g.reduce_nilpotent().is_zero() for g in self.J.gens)

    def max_order(self, dvars, cap: int = 400) -> Optional[int]:
        if self.nilpotent():
            return None
        k = 0
        while self.derived(k, dvars).is_trivial() is False:
            k += 1
            if k > cap:
                raise ResourceCapError("order computation did not terminate")
        return k

    def pieces(self, q, dvars, ctx: Ideal) -> List[Ideal]:
        """Closed set where the normalized order is at least ``q``."""
        q = Fraction(q)
        out = []
        names = [v for v, _ in self.mu]
        weights = dict(self.mu)
        for r in range(len(names) + 1):
            for T in itertools.combinations(names, r):
                need = q - sum((weights[v] for v in T), Fraction(0))
                xs = [_vpoly(ctx, v) for v in T]
                if need <= 0:
                    P = ctx.like(xs)
                    if not T:
                        return [P]
                else:
                    k = ceil(need * self.c)
                    D = self.derived(k - 1, dvars)
                    if D.is_trivial():
                        continue
                    P = D + ctx.like(xs) if xs else D
                if _nontrivial(P):
                    out.append(P)
        return _dedupe(out)

    def realize(self, ctx: Ideal) -> Tuple[Ideal, int]:
        """An ordinary ideal with integer mark equivalent to this part."""
        d = self.c.denominator
        for _, w in self.mu:
            d = lcm(d, (w * self.c).denominator)
        m = int(self.c * d)
        mono = {v: int(w * self.c * d) for v, w in self.mu}
        base = self.J if d == 1 else self.J ** d
        if mono:
            mp = Poly.monomial(mono, ctx.vars, trunc=ctx.trunc)
            base = ctx.like([g * mp for g in base.gens])
        return base, m

    def remap(self, ctx: Ideal, fn) -> "Part":
        return Part(ctx.like([fn(g) for g in self.J.gens]), self.c, self.mu)

    def rebase(self, ctx: Ideal) -> "Part":
        return Part(ctx.like(self.J.gens), self.c, self.mu)

    def __repr__(self):
        mu = ", ".join("%s:%s" % (v, _frac(w)) for v, w in self.mu)
        return "Part(%s, %s%s)" % (self.J, _frac(self.c), "; " + mu if mu else "")


def sum_pieces(parts: Sequence[Part], q, dvars, ctx: Ideal, start=None) -> List[Ideal]:
    loc = start if start is not None else [ctx.like([])]
    for P in parts:
        loc = meet(loc, P.pieces(q, dvars, ctx))
        if not loc:
            return []
    return loc


# ---------------------------------------------------------------------------
# levels


@dataclass
class SubState:
    key: Tuple[Fraction, int]
    S: frozenset
    z: str
    level: "Level"


@dataclass
class Level:
    ctx: Ideal
    dvars: Tuple[str, ...]
    parts: List[Part]
    E: Tuple[Divisor, ...] = ()
    omega_hist: Tuple[Fraction, ...] = ()
    depth: int = 0
    sub: Optional[SubState] = None
    last: Optional[Fraction] = None

    @classmethod
    def from_chart(cls, chart: MarkedChart, omega_hist=(), depth=None, sub=None) -> "Level":
        births = {d.birth: d.var for d in chart.E}
        mu = {births[b]: Fraction(k, chart.b) for b, k in chart.a if k}
        part = Part(chart.Ibar, chart.b, mu)
        return cls(chart.I.like([]), tuple(chart.derivation_vars), [part], tuple(chart.E),
                   tuple(omega_hist), chart.depth if depth is None else depth, sub)

    @property
    def dim(self) -> int:
        return len(self.dvars)

    def exc_vars(self) -> List[str]:
        return [d.var for d in self.E if d.birth > 0]

    def abar(self) -> Dict[str, Fraction]:
        out = {}
        for v in self.exc_vars():
            out[v] = min((P.mu_dict().get(v, Fraction(0)) for P in self.parts), default=Fraction(0))
        return out

    def ibar_parts(self) -> List[Part]:
        ab = self.abar()
        return [Part(P.J, P.c, {v: w - ab.get(v, 0) for v, w in P.mu}, P._chain)
                for P in self.parts]

    def sing(self) -> List[Ideal]:
        return sum_pieces(self.parts, 1, self.dvars, self.ctx)

    # coordinate bookkeeping ----------------------------------------------------
    def apply_change(self, var: str, image: Poly) -> "Level":
        if var not in self.ctx.vars:
            return self
        img = _restrict_poly(image, self.ctx)
        sub = {var: img}
        ctx = self.ctx.remap(lambda g: g.subs(sub))
        parts = [Part(ctx.like([g.subs(sub) for g in P.J.gens]), P.c, P.mu) for P in self.parts]
        s = self.sub
        if s is not None:
            s = replace(s, level=s.level.apply_change(var, img))
        return replace(self, ctx=ctx, parts=parts, sub=s)

    def localized(self, units: Sequence[Poly]) -> "Level":
        us = [_restrict_poly(u, self.ctx) for u in units]
        if any(u.is_zero() for u in us):
            return None
        ctx = self.ctx.with_units(us)
        mu_vars = {v for P in self.parts for v, _ in P.mu}
        gone = {v for v in mu_vars if ctx.like([_vpoly(ctx, v)]).is_trivial()}
        # a bonus along a hypersurface that misses the chart is a unit: drop it
        parts = [Part(ctx.like(P.J.gens), P.c, {v: w for v, w in P.mu if v not in gone})
                 for P in self.parts]
        E = tuple(d for d in self.E if not ctx.like([_vpoly(ctx, d.var)]).is_trivial())
        s = self.sub
        if s is not None:
            low = s.level.localized(us)
            s = replace(s, level=low) if low is not None else None
        return replace(self, ctx=ctx, parts=parts, E=E, sub=s)

    def extended(self, name: str, minpoly: Poly) -> "Level":
        vars = self.ctx.vars + (name,)
        tr = self.ctx.trunc
        mp = minpoly.embed(vars, None) if set(minpoly.support()) <= set(vars) else None
        if mp is None:
            raise InvariantViolation("minimal polynomial outside the level")
        ctx = Ideal([], vars, params=self.ctx.params,
                    units=[u.embed(vars, tr) for u in self.ctx.units], trunc=tr, alg=(name, mp))
        parts = [Part(ctx.like([g.embed(vars, tr) for g in P.J.gens]), P.c, P.mu)
                 for P in self.parts]
        s = self.sub
        if s is not None:
            s = replace(s, level=s.level.extended(name, minpoly))
        return replace(self, ctx=ctx, parts=parts, sub=s)


def _restrict_poly(p: Poly, ctx: Ideal) -> Poly:
    """Express ``p`` in the variables of ``ctx``, setting missing ones to 0."""
    if p.vars == ctx.vars:
        return p
    missing = [v for v in p.vars if v not in ctx.vars]
    if missing:
        p = p.subs({v: 0 for v in missing if v in p.support()}) if any(
            v in p.support() for v in missing) else p
    return p.embed(ctx.vars, ctx.trunc)


def _transform_level(L: Level, center: Sequence[str], e: str, new_index: int) -> Level:
    """Transform of a lower level by the blow-up (or division) with center
    ``V(center)`` in the chart of ``e``."""
    center = tuple(center)
    ctx0 = L.ctx
    ev = _vpoly(ctx0, e)
    sub = {v: _vpoly(ctx0, v) * ev for v in center if v != e}
    ctx = ctx0.remap(lambda g: g.subs(sub)) if sub else ctx0
    i = ctx.vars.index(e)
    parts = []
    for P in L.parts:
        gens = [g.subs(sub) for g in P.J.gens] if sub else list(P.J.gens)
        o = min(g.order_along([e]) for g in gens)
        o = int(o)
        if o:
            gens = [Poly(ctx.vars, {x[:i] + (x[i] - o,) + x[i + 1:]: c for x, c in g.terms.items()},
                         ctx.trunc) for g in gens]
        mu = P.mu_dict()
        bonus = Fraction(o) / P.c + sum((mu.get(v, Fraction(0)) for v in center), Fraction(0)) - 1
        if bonus < 0:
            raise NotPermissibleError("center not permissible for a lower level")
        mu.pop(e, None)
        mu[e] = bonus
        parts.append(Part(ctx.like(gens), P.c, mu))
    E = tuple(d for d in L.E if d.var != e) + (Divisor(e, L.depth + 1, new_index),)
    hist = L.omega_hist + ((L.last if L.last is not None else Fraction(0)),)
    sub = _transform_sub(L.sub, center, e, new_index)
    return Level(ctx, L.dvars, parts, E, hist, L.depth + 1, sub)


def _transform_sub(sub: Optional[SubState], center, e, new_index) -> Optional[SubState]:
    if sub is None or e == sub.z or sub.z not in center:
        return None
    low_center = tuple(v for v in center if v != sub.z)
    return replace(sub, level=_transform_level(sub.level, low_center, e, new_index))


# ---------------------------------------------------------------------------
# planning


class _Split(Exception):
    """The center has several disjoint components; localize first."""

    def __init__(self, components, changes=(), plain=None):
        super().__init__("center has %d components" % len(components))
        self.components = list(components)
        self.changes = list(changes)
        # plain components are lifted without the hypersurface equation
        self.plain = list(plain) if plain is not None else [False] * len(self.components)


class _NeedExtension(Exception):
    def __init__(self, poly: Poly, var: str, changes=()):
        super().__init__("center needs a field extension")
        self.poly = poly
        self.var = var
        self.changes = list(changes)


@dataclass
class Env:
    protected: frozenset
    base: frozenset
    divisors: frozenset = frozenset()
    checks: bool = True
    log: list = field(default_factory=list)
    certify: bool = False
    counts: dict = field(default_factory=dict)


@dataclass
class Plan:
    value: RFValue
    regime: str
    center: Tuple[str, ...] = ()
    changes: List[Tuple[str, Poly]] = field(default_factory=list)
    level: Optional[Level] = None
    omega: Fraction = Fraction(0)
    n: int = 0
    nice: Optional[list] = None
    zvar: Optional[str] = None
    pending: Optional[NonCoordinateCenter] = None


def _agree_generically(A: Ideal, f: Poly) -> bool:
    """``A`` and ``(f)`` coincide near the generic point of the irreducible
    hypersurface ``V(f)``; embedded components elsewhere are ignored."""
    F = A.like([f])
    if all(F.radical_contains(g) for g in quotient(A, f).gens):
        return False
    for h in A.gens:
        if not F.contains(h) and all(F.radical_contains(g) for g in quotient(F, h).gens):
            return False
    return True


def _plan(L: Level, env: Env) -> Plan:
    sing = L.sing()
    if not sing:
        return Plan(Bottom(L.dim), "resolved", level=replace(L, last=None, sub=None))
    omega, maxw = _omega(L, sing)
    if omega == 0:
        p, total, S = _gamma(L)
        val = Monomial(p, total, tuple(sorted(d.index for d in S)))
        return Plan(val, "monomial", tuple(d.var for d in S),
                    level=replace(L, last=Fraction(0), sub=None))
    hist = L.omega_hist + (omega,)
    s = hist.index(omega)
    Em = [d for d in L.E if d.birth <= s]
    Ep = tuple(d for d in L.E if d.birth > s)
    nbar, groups = _t_groups(L, maxw, Em)
    if len(groups) > 1:
        raise _Split([locus_ideal(g, L.ctx) for _, g in groups])
    S, tloc = groups[0]
    Svars = frozenset(d.var for d in S)
    key = (omega, nbar)
    if L.sub is not None and L.sub.key == key and L.sub.S == Svars:
        lp = _plan_lower(L.sub.level, env, L.ctx, L.sub.z, [])
        if lp.pending is not None:
            return Plan(TPair(omega, nbar, lp.value), "t-inductive", changes=lp.changes,
                        level=L, omega=omega, n=nbar, pending=lp.pending)
        if lp.regime == "resolved":
            raise InvariantViolation("lower level resolved while the t-locus is nonempty")
        L2 = L
        for v, img in lp.changes:
            L2 = L2.apply_change(v, img)
        L2 = replace(L2, last=omega, sub=replace(L2.sub, level=lp.level))
        return Plan(TPair(omega, nbar, lp.value), "t-inductive", lp.center + (L.sub.z,),
                    lp.changes, L2, omega, nbar, zvar=L.sub.z)
    comps = _codim1_components(L, tloc)
    if comps:
        if len(comps) > 1:
            raise _Split([L.ctx.like([f]) for f in comps])
        try:
            z, image = _coordinate_for(comps[0], L, env)
        except NonCoordinateCenter as nc:
            return Plan(TPair(omega, nbar, Top(L.dim - 1)), "t-codim1",
                        level=replace(L, last=omega, sub=None), omega=omega, n=nbar, pending=nc)
        if env.certify and L.ctx.trunc:
            here = locus_ideal(tloc, L.ctx)
            if not _agree_generically(here, comps[0]):
                raise CertificationFailure(
                    "the Max(t) ideal over the truncated base does not define the center",
                    {"locus": str(here), "center": str(comps[0])})
        changes = [(z, image)] if image is not None else []
        L2 = L.apply_change(z, image) if image is not None else L
        return Plan(TPair(omega, nbar, Top(L.dim - 1)), "t-codim1", (z,), changes,
                    replace(L2, last=omega, sub=None), omega, nbar)
    nice = nice_parts(L, omega, S)
    if env.checks:
        got = sum_pieces(nice, 1, L.dvars, L.ctx)
        if not loci_equal(got, tloc):
            raise InvariantViolation("singular locus of the nice object differs from Max(t)")
        env.counts["nice"] = env.counts.get("nice", 0) + 1
    z, image = _maximal_contact(nice, L, Ep, env, tloc)
    changes = [(z, image)] if image is not None else []
    L1 = L.apply_change(z, image) if image is not None else L
    if image is not None:
        sub = {z: image}
        nice = [P.remap(L1.ctx, lambda g: g.subs(sub)) for P in nice]
    else:
        nice = [P.rebase(L1.ctx) for P in nice]
    low = descend_parts(L1, nice, z, Ep)
    if env.checks:
        low_sing = low.sing()
        lifted = [_lift(P, L1.ctx, z) for P in low_sing]
        here = sum_pieces(nice, 1, L1.dvars, L1.ctx)
        if not loci_equal(lifted, here):
            raise InvariantViolation("singular loci differ across the descent")
        env.counts["descent"] = env.counts.get("descent", 0) + 1
    lp = _plan_lower(low, env, L1.ctx, z, changes)
    if lp.pending is not None:
        return Plan(TPair(omega, nbar, lp.value), "t-inductive", changes=changes + lp.changes,
                    level=L1, omega=omega, n=nbar, pending=lp.pending)
    if lp.regime == "resolved":
        raise InvariantViolation("descended object has empty singular locus")
    L2 = L1
    for v, img in lp.changes:
        L2 = L2.apply_change(v, img)
    L2 = replace(L2, last=omega, sub=SubState(key, Svars, z, lp.level))
    return Plan(TPair(omega, nbar, lp.value), "t-inductive", lp.center + (z,),
                changes + lp.changes, L2, omega, nbar, nice=nice, zvar=z)


def _plan_lower(low: Level, env: Env, upper_ctx: Ideal, z: str, changes) -> Plan:
    try:
        lp = _plan(low, env)
    except _Split as sp:
        sp.components = [C if plain else _lift(C, upper_ctx, z)
                         for C, plain in zip(sp.components, sp.plain)]
        sp.components = [_embed_ideal(C, upper_ctx) for C in sp.components]
        sp.changes = list(changes) + sp.changes
        raise
    except _NeedExtension as ne:
        ne.changes = list(changes) + ne.changes
        raise
    except NonCoordinateCenter as nc:
        nc.components = tuple(_lift(C, upper_ctx, z) if isinstance(C, Ideal) else C
                              for C in nc.components)
        raise
    if lp.pending is not None:
        nc = lp.pending
        nc.components = tuple(_lift(C, upper_ctx, z) for C in nc.components)
    return lp


def _embed_ideal(C: Ideal, ctx: Ideal) -> Ideal:
    return ctx.like([g.embed(ctx.vars, ctx.trunc) for g in C.gens])


def _lift(C: Ideal, ctx: Ideal, z: str) -> Ideal:
    gens = [g.embed(ctx.vars, ctx.trunc) for g in C.gens]
    return ctx.like(gens + [_vpoly(ctx, z)])


def _omega(L: Level, sing: List[Ideal]):
    iparts = L.ibar_parts()
    cands = set()
    for P in iparts:
        mo = P.max_order(L.dvars)
        if mo is None:
            continue
        ws = [w for _, w in P.mu]
        sums = {Fraction(0)}
        for w in ws:
            sums |= {x + w for x in sums}
        for m in range(mo + 1):
            for sb in sums:
                cands.add(Fraction(m) / P.c + sb)
    for q in sorted(cands, reverse=True):
        if q <= 0:
            break
        loc = sum_pieces(iparts, q, L.dvars, L.ctx, start=sing)
        if loc:
            return q, loc
    return Fraction(0), sing


def _t_groups(L: Level, maxw: List[Ideal], Em):
    Em = sorted(Em, key=lambda d: d.index)
    for k in range(min(len(Em), L.dim), 0, -1):
        found = []
        for S in itertools.combinations(Em, k):
            xs = L.ctx.like([_vpoly(L.ctx, d.var) for d in S])
            pcs = [P + xs for P in maxw]
            pcs = _dedupe([P for P in pcs if _nontrivial(P)])
            if pcs:
                found.append((S, pcs))
        if found:
            return k, found
    return 0, [((), maxw)]


def _gamma(L: Level):
    ab = L.abar()
    divs = [d for d in L.E if ab.get(d.var, 0) > 0]
    for p in range(1, len(divs) + 1):
        best = None
        for S in itertools.combinations(divs, p):
            tot = sum((ab[d.var] for d in S), Fraction(0))
            if tot < 1:
                continue
            if L.ctx.like([_vpoly(L.ctx, d.var) for d in S]).is_trivial():
                continue
            key = (tot, tuple(sorted((d.index for d in S), reverse=True)))
            if best is None or key > best[0]:
                best = (key, S)
        if best is not None:
            return p, best[0][0], best[1]
    raise InvariantViolation("monomial case without a singular stratum")


def nice_parts(L: Level, omega: Fraction, S) -> List[Part]:
    """Parts of the auxiliary object whose singular locus is Max(t)."""
    ab = L.abar()
    out = []
    for P in L.ibar_parts():
        out.append(Part(P.J, P.c * omega, {v: w / omega for v, w in P.mu}, P._chain))
    if omega < 1:
        mono = {v: a / (1 - omega) for v, a in ab.items() if a > 0}
        if mono:
            out.append(Part(L.ctx.like([1]), 1, mono))
    for d in S:
        out.append(Part(L.ctx.like([1]), 1, {d.var: 1}))
    return out


def _space_support(f: Poly, L: Level) -> List[str]:
    sup = set(f.support())
    return [v for v in L.ctx.vars if v in sup and v not in L.ctx.coefficient_vars()
            and not (L.ctx.trunc and v == L.ctx.trunc[0])]


def _codim1_components(L: Level, tloc: List[Ideal]) -> List[Poly]:
    out: List[Poly] = []
    for P in tloc:
        gens = [g.reduce_nilpotent().with_trunc(None) if g.trunc else g for g in P.gens]
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            continue
        g = _factor.gcd(gens)
        for f, _ in _factor.factor(g):
            if L.ctx.trunc:
                f = Poly(f.vars, f.terms, L.ctx.trunc)
            if L.ctx.alg:
                f = alg_reduce(f, L.ctx.alg)
            for h in _split_over_extension(f, L):
                if not _space_support(h, L):
                    continue
                if L.ctx.trunc:
                    h = _lift_component(h, P) or _lift_root(h, P, L) or h
                if L.ctx.like([h]).is_trivial():
                    continue
                if any(L.ctx.like([h]).radical_contains(o) and L.ctx.like([o]).radical_contains(h)
                       for o in out):
                    continue
                out.append(h)
    return out


def _lift_component(f: Poly, P: Ideal) -> Optional[Poly]:
    """A generator of P over the truncated base whose closed fiber is ``f``."""
    target = f.reduce_nilpotent()
    e = max(target.terms)
    for g in P.reduced().gens:
        g0 = g.reduce_nilpotent()
        if e not in g0.terms or len(g0.terms) != len(target.terms):
            continue
        r = target.terms[e] / g0.terms[e]
        if (g0 * r - target).is_zero():
            return g * r
    return None


def _lift_root(h: Poly, P: Ideal, L: Level) -> Optional[Poly]:
    """Lift a factor ``y - a`` found modulo the truncation to a factor
    ``y - r`` of a generator of P over the truncated base (simple roots only)."""
    sp = _space_support(h, L)
    if len(sp) != 1 or h.degree(sp[0]) != 1:
        return None
    y = sp[0]
    co = h.coefficients_in(y)
    if not co[1].is_constant():
        return None
    zero = Poly.zero(h.vars, h.trunc)
    a = -co.get(0, zero) * (1 / co[1].constant_term())
    alg = L.ctx.alg

    def red(p):
        return alg_reduce(p, alg) if alg else p

    coeff_vars = {alg[0]} if alg else set()
    for g in P.gens:
        if not red(g.subs({y: a})).reduce_nilpotent().is_zero():
            continue
        d = red(g.diff(y).subs({y: a})).reduce_nilpotent()
        if d.is_zero() or set(d.support()) - coeff_vars:
            continue
        if d.is_constant():
            u = Poly.constant(1 / d.constant_term(), h.vars, h.trunc)
        else:
            u = _factor.invert_mod(d, alg[1], alg[0]).with_trunc(h.trunc)
        r = a
        for _ in range(L.ctx.trunc[1] + 1):
            r = red(r - red(g.subs({y: r})) * u)
        if red(g.subs({y: r})).is_zero():
            return Poly.var(y, h.vars, h.trunc) - r
    return None


def _split_over_extension(f: Poly, L: Level) -> List[Poly]:
    """Split a univariate factor at the adjoined root of the extension."""
    if not L.ctx.alg:
        return [f]
    sp = _space_support(f, L)
    if len(sp) != 1 or f.degree(sp[0]) < 2:
        return [f]
    y = sp[0]
    name = L.ctx.alg[0]
    a = Poly.var(name, f.vars, f.trunc)
    out = []
    rest = f
    while rest.degree(y) >= 1 and alg_reduce(rest.subs({y: a}), L.ctx.alg).is_zero():
        rest = _synthetic_div(rest, y, a)
        out.append(Poly.var(y, f.vars, f.trunc) - a)
    if rest.degree(y) >= 1:
        rest = alg_reduce(rest, L.ctx.alg)
        kept = Poly.one(f.vars, f.trunc)
        for g, k in _factor.factor(rest):
            g = Poly(f.vars, g.terms, f.trunc)
            if _space_support(g, L):
                kept = kept * g ** k
        out.append(kept)
    return out


def _synthetic_div(f: Poly, y: str, r: Poly) -> Poly:
    """Exact quotient of ``f`` by the monic ``y - r`` (remainder discarded)."""
    cs = f.coefficients_in(y)
    n = max(cs)
    yv = Poly.var(y, f.vars, f.trunc)
    q = Poly.zero(f.vars, f.trunc)
    carry = Poly.zero(f.vars, f.trunc)
    for k in range(n, 0, -1):
        carry = cs.get(k, Poly.zero(f.vars, f.trunc)) + carry * r
        q = q + carry * yv ** (k - 1)
    return q


def _scalar_inverse(c: Poly, ctx: Ideal) -> Optional[Poly]:
    """Inverse of a rational constant, or of a unit series in the truncation variable."""
    if c.is_constant():
        k = c.constant_term()
        return None if k == 0 else Poly.constant(1 / k, c.vars, c.trunc)
    if not ctx.trunc or set(c.support()) - {ctx.trunc[0]}:
        return None
    k = c.constant_term()
    if k == 0:
        return None
    h = 1 - c * (1 / k)
    inv = Poly.constant(1, c.vars, c.trunc)
    acc = inv
    for _ in range(ctx.trunc[1]):
        acc = acc * h
        inv = inv + acc
    return inv * (1 / k)


def _solve_for(u: Poly, z: str, ctx: Ideal) -> Optional[Poly]:
    """``rest`` with ``u = unit*(z + rest)``, or None when the z-coefficient is not a unit."""
    if u.degree(z) != 1:
        return None
    co = u.coefficients_in(z)
    inv = _scalar_inverse(co[1], ctx)
    if inv is None:
        return None
    return (u - co[1] * Poly.var(z, u.vars, u.trunc)) * inv


def _coordinate_for(f: Poly, L: Level, env: Env) -> Tuple[str, Optional[Poly]]:
    """A variable ``z`` and a change making ``V(f) = V(z)``."""
    sup = _space_support(f, L)
    if len(f.terms) == 1 and len(sup) == 1 and f.degree(sup[0]) == 1:
        z = sup[0]
        if z in env.base:
            raise NonCoordinateCenter("center lies over a point of the base",
                                      components=(L.ctx.like([f]),))
        if z not in L.dvars:
            raise NonCoordinateCenter("center is not a fiber hypersurface",
                                      components=(L.ctx.like([f]),))
        return z, None
    cands = []
    for z in L.dvars:
        if z in env.base or z in env.protected or z not in sup:
            continue
        rest = _solve_for(f, z, L.ctx)
        if rest is None:
            continue
        image = Poly.var(z, f.vars, f.trunc) - rest
        cands.append((len(f.terms), L.dvars.index(z), z, image))
    if cands:
        cands.sort(key=lambda t: (t[0], t[1]))
        return cands[0][2], cands[0][3]
    _unblock(L, env, [L.ctx.like([f])], [z for z in sup if f.degree(z) == 1])
    if (len(sup) == 1 and sup[0] not in env.base and not L.ctx.alg and f.degree(sup[0]) == 2
            and set(f.coefficients_in(sup[0])[2].support()) <= L.ctx.params):
        raise _NeedExtension(f.reduce_nilpotent().with_trunc(f.trunc) if f.trunc else f, sup[0])
    raise NonCoordinateCenter("center %s is not a coordinate hypersurface" % f,
                              components=(L.ctx.like([f]),))


def _unblock(L: Level, env: Env, locus: List[Ideal], cands) -> None:
    """Split off a divisor that blocks a coordinate change but misses the locus."""
    for z in cands:
        if z not in env.divisors or z not in L.dvars:
            continue
        zp = _vpoly(L.ctx, z)
        if all((P + L.ctx.like([zp])).is_trivial() for P in locus):
            raise _Split([locus_ideal(locus, L.ctx), L.ctx.like([zp])], plain=[False, True])


def _maximal_contact(nice: List[Part], L: Level, Ep, env: Env, tloc=None) -> Tuple[str, Optional[Poly]]:
    eplus = {d.var for d in Ep}
    allowed = [v for v in L.dvars if v not in env.base and v not in eplus]
    order = sorted(range(len(nice)), key=lambda i: (not nice[i].J.gens or nice[i].J.is_trivial(), i))
    tried = []
    for i in order:
        P = nice[i]
        if P.nilpotent():
            continue
        R, m = P.realize(L.ctx)
        D = delta(R, m - 1, L.dvars)
        gens = list(D.gens)
        pool = list(gens)
        if len(gens) <= 8:
            for g, h in itertools.combinations(gens, 2):
                pool.append(g + h)
                pool.append(g - h)
        best = None
        for u in pool:
            for z in allowed:
                rest = _solve_for(u, z, L.ctx)
                if rest is None:
                    continue
                if not rest.is_zero() and z in env.protected:
                    continue
                key = (not rest.is_zero(), len(u.terms), allowed.index(z), str(u))
                if best is None or key < best[0]:
                    image = Poly.var(z, u.vars, u.trunc) - rest if not rest.is_zero() else None
                    best = (key, z, image)
        if best is None and L.ctx.units:
            stripped = [h for h in (_strip_units(g, L.ctx) for g in gens) if h is not None]
            for u in stripped:
                for z in allowed:
                    rest = _solve_for(u, z, L.ctx)
                    if rest is None:
                        continue
                    if not rest.is_zero() and z in env.protected:
                        continue
                    key = (not rest.is_zero(), len(u.terms), allowed.index(z), str(u))
                    if best is None or key < best[0]:
                        image = Poly.var(z, u.vars, u.trunc) - rest if not rest.is_zero() else None
                        best = (key, z, image)
        if best is not None:
            return best[1], best[2]
        if tloc:
            # a divisor missing the locus drops out of the copy, even one in E+
            blocked = [z for z in L.dvars if z in env.protected and z not in env.base
                       and any(u.degree(z) == 1 for u in pool)]
            _unblock(L, env, tloc, blocked)
        tried.append(gens)
    if tloc:
        for gens in tried:
            _localize_factor(L, gens, allowed, env, tloc)
    raise MaximalContactNotFound("no hypersurface of maximal contact found")


def _localize_factor(L: Level, gens, allowed, env: Env, tloc: List[Ideal]) -> None:
    """Split off the zero set of a factor that misses the locus, when dropping
    it would leave an order-one element."""
    if L.ctx.trunc or L.ctx.alg:
        return
    locus = locus_ideal(tloc, L.ctx)
    for g in gens:
        facs = _factor.factor(g)
        if len(facs) < 2:
            continue
        # factors cutting the locus into disjoint pieces: treat each piece apart
        pieces = [locus + L.ctx.like([f]) for f, _ in facs if not f.is_constant()]
        pieces = [P for P in pieces if not P.is_trivial()]
        if len(pieces) > 1 and all((A + B).is_trivial()
                                   for A, B in itertools.combinations(pieces, 2)):
            raise _Split(pieces)
        away =[f for f, _ in facs if not f.is_constant() and not L.ctx.like([f]).is_trivial()
                and (locus + L.ctx.like([f])).is_trivial()]
        if not away:
            continue
        rest = Poly.one(g.vars)
        for f, k in facs:
            if f not in away:
                rest = rest * f ** k
        for z in allowed:
            r = _solve_for(rest, z, L.ctx)
            if r is not None and (r.is_zero() or z not in env.protected):
                cut = away[0]
                for f in away[1:]:
                    cut = cut * f
                raise _Split([locus, L.ctx.like([cut])], plain=[False, True])


def _strip_units(g: Poly, ctx: Ideal) -> Optional[Poly]:
    """``g`` with its factors that are units on the chart removed."""
    if ctx.trunc:
        return _strip_units_truncated(g, ctx)
    out = Poly.one(g.vars)
    dropped = False
    for f, k in _factor.factor(g):
        if ctx.like([f]).is_trivial():
            dropped = True
            continue
        out = out * f ** k
    return out if dropped else None


def _strip_units_truncated(g: Poly, ctx: Ideal) -> Optional[Poly]:
    # factor modulo the truncation; keep the non-unit part when it divides
    # g exactly and leaves a unit cofactor
    h = Poly.one(g.vars, g.trunc)
    dropped = False
    for f, k in _factor.factor(g):
        f = f.with_trunc(g.trunc)
        if ctx.like([f]).is_trivial():
            dropped = True
            continue
        h = h * f ** k
    if not dropped or h.is_constant():
        return None
    try:
        q = exact_quotient(g.with_trunc(None), h.with_trunc(None))
    except ValueError:
        return None
    if not ctx.like([q.with_trunc(g.trunc)]).is_trivial():
        return None
    return h


def descend_parts(L1: Level, nice: List[Part], z: str, Ep) -> Level:
    """The object induced on ``z = 0`` (coefficient ideal, part by part)."""
    low_ctx = restrict_to_hyperplane(L1.ctx, z)
    dv = tuple(v for v in L1.dvars if v != z)
    parts = []
    seen = set()
    for P in nice:
        R, m = P.realize(L1.ctx)
        D = R
        for i in range(m):
            if i:
                D = delta(D, 1, L1.dvars)
            Dz = restrict_to_hyperplane(D, z)
            if Dz.is_zero() or Part(Dz, 1).nilpotent():
                continue
            Dz = low_ctx.like(Dz.gens)
            if len(Dz.gens) > 1:
                Dz = Dz.reduced()
            k = (_piece_key(Dz), m - i)
            if k in seen:
                continue
            seen.add(k)
            parts.append(Part(Dz, m - i))
    if not parts:
        raise InvariantViolation("descended object is zero")
    E = tuple(Divisor(d.var, 0, d.index) for d in Ep if d.var != z)
    return Level(low_ctx, dv, parts, E)


# ---------------------------------------------------------------------------
# separating components


def _unity(A: Ideal, B: Ideal, maxdeg: int = 3) -> Tuple[Poly, Poly]:
    """``p`` in A and ``q`` in B with ``p + q`` a nonzero constant, or a
    nonzero polynomial in the parameters (a unit of the chart)."""
    import sympy
    from .idealkit import raw_groebner, _plain

    vars, polys = B._plain_gens()
    order = B._context_order(vars)
    gb = raw_groebner(polys, order)
    space = list(A.vars)
    alg = A.alg
    params = sorted(A.params)
    targets = [Poly.one(vars)]
    for d in range(1, maxdeg + 1):
        for combo in itertools.combinations_with_replacement(params, d):
            e = {}
            for v in combo:
                e[v] = e.get(v, 0) + 1
            targets.append(Poly.monomial(e, vars))
    for deg in range(maxdeg + 1):
        monos = [Poly.one(vars)]
        for dgr in range(1, deg + 1):
            for combo in itertools.combinations_with_replacement(space, dgr):
                if alg and combo.count(alg[0]) >= alg[1].degree(alg[0]):
                    continue
                if A.trunc and combo.count(A.trunc[0]) > A.trunc[1]:
                    continue
                e = {}
                for v in combo:
                    e[v] = e.get(v, 0) + 1
                monos.append(Poly.monomial(e, vars))
        cols = []
        meta = []
        for g in A.gens:
            gp = _plain(g)
            for mnm in monos:
                cols.append(_nf_full(mnm * gp, gb, order))
                meta.append(mnm * gp)
        for h in targets:
            target = _nf_full(h, gb, order)
            if target.is_zero():
                continue
            keys = sorted({e for c in cols for e in c.terms} | set(target.terms))
            M = sympy.Matrix([[sympy.Rational(str(c.terms.get(k, 0))) for c in cols] for k in keys])
            rhs = sympy.Matrix([sympy.Rational(str(target.terms.get(k, 0))) for k in keys])
            try:
                sol, free = M.gauss_jordan_solve(rhs)
            except ValueError:
                continue
            sol = sol.subs({p: 0 for p in free})
            p = Poly.zero(vars)
            for coef, poly in zip(sol, meta):
                coef = sympy.Rational(coef)
                if coef:
                    p = p + poly * Fraction(int(coef.p), int(coef.q))
            p = Poly(A.vars, p.terms, A.trunc)
            q = Poly(A.vars, h.terms, A.trunc) - p
            return p, q
    raise NonCoordinateCenter("could not separate the components of the center")


def _nf_full(f: Poly, gb, order) -> Poly:
    """Normal form scaled back to the true remainder (not just up to a constant)."""
    if f.is_zero() or not gb:
        return f
    r = Poly.zero(f.vars)
    p = f
    leads = [(order.leading(g), g) for g in gb]
    while not p.is_zero():
        e, c = order.leading(p)
        for (ge, gc), g in leads:
            if all(a <= b for a, b in zip(ge, e)):
                shift = tuple(a - b for a, b in zip(e, ge))
                p = p - g * Poly(f.vars, {shift: c / gc})
                break
        else:
            t = Poly(f.vars, {e: c})
            r = r + t
            p = p - t
    return r


def separate(components: List[Ideal]) -> List[List[Poly]]:
    """Units for localized copies, one copy per component, covering the chart."""
    out = []
    prefix: List[Poly] = []
    comps = list(components)
    for i in range(len(comps) - 1):
        rest = comps[i + 1]
        for C in comps[i + 2:]:
            rest = rest * C
        p, q = _unity(comps[i], rest)
        out.append(prefix + [q])
        prefix = prefix + [p]
    out.append(prefix)
    return out


# ---------------------------------------------------------------------------
# driver


def _env_for(chart: MarkedChart, checks: bool, log) -> Env:
    prot = set(chart.divisor_vars) | set(chart.base) | set(chart.I.coefficient_vars())
    if chart.I.trunc:
        prot.add(chart.I.trunc[0])
    return Env(frozenset(prot), frozenset(chart.base), frozenset(chart.divisor_vars), checks, log)


def _fresh(base: str, taken) -> str:
    name = base
    k = 0
    while name in taken:
        k += 1
        name = "%s%d" % (base, k)
    return name


def plan_chart(chart: MarkedChart, level: Level, checks=True, log=None):
    """Plan the next center of one chart; raises the internal split signals."""
    env = _env_for(chart, checks, log if log is not None else [])
    return _plan(level, env)


StopRule = Callable[[TreeNode, Plan, Level], Optional[str]]


def resolve(root: MarkedChart, max_steps: int = DEFAULT_MAX_STEPS, checks: bool = True,
            stop: Optional[StopRule] = None, before: Optional[Callable] = None,
            certify: bool = False) -> ChartTree:
    """Run the resolution algorithm chart by chart.

    ``stop(node, plan, level)`` may end a chart before its center is used;
    ``before(node, level)`` is consulted before planning.  Errors raised
    while handling a chart carry ``step``, ``node`` and ``tree`` attributes.
    """
    tree = ChartTree()
    node = tree.add(root)
    states: Dict[int, Level] = {node.id: Level.from_chart(root)}
    queue = deque([node.id])
    tags = itertools.count()
    run = (max_steps, checks, stop, before, certify)
    while queue:
        nid = queue.popleft()
        node = tree.nodes[nid]
        try:
            _advance(tree, node, states, queue, tags, *run)
        except ResolveKitError as err:
            if getattr(err, "step", None) is None:
                err.step = node.step
            err.node = node.id
            err.tree = tree
            raise
    _summarize(tree)
    return tree


def _advance(tree, node, states, queue, tags, max_steps, checks, stop, before, certify):
    chart = node.chart
    L = states.pop(node.id)
    nid = node.id
    if before is not None:
        reason = before(node, L)
        if reason:
            node.status = "stopped"
            node.note = reason
            return
    env = replace(_env_for(chart, checks, tree.notes), certify=certify, counts=tree.checked)
    try:
        plan = _plan(L, env)
    except _Split as sp:
        chart2, L2 = _apply_changes(chart, L, sp.changes)
        unit_sets = separate([_in_chart(C, chart2) for C in sp.components])
        for us in unit_sets:
            ch = drop_absent_divisors(localize(chart2, us))
            L3 = L2.localized(us)
            L3 = replace(L3, ctx=ch.I.like([]), parts=[P.rebase(ch.I.like([])) for P in L3.parts])
            child = tree.add(ch, nid, kind="localize", step=node.step,
                             link=tuple({v: img} for v, img in sp.changes))
            states[child.id] = L3
            queue.append(child.id)
        node.status = "split"
        node.note = "%d disjoint pieces" % len(sp.components)
        return
    except _NeedExtension as ne:
        chart2, L2 = _apply_changes(chart, L, ne.changes)
        name = _fresh("alpha", chart2.vars)
        tr = chart2.I.trunc
        f = ne.poly.embed(chart2.vars, tr) if ne.poly.vars != chart2.vars else ne.poly
        lead = f.coefficients_in(ne.var)[f.degree(ne.var)]
        vars2 = chart2.vars + (name,)
        fv = f.embed(vars2, tr)
        mp = fv.subs({ne.var: Poly.var(name, vars2, tr)})
        if lead.is_constant():
            mp = mp * (1 / lead.constant_term())
        ch = extend_scalars(chart2, name, mp)
        L3 = L2.extended(name, mp)
        L3 = replace(L3, ctx=ch.I.like([]), parts=[P.rebase(ch.I.like([])) for P in L3.parts])
        child = tree.add(ch, nid, kind="extend", step=node.step,
                         link=tuple({v: img} for v, img in ne.changes))
        child.note = "adjoined %s with %s = 0" % (name, mp)
        states[child.id] = L3
        queue.append(child.id)
        node.status = "extended"
        return
    node.value = plan.value
    node.regime = plan.regime
    node.pre = chart
    if plan.regime == "resolved":
        node.status = "resolved"
        return
    if stop is not None:
        reason = stop(node, plan, L)
        if reason:
            node.status = "stopped"
            node.note = reason
            return
    if plan.pending is not None:
        raise plan.pending
    if node.step >= max_steps:
        raise ResourceCapError("step cap of %d transformations exceeded" % max_steps)
    chart2 = chart
    for v, img in plan.changes:
        chart2 = change_coordinates(chart2, v, img)
    node.chart = chart2
    node.changes = tuple(plan.changes)
    bad = [v for v in plan.center if v in chart2.base]
    if bad:
        raise NonCoordinateCenter("the center contains the base variable %s" % bad[0],
                                  components=(chart2.I.like([Poly.var(v, chart2.vars, chart2.I.trunc)
                                                             for v in plan.center]),),
                                  step=node.step)
    tag = "C%d.%d" % (node.step, next(tags))
    node.center = Center(tag, plan.center, tuple((v, str(img)) for v, img in plan.changes))
    node.status = "blown-up"
    Lp = plan.level
    new_index = chart2.m + chart2.depth + 1
    if len(plan.center) == 1:
        children = [(divide(chart2, plan.center[0]), plan.center[0], "division")]
    else:
        children = [(blowup_chart(chart2, plan.center, v), v, "blowup") for v in plan.center]
    for ch, v, kind in children:
        sub = _transform_sub(Lp.sub, plan.center, v, new_index)
        Lc = Level.from_chart(ch, Lp.omega_hist + (plan.omega,), ch.depth, sub)
        if checks and not ch.bookkeeping_ok():
            raise InvariantViolation("transform bookkeeping identity failed")
        link = () if kind == "division" else (
            chart_substitution(chart2.vars, plan.center, v, chart2.I.trunc),)
        child = tree.add(ch, nid, chart_var=v, kind=kind, step=node.step + 1, link=link)
        states[child.id] = Lc
        queue.append(child.id)


def _in_chart(C: Ideal, chart: MarkedChart) -> Ideal:
    return chart.I.like([g.embed(chart.vars, chart.I.trunc) for g in C.gens])


def _apply_changes(chart: MarkedChart, L: Level, changes):
    for v, img in changes:
        chart = change_coordinates(chart, v, img)
        L = L.apply_change(v, img)
    ctx = chart.I.like([])
    return chart, replace(L, ctx=ctx, parts=[P.rebase(ctx) for P in L.parts])


def _summarize(tree: ChartTree):
    steps: Dict[int, dict] = {}
    for n in tree.nodes:
        if n.center is None or n.value is None:
            continue
        rec = steps.setdefault(n.step, {"step": n.step, "max_value": None, "regime": n.regime,
                                        "centers": []})
        rec["centers"].append({"node": n.id, **n.center.to_json()})
        if rec["max_value"] is None or n.value > rec["max_value"]:
            rec["max_value"] = n.value
            rec["regime"] = n.regime
    tree.steps = [steps[k] for k in sorted(steps)]


def resolved_leaves(tree: ChartTree) -> bool:
    """Every leaf chart has an empty singular locus."""
    for n in tree.leaves():
        I, b = n.chart.I, n.chart.b
        if not delta(I, b - 1, n.chart.derivation_vars).is_trivial():
            return False
    return True


def path_values(tree: ChartTree) -> List[List[Tuple[str, RFValue]]]:
    """For each leaf, the (regime, value) sequence along its path."""
    out = []
    for leaf in tree.leaves():
        seq = []
        n = leaf
        while n is not None:
            if n.value is not None and n.center is not None:
                seq.append((n.regime, n.value))
            n = tree.nodes[n.parent] if n.parent is not None else None
        out.append(list(reversed(seq)))
    return out


# ---------------------------------------------------------------------------
# single-chart operations


def _history_level(chart: MarkedChart, history: Sequence = ()) -> Level:
    return Level.from_chart(chart, tuple(Fraction(h) for h in history))


def omega_max(chart: MarkedChart) -> Tuple[Fraction, Ideal]:
    L = Level.from_chart(chart)
    sing = L.sing()
    if not sing:
        raise InputError("the singular locus is empty")
    w, loc = _omega(L, sing)
    return w, locus_ideal(loc, L.ctx)


def t_max(chart: MarkedChart, history: Sequence = ()) -> Tuple[Tuple[Fraction, int], Ideal]:
    """Maximum of (omega, n) and its locus; ``history`` lists earlier maxima of omega."""
    L = _history_level(chart, history)
    sing = L.sing()
    if not sing:
        raise InputError("the singular locus is empty")
    w, maxw = _omega(L, sing)
    if w == 0:
        raise InputError("monomial case: omega vanishes")
    hist = L.omega_hist + (w,)
    s = hist.index(w)
    nbar, groups = _t_groups(L, maxw, [d for d in L.E if d.birth <= s])
    pieces = [P for _, g in groups for P in g]
    return (w, nbar), locus_ideal(pieces, L.ctx)


def gamma(chart: MarkedChart) -> Tuple[Monomial, Tuple[str, ...]]:
    """Monomial-case value and center for a chart whose ideal is monomial."""
    from .idealkit import monomial_exponents
    E = chart.divisor_vars
    ex = monomial_exponents(chart.I, E)
    if ex is None:
        raise InputError("the chart is not monomial in its divisors")
    alpha = {v: Fraction(k, chart.b) for v, k in zip(E, ex)}
    divs = [d for d in chart.E if alpha[d.var] > 0]
    for p in range(1, len(divs) + 1):
        best = None
        for S in itertools.combinations(divs, p):
            tot = sum((alpha[d.var] for d in S), Fraction(0))
            if tot < 1:
                continue
            if chart.I.like([Poly.var(d.var, chart.vars, chart.I.trunc) for d in S]).is_trivial():
                continue
            key = (tot, tuple(sorted((d.index for d in S), reverse=True)))
            if best is None or key > best[0]:
                best = (key, S)
        if best is not None:
            S = best[1]
            return Monomial(p, best[0][0], tuple(sorted(d.index for d in S))), tuple(d.var for d in S)
    raise InputError("the singular locus is empty")


@dataclass
class NiceObject:
    chart: MarkedChart
    ideal: Ideal
    b: int
    E: Tuple[Divisor, ...]
    b_r: int
    nbar: int
    monomial_factor: Ideal
    J: Ideal
    locus: Ideal
    parts: List[Part] = field(default_factory=list)

    def __repr__(self):
        return "NiceObject(%s, %d)" % (self.ideal, self.b)


def nice_object(chart: MarkedChart, history: Sequence = ()) -> NiceObject:
    L = _history_level(chart, history)
    sing = L.sing()
    if not sing:
        raise InputError("the singular locus is empty")
    w, maxw = _omega(L, sing)
    if w == 0:
        raise InputError("monomial case: no auxiliary object")
    hist = L.omega_hist + (w,)
    if list(hist) != sorted(hist, reverse=True):
        raise InputError("inconsistent history: omega maxima must not increase")
    s = hist.index(w)
    nbar, groups = _t_groups(L, maxw, [d for d in L.E if d.birth <= s])
    if len(groups) > 1:
        raise InputError("Max(t) meets several divisor intersections; localize first")
    S, tloc = groups[0]
    b = chart.b
    b_r = w * b
    if b_r.denominator != 1:
        raise InvariantViolation("non-integral order of the proper transform")
    b_r = int(b_r)
    ctx = chart.I.like([])
    births = {d.birth: d.var for d in chart.E}
    mono = Poly.one(chart.vars, chart.I.trunc)
    for birth, k in chart.a:
        mono = mono * Poly.var(births[birth], chart.vars, chart.I.trunc) ** k
    C = ctx.like([mono])
    if b_r >= b:
        J = chart.Ibar
        bpp = b_r
    else:
        J = (chart.Ibar ** (b - b_r)) + (C ** b_r)
        bpp = b_r * (b - b_r)
    gens = list(J.gens)
    for d in S:
        gens.append(Poly.var(d.var, chart.vars, chart.I.trunc) ** bpp)
    Ipp = ctx.like(gens)
    Ep = tuple(d for d in chart.E if d.birth > s)
    sing2 = delta(Ipp, bpp - 1, chart.derivation_vars)
    if not loci_equal([sing2], tloc):
        raise InvariantViolation("singular locus of the nice object differs from Max(t)")
    return NiceObject(chart, Ipp, bpp, Ep, b_r, nbar, C, J, locus_ideal(tloc, ctx),
                      nice_parts(L, w, S))


def maximal_contact(nice: NiceObject) -> Tuple[str, Optional[Poly]]:
    """A variable ``z`` and (if needed) a change ``z -> image`` after which
    ``V(z)`` is a hypersurface of maximal contact for the auxiliary object.

    The search runs over ``Delta^(b-1)`` of the auxiliary ideal, which has
    the same zero set and the same order-one elements as that of its
    homogenized ideal."""
    chart = nice.chart
    L = Level(chart.I.like([]), chart.derivation_vars, [Part(nice.ideal, nice.b)], nice.E)
    env = _env_for(chart, False, [])
    return _maximal_contact([Part(nice.ideal, nice.b)], L, nice.E, env)


def descend(nice: NiceObject) -> MarkedChart:
    """The marked ideal induced on the hypersurface of maximal contact:
    restriction of the coefficient ideal of the homogenized ideal."""
    chart = nice.chart
    z, image = maximal_contact(nice)
    I = nice.ideal
    if image is not None:
        I = I.remap(lambda g: g.subs({z: image}))
    H = homogenize(I, nice.b, chart.derivation_vars)
    C = coefficient_ideal(H, nice.b, chart.derivation_vars)
    R = restrict_to_hyperplane(C.ideal, z)
    if R.is_zero():
        raise InputError("the induced ideal is zero: Max(t) is a hypersurface")
    E = [d.var for d in nice.E if d.var != z]
    base = tuple(v for v in chart.base if v != z)
    return MarkedChart.make(R, C.b, E=E, base=base,
                            relative=set(chart.derivation_vars) != set(chart.I.fiber_vars()))


# ---------------------------------------------------------------------------
# principalization and embedded resolution


def principalize(chart: MarkedChart, I: Optional[Ideal] = None, E: Sequence[str] = (),
                 max_steps: int = DEFAULT_MAX_STEPS, checks: bool = True) -> ChartTree:
    """Principalize ``I`` (mark 1) and stop each chart at the first step
    where the maximal order of the proper transform vanishes."""
    if I is not None:
        chart = MarkedChart.make(I, 1, E=E, base=chart.base)
    if chart.b != 1:
        chart = replace(chart, b=1)

    def stop(node, plan, L):
        if plan.regime == "monomial":
            return "monomial"
        return None

    return resolve(chart, max_steps=max_steps, checks=checks, stop=stop)


def _strict_ok(chart: MarkedChart, center: Sequence[str]) -> bool:
    X = chart.Ibar
    if X.is_trivial():
        return True
    cv = chart.I.like([Poly.var(v, chart.vars, chart.I.trunc) for v in center])
    return loci_equal([X], [cv])


def resolve_embedded(X: Ideal, chart: Optional[MarkedChart] = None,
                     max_steps: int = DEFAULT_MAX_STEPS, checks: bool = True) -> ChartTree:
    """Run the mark-1 algorithm on a hypersurface and stop each chart once
    the strict transform is (a union of components of) the next center."""
    if len(X.gens) != 1:
        reduced = X.reduced()
        if len(reduced.gens) != 1:
            raise InputError("embedded resolution needs a principal ideal")
        X = reduced
    root = chart if chart is not None else MarkedChart.make(X, 1)
    if chart is not None and chart.b != 1:
        root = replace(chart, b=1)

    def before(node, L):
        if node.chart.Ibar.is_trivial():
            return "strict transform absent"
        return None

    def stop(node, plan, L):
        if node.chart.Ibar.is_trivial():
            return "strict transform absent"
        if plan.regime in ("t-codim1",) or (plan.regime == "monomial" and len(plan.center) == 1):
            ch = node.chart
            for v, img in plan.changes:
                ch = change_coordinates(ch, v, img)
            if plan.pending is not None:
                ok = loci_equal([ch.Ibar], list(plan.pending.components))
            else:
                ok = _strict_ok(ch, plan.center)
            if ok:
                return "strict transform is the center"
        return None

    tree = resolve(root, max_steps=max_steps, checks=checks, stop=stop, before=before)
    eta = 0
    for n in tree.nodes:
        if n.status == "stopped":
            eta = max(eta, n.step)
    tree.notes.append("eta=%d" % eta)
    return tree


def embedded_index(tree: ChartTree) -> int:
    for note in tree.notes:
        if note.startswith("eta="):
            return int(note[4:])
    raise InputError("not an embedded resolution tree")
