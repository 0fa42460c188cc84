"""Ideals in polynomial rings over Q and the ideal-level calculus.

An :class:`Ideal` lives in a *context*: an ordered variable tuple, an
optional set of parameters (variables treated as elements of the
coefficient field, i.e. the ideal is read in Q(params)[rest]), optional
units (polynomials that are inverted, i.e. a principal localization), and
an optional truncation marker ``(s, n)`` making ``s`` nilpotent.  Zero-set
questions in a truncated context are answered on the closed fiber
``s = 0``; membership and equality are answered in Q[vars]/(s^(n+1)).
"""
from __future__ import annotations

import itertools
import threading
from fractions import Fraction
from math import factorial, lcm
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import kernel
from .errors import InputError, RingMismatchError
from .exactalg import Poly, Truncated, from_truncated, is_unit_scalar, parse

DEFAULT_REDUCTION_CAP = 100_000
_cap = [DEFAULT_REDUCTION_CAP]


def set_reduction_cap(n: int) -> None:
    """Set the global cap on reduction steps per Groebner computation."""
    _cap[0] = int(n)


def get_reduction_cap() -> int:
    return _cap[0]


# ---------------------------------------------------------------------------
# monomial orders


class MonomialOrder:
    """Degree-reverse-lexicographic, lexicographic or block orders.

    ``blocks`` is a list of index lists; earlier blocks dominate and each
    block is ordered by degrevlex.
    """

    def __init__(self, kind: str, nvars: int, blocks: Optional[Sequence[Sequence[int]]] = None):
        self.kind = kind
        self.nvars = nvars
        if kind == "degrevlex":
            blocks = [list(range(nvars))]
        elif kind == "lex":
            blocks = [[i] for i in range(nvars)]
        elif kind == "block":
            if blocks is None:
                raise ValueError("block order needs blocks")
            flat = sorted(i for b in blocks for i in b)
            if flat != list(range(nvars)):
                raise ValueError("blocks must partition the variables")
        else:
            raise ValueError("unknown monomial order %r" % kind)
        self.blocks = tuple(tuple(b) for b in blocks if b)
        rev = [tuple(reversed(b)) for b in self.blocks]

        def nkey(e, rev=rev):
            out = []
            for b in rev:
                out.append(-sum(e[i] for i in b))
                out.extend(e[i] for i in b)
            return tuple(out)

        self.nkey = nkey

    def signature(self):
        return (self.kind, self.nvars, self.blocks)

    def leading(self, p: Poly):
        if p.is_zero():
            raise ValueError("zero polynomial has no leading term")
        e = min(p.terms, key=self.nkey)
        return e, p.terms[e]

    def __repr__(self):
        return "MonomialOrder(%r, blocks=%r)" % (self.kind, self.blocks)


def _order_from(spec, vars: Tuple[str, ...]) -> MonomialOrder:
    if isinstance(spec, MonomialOrder):
        return spec
    if spec in (None, "degrevlex", "lex"):
        return MonomialOrder(spec or "degrevlex", len(vars))
    raise ValueError("unknown monomial order %r" % (spec,))


# ---------------------------------------------------------------------------
# raw Groebner bases on plain rational polynomials


def _to_int(p: Poly) -> Dict[tuple, int]:
    den = 1
    for c in p.terms.values():
        if isinstance(c, Truncated):
            raise RingMismatchError("convert truncated coefficients first")
        den = lcm(den, c.denominator)
    return {e: int(c * den) for e, c in p.terms.items()}


def _from_int(terms: Dict[tuple, int], vars, lead, trunc=None) -> Poly:
    lc = terms[lead]
    return Poly(vars, {e: Fraction(c, lc) for e, c in terms.items()}, trunc)


def raw_groebner(polys: Sequence[Poly], order: MonomialOrder, cap: Optional[int] = None) -> List[Poly]:
    """Reduced Groebner basis of plain polynomials (no context)."""
    if not polys:
        return []
    vars = polys[0].vars
    ints = [_to_int(p) for p in polys if not p.is_zero()]
    basis = kernel.buchberger_int(ints, order.nkey, cap or _cap[0])
    out = []
    for g in basis:
        lead = min(g, key=order.nkey)
        out.append(_from_int(g, vars, lead))
    return out


def raw_normal_form(f: Poly, basis: Sequence[Poly], order: MonomialOrder) -> Poly:
    """Normal form of ``f`` with respect to a Groebner basis (exact, monic basis)."""
    if f.is_zero() or not basis:
        return f
    den = 1
    for c in f.terms.values():
        den = lcm(den, c.denominator)
    fi = {e: int(c * den) for e, c in f.terms.items()}
    red = []
    for g in basis:
        gi = _to_int(g)
        lead = min(gi, key=order.nkey)
        red.append((lead, gi[lead], gi))
    counter = kernel._Counter(_cap[0])
    r = kernel.reduce_int(fi, red, order.nkey, counter)
    if not r:
        return Poly.zero(f.vars)
    # reduce_int returns a scalar multiple; rescale so the leading term
    # matches the true normal form is not needed for zero tests, but keep
    # the result monic for determinism
    lead = min(r, key=order.nkey)
    return _from_int(r, f.vars, lead)


# ---------------------------------------------------------------------------
# ideals


def _plain(p: Poly) -> Poly:
    if p.trunc is None:
        return p
    return Poly(p.vars, p.terms, None)


_aux_counter = itertools.count()


def _fresh(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    name = "_" + base
    k = 0
    while name in taken:
        k += 1
        name = "_%s%d" % (base, k)
    return name


class Ideal:
    """Finitely generated ideal with a lazily memoized Groebner basis."""

    __slots__ = ("vars", "gens", "params", "units", "trunc", "alg", "_cache", "_lock")

    def __init__(self, gens: Iterable = (), vars: Optional[Sequence[str]] = None, *,
                 params: Iterable[str] = (), units: Iterable[Poly] = (), trunc=None,
                 alg: Optional[Tuple[str, Poly]] = None):
        gl = list(gens)
        if vars is None:
            for g in gl:
                if isinstance(g, Poly):
                    vars = g.vars
                    break
        if vars is None:
            raise InputError("cannot infer the variables of an ideal without generators")
        vars = tuple(vars)
        conv = []
        for g in gl:
            if isinstance(g, str):
                g = parse(g, vars, trunc)
            if not isinstance(g, Poly):
                g = Poly.constant(g, vars, trunc)
            if any(isinstance(c, Truncated) for c in g.terms.values()):
                g = from_truncated(g, "s")
                if vars == tuple(v for v in g.vars if v != "s"):
                    vars = g.vars
                trunc = g.trunc
            conv.append(g)
        if trunc is None:
            for g in conv:
                if g.trunc is not None:
                    trunc = g.trunc
                    break
        if alg is not None:
            name, mp = alg
            if name not in vars:
                raise RingMismatchError("algebraic variable %r not among variables" % name)
            if mp.vars != vars:
                mp = mp.embed(vars, None)
            alg = (name, Poly(vars, mp.terms, None))
        seen = set()
        out = []
        for g in conv:
            if g.vars != vars:
                g = g.embed(vars, trunc)
            elif g.trunc != trunc:
                g = g.with_trunc(trunc)
            if alg is not None:
                g = alg_reduce(g, alg)
            if g.is_zero() or g in seen:
                continue
            seen.add(g)
            out.append(g)
        self.vars = vars
        self.gens = tuple(out)
        self.params = frozenset(params)
        for v in self.params:
            if v not in vars:
                raise RingMismatchError("parameter %r not among variables" % v)
        us = []
        for u in units:
            if u.vars != vars:
                u = u.embed(vars, trunc)
            if u.trunc != trunc:
                u = u.with_trunc(trunc)
            if alg is not None:
                u = alg_reduce(u, alg)
            us.append(u)
        self.units = tuple(sorted(set(us), key=str))
        self.trunc = trunc
        self.alg = alg
        self._cache = {}
        self._lock = threading.Lock()

    # context -------------------------------------------------------------
    def context(self):
        return (self.vars, self.params, self.units, self.trunc, self.alg)

    def like(self, gens) -> "Ideal":
        """A new ideal in the same context."""
        return Ideal(gens, self.vars, params=self.params, units=self.units, trunc=self.trunc,
                     alg=self.alg)

    def with_units(self, units) -> "Ideal":
        return Ideal(self.gens, self.vars, params=self.params,
                     units=tuple(self.units) + tuple(units), trunc=self.trunc, alg=self.alg)

    def remap(self, fn) -> "Ideal":
        """Apply ``fn`` to generators and units, keeping the context."""
        return Ideal([fn(g) for g in self.gens], self.vars, params=self.params,
                     units=[fn(u) for u in self.units], trunc=self.trunc, alg=self.alg)

    def coefficient_vars(self) -> frozenset:
        """Variables that belong to the coefficients rather than the space."""
        out = set(self.params)
        if self.alg:
            out.add(self.alg[0])
        return frozenset(out)

    def _same(self, other: "Ideal"):
        if self.context() != other.context():
            raise RingMismatchError("ideals live in different contexts")

    def poly(self, f) -> Poly:
        if isinstance(f, str):
            return parse(f, self.vars, self.trunc)
        if isinstance(f, Poly):
            if f.vars != self.vars:
                f = f.embed(self.vars, self.trunc)
            if f.trunc != self.trunc:
                f = f.with_trunc(self.trunc)
            return f
        return Poly.constant(f, self.vars, self.trunc)

    def is_zero(self) -> bool:
        return not self.gens

    def fiber_vars(self) -> Tuple[str, ...]:
        skip = set(self.coefficient_vars())
        if self.trunc:
            skip.add(self.trunc[0])
        return tuple(v for v in self.vars if v not in skip)

    def __repr__(self):
        extra = []
        if self.params:
            extra.append("params=%s" % sorted(self.params))
        if self.units:
            extra.append("units=[%s]" % ", ".join(map(str, self.units)))
        if self.trunc:
            extra.append("trunc=%r" % (self.trunc,))
        if self.alg:
            extra.append("%s root of %s" % (self.alg[0], self.alg[1]))
        return "Ideal([%s]%s)" % (", ".join(map(str, self.gens)),
                                  "; " + ", ".join(extra) if extra else "")

    def __str__(self):
        return "(" + ", ".join(map(str, self.gens)) + ")" if self.gens else "(0)"

    # arithmetic ------------------------------------------------------------
    def __add__(self, other: "Ideal") -> "Ideal":
        self._same(other)
        return self.like(self.gens + other.gens)

    def __mul__(self, other: "Ideal") -> "Ideal":
        self._same(other)
        return self.like([f * g for f in self.gens for g in other.gens]).reduced()

    def __pow__(self, k: int) -> "Ideal":
        if k < 0:
            raise ValueError("negative ideal power")
        out = self.like([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    # Groebner machinery -----------------------------------------------------
    def _plain_gens(self, extra_vars=()):
        vars = self.vars + tuple(extra_vars)
        out = [(_plain(g) if not extra_vars else _plain(g).embed(vars, None)) for g in self.gens]
        if self.trunc:
            s, n = self.trunc
            out.append(Poly.monomial({s: n + 1}, vars))
        if self.alg:
            out.append(self.alg[1] if not extra_vars else self.alg[1].embed(vars, None))
        return vars, out

    def _context_order(self, vars, front=()):
        """Block order: ``front`` variables, then ordinary ones, then params."""
        front = [vars.index(v) for v in front]
        par = [i for i, v in enumerate(vars) if v in self.params]
        al = [vars.index(self.alg[0])] if self.alg else []
        rest = [i for i in range(len(vars)) if i not in front and i not in par and i not in al]
        if not front and not par and not al:
            return MonomialOrder("degrevlex", len(vars))
        return MonomialOrder("block", len(vars), [front, rest, al, par])

    def _memo(self, key, fn):
        v = self._cache.get(key)
        if v is None:
            with self._lock:
                v = self._cache.get(key)
                if v is None:
                    v = fn()
                    self._cache[key] = v
        return v

    def groebner(self, order=None) -> Tuple[Poly, ...]:
        """Reduced Groebner basis of the polynomial ideal generated by the
        generators (plus s^(n+1) in a truncated context).  Parameters and
        units are ignored here; see :meth:`basis` for the context basis."""
        order = _order_from(order, self.vars)

        def run():
            vars, polys = self._plain_gens()
            return tuple(raw_groebner(polys, order))

        return self._memo(("gb",) + order.signature(), run)

    def basis(self) -> Tuple[Poly, ...]:
        """Groebner basis in the context order (params last), with the
        truncation marker restored; nilpotent-zero elements are dropped."""

        def run():
            vars, polys = self._plain_gens()
            order = self._context_order(vars)
            gb = raw_groebner(polys, order)
            out = []
            for g in gb:
                g2 = Poly(self.vars, g.terms, self.trunc)
                if not g2.is_zero():
                    out.append(g2)
            return tuple(out)

        return self._memo(("basis",), run)

    def reduced(self) -> "Ideal":
        """The same ideal generated by its context basis."""
        if len(self.gens) <= 1 and not self.trunc:
            if self.gens and not self.params:
                g = self.gens[0]
                lead = max(g.terms, key=lambda e: (sum(e), tuple(-x for x in reversed(e))))
                c = g.terms[lead]
                if is_unit_scalar(c) and not isinstance(c, Truncated):
                    g = g * (1 / c)
                return self.like([g])
            return self
        return self.like(self.basis())

    # decisions -----------------------------------------------------------
    def _origin_witness(self) -> bool:
        """Cheap sufficient test for nonemptiness: the origin is a zero."""
        skip = set(self.coefficient_vars())
        if self.trunc:
            skip.add(self.trunc[0])
        idx = [i for i, v in enumerate(self.vars) if v not in skip]
        tidx = self.vars.index(self.trunc[0]) if self.trunc else -1
        for g in self.gens:
            for e, c in g.terms.items():
                if tidx >= 0 and e[tidx] > 0:
                    continue
                if all(e[i] == 0 for i in idx):
                    return False
        for u in self.units:
            ok = False
            for e, c in u.terms.items():
                if tidx >= 0 and e[tidx] > 0:
                    continue
                if all(e[i] == 0 for i in idx) and not self.coefficient_vars() and all(x == 0 for x in e):
                    ok = True
                    break
            if not ok:
                return False
        return True

    def is_trivial(self) -> bool:
        """True when the zero set (in the context) is empty."""

        def run():
            if not self.gens:
                return False
            for g in self.gens:
                r = g.reduce_nilpotent() if self.trunc else g
                if r.is_constant() and not r.is_zero():
                    return True
                if self.params and not r.is_zero() and set(r.support()) <= self.params:
                    return True
                if self.alg and not r.is_zero() and set(r.support()) <= self.coefficient_vars():
                    return True
            if self._origin_witness():
                return False
            extra = ()
            vars, polys = self._plain_gens()
            if self.units:
                w = _fresh("w", vars)
                extra = (w,)
                vars, polys = self._plain_gens(extra)
                prod = Poly.one(vars)
                for u in self.units:
                    prod = prod * _plain(u).embed(vars, None)
                polys.append(Poly.one(vars) - Poly.var(w, vars) * prod)
            order = self._context_order(vars)
            gb = raw_groebner(polys, order)
            par = [i for i, v in enumerate(vars) if v in self.params]
            for g in gb:
                if all(all(k == 0 for i, k in enumerate(e) if i not in par) for e in g.terms):
                    return True
            return False

        return self._memo(("trivial",), run)

    def contains(self, f) -> bool:
        f = self.poly(f)
        if f.is_zero():
            return True
        if not self.gens:
            return False
        if self.units:
            return self._saturated().contains(f)
        if not self.params:
            vars, polys = self._plain_gens()
            order = self._context_order(vars)
            gb = self._memo(("gb-plain",), lambda: tuple(raw_groebner(polys, order)))
            return raw_normal_form(_plain(f), gb, order).is_zero()
        return self._param_member(f)

    def _saturated(self) -> "Ideal":
        """Saturation by the units, as an ideal without units."""

        def run():
            w = _fresh("w", self.vars)
            vars, polys = self._plain_gens((w,))
            prod = Poly.one(vars)
            for u in self.units:
                prod = prod * _plain(u).embed(vars, None)
            polys.append(Poly.one(vars) - Poly.var(w, vars) * prod)
            order = self._context_order(vars, front=(w,))
            gb = raw_groebner(polys, order)
            keep = [g.embed(self.vars, self.trunc) for g in gb if g.degree(w) <= 0]
            return Ideal(keep, self.vars, params=self.params, trunc=self.trunc, alg=self.alg)

        return self._memo(("sat",), run)

    def _param_member(self, f: Poly) -> bool:
        vars, polys = self._plain_gens()
        order = self._context_order(vars)
        gb = self._memo(("gb-ctx",), lambda: tuple(raw_groebner(polys, order)))
        xi = [i for i, v in enumerate(vars) if v not in self.params]
        pi = [i for i, v in enumerate(vars) if v in self.params]
        xorder = MonomialOrder("degrevlex", len(xi))

        def split(p):
            groups = {}
            for e, c in p.terms.items():
                xe = tuple(e[i] for i in xi)
                pe = [0] * len(vars)
                for i in pi:
                    pe[i] = e[i]
                groups.setdefault(xe, {})[tuple(pe)] = c
            return groups

        def lead(p):
            groups = split(p)
            xe = min(groups, key=xorder.nkey)
            return xe, Poly(vars, groups[xe])

        leads = []
        for g in gb:
            xe, c = lead(g)
            leads.append((xe, c, g))
        p = _plain(f)
        p = Poly(vars, p.terms)
        steps = 0
        while not p.is_zero():
            steps += 1
            if steps > _cap[0]:
                from .errors import ResourceCapError
                raise ResourceCapError("parameter reduction cap exceeded")
            xe, cf = lead(p)
            for ge, cg, g in leads:
                if all(a <= b for a, b in zip(ge, xe)):
                    shift = [0] * len(vars)
                    for k, i in enumerate(xi):
                        shift[i] = xe[k] - ge[k]
                    mono = Poly(vars, {tuple(shift): 1})
                    p = cg * p - cf * mono * g
                    break
            else:
                return False
        return True

    def radical_contains(self, f) -> bool:
        f = self.poly(f)
        if self.contains(f):
            return True
        u = _fresh("u", self.vars)
        vars = self.vars + (u,)
        gens = [g.embed(vars, self.trunc) for g in self.gens]
        fp = f.embed(vars, self.trunc)
        gens.append(Poly.one(vars, self.trunc) - Poly.var(u, vars, self.trunc) * fp)
        alg = (self.alg[0], self.alg[1].embed(vars, None)) if self.alg else None
        aux = Ideal(gens, vars, params=self.params,
                    units=[x.embed(vars, self.trunc) for x in self.units], trunc=self.trunc,
                    alg=alg)
        return aux.is_trivial()


def alg_reduce(p: Poly, alg: Tuple[str, Poly]) -> Poly:
    """Reduce the degree in the algebraic variable below that of its
    minimal polynomial.

    When the leading coefficient of the minimal polynomial is a polynomial
    in the parameters the result is a pseudo-remainder: it agrees with the
    true remainder up to a unit factor, which is harmless for generators.
    """
    name, mp = alg
    k = mp.degree(name)
    if p.degree(name) < k:
        return p
    lc = mp.coefficients_in(name)[k]
    if not lc.is_constant():
        lc = lc.embed(p.vars, p.trunc) if lc.vars != p.vars else lc.with_trunc(p.trunc)
        m = mp.embed(p.vars, p.trunc) if mp.vars != p.vars else mp.with_trunc(p.trunc)
        a = Poly.var(name, p.vars, p.trunc)
        while p.degree(name) >= k:
            d = p.degree(name)
            top = p.coefficients_in(name)[d]
            p = p * lc - top * a ** (d - k) * m
        return p
    if lc.constant_term() != 1:
        mp = mp * (1 / lc.constant_term())
    i = p.vars.index(name)
    tail = {e: -c for e, c in mp.terms.items() if e[i] < k}
    terms = dict(p.terms)
    while True:
        top = max((e[i] for e in terms), default=-1)
        if top < k:
            break
        new = {}
        for e, c in terms.items():
            if e[i] < top:
                new[e] = new.get(e, 0) + c
                continue
            for te, tc in tail.items():
                ne = tuple(a + b if j != i else a - k + b for j, (a, b) in enumerate(zip(e, te)))
                new[ne] = new.get(ne, 0) + c * tc
        terms = {e: c for e, c in new.items() if c}
    return Poly(p.vars, terms, p.trunc)


# ---------------------------------------------------------------------------
# module-level operations


def ideal(gens, vars=None, **kw) -> Ideal:
    return Ideal(gens, vars, **kw)


def groebner(I: Ideal, order=None) -> Tuple[Poly, ...]:
    return I.groebner(order)


def normal_form(f: Poly, I: Ideal, order=None) -> Poly:
    order = _order_from(order, I.vars)
    return raw_normal_form(_plain(I.poly(f)), I.groebner(order), order)


def is_trivial(I: Ideal) -> bool:
    return I.is_trivial()


def member(f, I: Ideal) -> bool:
    return I.contains(f)


def radical_member(f, I: Ideal) -> bool:
    return I.radical_contains(f)


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    """Equality as ideals (in the context)."""
    I._same(J)
    return all(J.contains(g) for g in I.gens) and all(I.contains(g) for g in J.gens)


def same_locus(I: Ideal, J: Ideal) -> bool:
    """Equality of zero sets via mutual radical membership."""
    I._same(J)
    return all(J.radical_contains(g) for g in I.gens) and all(I.radical_contains(g) for g in J.gens)


def locus_contained(I: Ideal, J: Ideal) -> bool:
    """V(I) is contained in V(J)."""
    I._same(J)
    return all(I.radical_contains(g) for g in J.gens)


def _exact_quo(g: Poly, f: Poly, order: MonomialOrder) -> Poly:
    q = Poly.zero(g.vars)
    fe, fc = order.leading(f)
    while not g.is_zero():
        ge, gc = order.leading(g)
        shift = tuple(a - b for a, b in zip(ge, fe))
        if min(shift) < 0:
            raise ValueError("not divisible")
        m = Poly(g.vars, {shift: gc / fc})
        q = q + m
        g = g - m * f
    return q


def exact_quotient(g: Poly, f: Poly) -> Poly:
    """``g / f`` for plain polynomials; ValueError when ``f`` does not divide ``g``."""
    return _exact_quo(g, f, MonomialOrder("degrevlex", len(g.vars)))


def quotient(I: Ideal, f) -> Ideal:
    """The ideal quotient ``I : f`` in the context of ``I``.

    Computed as ``(I + K) : f`` in the plain polynomial ring, where ``K``
    holds the truncation and minimal-polynomial relations, through
    ``(I + K) cap (f) = f * ((I + K) : f)``.
    """
    f = I.poly(f)
    if f.is_zero():
        return I.like([Poly.one(I.vars, I.trunc)])
    J = I._saturated() if I.units else I
    w = _fresh("w", I.vars)
    vars, polys = J._plain_gens((w,))
    W = Poly.var(w, vars)
    fp = _plain(f).embed(vars, None)
    gens = [W * p for p in polys] + [(Poly.one(vars) - W) * fp]
    gb = raw_groebner(gens, J._context_order(vars, front=(w,)))
    order = MonomialOrder("degrevlex", len(I.vars))
    fq = _plain(f)
    out = []
    for g in gb:
        if g.degree(w) > 0:
            continue
        q = _exact_quo(g.embed(I.vars, None), fq, order)
        out.append(q.with_trunc(I.trunc) if I.trunc else q)
    return I.like(out)


def eliminate(I: Ideal, drop_vars: Iterable[str]) -> Ideal:
    """I intersected with the subring in the remaining variables."""
    drop = tuple(drop_vars)
    for v in drop:
        if v not in I.vars:
            raise RingMismatchError("unknown variable %r" % v)
    keep = tuple(v for v in I.vars if v not in drop)
    vars, polys = I._plain_gens()
    order = MonomialOrder("block", len(vars),
                          [[vars.index(v) for v in drop], [vars.index(v) for v in keep]])
    gb = raw_groebner(polys, order)
    out = []
    for g in gb:
        if all(g.degree(v) <= 0 for v in drop):
            out.append(g.embed(keep, None))
    trunc = I.trunc if I.trunc and I.trunc[0] in keep else None
    out = [o.with_trunc(trunc) if trunc else o for o in out]
    alg = None
    if I.alg and I.alg[0] in keep:
        alg = (I.alg[0], I.alg[1].embed(keep, None))
    return Ideal(out, keep, params=I.params & set(keep), trunc=trunc, alg=alg)


def _derivation_vars(I: Ideal, derivation_vars) -> Tuple[str, ...]:
    if derivation_vars is None:
        return I.fiber_vars()
    dv = tuple(derivation_vars)
    for v in dv:
        if v not in I.vars:
            raise RingMismatchError("unknown derivation variable %r" % v)
        if v in I.coefficient_vars():
            raise InputError("cannot differentiate along coefficient variable %r" % v)
    return dv


def delta(I: Ideal, k: int = 1, derivation_vars=None) -> Ideal:
    """Iterated Delta: the ideal plus all first partials, ``k`` times."""
    if k < 0:
        raise ValueError("k must be >= 0")
    dv = _derivation_vars(I, derivation_vars)
    J = I
    for _ in range(k):
        if J.is_zero():
            return J
        gens = list(J.gens)
        for g in J.gens:
            for v in dv:
                d = g.diff(v)
                if not d.is_zero():
                    gens.append(d)
        J = J.like(gens)
        if J.is_trivial() and not J.trunc:
            return J.like([1])
        J = J.reduced()
    return J


def sing_locus(I: Ideal, b: int, derivation_vars=None) -> Ideal:
    if b < 1:
        raise InputError("mark must be >= 1")
    return delta(I, b - 1, derivation_vars)


def max_order(I: Ideal, derivation_vars=None, within: Optional[Ideal] = None) -> int:
    """Largest m with Delta^(m-1)(I) (+ within) nontrivial; 0 for the unit ideal."""
    if I.is_zero():
        raise InputError("max_order of the zero ideal")
    m = 0
    J = I
    while True:
        test = J if within is None else J + within
        if test.is_trivial():
            return m
        m += 1
        J = delta(J, 1, derivation_vars)


def order_along(I: Ideal, center_vars: Iterable[str], strict: bool = False) -> float:
    cv = tuple(center_vars)
    if strict:
        return min((g.order_along_strict(cv) for g in I.gens), default=float("inf"))
    return min((g.order_along(cv) for g in I.gens), default=float("inf"))


class WeightedIdeal:
    """An ideal together with a positive integer mark."""

    __slots__ = ("ideal", "b")

    def __init__(self, ideal: Ideal, b: int):
        if not isinstance(b, int) or b < 1:
            raise InputError("mark must be a positive integer, got %r" % (b,))
        self.ideal = ideal
        self.b = b

    def __iter__(self):
        return iter((self.ideal, self.b))

    def __repr__(self):
        return "WeightedIdeal(%s, %d)" % (self.ideal, self.b)


def coefficient_ideal(I: Ideal, b: int, derivation_vars=None) -> WeightedIdeal:
    """Sum over i < b of (Delta^i I)^(b!/(b-i)), with mark b!."""
    if b < 1:
        raise InputError("mark must be >= 1")
    if b == 1:
        return WeightedIdeal(I, 1)
    bf = factorial(b)
    acc = None
    D = I
    for i in range(b):
        if i:
            D = delta(D, 1, derivation_vars)
        term = D ** (bf // (b - i))
        acc = term if acc is None else acc + term
    return WeightedIdeal(acc.reduced(), bf)


def homogenize(I: Ideal, b: int, derivation_vars=None) -> Ideal:
    """I + Delta(I) T + ... + Delta^(b-1)(I) T^(b-1) with T = Delta^(b-1)(I)."""
    if b < 1:
        raise InputError("mark must be >= 1")
    if b == 1:
        return I
    chain = [I]
    for _ in range(b - 1):
        chain.append(delta(chain[-1], 1, derivation_vars))
    T = chain[-1]
    acc = I
    Tp = I.like([1])
    for i in range(1, b):
        Tp = Tp * T
        acc = acc + chain[i] * Tp
    return acc.reduced()


def restrict_to_hyperplane(I: Ideal, v: str) -> Ideal:
    """Set ``v = 0`` and drop it from the variables; may return the zero ideal."""
    if v not in I.vars:
        raise RingMismatchError("unknown variable %r" % v)
    if v in I.coefficient_vars() or (I.trunc and I.trunc[0] == v):
        raise InputError("cannot restrict along %r" % v)
    keep = tuple(x for x in I.vars if x != v)
    gens = [g.subs({v: 0}).embed(keep, I.trunc) for g in I.gens]
    units = [u.subs({v: 0}).embed(keep, I.trunc) for u in I.units]
    alg = (I.alg[0], I.alg[1].embed(keep, None)) if I.alg else None
    return Ideal(gens, keep, params=I.params, units=units, trunc=I.trunc, alg=alg)


def monomial_exponents(I: Ideal, E: Sequence[str]) -> Optional[Tuple[int, ...]]:
    """Exponent vector when I is generated by a unit times a monomial in E.

    The candidate is the largest E-monomial dividing every generator; I is
    monomial exactly when that monomial lies in I (units, parameters and
    truncation of the context are respected by the membership test)."""
    E = tuple(E)
    if len(set(E)) != len(E):
        raise InputError("divisor variables must be distinct")
    for v in E:
        if v not in I.vars:
            raise RingMismatchError("unknown variable %r" % v)
    if I.is_zero():
        return None
    idx = [I.vars.index(v) for v in E]
    low = [min(e[i] for g in I.gens for e in g.terms) for i in idx]
    mono = Poly.monomial(dict(zip(E, low)), I.vars, trunc=I.trunc)
    if not I.contains(mono):
        return None
    return tuple(low)
