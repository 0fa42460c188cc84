"""Exact scalars and sparse multivariate polynomials.

Two scalar kinds are supported: rationals (``fractions.Fraction``) and
:class:`Truncated`, elements of Q[s]/(s^(n+1)).  A :class:`Poly` stores a
dict from exponent tuples to nonzero coefficients over an ordered tuple of
variable names.  A polynomial may also carry a *truncation marker*
``(name, n)``: one of its variables is then nilpotent of order ``n + 1``
and every product silently drops terms of higher degree in it.  That is
the representation the resolution engine uses for Artinian base rings;
:func:`to_truncated` and :func:`from_truncated` convert to and from the
coefficient form.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from . import kernel
from .errors import ParseError, RingMismatchError, UnknownVariableError

Exponent = Tuple[int, ...]


# ---------------------------------------------------------------------------
# scalars


class Truncated:
    """Element of Q[s]/(s^(n+1)), stored as its n+1 coefficients."""

    __slots__ = ("coeffs", "n")

    def __init__(self, coeffs: Iterable, n: int):
        if n < 0:
            raise ValueError("truncation order must be >= 0")
        cs = [Fraction(c) for c in coeffs][: n + 1]
        cs += [Fraction(0)] * (n + 1 - len(cs))
        self.coeffs = tuple(cs)
        self.n = n

    @classmethod
    def s(cls, n: int) -> "Truncated":
        return cls([0, 1], n)

    def _coerce(self, other):
        if isinstance(other, Truncated):
            if other.n != self.n:
                raise RingMismatchError(
                    "truncation orders differ: %d vs %d" % (self.n, other.n))
            return other
        if isinstance(other, (int, Fraction)):
            return Truncated([other], self.n)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Truncated([a + b for a, b in zip(self.coeffs, o.coeffs)], self.n)

    __radd__ = __add__

    def __neg__(self):
        return Truncated([-a for a in self.coeffs], self.n)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = self.n
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(n + 1 - i):
                    out[i + j] += a * o.coeffs[j]
        return Truncated(out, n)

    __rmul__ = __mul__

    def is_unit(self) -> bool:
        return self.coeffs[0] != 0

    def inverse(self) -> "Truncated":
        a0 = self.coeffs[0]
        if not a0:
            raise ZeroDivisionError("non-unit truncated scalar")
        inv = [Fraction(0)] * (self.n + 1)
        inv[0] = 1 / a0
        for k in range(1, self.n + 1):
            acc = sum((self.coeffs[i] * inv[k - i] for i in range(1, k + 1)), Fraction(0))
            inv[k] = -acc / a0
        return Truncated(inv, self.n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return Truncated([other], self.n) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Truncated([1], self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Truncated):
            return self.n == other.n and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        if not any(self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash((self.coeffs, self.n))

    def __repr__(self):
        return "Truncated(%s, n=%d)" % ([str(c) for c in self.coeffs], self.n)

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c:
                if k == 0:
                    parts.append(str(c))
                else:
                    mono = "s" if k == 1 else "s^%d" % k
                    parts.append(mono if c == 1 else "%s*%s" % (c, mono))
        return "(" + " + ".join(parts) + ")" if parts else "0"


Scalar = Union[Fraction, Truncated]


def as_scalar(c) -> Scalar:
    if isinstance(c, (Fraction, Truncated)):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError("not an exact scalar: %r" % (c,))


def is_unit_scalar(c) -> bool:
    if isinstance(c, Truncated):
        return c.is_unit()
    return c != 0


# ---------------------------------------------------------------------------
# variables


@dataclass(frozen=True)
class VarSet:
    """Ordered variable names split into fiber and base variables."""

    fiber: Tuple[str, ...]
    base: Tuple[str, ...] = ()

    def __post_init__(self):
        names = self.fiber + self.base
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names in %r" % (names,))
        for v in names:
            if not _IDENT.fullmatch(v):
                raise ValueError("bad variable name %r" % v)

    @property
    def all(self) -> Tuple[str, ...]:
        return self.fiber + self.base


# ---------------------------------------------------------------------------
# polynomials


def _fmt_coeff(c) -> str:
    if isinstance(c, Truncated):
        return str(c)
    return str(c)


class Poly:
    """Sparse polynomial over Q (or over a truncated ring)."""

    __slots__ = ("vars", "terms", "trunc", "_hash", "_tidx")

    def __init__(self, vars: Sequence[str], terms: Optional[Mapping[Exponent, object]] = None,
                 trunc: Optional[Tuple[str, int]] = None, _clean: bool = False):
        self.vars = tuple(vars)
        self.trunc = trunc
        self._hash = None
        if trunc is not None:
            if trunc[0] not in self.vars:
                raise RingMismatchError("truncated variable %r not in ring" % trunc[0])
            self._tidx = self.vars.index(trunc[0])
        else:
            self._tidx = -1
        if terms is None:
            self.terms = {}
        elif _clean:
            self.terms = terms
        else:
            nv = len(self.vars)
            out = {}
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nv:
                    raise RingMismatchError("exponent %r does not fit %r" % (e, self.vars))
                if self._tidx >= 0 and e[self._tidx] > trunc[1]:
                    continue
                c = as_scalar(c)
                if c:
                    out[e] = c
            self.terms = out

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, vars, trunc=None) -> "Poly":
        return cls(vars, {}, trunc, _clean=True)

    @classmethod
    def constant(cls, c, vars, trunc=None) -> "Poly":
        return cls(vars, {(0,) * len(tuple(vars)): c}, trunc)

    @classmethod
    def one(cls, vars, trunc=None) -> "Poly":
        return cls.constant(1, vars, trunc)

    @classmethod
    def var(cls, name: str, vars, trunc=None) -> "Poly":
        vars = tuple(vars)
        if name not in vars:
            raise UnknownVariableError("unknown variable %r" % name)
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(vars, {tuple(e): 1}, trunc)

    @classmethod
    def monomial(cls, exps: Mapping[str, int], vars, coeff=1, trunc=None) -> "Poly":
        vars = tuple(vars)
        e = [0] * len(vars)
        for v, k in exps.items():
            if v not in vars:
                raise UnknownVariableError("unknown variable %r" % v)
            e[vars.index(v)] += k
        return cls(vars, {tuple(e): coeff}, trunc)

    @classmethod
    def parse(cls, text: str, vars: Optional[Sequence[str]] = None, trunc=None) -> "Poly":
        return parse(text, vars, trunc)

    # basic queries --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, var: str) -> int:
        i = self._index(var)
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def support(self) -> Tuple[str, ...]:
        """Variables that actually occur."""
        used = [False] * len(self.vars)
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(v for v, u in zip(self.vars, used) if u)

    def _index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise UnknownVariableError("unknown variable %r" % var) from None

    def _check(self, other: "Poly"):
        if self.vars != other.vars:
            raise RingMismatchError("rings differ: %r vs %r" % (self.vars, other.vars))
        if self.trunc != other.trunc:
            raise RingMismatchError("truncations differ: %r vs %r" % (self.trunc, other.trunc))

    def _lift(self, other):
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, Truncated)):
            return Poly.constant(other, self.vars, self.trunc)
        return NotImplemented

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Poly(self.vars, kernel.add_terms(self.terms, o.terms), self.trunc, _clean=True)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Poly(self.vars, kernel.add_terms(self.terms, o.terms, -1), self.trunc, _clean=True)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()}, self.trunc, _clean=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Truncated)):
            other = as_scalar(other)
            if not other:
                return Poly.zero(self.vars, self.trunc)
            out = {}
            for e, c in self.terms.items():
                v = c * other
                if v:
                    out[e] = v
            return Poly(self.vars, out, self.trunc, _clean=True)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        cap = self.trunc[1] if self.trunc else 0
        return Poly(self.vars, kernel.mul_terms(self.terms, o.terms, self._tidx, cap),
                    self.trunc, _clean=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("division by a non-constant polynomial")
            other = other.constant_term()
        other = as_scalar(other)
        if not is_unit_scalar(other):
            raise ZeroDivisionError("division by a non-unit scalar")
        inv = 1 / other
        return self * inv

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = Poly.one(self.vars, self.trunc)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.vars == other.vars and self.trunc == other.trunc and self.terms == other.terms
        if isinstance(other, (int, Fraction, Truncated)):
            return self == Poly.constant(other, self.vars, self.trunc)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, self.trunc, frozenset(self.terms.items())))
        return self._hash

    # calculus and substitution ----------------------------------------------
    def diff(self, var: str) -> "Poly":
        i = self._index(var)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Poly(self.vars, out, self.trunc, _clean=True)

    def subs(self, mapping: Mapping[str, object]) -> "Poly":
        """Simultaneous substitution of variables by polynomials or scalars."""
        idx = {}
        for v, img in mapping.items():
            i = self._index(v)
            if isinstance(img, Poly):
                self._check(img)
            else:
                img = Poly.constant(img, self.vars, self.trunc)
            idx[i] = img
        if not idx:
            return self
        powers: Dict[Tuple[int, int], Poly] = {}

        def power(i, k):
            key = (i, k)
            p = powers.get(key)
            if p is None:
                p = idx[i] ** k
                powers[key] = p
            return p

        acc = {}
        nv = len(self.vars)
        cap = self.trunc[1] if self.trunc else 0
        for e, c in self.terms.items():
            rest = tuple(0 if i in idx else e[i] for i in range(nv))
            if self._tidx >= 0 and rest[self._tidx] > cap:
                continue
            term = {rest: c}
            for i, k in enumerate(e):
                if k and i in idx:
                    term = kernel.mul_terms(term, power(i, k).terms, self._tidx, cap)
                    if not term:
                        break
            acc = kernel.add_terms(acc, term)
        return Poly(self.vars, acc, self.trunc, _clean=True)

    def embed(self, new_vars: Sequence[str], trunc="keep") -> "Poly":
        """The same polynomial in a ring with other (or reordered) variables."""
        new_vars = tuple(new_vars)
        if trunc == "keep":
            trunc = self.trunc
        pos = []
        for i, v in enumerate(self.vars):
            if v in new_vars:
                pos.append(new_vars.index(v))
            else:
                pos.append(-1)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(new_vars)
            for i, k in enumerate(e):
                if k:
                    if pos[i] < 0:
                        raise RingMismatchError(
                            "variable %r occurs but is missing from %r" % (self.vars[i], new_vars))
                    ne[pos[i]] = k
            out[tuple(ne)] = c
        return Poly(new_vars, out, trunc)

    def drop(self, var: str) -> "Poly":
        return self.embed(tuple(v for v in self.vars if v != var))

    def with_trunc(self, trunc) -> "Poly":
        return Poly(self.vars, self.terms, trunc)

    def coefficients_in(self, var: str) -> Dict[int, "Poly"]:
        """Split by powers of ``var``; pieces keep the full ring."""
        i = self._index(var)
        out: Dict[int, dict] = {}
        for e, c in self.terms.items():
            k = e[i]
            ne = e[:i] + (0,) + e[i + 1:]
            out.setdefault(k, {})[ne] = c
        return {k: Poly(self.vars, t, self.trunc, _clean=True) for k, t in out.items()}

    # orders -------------------------------------------------------------------
    def _center_idx(self, center_vars: Iterable[str]):
        return [self._index(v) for v in center_vars]

    def order_along(self, center_vars: Iterable[str]) -> float:
        """Order along the coordinate subspace where ``center_vars`` vanish.

        Every term with a nonzero coefficient counts.  The zero polynomial
        has infinite order.
        """
        idx = self._center_idx(center_vars)
        if not self.terms:
            return float("inf")
        return min(sum(e[i] for i in idx) for e in self.terms)

    def order_along_strict(self, center_vars: Iterable[str]) -> float:
        """Like :meth:`order_along` but only unit coefficients count.

        A coefficient is a unit when it is a nonzero rational, a truncated
        scalar with nonzero constant part, or (for polynomials carrying a
        truncation marker) a term free of the nilpotent variable.
        """
        idx = self._center_idx(center_vars)
        best = float("inf")
        for e, c in self.terms.items():
            if self._tidx >= 0 and e[self._tidx] > 0:
                continue
            if not is_unit_scalar(c):
                continue
            d = sum(e[i] for i in idx)
            if d < best:
                best = d
        return best

    def reduce_nilpotent(self) -> "Poly":
        """Set the nilpotent variable (or the truncated parameter) to zero."""
        if self._tidx >= 0:
            return Poly(self.vars, {e: c for e, c in self.terms.items() if e[self._tidx] == 0},
                        None, _clean=True)
        out = {}
        for e, c in self.terms.items():
            if isinstance(c, Truncated):
                c = c.coeffs[0]
            if c:
                out[e] = c
        return Poly(self.vars, out, None, _clean=True)

    # formatting -----------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda ec: (sum(ec[0]), tuple(-x for x in reversed(ec[0]))),
                      reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else "%s^%d" % (v, k)
                            for v, k in zip(self.vars, e) if k)
            if isinstance(c, Truncated):
                body = str(c) if not mono else "%s*%s" % (c, mono)
                pieces.append(("+", body))
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = "%s*%s" % (a, mono)
            pieces.append((sign, body))
        out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
        for sign, body in pieces[1:]:
            out += " %s %s" % (sign, body)
        return out

    def __repr__(self):
        return "Poly(%r, vars=%r%s)" % (str(self), self.vars,
                                       ", trunc=%r" % (self.trunc,) if self.trunc else "")


# ---------------------------------------------------------------------------
# conversions for truncated rings


def to_truncated(p: Poly) -> Poly:
    """Turn a polynomial carrying a truncation marker into one whose
    coefficients are :class:`Truncated` scalars (the marker variable is
    removed)."""
    if p.trunc is None:
        raise RingMismatchError("polynomial has no truncation marker")
    name, n = p.trunc
    i = p.vars.index(name)
    nv = tuple(v for v in p.vars if v != name)
    acc: Dict[Exponent, list] = {}
    for e, c in p.terms.items():
        ne = e[:i] + e[i + 1:]
        acc.setdefault(ne, [Fraction(0)] * (n + 1))[e[i]] += c
    return Poly(nv, {e: Truncated(cs, n) for e, cs in acc.items()})


def from_truncated(p: Poly, name: str = "s") -> Poly:
    """Inverse of :func:`to_truncated`."""
    n = None
    for c in p.terms.values():
        if isinstance(c, Truncated):
            if n is not None and c.n != n:
                raise RingMismatchError("mixed truncation orders")
            n = c.n
    if n is None:
        raise RingMismatchError("no truncated coefficients")
    if name in p.vars:
        raise RingMismatchError("variable %r already used" % name)
    nv = p.vars + (name,)
    out = {}
    for e, c in p.terms.items():
        cs = c.coeffs if isinstance(c, Truncated) else (c,)
        for k, a in enumerate(cs):
            if a:
                out[e + (k,)] = a
    return Poly(nv, out, (name, n))


# ---------------------------------------------------------------------------
# parser

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()]))")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            if not rest.strip():
                break
            bad = pos + (len(rest) - len(rest.lstrip()))
            raise _err(text, bad, "unexpected character %r" % text[bad])
        kind = m.lastgroup
        start = m.start(kind)
        tok = m.group(kind)
        if tok == "**":
            raise _err(text, start, "use '^' for powers")
        toks.append(_Tok(kind, tok, start))
        pos = m.end()
    toks.append(_Tok("end", "", n))
    return toks


def _err(text, pos, msg) -> ParseError:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return ParseError(msg, text, line, col)


class _Parser:
    def __init__(self, text, vars, trunc):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = vars
        self.trunc = trunc

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, tok, msg):
        raise _err(self.text, tok.pos, msg)

    def parse(self):
        if self.peek().kind == "end":
            self.fail(self.peek(), "empty polynomial")
        p = self.expr()
        t = self.peek()
        if t.kind != "end":
            if t.kind in ("num", "id") or t.text == "(":
                self.fail(t, "implicit multiplication is not allowed; write '*'")
            self.fail(t, "unexpected %r" % t.text)
        return p

    def expr(self):
        p = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while True:
            t = self.peek()
            if t.text == "*":
                self.take()
                p = p * self.unary()
            elif t.text == "/":
                self.take()
                nt = self.peek()
                q = self.unary()
                if not q.is_constant() or q.is_zero():
                    self.fail(nt, "division only by a nonzero constant")
                p = p / q.constant_term()
            elif t.kind in ("num", "id") or t.text == "(":
                self.fail(t, "implicit multiplication is not allowed; write '*'")
            else:
                return p

    def unary(self):
        t = self.peek()
        if t.text == "-":
            self.take()
            return -self.unary()
        if t.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^":
            self.take()
            t = self.take()
            if t.kind != "num":
                self.fail(t, "exponent must be a nonnegative integer literal")
            base = base ** int(t.text)
        return base

    def atom(self):
        t = self.take()
        if t.kind == "num":
            return Poly.constant(int(t.text), self.vars, self.trunc)
        if t.kind == "id":
            if t.text not in self.vars:
                self.fail(t, "unknown variable %r" % t.text)
            return Poly.var(t.text, self.vars, self.trunc)
        if t.text == "(":
            p = self.expr()
            c = self.take()
            if c.text != ")":
                self.fail(c, "expected ')'")
            return p
        if t.kind == "end":
            self.fail(t, "unexpected end of input")
        self.fail(t, "unexpected %r" % t.text)


def parse(text: str, vars: Optional[Sequence[str]] = None, trunc=None) -> Poly:
    """Parse a polynomial written with ``+ - * / ^`` and parentheses.

    ``/`` is only allowed with a nonzero constant divisor.  When ``vars``
    is omitted, the identifiers are collected in order of appearance.
    """
    if vars is None:
        seen = []
        for t in _tokenize(text):
            if t.kind == "id" and t.text not in seen:
                seen.append(t.text)
        vars = tuple(seen)
    return _Parser(text, tuple(vars), trunc).parse()
