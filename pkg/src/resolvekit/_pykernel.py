"""Pure-Python polynomial kernels.

Polynomials here are plain dicts mapping exponent tuples to coefficients.
The compiled module ``_ckernel`` exposes exactly the same functions.
"""
import heapq
from math import gcd

from .errors import ResourceCapError


def add_terms(a, b, sign=1):
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        v = c * sign if v is None else v + c * sign
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def mul_terms(a, b, cap_index=-1, cap=0):
    """Product of two term dicts.

    With ``cap_index >= 0`` every term whose exponent in that slot exceeds
    ``cap`` is dropped (truncated coefficient rings).
    """
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple([x + y for x, y in zip(ea, eb)])
            if cap_index >= 0 and e[cap_index] > cap:
                continue
            v = out.get(e)
            out[e] = ca * cb if v is None else v + ca * cb
    return {e: c for e, c in out.items() if c}


def divides(a, b):
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def lcm_exp(a, b):
    return tuple([x if x > y else y for x, y in zip(a, b)])


def content(terms):
    g = 0
    for c in terms.values():
        g = gcd(g, c)
        if g == 1:
            break
    return g


def primitive(terms, lead=None):
    """Divide out the content; make the leading coefficient positive."""
    g = content(terms)
    if lead is not None and terms[lead] < 0:
        g = -g
    if g == 1:
        return terms
    return {e: c // g for e, c in terms.items()}


class _Counter:
    __slots__ = ("steps", "cap")

    def __init__(self, cap):
        self.steps = 0
        self.cap = cap

    def tick(self):
        self.steps += 1
        if self.steps > self.cap:
            raise ResourceCapError("reduction cap of %d exceeded" % self.cap)


def reduce_int(f, basis, nkey, counter=None):
    """Fully reduce ``f`` modulo ``basis`` with integer arithmetic.

    ``basis`` is a list of ``(lead_exp, lead_coeff, terms)`` triples and
    ``nkey`` maps an exponent to a tuple that sorts *ascending* for terms
    that are *larger* in the monomial order.  The result is a scalar
    multiple of the true normal form, returned primitive.
    """
    p = dict(f)
    heap = [(nkey(e), e) for e in p]
    heapq.heapify(heap)
    rem = {}
    while heap:
        _, lead = heapq.heappop(heap)
        c = p.get(lead)
        if c is None:
            continue
        # skip duplicate heap entries for the same exponent
        while heap and heap[0][1] == lead:
            heapq.heappop(heap)
        for le, lc, g in basis:
            if divides(le, lead):
                if counter is not None:
                    counter.tick()
                d = gcd(lc, c)
                mp, mg = lc // d, c // d
                if mp != 1:
                    for e in p:
                        p[e] *= mp
                    for e in rem:
                        rem[e] *= mp
                shift = tuple([x - y for x, y in zip(lead, le)])
                for ge, gc in g.items():
                    e = tuple([x + y for x, y in zip(ge, shift)])
                    v = p.get(e)
                    if v is None:
                        p[e] = -mg * gc
                        heapq.heappush(heap, (nkey(e), e))
                    else:
                        v -= mg * gc
                        if v:
                            p[e] = v
                        else:
                            del p[e]
                break
        else:
            rem[lead] = p.pop(lead)
    if not rem:
        return rem
    g = content(rem)
    lead = min(rem, key=nkey)
    if rem[lead] < 0:
        g = -g
    if g != 1:
        rem = {e: c // g for e, c in rem.items()}
    return rem


def leading(terms, nkey):
    lead = min(terms, key=nkey)
    return lead, terms[lead]


def buchberger_int(polys, nkey, cap=100000):
    """Reduced Groebner basis of integer term dicts.

    Returns a list of primitive term dicts with positive leading
    coefficients, sorted by decreasing leading monomial.
    """
    counter = _Counter(cap)
    basis = []
    for f in polys:
        if f:
            lead, _ = leading(f, nkey)
            basis.append(primitive(f, lead))
    if not basis:
        return []
    leads = [leading(g, nkey)[0] for g in basis]
    pairs = []
    done = set()

    def push_pairs(j):
        for i in range(j):
            if basis[i] is None:
                continue
            l = lcm_exp(leads[i], leads[j])
            heapq.heappush(pairs, (tuple(-k for k in nkey(l)), i, j, l))

    for j in range(1, len(basis)):
        push_pairs(j)

    while pairs:
        _, i, j, l = heapq.heappop(pairs)
        done.add((i, j))
        li, lj = leads[i], leads[j]
        # product criterion
        if all(x == 0 or y == 0 for x, y in zip(li, lj)):
            continue
        # chain criterion
        skip = False
        for k in range(len(basis)):
            if k == i or k == j:
                continue
            if divides(leads[k], l):
                a, b = (i, k) if i < k else (k, i)
                c, d = (j, k) if j < k else (k, j)
                if (a, b) in done and (c, d) in done:
                    skip = True
                    break
        if skip:
            continue
        gi, gj = basis[i], basis[j]
        ci, cj = gi[li], gj[lj]
        d = gcd(ci, cj)
        si = tuple(x - y for x, y in zip(l, li))
        sj = tuple(x - y for x, y in zip(l, lj))
        s = {}
        for e, c in gi.items():
            s[tuple(x + y for x, y in zip(e, si))] = c * (cj // d)
        for e, c in gj.items():
            k2 = tuple(x + y for x, y in zip(e, sj))
            v = s.get(k2, 0) - c * (ci // d)
            if v:
                s[k2] = v
            else:
                s.pop(k2, None)
        if not s:
            continue
        red = [(leads[k], basis[k][leads[k]], basis[k]) for k in range(len(basis))]
        h = reduce_int(s, red, nkey, counter)
        if not h:
            continue
        basis.append(h)
        leads.append(leading(h, nkey)[0])
        push_pairs(len(basis) - 1)

    # minimal basis
    keep = []
    for k, lk in enumerate(leads):
        dominated = False
        for m, lm in enumerate(leads):
            if m == k:
                continue
            if divides(lm, lk) and (lm != lk or m < k):
                dominated = True
                break
        if not dominated:
            keep.append(k)
    mins = [basis[k] for k in keep]
    out = []
    for idx, g in enumerate(mins):
        others = []
        for m, h in enumerate(mins):
            if m != idx:
                hl, hc = leading(h, nkey)
                others.append((hl, hc, h))
        lead, lc = leading(g, nkey)
        out.append(primitive(_exact_tail(lead, lc, g, others, nkey, counter), lead))
    out.sort(key=lambda g: nkey(leading(g, nkey)[0]))
    return out


def _exact_tail(lead, lc, poly, others, nkey, counter):
    """Reduce every non-leading term of ``poly``; the leading term stays."""
    p = dict(poly)
    heap = [(nkey(e), e) for e in p if e != lead]
    heapq.heapify(heap)
    done = {}
    while heap:
        _, t = heapq.heappop(heap)
        c = p.get(t)
        if c is None or t in done:
            continue
        for le, glc, g in others:
            if divides(le, t):
                counter.tick()
                d = gcd(glc, c)
                mp, mg = glc // d, c // d
                if mp != 1:
                    for e in p:
                        p[e] *= mp
                    for e in done:
                        done[e] *= mp
                shift = tuple(x - y for x, y in zip(t, le))
                for ge, gc in g.items():
                    e = tuple(x + y for x, y in zip(ge, shift))
                    v = p.get(e, 0) - mg * gc
                    if e not in p:
                        heapq.heappush(heap, (nkey(e), e))
                    if v:
                        p[e] = v
                    else:
                        p.pop(e, None)
                break
        else:
            done[t] = p.pop(t)
    done[lead] = p[lead]
    return done
