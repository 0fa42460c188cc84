# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled polynomial kernels; same interface as ``_pykernel``.

Coefficients stay Python integers (they grow without bound), so the gain
comes from typed exponent arithmetic and tighter loops.
"""
import heapq
from math import gcd

from .errors import ResourceCapError


cdef tuple _add_exp(tuple a, tuple b):
    cdef Py_ssize_t i, n = len(a)
    out = [0] * n
    for i in range(n):
        out[i] = <long>a[i] + <long>b[i]
    return tuple(out)


cdef tuple _sub_exp(tuple a, tuple b):
    cdef Py_ssize_t i, n = len(a)
    out = [0] * n
    for i in range(n):
        out[i] = <long>a[i] - <long>b[i]
    return tuple(out)


cdef bint _divides(tuple a, tuple b):
    cdef Py_ssize_t i, n = len(a)
    for i in range(n):
        if <long>a[i] > <long>b[i]:
            return False
    return True


def add_terms(dict a, dict b, sign=1):
    cdef dict out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        v = c * sign if v is None else v + c * sign
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def mul_terms(dict a, dict b, long cap_index=-1, long cap=0):
    cdef dict out = {}
    cdef tuple e
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _add_exp(ea, eb)
            if cap_index >= 0 and <long>e[cap_index] > cap:
                continue
            v = out.get(e)
            out[e] = ca * cb if v is None else v + ca * cb
    return {k: c for k, c in out.items() if c}


def divides(a, b):
    return _divides(tuple(a), tuple(b))


def lcm_exp(tuple a, tuple b):
    cdef Py_ssize_t i, n = len(a)
    out = [0] * n
    for i in range(n):
        out[i] = a[i] if <long>a[i] > <long>b[i] else b[i]
    return tuple(out)


def content(dict terms):
    g = 0
    for c in terms.values():
        g = gcd(g, c)
        if g == 1:
            break
    return g


def primitive(dict terms, lead=None):
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


def reduce_int(dict f, list basis, nkey, counter=None):
    cdef dict p = dict(f)
    cdef dict rem = {}
    cdef list heap = [(nkey(e), e) for e in p]
    cdef tuple lead, le, shift, e
    heapq.heapify(heap)
    while heap:
        _, lead = heapq.heappop(heap)
        c = p.get(lead)
        if c is None:
            continue
        while heap and heap[0][1] == lead:
            heapq.heappop(heap)
        for le, lc, g in basis:
            if _divides(le, lead):
                if counter is not None:
                    counter.tick()
                d = gcd(lc, c)
                mp = lc // d
                mg = c // d
                if mp != 1:
                    for k in p:
                        p[k] *= mp
                    for k in rem:
                        rem[k] *= mp
                shift = _sub_exp(lead, le)
                for ge, gc in g.items():
                    e = _add_exp(ge, shift)
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
        rem = {k: c // g for k, c in rem.items()}
    return rem


def leading(dict terms, nkey):
    lead = min(terms, key=nkey)
    return lead, terms[lead]


def buchberger_int(polys, nkey, cap=100000):
    counter = _Counter(cap)
    cdef list basis = []
    cdef list leads
    cdef list pairs = []
    cdef set done = set()
    cdef Py_ssize_t i, j, k, n
    cdef tuple l, li, lj, si, sj
    for f in polys:
        if f:
            lead, _ = leading(f, nkey)
            basis.append(primitive(f, lead))
    if not basis:
        return []
    leads = [leading(g, nkey)[0] for g in basis]

    def push_pairs(Py_ssize_t jj):
        cdef Py_ssize_t ii
        for ii in range(jj):
            lcm = lcm_exp(leads[ii], leads[jj])
            heapq.heappush(pairs, (tuple([-x for x in nkey(lcm)]), ii, jj, lcm))

    for j in range(1, len(basis)):
        push_pairs(j)

    while pairs:
        _, i, j, l = heapq.heappop(pairs)
        done.add((i, j))
        li = leads[i]
        lj = leads[j]
        n = len(li)
        coprime = True
        for k in range(n):
            if <long>li[k] != 0 and <long>lj[k] != 0:
                coprime = False
                break
        if coprime:
            continue
        skip = False
        for k in range(len(basis)):
            if k == i or k == j:
                continue
            if _divides(leads[k], l):
                a, b = (i, k) if i < k else (k, i)
                c, d = (j, k) if j < k else (k, j)
                if (a, b) in done and (c, d) in done:
                    skip = True
                    break
        if skip:
            continue
        gi = basis[i]
        gj = basis[j]
        ci = gi[li]
        cj = gj[lj]
        dd = gcd(ci, cj)
        si = _sub_exp(l, li)
        sj = _sub_exp(l, lj)
        s = {}
        for e, c in gi.items():
            s[_add_exp(e, si)] = c * (cj // dd)
        for e, c in gj.items():
            k2 = _add_exp(e, sj)
            v = s.get(k2, 0) - c * (ci // dd)
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

    keep = []
    for k in range(len(leads)):
        lk = leads[k]
        dominated = False
        for m in range(len(leads)):
            if m == k:
                continue
            lm = leads[m]
            if _divides(lm, lk) and (lm != lk or m < k):
                dominated = True
                break
        if not dominated:
            keep.append(k)
    mins = [basis[k] for k in keep]
    out = []
    for idx in range(len(mins)):
        g = mins[idx]
        others = []
        for m in range(len(mins)):
            if m != idx:
                hl, hc = leading(mins[m], nkey)
                others.append((hl, hc, mins[m]))
        lead, lc = leading(g, nkey)
        out.append(primitive(_exact_tail(lead, g, others, nkey, counter), lead))
    out.sort(key=lambda t: nkey(leading(t, nkey)[0]))
    return out


cdef dict _exact_tail(tuple lead, dict poly, list others, nkey, counter):
    cdef dict p = dict(poly)
    cdef dict done = {}
    cdef list heap = [(nkey(e), e) for e in p if e != lead]
    cdef tuple t, le, shift, e
    heapq.heapify(heap)
    while heap:
        _, t = heapq.heappop(heap)
        c = p.get(t)
        if c is None or t in done:
            continue
        for le, glc, g in others:
            if _divides(le, t):
                counter.tick()
                d = gcd(glc, c)
                mp = glc // d
                mg = c // d
                if mp != 1:
                    for k in p:
                        p[k] *= mp
                    for k in done:
                        done[k] *= mp
                shift = _sub_exp(t, le)
                for ge, gc in g.items():
                    e = _add_exp(ge, shift)
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
