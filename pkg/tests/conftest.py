import sympy
from hypothesis import settings

from resolvekit.exactalg import Poly
from resolvekit.idealkit import Ideal

settings.register_profile("ci", max_examples=40, deadline=None, derandomize=True)
settings.load_profile("ci")

# filled by the acceptance suite, shown after the run even without -s
CRITERIA_LINES = []


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES):
            terminalreporter.write_line(line)


def P(text, vars):
    return Poly.parse(text, vars)


def ideal(gens, vars, **kw):
    return Ideal([Poly.parse(g, vars) for g in gens], vars, **kw)


def to_sym(p: Poly):
    syms = sympy.symbols(p.vars)
    out = sympy.Integer(0)
    for e, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(syms, e):
            term *= s ** k
        out += term
    return sympy.expand(out)


def _shape(v):
    from resolvekit.resolver import TPair
    out = []
    while isinstance(v, TPair):
        out.append("t")
        v = v.tail
    out.append(type(v).__name__)
    return tuple(out)


def regime_violations(paths):
    """Consecutive values along a path that break monotonicity.

    A regime is a run of steps whose values have the same shape (the same
    kind at every level).  Inside a regime the value must drop strictly;
    across the whole path the leading (omega, n) of t-values must not grow.
    """
    from resolvekit.resolver import TPair
    bad = []
    for path in paths:
        vals = [v for _, v in path]
        for a, b in zip(vals, vals[1:]):
            if _shape(a) == _shape(b) and not a > b:
                bad.append((str(a), str(b)))
            elif isinstance(a, TPair) and isinstance(b, TPair) and (b.omega, b.n) > (a.omega, a.n):
                bad.append((str(a), str(b)))
    return bad
