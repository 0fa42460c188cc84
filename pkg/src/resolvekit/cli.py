"""Command-line front end.

    resolvekit <resolve|principalize|embedded|family> --input spec.json --out report.json
               [--dot tree.dot] [--samples 0,1,-1] [--truncation 2] [--max-steps 64]

Exit status: 0 when the computation finished (whatever the verdicts), 1 for
bad input, 2 when a resource cap was hit, 3 for an internal consistency
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from . import __version__
from .errors import (InputError, InvariantViolation, ParseError, ResolveKitError,
                     ResourceCapError)
from .exactalg import parse
from .families import CONDITIONS, SAMPLES, FamilyObject, _sample_str, parse_sample, run_conditions
from .geom import MarkedChart
from .idealkit import Ideal, get_reduction_cap, set_reduction_cap
from .resolver import (DEFAULT_MAX_STEPS, embedded_index, principalize, resolve, resolve_embedded,
                       resolved_leaves)

MODES = ("resolve", "principalize", "embedded", "family")


@dataclass
class ProblemSpec:
    vars: List[str]
    gens: List[str]
    b: int = 1
    E: List[str] = field(default_factory=list)
    base: Optional[str] = None
    mode: Optional[str] = None
    samples: List[str] = field(default_factory=lambda: [_sample_str(s) for s in SAMPLES])
    truncation: int = 2
    conditions: List[str] = field(default_factory=lambda: list(CONDITIONS))
    max_steps: int = DEFAULT_MAX_STEPS
    reduction_cap: Optional[int] = None

    def to_json(self):
        out = {"vars": list(self.vars), "gens": list(self.gens), "b": self.b, "E": list(self.E)}
        if self.base is not None:
            out["base"] = self.base
        if self.mode is not None:
            out["mode"] = self.mode
        if self.mode == "family" or self.base is not None:
            out["family"] = {"samples": list(self.samples), "truncation": self.truncation,
                             "conditions": list(self.conditions)}
        out["caps"] = {"max_steps": self.max_steps}
        if self.reduction_cap is not None:
            out["caps"]["reduction_cap"] = self.reduction_cap
        return out

    def ideal(self) -> Ideal:
        return Ideal([parse(g, self.vars) for g in self.gens], self.vars)


def _field(doc: dict, name: str, kind, default=None, required=False):
    if name not in doc:
        if required:
            raise InputError("missing field %r" % name)
        return default
    val = doc[name]
    if kind is int and (isinstance(val, bool) or not isinstance(val, int)):
        raise InputError("field %r must be an integer" % name)
    if kind is list and not isinstance(val, list):
        raise InputError("field %r must be a list" % name)
    if kind is str and not isinstance(val, str):
        raise InputError("field %r must be a string" % name)
    if kind is dict and not isinstance(val, dict):
        raise InputError("field %r must be an object" % name)
    return val


def spec_from_json(doc) -> ProblemSpec:
    if not isinstance(doc, dict):
        raise InputError("the problem must be a JSON object")
    if "input" in doc and "tool" in doc:
        doc = doc["input"]          # a report: re-run what it was computed from
    vars = _field(doc, "vars", list, required=True)
    if not vars or not all(isinstance(v, str) and v.isidentifier() for v in vars):
        raise InputError("field 'vars' must be a nonempty list of identifiers")
    if len(set(vars)) != len(vars):
        raise InputError("field 'vars' has repeated names")
    gens = _field(doc, "gens", list, required=True)
    if not gens or not all(isinstance(g, str) for g in gens):
        raise InputError("field 'gens' must be a nonempty list of strings")
    for i, g in enumerate(gens):
        try:
            parse(g, vars)
        except ParseError as err:
            raise ParseError("gens[%d]: %s" % (i, err.message), g, err.line, err.column) from None
    b = _field(doc, "b", int, 1)
    if b < 1:
        raise InputError("field 'b' must be at least 1")
    E = _field(doc, "E", list, [])
    base = _field(doc, "base", str)
    if base is not None and base not in vars:
        raise InputError("base variable %r is not among 'vars'" % base)
    for e in E:
        if not isinstance(e, str) or e not in vars:
            raise InputError("divisor %r in 'E' is not among 'vars'" % (e,))
        if e == base:
            raise InputError("the base variable %r cannot be a divisor in 'E'" % e)
    mode = _field(doc, "mode", str)
    if mode is not None and mode not in MODES:
        raise InputError("field 'mode' must be one of %s" % ", ".join(MODES))
    fam = _field(doc, "family", dict, {})
    samples = fam.get("samples", [_sample_str(s) for s in SAMPLES])
    if not isinstance(samples, list) or not samples:
        raise InputError("field 'family.samples' must be a nonempty list")
    samples = [str(s) for s in samples]
    for s in samples:
        try:
            parse_sample(s)
        except (ValueError, ZeroDivisionError, InputError):
            raise InputError("bad sample point %r" % s) from None
    trunc = _field(fam, "truncation", int, 2)
    if trunc < 1:
        raise InputError("field 'family.truncation' must be at least 1")
    conds = fam.get("conditions", list(CONDITIONS))
    if not isinstance(conds, list) or any(c not in CONDITIONS for c in conds):
        raise InputError("field 'family.conditions' must list names from %s" % ", ".join(CONDITIONS))
    caps = _field(doc, "caps", dict, {})
    max_steps = _field(caps, "max_steps", int, DEFAULT_MAX_STEPS)
    if max_steps < 0:
        raise InputError("field 'caps.max_steps' must be nonnegative")
    rcap = _field(caps, "reduction_cap", int)
    if mode == "family" and base is None:
        raise InputError("family mode needs a base variable")
    return ProblemSpec(list(vars), list(gens), b, list(E), base, mode, samples, trunc,
                       list(conds), max_steps, rcap)


def parse_spec(path: str) -> ProblemSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise InputError("cannot read %s: %s" % (path, err.strerror)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, text, err.lineno, err.colno) from None
    return spec_from_json(doc)


def _tree_result(tree) -> dict:
    out = tree.to_json()
    out["depth"] = tree.depth()
    out["resolved"] = resolved_leaves(tree) if all(n.status != "stopped" for n in tree.leaves()) \
        else None
    return out


def run(spec: ProblemSpec, mode: str):
    """Compute; returns (report dict, DOT text or None)."""
    if spec.mode is not None and spec.mode != mode:
        raise InputError("the problem says mode %r but %r was requested" % (spec.mode, mode))
    I = spec.ideal()
    result: dict
    dot = None
    if mode == "family":
        if spec.base is None:
            raise InputError("family mode needs a base variable")
        F = FamilyObject.make(I, spec.b, spec.E, spec.base, tuple(spec.samples))
        reports = run_conditions(F, spec.conditions, spec.truncation, spec.max_steps)
        result = {"conditions": [r.to_json() for r in reports]}
    else:
        base = (spec.base,) if spec.base else ()
        if mode == "resolve":
            chart = MarkedChart.make(I, spec.b, spec.E, base=base)
            tree = resolve(chart, max_steps=spec.max_steps)
            result = _tree_result(tree)
        elif mode == "principalize":
            chart = MarkedChart.make(I, 1, spec.E, base=base)
            tree = principalize(chart, max_steps=spec.max_steps)
            result = _tree_result(tree)
        else:
            chart = MarkedChart.make(I, 1, spec.E, base=base)
            tree = resolve_embedded(I, chart, max_steps=spec.max_steps)
            result = _tree_result(tree)
            result["eta"] = embedded_index(tree)
        dot = tree.to_dot()
    spec_json = spec.to_json()
    spec_json["mode"] = mode
    report = {"tool": "resolvekit", "version": __version__, "mode": mode, "input": spec_json,
              "caps": {"max_steps": spec.max_steps, "reduction_cap": get_reduction_cap()},
              "result": result}
    if mode == "family":
        report["samples"] = list(spec.samples)
        report["truncation"] = spec.truncation
    return report, dot


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resolvekit", description=__doc__.split("\n\n")[0])
    p.add_argument("mode", choices=MODES)
    p.add_argument("--input", required=True, help="problem description (JSON)")
    p.add_argument("--out", required=True, help="where to write the JSON report")
    p.add_argument("--dot", help="write the chart tree in DOT format")
    p.add_argument("--samples", help="comma separated sample points, e.g. 0,1,-1,generic")
    p.add_argument("--truncation", type=int, help="order n of Q[s]/(s^(n+1)) for condition E")
    p.add_argument("--max-steps", type=int, help="cap on transformations per chart")
    p.add_argument("--version", action="version", version="resolvekit " + __version__)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    old_cap = get_reduction_cap()
    try:
        spec = parse_spec(args.input)
        if args.samples:
            spec.samples = [s.strip() for s in args.samples.split(",") if s.strip()]
            for s in spec.samples:
                try:
                    parse_sample(s)
                except (ValueError, ZeroDivisionError, InputError):
                    raise InputError("bad sample point %r" % s) from None
        if args.truncation is not None:
            if args.truncation < 1:
                raise InputError("--truncation must be at least 1")
            spec.truncation = args.truncation
        if args.max_steps is not None:
            if args.max_steps < 0:
                raise InputError("--max-steps must be nonnegative")
            spec.max_steps = args.max_steps
        if spec.reduction_cap is not None:
            set_reduction_cap(spec.reduction_cap)
        report, dot = run(spec, args.mode)
    except InputError as err:
        print("resolvekit: input error: %s" % err, file=sys.stderr)
        return 1
    except ResourceCapError as err:
        print("resolvekit: resource cap: %s" % err, file=sys.stderr)
        return 2
    except InvariantViolation as err:
        print("resolvekit: invariant violated at step %s: %s"
              % (getattr(err, "step", "?"), err), file=sys.stderr)
        return 3
    except ResolveKitError as err:
        print("resolvekit: %s at step %s: %s"
              % (type(err).__name__, getattr(err, "step", "?"), err), file=sys.stderr)
        return 3
    finally:
        set_reduction_cap(old_cap)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if args.dot and dot is not None:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(dot)
    return 0


if __name__ == "__main__":
    sys.exit(main())
