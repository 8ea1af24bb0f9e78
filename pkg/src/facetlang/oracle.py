"""Projection-equivalence oracle.

Faceted execution promises that one faceted run equals 2^k separate plain
runs, one per assignment of the k labels. This module checks that promise
from the other direction: it projects the program syntactically for every
view, runs each projection under an independent facet-free evaluator, and
compares printed results against the projected output of the faceted run.

The plain evaluator here deliberately shares nothing with the faceted one
beyond the reader, so a bug in the facet machinery cannot hide in its own
oracle.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import facets
from .errors import LangError, MissingLabelError, NotOracleSafeError, WrongTypeError
from .interp import Interp
from .reader import (
    Apply,
    Begin,
    Box,
    Const,
    Definition,
    Expr,
    FacetCreate,
    If,
    Lambda,
    LetLabel,
    Obs,
    PrimRef,
    Program,
    SetBang,
    StarLit,
    Unbox,
    Var,
    parse_program,
    unparse,
    unparse_program,
)

### static analysis: which binder does each facet/obs name?

_OPAQUE = ("opaque",)


@dataclass
class OracleAnalysis:
    binders: list  # LetLabel nodes in syntactic order
    site_of_binder: dict  # id(LetLabel) -> site index
    facet_sites: dict  # id(FacetCreate) -> site index
    obs_sites: dict  # id(Obs) -> site index

    @property
    def label_count(self) -> int:
        return len(self.binders)


def analyze(program: Program) -> OracleAnalysis:
    """Resolve every facet/obs label position to its let-label binder."""
    an = OracleAnalysis([], {}, {}, {})

    def collect(expr):
        if isinstance(expr, LetLabel):
            an.site_of_binder[id(expr)] = len(an.binders)
            an.binders.append(expr)
            collect(expr.policy)
            collect(expr.body)
        elif isinstance(expr, Lambda):
            collect(expr.body)
        elif isinstance(expr, Apply):
            collect(expr.fn)
            for a in expr.args:
                collect(a)
        elif isinstance(expr, (Box, Unbox)):
            collect(expr.expr)
        elif isinstance(expr, SetBang):
            collect(expr.target)
            collect(expr.expr)
        elif isinstance(expr, FacetCreate):
            collect(expr.label)
            collect(expr.pos)
            collect(expr.neg)
        elif isinstance(expr, Obs):
            collect(expr.label)
            collect(expr.key)
            collect(expr.target)
        elif isinstance(expr, If):
            collect(expr.cond)
            collect(expr.then)
            collect(expr.orelse)
        elif isinstance(expr, Begin):
            for e in expr.exprs:
                collect(e)

    for item in program.items:
        collect(item.expr if isinstance(item, Definition) else item)

    def static_label(expr, scope: dict):
        """Site index if expr statically denotes a label, else None."""
        if isinstance(expr, Var):
            binding = scope.get(expr.name, _OPAQUE)
            return binding[1] if binding[0] == "label" else None
        if isinstance(expr, LetLabel):
            inner = dict(scope)
            inner[expr.name] = ("label", an.site_of_binder[id(expr)])
            return static_label(expr.body, inner)
        return None

    def resolve(expr, scope: dict):
        if isinstance(expr, LetLabel):
            resolve(expr.policy, scope)
            inner = dict(scope)
            inner[expr.name] = ("label", an.site_of_binder[id(expr)])
            resolve(expr.body, inner)
        elif isinstance(expr, Lambda):
            inner = dict(scope)
            for p in expr.params:
                inner[p] = _OPAQUE
            resolve(expr.body, inner)
        elif isinstance(expr, Apply):
            for a in expr.args:
                resolve(a, scope)
            if isinstance(expr.fn, Lambda):
                # a desugared let: bindings may carry labels into the body
                inner = dict(scope)
                for p, a in zip(expr.fn.params, expr.args):
                    site = static_label(a, scope)
                    inner[p] = ("label", site) if site is not None else _OPAQUE
                resolve(expr.fn.body, inner)
            else:
                resolve(expr.fn, scope)
        elif isinstance(expr, (Box, Unbox)):
            resolve(expr.expr, scope)
        elif isinstance(expr, SetBang):
            resolve(expr.target, scope)
            resolve(expr.expr, scope)
        elif isinstance(expr, FacetCreate):
            site = static_label(expr.label, scope)
            if site is None:
                raise NotOracleSafeError("facet label is not statically a binder: %s" % unparse(expr))
            an.facet_sites[id(expr)] = site
            resolve(expr.label, scope)
            resolve(expr.pos, scope)
            resolve(expr.neg, scope)
        elif isinstance(expr, Obs):
            site = static_label(expr.label, scope)
            if site is None:
                raise NotOracleSafeError("obs label is not statically a binder: %s" % unparse(expr))
            an.obs_sites[id(expr)] = site
            resolve(expr.key, scope)
            resolve(expr.target, scope)
        elif isinstance(expr, If):
            resolve(expr.cond, scope)
            resolve(expr.then, scope)
            resolve(expr.orelse, scope)
        elif isinstance(expr, Begin):
            for e in expr.exprs:
                resolve(e, scope)

    scope: dict = {}
    for item in program.items:
        if isinstance(item, Definition):
            resolve(item.expr, scope)
            site = static_label(item.expr, scope)
            scope[item.name] = ("label", site) if site is not None else _OPAQUE
        else:
            resolve(item, scope)
    return an


### program projection

# View: dict site-index -> bool


def project_program(program: Program, view: dict, analysis: OracleAnalysis) -> Program:
    """Rewrite facet forms to the viewed branch and obs forms to their target."""

    def tx(expr):
        if isinstance(expr, FacetCreate):
            chosen = expr.pos if view[analysis.facet_sites[id(expr)]] else expr.neg
            return tx(chosen)
        if isinstance(expr, Obs):
            return tx(expr.target)
        if isinstance(expr, LetLabel):
            return LetLabel(expr.name, tx(expr.policy), tx(expr.body), loc=expr.loc)
        if isinstance(expr, Lambda):
            return Lambda(list(expr.params), tx(expr.body), loc=expr.loc)
        if isinstance(expr, Apply):
            return Apply(tx(expr.fn), [tx(a) for a in expr.args], loc=expr.loc)
        if isinstance(expr, Box):
            return Box(tx(expr.expr), loc=expr.loc)
        if isinstance(expr, Unbox):
            return Unbox(tx(expr.expr), loc=expr.loc)
        if isinstance(expr, SetBang):
            return SetBang(tx(expr.target), tx(expr.expr), loc=expr.loc)
        if isinstance(expr, If):
            return If(tx(expr.cond), tx(expr.then), tx(expr.orelse), loc=expr.loc)
        if isinstance(expr, Begin):
            return Begin([tx(e) for e in expr.exprs], loc=expr.loc)
        return expr

    items = []
    for item in program.items:
        if isinstance(item, Definition):
            items.append(Definition(item.name, tx(item.expr), loc=item.loc))
        else:
            items.append(tx(item))
    return Program(items)


### value projection


def project_value(value, view: dict, label_sites: dict):
    """Collapse a faceted value to what one view sees."""
    if isinstance(value, facets.Facet):
        site = label_sites.get(value.label)
        if site is None:
            raise MissingLabelError("no view assignment for label %s" % value.label.name)
        side = value.left if view[site] else value.right
        return project_value(side, view, label_sites)
    if isinstance(value, facets.Pair):
        return facets.Pair(
            project_value(value.car, view, label_sites),
            project_value(value.cdr, view, label_sites),
        )
    return value


### the plain evaluator (independent of the faceted one)


class _Cell:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class _StdPair:
    __slots__ = ("car", "cdr")

    def __init__(self, car, cdr):
        self.car = car
        self.cdr = cdr


class _StdNil:
    pass


class _StdStar:
    pass


class _StdClosure:
    __slots__ = ("params", "body", "env", "name")

    def __init__(self, params, body, env, name=None):
        self.params = params
        self.body = body
        self.env = env
        self.name = name


class _StdLabel:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name


class _StdPrim:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name


_SNIL = _StdNil()
_SSTAR = _StdStar()


class _StdEnv:
    __slots__ = ("vars", "parent")

    def __init__(self, vars=None, parent=None):
        self.vars = vars if vars is not None else {}
        self.parent = parent

    def lookup(self, name):
        env = self
        while env is not None:
            if name in env.vars:
                return env.vars[name]
            env = env.parent
        from .errors import UnboundVariableError

        raise UnboundVariableError("unbound variable: %s" % name)


def std_render(value) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return '"' + value + '"'
    if value is _SNIL:
        return "'()"
    if isinstance(value, _StdPair):
        parts = []
        cur = value
        while isinstance(cur, _StdPair):
            parts.append(std_render(cur.car))
            cur = cur.cdr
        if cur is _SNIL:
            return "(" + " ".join(parts) + ")"
        return "(" + " ".join(parts) + " . " + std_render(cur) + ")"
    if value is _SSTAR:
        return "#star"
    if isinstance(value, _StdClosure):
        return "#proc:%s" % (value.name or "lambda")
    if isinstance(value, _StdPrim):
        return "#proc:%s" % value.name
    if isinstance(value, _Cell):
        return "#box:?"
    if isinstance(value, _StdLabel):
        return "#label:%s" % value.name
    raise WrongTypeError("unprintable value: %r" % (value,))


class StdEval:
    """Facet-free evaluator over its own value domain."""

    def __init__(self):
        self.globals = _StdEnv()

    def run_program(self, program: Program) -> list:
        values = []
        for item in program.items:
            if isinstance(item, Definition):
                value = self.eval(item.expr, self.globals)
                if isinstance(value, _StdClosure) and value.name is None:
                    value.name = item.name
                self.globals.vars[item.name] = value
            else:
                values.append(self.eval(item, self.globals))
        return values

    def eval(self, expr, env):
        if isinstance(expr, Const):
            return self._const(expr.value)
        if isinstance(expr, Var):
            return env.lookup(expr.name)
        if isinstance(expr, PrimRef):
            return _StdPrim(expr.name)
        if isinstance(expr, Lambda):
            return _StdClosure(expr.params, expr.body, env)
        if isinstance(expr, Apply):
            fn = self.eval(expr.fn, env)
            args = [self.eval(a, env) for a in expr.args]
            return self.apply(fn, args)
        if isinstance(expr, Box):
            return _Cell(self.eval(expr.expr, env))
        if isinstance(expr, Unbox):
            v = self.eval(expr.expr, env)
            if v is _SSTAR:
                return _SSTAR
            if not isinstance(v, _Cell):
                raise WrongTypeError("unbox target must be a box, got %s" % std_render(v))
            return v.value
        if isinstance(expr, SetBang):
            target = self.eval(expr.target, env)
            v = self.eval(expr.expr, env)
            if isinstance(target, _Cell):
                target.value = v
            elif target is not _SSTAR:
                raise WrongTypeError("set! target must be a box, got %s" % std_render(target))
            return v
        if isinstance(expr, LetLabel):
            self.eval(expr.policy, env)
            inner = _StdEnv({expr.name: _StdLabel(expr.name)}, env)
            return self.eval(expr.body, inner)
        if isinstance(expr, If):
            cond = self.eval(expr.cond, env)
            if cond is _SSTAR:
                return _SSTAR
            return self.eval(expr.then if cond is not False else expr.orelse, env)
        if isinstance(expr, Begin):
            value = _SNIL
            for e in expr.exprs:
                value = self.eval(e, env)
            return value
        if isinstance(expr, StarLit):
            return _SSTAR
        if isinstance(expr, (FacetCreate, Obs)):
            raise NotOracleSafeError("facet form survived projection: %s" % unparse(expr))
        raise WrongTypeError("cannot evaluate %r" % (expr,))

    def apply(self, fn, args):
        if fn is _SSTAR:
            return _SSTAR
        if isinstance(fn, _StdClosure):
            if len(args) != len(fn.params):
                from .errors import ArityError

                raise ArityError(
                    "%s expects %d arguments, got %d" % (std_render(fn), len(fn.params), len(args))
                )
            return self.eval(fn.body, _StdEnv(dict(zip(fn.params, args)), fn.env))
        if isinstance(fn, _StdPrim):
            return self._prim(fn.name, args)
        raise WrongTypeError("cannot apply %s" % std_render(fn))

    def _const(self, c):
        if isinstance(c, tuple):
            out = _SNIL
            for item in reversed(c):
                out = _StdPair(self._const(item), out)
            return out
        return c

    def _prim(self, name, args):
        from .errors import ArityError, UserError

        arity = {"cons": 2, "car": 1, "cdr": 1, "null?": 1, "pair?": 1, "not": 1,
                 "=": 2, "<": 2, ">": 2, "+": 2, "-": 2, "*": 2, "display": 1, "error": 1}[name]
        if len(args) != arity:
            raise ArityError("%s expects %d arguments, got %d" % (name, arity, len(args)))
        if name == "display":
            v = args[0]
            if v is _SSTAR:
                from .errors import StarObservedError

                raise StarObservedError("display of missing data")
            import sys

            sys.stdout.write(v if isinstance(v, str) else std_render(v))
            sys.stdout.write("\n")
            return v
        if name == "error":
            v = args[0]
            raise UserError("error: %s" % (v if isinstance(v, str) else std_render(v)))
        if any(a is _SSTAR for a in args):
            return _SSTAR
        if name == "cons":
            return _StdPair(args[0], args[1])
        if name == "car":
            if not isinstance(args[0], _StdPair):
                raise WrongTypeError("car expects a pair, got %s" % std_render(args[0]))
            return args[0].car
        if name == "cdr":
            if not isinstance(args[0], _StdPair):
                raise WrongTypeError("cdr expects a pair, got %s" % std_render(args[0]))
            return args[0].cdr
        if name == "null?":
            return args[0] is _SNIL
        if name == "pair?":
            return isinstance(args[0], _StdPair)
        if name == "not":
            return args[0] is False

        def tag(v):
            if v is True or v is False:
                return "bool"
            if isinstance(v, int):
                return "int"
            if isinstance(v, str):
                return "str"
            return None

        a, b = args
        if name == "=":
            ta, tb = tag(a), tag(b)
            if ta is None or tb is None:
                raise WrongTypeError("= expects atomic constants")
            return a == b if ta == tb else False
        for v in (a, b):
            if tag(v) != "int":
                raise WrongTypeError("%s expects integers, got %s" % (name, std_render(v)))
        if name == "<":
            return a < b
        if name == ">":
            return a > b
        if name == "+":
            return a + b
        if name == "-":
            return a - b
        return a * b


def standard_eval(program: Program) -> list:
    """Run a projected (facet-free) program; return printed bare-expression values."""
    return [std_render(v) for v in StdEval().run_program(program)]


### the check itself


@dataclass
class ViewOutcome:
    view: dict
    faceted: str
    standard: str

    @property
    def ok(self) -> bool:
        return self.faceted == self.standard


@dataclass
class OracleReport:
    program_id: str
    label_count: int
    rows: list = field(default_factory=list)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(r.ok for r in self.rows)

    def summary(self) -> dict:
        return {
            "program": self.program_id,
            "labels": self.label_count,
            "verdict": "pass" if self.passed else "fail",
            "error": self.error,
            "views": [
                {"view": {str(k): v for k, v in sorted(r.view.items())},
                 "faceted": r.faceted, "standard": r.standard, "ok": r.ok}
                for r in self.rows
            ],
        }


def render_view(view: dict, analysis: OracleAnalysis | None = None) -> str:
    parts = []
    for site, truth in sorted(view.items()):
        name = analysis.binders[site].name if analysis else str(site)
        parts.append("%s@%d=%s" % (name, site, "true" if truth else "false"))
    return "{" + ",".join(parts) + "}"


def check_projection_equivalence(program, program_id: str = "<program>", max_labels: int = 3) -> OracleReport:
    """Compare one faceted run against every projected plain run.

    Accepts a Program or source text. Raises NotOracleSafeError when the
    program is outside the checkable fragment; any runtime error on either
    side is reported as a failure for the affected views.
    """
    if isinstance(program, str):
        program = parse_program(program)
    analysis = analyze(program)
    k = analysis.label_count
    if k > max_labels:
        raise NotOracleSafeError("%d labels exceeds the limit of %d" % (k, max_labels))
    report = OracleReport(program_id, k)

    interp = Interp()
    try:
        faceted_values = interp.run_program(program)
    except LangError as e:
        report.error = "faceted run failed: %s" % e
        return report

    label_sites: dict = {}
    seen_sites: set = set()
    for node, label in interp.label_log:
        site = analysis.site_of_binder[id(node)]
        if site in seen_sites:
            raise NotOracleSafeError("binder %s@%d created more than one label" % (node.name, site))
        seen_sites.add(site)
        label_sites[label] = site

    for bits in itertools.product([True, False], repeat=k):
        view = dict(enumerate(bits))
        try:
            faceted_side = "\n".join(
                facets.render(project_value(v, view, label_sites)) for v in faceted_values
            )
        except LangError as e:
            faceted_side = "<error: %s>" % e
        try:
            standard_side = "\n".join(standard_eval(project_program(program, view, analysis)))
        except LangError as e:
            standard_side = "<error: %s>" % e
        report.rows.append(ViewOutcome(view, faceted_side, standard_side))
    return report


### bounded random programs


def random_program(rng: random.Random, max_labels: int = 2, max_boxes: int = 2, max_depth: int = 6) -> Program:
    """A closed, error-free random program exercising facets, boxes, and splits."""
    n_labels = rng.randint(1, max_labels)
    n_boxes = rng.randint(1, max_boxes)
    labels = ["l%d" % (i + 1) for i in range(n_labels)]
    boxes = ["b%d" % (i + 1) for i in range(n_boxes)]

    def lit():
        return Const(rng.randint(-9, 9))

    def gen_int(depth, scope):
        if depth <= 0:
            pool = [lit]
            if scope:
                pool.append(lambda: Var(rng.choice(scope)))
            return rng.choice(pool)()
        r = rng.random()
        if r < 0.16:
            return lit()
        if r < 0.22 and scope:
            return Var(rng.choice(scope))
        if r < 0.34:
            op = rng.choice(["+", "-", "*"])
            return Apply(PrimRef(op), [gen_int(depth - 1, scope), gen_int(depth - 1, scope)])
        if r < 0.46:
            return FacetCreate(Var(rng.choice(labels)), gen_int(depth - 1, scope), gen_int(depth - 1, scope))
        if r < 0.56:
            return If(gen_bool(depth - 1, scope), gen_int(depth - 1, scope), gen_int(depth - 1, scope))
        if r < 0.64:
            return Unbox(Var(rng.choice(boxes)))
        if r < 0.72:
            return SetBang(Var(rng.choice(boxes)), gen_int(depth - 1, scope))
        if r < 0.80:
            p = "p%d" % rng.randint(1, 99)
            return Apply(Lambda([p], gen_int(depth - 1, scope + [p])), [gen_int(depth - 1, scope)])
        if r < 0.86:
            pick = rng.random() < 0.5
            pair = Apply(PrimRef("cons"), [gen_int(depth - 1, scope), gen_int(depth - 1, scope)])
            return Apply(PrimRef("car" if pick else "cdr"), [pair])
        if r < 0.90:
            return StarLit()
        return Begin([gen_int(depth - 1, scope), gen_int(depth - 1, scope)])

    def gen_bool(depth, scope):
        if depth <= 0:
            return Const(rng.random() < 0.5)
        r = rng.random()
        if r < 0.2:
            return Const(rng.random() < 0.5)
        if r < 0.5:
            op = rng.choice(["=", "<", ">"])
            return Apply(PrimRef(op), [gen_int(depth - 1, scope), gen_int(depth - 1, scope)])
        if r < 0.65:
            return Apply(PrimRef("not"), [gen_bool(depth - 1, scope)])
        if r < 0.85:
            return FacetCreate(Var(rng.choice(labels)), gen_bool(depth - 1, scope), gen_bool(depth - 1, scope))
        return If(gen_bool(depth - 1, scope), gen_bool(depth - 1, scope), gen_bool(depth - 1, scope))

    items: list = []
    for name in labels:
        items.append(
            Definition(name, LetLabel(name, Lambda(["x"], Const(True)), Var(name)))
        )
    for name in boxes:
        items.append(Definition(name, Box(lit())))
    for _ in range(rng.randint(1, 2)):
        items.append(gen_int(rng.randint(2, max_depth), []))
    # always end by observing every box so store effects reach the comparison
    tail: Expr = Const(())
    for name in reversed(boxes):
        tail = Apply(PrimRef("cons"), [Unbox(Var(name)), tail])
    items.append(tail)
    return Program(items)


### shrinking


def _top_exprs(program: Program):
    return [i for i, item in enumerate(program.items) if not isinstance(item, Definition)]


def _subexpr_slots(expr, path=()):
    """Yield (path, child) for every child expression position."""
    for name, child in _children(expr):
        yield path + (name,), child
        yield from _subexpr_slots(child, path + (name,))


def _children(expr):
    if isinstance(expr, Lambda):
        return [("body", expr.body)]
    if isinstance(expr, Apply):
        return [("fn", expr.fn)] + [(("args", i), a) for i, a in enumerate(expr.args)]
    if isinstance(expr, (Box, Unbox)):
        return [("expr", expr.expr)]
    if isinstance(expr, SetBang):
        return [("target", expr.target), ("expr", expr.expr)]
    if isinstance(expr, LetLabel):
        return [("policy", expr.policy), ("body", expr.body)]
    if isinstance(expr, FacetCreate):
        return [("label", expr.label), ("pos", expr.pos), ("neg", expr.neg)]
    if isinstance(expr, Obs):
        return [("label", expr.label), ("key", expr.key), ("target", expr.target)]
    if isinstance(expr, If):
        return [("cond", expr.cond), ("then", expr.then), ("orelse", expr.orelse)]
    if isinstance(expr, Begin):
        return [(("exprs", i), e) for i, e in enumerate(expr.exprs)]
    return []


def _replace(expr, path, new):
    if not path:
        return new
    name, rest = path[0], path[1:]
    import copy

    out = copy.copy(expr)
    if isinstance(name, tuple):
        attr, idx = name
        seq = list(getattr(out, attr))
        seq[idx] = _replace(seq[idx], rest, new)
        setattr(out, attr, seq)
    else:
        setattr(out, name, _replace(getattr(out, name), rest, new))
    return out


def _still_fails(program: Program, max_labels: int) -> bool:
    try:
        return not check_projection_equivalence(program, max_labels=max_labels).passed
    except (NotOracleSafeError, LangError):
        return False


def shrink_failure(program: Program, max_labels: int = 3) -> Program:
    """Greedy shrink of a failing program, preserving the failure."""
    changed = True
    while changed:
        changed = False
        # drop whole top-level expressions
        for idx in _top_exprs(program):
            if len(_top_exprs(program)) <= 1:
                break
            candidate = Program(program.items[:idx] + program.items[idx + 1 :])
            if _still_fails(candidate, max_labels):
                program = candidate
                changed = True
                break
        if changed:
            continue
        # replace subexpressions with a small literal
        for i, item in enumerate(program.items):
            root = item.expr if isinstance(item, Definition) else item
            for path, child in _subexpr_slots(root):
                if isinstance(child, Const):
                    continue
                new_root = _replace(root, path, Const(0))
                new_item = Definition(item.name, new_root) if isinstance(item, Definition) else new_root
                candidate = Program(program.items[:i] + [new_item] + program.items[i + 1 :])
                if _still_fails(candidate, max_labels):
                    program = candidate
                    changed = True
                    break
            if changed:
                break
    return program


def persist_failure(program: Program, directory) -> str:
    """Write a failing program to disk; return the file path."""
    import hashlib
    import os

    text = unparse_program(program)
    digest = hashlib.sha256(text.encode()).hexdigest()[:12]
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, "fail-%s.rkts" % digest)
    with open(path, "w") as fh:
        fh.write(text)
    return path
