"""Big-step evaluator with faceted execution.

Evaluation carries a program counter (pc) recording which label branches the
current control path has committed to. Creating a facet or applying a faceted
function splits evaluation, running the positive side first and threading the
store into the negative side. Writes are guarded by the pc so that no view
can observe another view's effects.
"""

from __future__ import annotations

import sys
from typing import NamedTuple

from . import facets
from .errors import (
    ArityError,
    FacetEscapeError,
    PolicyError,
    StarObservedError,
    UserError,
    WrongTypeError,
)
from .facets import (
    EMPTY_PC,
    NIL,
    STAR,
    Address,
    Closure,
    Env,
    Facet,
    LabelId,
    LabelVal,
    Pair,
    Primitive,
    Store,
    neg,
    pc_extend,
    pos,
    render,
    render_pc,
)
from .reader import (
    Apply,
    Begin,
    Box,
    Const,
    Definition,
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
    PRIM_NAMES,
)


class EvalResult(NamedTuple):
    store: Store
    value: object


def truthy(value) -> bool:
    """Anything other than false counts as true."""
    return value is not False


def _const_value(c):
    if isinstance(c, tuple):
        out = NIL
        for item in reversed(c):
            out = Pair(_const_value(item), out)
        return out
    return c


def _box_payload(pc, value):
    # a fresh box holds its value on the current path and a hole elsewhere
    return facets.construct_facet(pc, value, STAR)


class Interp:
    """One interpreter instance: a store, a top level, and a label supply."""

    def __init__(self, trace=None):
        if sys.getrecursionlimit() < 10000:
            sys.setrecursionlimit(10000)
        self.store = Store()
        self.globals = Env()
        self.trace = trace  # callable taking one formatted line, or None
        self.policies: dict[LabelId, Address] = {}
        self.label_log: list = []  # (LetLabel node, LabelId) in creation order
        self._next_ordinal = 0

    ### top level

    def run_program(self, program: Program) -> list:
        """Evaluate a program; return the value of each bare expression."""
        values = []
        for item in program.items:
            if isinstance(item, Definition):
                _, value = self.eval(item.expr, self.globals, self.store, EMPTY_PC)
                if isinstance(value, Closure) and value.name is None:
                    value.name = item.name
                self.globals.define(item.name, value)
            else:
                _, value = self.eval(item, self.globals, self.store, EMPTY_PC)
                values.append(value)
        return values

    def eval_top(self, expr, env: Env | None = None):
        _, value = self.eval(expr, env or self.globals, self.store, EMPTY_PC)
        return value

    ### the evaluator proper

    def eval(self, expr, env: Env, store: Store, pc: frozenset) -> EvalResult:
        if isinstance(expr, Const):
            return self._done("const", pc, store, _const_value(expr.value))
        if isinstance(expr, Var):
            return self._done("var", pc, store, env.lookup(expr.name))
        if isinstance(expr, PrimRef):
            return self._done("prim-ref", pc, store, Primitive(expr.name))
        if isinstance(expr, Lambda):
            return self._done("lambda", pc, store, Closure(expr.params, expr.body, env))
        if isinstance(expr, Apply):
            store, fn = self.eval(expr.fn, env, store, pc)
            args = []
            for a in expr.args:
                store, v = self.eval(a, env, store, pc)
                args.append(v)
            return self.apply_value(fn, args, store, pc)
        if isinstance(expr, Box):
            store, v = self.eval(expr.expr, env, store, pc)
            addr = store.alloc(_box_payload(pc, v))
            return self._done("box", pc, store, addr)
        if isinstance(expr, Unbox):
            store, v = self.eval(expr.expr, env, store, pc)
            return self._done("unbox", pc, store, facets.store_read(store, v, pc))
        if isinstance(expr, SetBang):
            store, target = self.eval(expr.target, env, store, pc)
            store, v = self.eval(expr.expr, env, store, pc)
            store = facets.store_write(store, target, pc, v)
            return self._done("set!", pc, store, v)
        if isinstance(expr, LetLabel):
            return self._eval_let_label(expr, env, store, pc)
        if isinstance(expr, FacetCreate):
            return self._eval_facet_create(expr, env, store, pc)
        if isinstance(expr, Obs):
            return self._eval_obs(expr, env, store, pc)
        if isinstance(expr, If):
            store, cond = self.eval(expr.cond, env, store, pc)
            return self._eval_if_value(cond, expr, env, store, pc)
        if isinstance(expr, Begin):
            value = NIL
            for e in expr.exprs:
                store, value = self.eval(e, env, store, pc)
            return self._done("begin", pc, store, value)
        if isinstance(expr, StarLit):
            return self._done("star-lit", pc, store, STAR)
        raise WrongTypeError("cannot evaluate %r" % (expr,), getattr(expr, "loc", None))

    def _eval_let_label(self, expr: LetLabel, env: Env, store: Store, pc) -> EvalResult:
        store, policy = self.eval(expr.policy, env, store, pc)
        if not isinstance(policy, Closure):
            raise WrongTypeError("let-label policy must be a function", expr.loc)
        addr = store.alloc(policy)
        label = LabelId(self._next_ordinal, expr.name)
        self._next_ordinal += 1
        self.policies[label] = addr
        self.label_log.append((expr, label))
        inner = env.child([expr.name], [LabelVal(label)])
        store, value = self.eval(expr.body, inner, store, pc)
        return self._done("let-label", pc, store, value)

    def _eval_facet_create(self, expr: FacetCreate, env: Env, store: Store, pc) -> EvalResult:
        store, lv = self.eval(expr.label, env, store, pc)
        if not isinstance(lv, LabelVal):
            raise WrongTypeError("facet expects a label, got %s" % render(lv), expr.loc)
        label = lv.label
        if pos(label) in pc:
            store, value = self.eval(expr.pos, env, store, pc)
            return self._done("facet-pos", pc, store, value)
        if neg(label) in pc:
            store, value = self.eval(expr.neg, env, store, pc)
            return self._done("facet-neg", pc, store, value)
        store, v1 = self.eval(expr.pos, env, store, pc_extend(pc, pos(label)))
        store, v2 = self.eval(expr.neg, env, store, pc_extend(pc, neg(label)))
        value = facets.construct_facet(pc_extend(pc, pos(label)), v1, v2)
        return self._done("facet-split", pc, store, value)

    def _eval_obs(self, expr: Obs, env: Env, store: Store, pc) -> EvalResult:
        store, lv = self.eval(expr.label, env, store, pc)
        if not isinstance(lv, LabelVal):
            raise WrongTypeError("obs expects a label, got %s" % render(lv), expr.loc)
        store, key = self.eval(expr.key, env, store, pc)
        policy = store.get(self.policies[lv.label])
        store, decision = self.apply_value(policy, [key], store, pc)
        if isinstance(decision, Facet) or decision is STAR:
            raise PolicyError("policy for %s produced %s" % (lv.label.name, render(decision)), expr.loc)
        store, value = self.eval(expr.target, env, store, pc)
        projected = facets.obs_project(lv.label, value, truthy(decision))
        return self._done("obs", pc, store, projected)

    def _eval_if_value(self, cond, expr: If, env: Env, store: Store, pc) -> EvalResult:
        if cond is STAR:
            return self._done("if-star", pc, store, STAR)
        if isinstance(cond, Facet):
            label = cond.label
            if pos(label) in pc:
                return self._eval_if_value(cond.left, expr, env, store, pc)
            if neg(label) in pc:
                return self._eval_if_value(cond.right, expr, env, store, pc)
            store, v1 = self._eval_if_value(cond.left, expr, env, store, pc_extend(pc, pos(label)))
            store, v2 = self._eval_if_value(cond.right, expr, env, store, pc_extend(pc, neg(label)))
            return self._done("if-split", pc, store, facets.mkfacet(label, v1, v2))
        branch = expr.then if truthy(cond) else expr.orelse
        return self.eval(branch, env, store, pc)

    ### application

    def apply_value(self, fn, args: list, store: Store, pc: frozenset) -> EvalResult:
        if fn is STAR:
            return self._done("app-star", pc, store, STAR)
        if isinstance(fn, Closure):
            if len(args) != len(fn.params):
                raise ArityError(
                    "%s expects %d arguments, got %d" % (render(fn), len(fn.params), len(args))
                )
            inner = fn.env.child(fn.params, args)
            store, value = self.eval(fn.body, inner, store, pc)
            return self._done("app-base", pc, store, value)
        if isinstance(fn, Primitive):
            return self._apply_primitive(fn.name, args, store, pc)
        if isinstance(fn, Facet):
            label = fn.label
            if pos(label) in pc:
                store, value = self.apply_value(fn.left, args, store, pc)
                return self._done("app-facet-pos", pc, store, value)
            if neg(label) in pc:
                store, value = self.apply_value(fn.right, args, store, pc)
                return self._done("app-facet-neg", pc, store, value)
            store, v1 = self.apply_value(fn.left, args, store, pc_extend(pc, pos(label)))
            store, v2 = self.apply_value(fn.right, args, store, pc_extend(pc, neg(label)))
            return self._done("app-split", pc, store, facets.mkfacet(label, v1, v2))
        raise WrongTypeError("cannot apply %s" % render(fn))

    ### primitives

    def _apply_primitive(self, name: str, args: list, store: Store, pc) -> EvalResult:
        arity = _PRIM_ARITY[name]
        if len(args) != arity:
            raise ArityError("%s expects %d arguments, got %d" % (name, arity, len(args)))
        if name == "display":
            return self._prim_display(args[0], store, pc)
        if name == "error":
            raise UserError("error: %s" % _display_text(args[0]))
        # distribute over faceted arguments, respecting the current pc
        for i, a in enumerate(args):
            if isinstance(a, Facet):
                label = a.label
                if pos(label) in pc:
                    return self._apply_primitive(name, args[:i] + [a.left] + args[i + 1 :], store, pc)
                if neg(label) in pc:
                    return self._apply_primitive(name, args[:i] + [a.right] + args[i + 1 :], store, pc)
                store, v1 = self._apply_primitive(
                    name, args[:i] + [a.left] + args[i + 1 :], store, pc_extend(pc, pos(label))
                )
                store, v2 = self._apply_primitive(
                    name, args[:i] + [a.right] + args[i + 1 :], store, pc_extend(pc, neg(label))
                )
                return self._done("prim", pc, store, facets.mkfacet(label, v1, v2))
        if any(a is STAR for a in args):
            return self._done("prim", pc, store, STAR)
        return self._done("prim", pc, store, _PRIM_FUNCS[name](args))

    def _prim_display(self, value, store: Store, pc) -> EvalResult:
        if facets.contains_facet(value):
            raise FacetEscapeError("display of a faceted value: %s" % render(value))
        if facets.contains_star(value):
            raise StarObservedError("display of missing data: %s" % render(value))
        sys.stdout.write(_display_text(value))
        sys.stdout.write("\n")
        return self._done("display", pc, store, value)

    ### plumbing

    def _done(self, rule: str, pc, store: Store, value) -> EvalResult:
        if self.trace is not None:
            self.trace("%s pc=%s => %s" % (rule, render_pc(pc), render(value)))
        return EvalResult(store, value)


def _display_text(value) -> str:
    # strings display without quotes; everything else uses the printed form
    if isinstance(value, str):
        return value
    return render(value)


def _type_tag(v):
    if v is True or v is False:
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, str):
        return "str"
    return None


def _check_int(v, op):
    if v is True or v is False or not isinstance(v, int):
        raise WrongTypeError("%s expects integers, got %s" % (op, render(v)))
    return v


def _prim_eq(args):
    a, b = args
    ta, tb = _type_tag(a), _type_tag(b)
    if ta is None or tb is None:
        raise WrongTypeError("= expects atomic constants, got %s and %s" % (render(a), render(b)))
    if ta != tb:
        return False
    return a == b


_PRIM_ARITY = {
    "cons": 2, "car": 1, "cdr": 1, "null?": 1, "pair?": 1, "not": 1,
    "=": 2, "<": 2, ">": 2, "+": 2, "-": 2, "*": 2,
    "display": 1, "error": 1,
}

_PRIM_FUNCS = {
    "cons": lambda args: Pair(args[0], args[1]),
    "car": lambda args: args[0].car if isinstance(args[0], Pair) else _bad_pair("car", args[0]),
    "cdr": lambda args: args[0].cdr if isinstance(args[0], Pair) else _bad_pair("cdr", args[0]),
    "null?": lambda args: args[0] is NIL,
    "pair?": lambda args: isinstance(args[0], Pair),
    "not": lambda args: args[0] is False,
    "=": _prim_eq,
    "<": lambda args: _check_int(args[0], "<") < _check_int(args[1], "<"),
    ">": lambda args: _check_int(args[0], ">") > _check_int(args[1], ">"),
    "+": lambda args: _check_int(args[0], "+") + _check_int(args[1], "+"),
    "-": lambda args: _check_int(args[0], "-") - _check_int(args[1], "-"),
    "*": lambda args: _check_int(args[0], "*") * _check_int(args[1], "*"),
}


def _bad_pair(op, v):
    raise WrongTypeError("%s expects a pair, got %s" % (op, render(v)))


assert set(_PRIM_ARITY) == set(PRIM_NAMES)


def run_source(source: str, trace=None) -> tuple:
    """Parse and run source text; return (interp, list of bare-expression values)."""
    from .reader import parse_program

    interp = Interp(trace=trace)
    values = interp.run_program(parse_program(source))
    return interp, values
