"""Tokenizer, parser, and desugarer for the surface syntax.

Source text becomes a Program of top-level definitions and expressions.
Sugar (define function form, let, let*, and, or) is expanded here, so the
evaluator only ever sees core forms. unparse prints core forms back to text
that reparses to a structurally identical Program.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import ParseError

PRIM_NAMES = frozenset(
    ["cons", "car", "cdr", "null?", "pair?", "not", "=", "<", ">", "+", "-", "*", "display", "error"]
)

_KEYWORDS = frozenset(
    ["lambda", "let", "let*", "and", "or", "if", "begin", "define",
     "box", "unbox", "set!", "let-label", "facet", "obs", "quote", "star", "★",
     "true", "false", "#t", "#f"]
)

_INT_RE = re.compile(r"^[+-]?[0-9]+$")

Loc = tuple  # (line, col), 1-based


### expression types


@dataclass(eq=True)
class Expr:
    pass


@dataclass(eq=True)
class Const(Expr):
    # int | bool | str | tuple of those (a quoted list; () is the empty list)
    value: object
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Var(Expr):
    name: str
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class PrimRef(Expr):
    name: str
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Lambda(Expr):
    params: list
    body: Expr
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Apply(Expr):
    fn: Expr
    args: list
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Box(Expr):
    expr: Expr
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Unbox(Expr):
    expr: Expr
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class SetBang(Expr):
    target: Expr
    expr: Expr
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class LetLabel(Expr):
    name: str
    policy: Expr
    body: Expr
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class FacetCreate(Expr):
    label: Expr
    pos: Expr
    neg: Expr
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Obs(Expr):
    label: Expr
    key: Expr
    target: Expr
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class If(Expr):
    cond: Expr
    then: Expr
    orelse: Expr
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Begin(Expr):
    exprs: list
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class StarLit(Expr):
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Definition:
    name: str
    expr: Expr
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Program:
    items: list  # Definition | Expr


### tokenizer

_DELIMS = "()[]'\";"


@dataclass
class _Token:
    kind: str  # "(" ")" "[" "]" "'" "atom" "string"
    text: str
    loc: Loc


def tokenize(text: str) -> list:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        loc = (line, col)
        if ch in "()[]'":
            tokens.append(_Token(ch, ch, loc))
            i += 1
            col += 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError("unterminated string", loc)
                j += 1
            if j >= n:
                raise ParseError("unterminated string", loc)
            tokens.append(_Token("string", text[i + 1 : j], loc))
            col += j + 1 - i
            i = j + 1
            continue
        j = i
        while j < n and text[j] not in _DELIMS and not text[j].isspace():
            j += 1
        tokens.append(_Token("atom", text[i:j], loc))
        col += j - i
        i = j
    return tokens


### datum layer


@dataclass
class _Atom:
    text: str
    loc: Loc


@dataclass
class _DString:
    text: str
    loc: Loc


@dataclass
class _DList:
    items: list
    loc: Loc


class _Reader:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.tokens[-1].loc if self.tokens else (1, 1))
        self.pos += 1
        return tok

    def read_datum(self):
        tok = self.next()
        if tok.kind == "atom":
            return _Atom(tok.text, tok.loc)
        if tok.kind == "string":
            return _DString(tok.text, tok.loc)
        if tok.kind == "'":
            inner = self.read_datum()
            return _DList([_Atom("quote", tok.loc), inner], tok.loc)
        if tok.kind in "([":
            closer = ")" if tok.kind == "(" else "]"
            items = []
            while True:
                nxt = self.peek()
                if nxt is None:
                    raise ParseError("unclosed %s" % tok.kind, tok.loc)
                if nxt.kind in ")]":
                    if nxt.kind != closer:
                        raise ParseError("mismatched %s closing %s" % (nxt.kind, tok.kind), nxt.loc)
                    self.next()
                    return _DList(items, tok.loc)
                items.append(self.read_datum())
        raise ParseError("unexpected %s" % tok.text, tok.loc)


### datum -> expr

_gensym_counter = 0


def _gensym(stem: str) -> str:
    global _gensym_counter
    _gensym_counter += 1
    return "%%%s%d" % (stem, _gensym_counter)


def _atom_expr(a: _Atom) -> Expr:
    t = a.text
    if _INT_RE.match(t):
        return Const(int(t), loc=a.loc)
    if t in ("true", "#t"):
        return Const(True, loc=a.loc)
    if t in ("false", "#f"):
        return Const(False, loc=a.loc)
    if t in PRIM_NAMES:
        return PrimRef(t, loc=a.loc)
    return Var(t, loc=a.loc)


def _quoted_const(d, loc) -> object:
    if isinstance(d, _DList):
        out = []
        for item in d.items:
            if isinstance(item, _DList):
                raise ParseError("quoted data must be a flat list of constants", item.loc)
            out.append(_quoted_const(item, item.loc))
        return tuple(out)
    if isinstance(d, _DString):
        return d.text
    t = d.text
    if _INT_RE.match(t):
        return int(t)
    if t in ("true", "#t"):
        return True
    if t in ("false", "#f"):
        return False
    raise ParseError("cannot quote %s" % t, loc)


def _param_list(d, what: str) -> list:
    if not isinstance(d, _DList):
        raise ParseError("%s expects a parameter list" % what, getattr(d, "loc", None))
    names = []
    for p in d.items:
        if not isinstance(p, _Atom) or _INT_RE.match(p.text) or p.text in _KEYWORDS or p.text in PRIM_NAMES:
            raise ParseError("bad parameter name", getattr(p, "loc", d.loc))
        if p.text in names:
            raise ParseError("duplicate parameter %s" % p.text, p.loc)
        names.append(p.text)
    return names


def _body_expr(items: list, loc) -> Expr:
    if not items:
        raise ParseError("empty body", loc)
    exprs = [_to_expr(d) for d in items]
    if len(exprs) == 1:
        return exprs[0]
    return Begin(exprs, loc=loc)


def _expect(d: _DList, n: int, form: str) -> None:
    if len(d.items) != n:
        raise ParseError("%s expects %d parts, got %d" % (form, n - 1, len(d.items) - 1), d.loc)


def _to_expr(d) -> Expr:
    if isinstance(d, _Atom):
        return _atom_expr(d)
    if isinstance(d, _DString):
        return Const(d.text, loc=d.loc)
    if not d.items:
        raise ParseError("empty application", d.loc)
    head = d.items[0]
    if isinstance(head, _Atom):
        h = head.text
        if h == "quote":
            _expect(d, 2, "quote")
            return Const(_quoted_const(d.items[1], d.loc), loc=d.loc)
        if h in ("star", "★"):
            _expect(d, 1, h)
            return StarLit(loc=d.loc)
        if h == "lambda":
            if len(d.items) < 3:
                raise ParseError("lambda expects parameters and a body", d.loc)
            params = _param_list(d.items[1], "lambda")
            return Lambda(params, _body_expr(d.items[2:], d.loc), loc=d.loc)
        if h == "if":
            _expect(d, 4, "if")
            return If(_to_expr(d.items[1]), _to_expr(d.items[2]), _to_expr(d.items[3]), loc=d.loc)
        if h == "begin":
            if len(d.items) < 2:
                raise ParseError("begin expects at least one expression", d.loc)
            return Begin([_to_expr(x) for x in d.items[1:]], loc=d.loc)
        if h == "box":
            _expect(d, 2, "box")
            return Box(_to_expr(d.items[1]), loc=d.loc)
        if h == "unbox":
            _expect(d, 2, "unbox")
            return Unbox(_to_expr(d.items[1]), loc=d.loc)
        if h == "set!":
            _expect(d, 3, "set!")
            return SetBang(_to_expr(d.items[1]), _to_expr(d.items[2]), loc=d.loc)
        if h == "let-label":
            _expect(d, 4, "let-label")
            name = d.items[1]
            if not isinstance(name, _Atom) or _INT_RE.match(name.text):
                raise ParseError("let-label expects a name", d.loc)
            return LetLabel(name.text, _to_expr(d.items[2]), _to_expr(d.items[3]), loc=d.loc)
        if h == "facet":
            _expect(d, 4, "facet")
            return FacetCreate(_to_expr(d.items[1]), _to_expr(d.items[2]), _to_expr(d.items[3]), loc=d.loc)
        if h == "obs":
            _expect(d, 4, "obs")
            return Obs(_to_expr(d.items[1]), _to_expr(d.items[2]), _to_expr(d.items[3]), loc=d.loc)
        if h == "let":
            return _desugar_let(d)
        if h == "let*":
            return _desugar_let_star(d)
        if h == "and":
            return _desugar_and(d)
        if h == "or":
            return _desugar_or(d)
        if h == "define":
            raise ParseError("define is only allowed at the top level", d.loc)
    return Apply(_to_expr(head), [_to_expr(x) for x in d.items[1:]], loc=d.loc)


def _bindings(d: _DList, form: str) -> list:
    if len(d.items) < 3 or not isinstance(d.items[1], _DList):
        raise ParseError("%s expects a binding list and a body" % form, d.loc)
    out = []
    for b in d.items[1].items:
        if not isinstance(b, _DList) or len(b.items) != 2 or not isinstance(b.items[0], _Atom):
            raise ParseError("%s binding must be [name expr]" % form, getattr(b, "loc", d.loc))
        out.append((b.items[0].text, _to_expr(b.items[1]), b.items[0].loc))
    return out


def _desugar_let(d: _DList) -> Expr:
    binds = _bindings(d, "let")
    names = []
    for name, _, loc in binds:
        if name in names:
            raise ParseError("duplicate let binding %s" % name, loc)
        names.append(name)
    body = _body_expr(d.items[2:], d.loc)
    return Apply(Lambda(names, body, loc=d.loc), [e for _, e, _ in binds], loc=d.loc)


def _desugar_let_star(d: _DList) -> Expr:
    binds = _bindings(d, "let*")
    body = _body_expr(d.items[2:], d.loc)
    for name, expr, _ in reversed(binds):
        body = Apply(Lambda([name], body, loc=d.loc), [expr], loc=d.loc)
    return body


def _desugar_and(d: _DList) -> Expr:
    items = [_to_expr(x) for x in d.items[1:]]
    if not items:
        return Const(True, loc=d.loc)
    out = items[-1]
    for e in reversed(items[:-1]):
        out = If(e, out, Const(False, loc=d.loc), loc=d.loc)
    return out


def _desugar_or(d: _DList) -> Expr:
    items = [_to_expr(x) for x in d.items[1:]]
    if not items:
        return Const(False, loc=d.loc)
    out = items[-1]
    for e in reversed(items[:-1]):
        tmp = _gensym("or")
        out = Apply(Lambda([tmp], If(Var(tmp, loc=d.loc), Var(tmp, loc=d.loc), out, loc=d.loc), loc=d.loc), [e], loc=d.loc)
    return out


def _to_toplevel(d):
    if isinstance(d, _DList) and d.items and isinstance(d.items[0], _Atom) and d.items[0].text == "define":
        if len(d.items) < 3:
            raise ParseError("define expects a name and an expression", d.loc)
        target = d.items[1]
        if isinstance(target, _DList):
            # function form: (define (f a b) body...)
            if not target.items or not isinstance(target.items[0], _Atom):
                raise ParseError("bad define header", d.loc)
            fname = target.items[0].text
            params = _param_list(_DList(target.items[1:], target.loc), "define")
            body = _body_expr(d.items[2:], d.loc)
            return Definition(fname, Lambda(params, body, loc=d.loc), loc=d.loc)
        if not isinstance(target, _Atom) or _INT_RE.match(target.text):
            raise ParseError("define expects a name", d.loc)
        _expect(d, 3, "define")
        return Definition(target.text, _to_expr(d.items[2]), loc=d.loc)
    return _to_expr(d)


def parse_program(text: str) -> Program:
    reader = _Reader(tokenize(text))
    items = []
    names = set()
    while reader.peek() is not None:
        item = _to_toplevel(reader.read_datum())
        if isinstance(item, Definition):
            if item.name in names:
                raise ParseError("duplicate definition of %s" % item.name, item.loc)
            names.add(item.name)
        items.append(item)
    return Program(items)


def parse_expr(text: str) -> Expr:
    """Parse a single expression (no definitions)."""
    reader = _Reader(tokenize(text))
    expr = _to_expr(reader.read_datum())
    if reader.peek() is not None:
        raise ParseError("trailing input after expression", reader.peek().loc)
    return expr


def balanced(text: str) -> bool:
    """True when every opened list in text is closed (for the repl)."""
    depth = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == '"':
            i += 1
            while i < n and text[i] != '"':
                i += 1
        elif ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        i += 1
    return depth <= 0


### unparser


def _quoted_text(v) -> str:
    if isinstance(v, tuple):
        return "(" + " ".join(_quoted_text(x) for x in v) + ")"
    return _const_text(v)


def _const_text(v) -> str:
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, str):
        return '"' + v + '"'
    if isinstance(v, tuple):
        return "'" + _quoted_text(v)
    raise ValueError("unprintable constant %r" % (v,))


def unparse(expr: Expr) -> str:
    """Render an Expr as core-form source text."""
    if isinstance(expr, Const):
        return _const_text(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, PrimRef):
        return expr.name
    if isinstance(expr, Lambda):
        return "(lambda (%s) %s)" % (" ".join(expr.params), unparse(expr.body))
    if isinstance(expr, Apply):
        return "(" + " ".join([unparse(expr.fn)] + [unparse(a) for a in expr.args]) + ")"
    if isinstance(expr, Box):
        return "(box %s)" % unparse(expr.expr)
    if isinstance(expr, Unbox):
        return "(unbox %s)" % unparse(expr.expr)
    if isinstance(expr, SetBang):
        return "(set! %s %s)" % (unparse(expr.target), unparse(expr.expr))
    if isinstance(expr, LetLabel):
        return "(let-label %s %s %s)" % (expr.name, unparse(expr.policy), unparse(expr.body))
    if isinstance(expr, FacetCreate):
        return "(facet %s %s %s)" % (unparse(expr.label), unparse(expr.pos), unparse(expr.neg))
    if isinstance(expr, Obs):
        return "(obs %s %s %s)" % (unparse(expr.label), unparse(expr.key), unparse(expr.target))
    if isinstance(expr, If):
        return "(if %s %s %s)" % (unparse(expr.cond), unparse(expr.then), unparse(expr.orelse))
    if isinstance(expr, Begin):
        return "(begin " + " ".join(unparse(e) for e in expr.exprs) + ")"
    if isinstance(expr, StarLit):
        return "(star)"
    raise ValueError("unknown expression %r" % (expr,))


def unparse_program(program: Program) -> str:
    lines = []
    for item in program.items:
        if isinstance(item, Definition):
            lines.append("(define %s %s)" % (item.name, unparse(item.expr)))
        else:
            lines.append(unparse(item))
    return "\n".join(lines) + "\n"
