"""Runtime values and the facet meta-functions.

A faceted value is a binary tree whose inner nodes carry labels and whose
leaves are ordinary values. The left child is what the label's authority may
see, the right child is everyone else's view. Trees are kept canonical:
labels strictly increase (by creation order) along every root-to-leaf path,
so equal trees are structurally equal and projection is a single descent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import PcConsistencyError, WrongTypeError


@dataclass(frozen=True)
class LabelId:
    """Identity of one label: creation ordinal plus its binder name."""

    ordinal: int
    name: str


@dataclass(frozen=True)
class Branch:
    """One signed label inside a program counter."""

    positive: bool
    label: LabelId

    def opposite(self) -> "Branch":
        return Branch(not self.positive, self.label)


def pos(label: LabelId) -> Branch:
    return Branch(True, label)


def neg(label: LabelId) -> Branch:
    return Branch(False, label)


EMPTY_PC: frozenset = frozenset()


def pc_extend(pc: frozenset, branch: Branch) -> frozenset:
    """Add a branch to a program counter, refusing contradictions."""
    if branch.opposite() in pc:
        raise PcConsistencyError(
            "pc already contains %s%s" % ("-" if branch.positive else "+", branch.label.name)
        )
    return pc | {branch}


def _branch_key(b: Branch) -> tuple[int, int]:
    return (b.label.ordinal, 0 if b.positive else 1)


def render_pc(pc: frozenset) -> str:
    inner = ",".join(
        ("+" if b.positive else "-") + b.label.name for b in sorted(pc, key=_branch_key)
    )
    return "{" + inner + "}"


### values


class Star:
    """Placeholder for data the current view is not entitled to."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "#star"


STAR = Star()


class Nil:
    """The empty list."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "'()"


NIL = Nil()


@dataclass(eq=True)
class Pair:
    car: object
    cdr: object


@dataclass(frozen=True)
class Address:
    """Store location of a box."""

    index: int


@dataclass(eq=True)
class Facet:
    label: LabelId
    left: object
    right: object


@dataclass(eq=False)
class Closure:
    """In-language function. tagged distinguishes these from host primitives."""

    params: list
    body: object
    env: "Env"
    tagged: bool = True
    name: str | None = None


@dataclass(frozen=True)
class Primitive:
    name: str


@dataclass(frozen=True)
class LabelVal:
    """First-class label as it appears in the environment."""

    label: LabelId


class Env:
    """Lexical environment. The top level is mutated as definitions arrive."""

    __slots__ = ("vars", "parent")

    def __init__(self, vars: dict | None = None, parent: "Env | None" = None):
        self.vars = vars if vars is not None else {}
        self.parent = parent

    def lookup(self, name: str):
        env = self
        while env is not None:
            if name in env.vars:
                return env.vars[name]
            env = env.parent
        from .errors import UnboundVariableError

        raise UnboundVariableError("unbound variable: %s" % name)

    def child(self, names, values) -> "Env":
        return Env(dict(zip(names, values)), self)

    def define(self, name: str, value) -> None:
        self.vars[name] = value


class Store:
    """Box heap. Single-owner; only the evaluator mutates it."""

    def __init__(self):
        self._cells: list = []

    def alloc(self, value) -> Address:
        self._cells.append(value)
        return Address(len(self._cells) - 1)

    def get(self, addr: Address):
        return self._cells[addr.index]

    def set(self, addr: Address, value) -> None:
        self._cells[addr.index] = value

    def items(self):
        return list(enumerate(self._cells))

    def __len__(self):
        return len(self._cells)


### meta-functions


def _head(v) -> LabelId | None:
    return v.label if isinstance(v, Facet) else None


def mkfacet(label: LabelId, left, right):
    """Canonicalizing facet constructor.

    Produces a canonical tree meaning "label's authority sees left, others see
    right", given canonical children. When a child already mentions `label` at
    its root, the matching side is selected; when a child's root label was
    created earlier than `label`, the tree is rotated so the earlier label
    stays on top. Equal branches are never collapsed.
    """
    lh = _head(left)
    rh = _head(right)
    if lh == label:
        return mkfacet(label, left.left, right)
    if rh == label:
        return mkfacet(label, left, right.right)
    low = label
    if lh is not None and lh.ordinal < low.ordinal:
        low = lh
    if rh is not None and rh.ordinal < low.ordinal:
        low = rh
    if low == label:
        return Facet(label, left, right)
    if lh == low and rh == low:
        return Facet(low, mkfacet(label, left.left, right.left), mkfacet(label, left.right, right.right))
    if lh == low:
        return Facet(low, mkfacet(label, left.left, right), mkfacet(label, left.right, right))
    return Facet(low, mkfacet(label, left, right.left), mkfacet(label, left, right.right))


def construct_facet(pc: frozenset, v_pos, v_default):
    """Guard v_pos behind every branch of pc, defaulting elsewhere to v_default.

    Branches are consumed in ascending label order. pc is normally a
    consistent program counter; contradictory sets (which the literal
    facet-target write can form) canonicalize so that v_pos is dropped.
    """
    return _construct(sorted(pc, key=_branch_key), v_pos, v_default)


def _construct(branches: list, v_pos, v_default):
    if not branches:
        return v_pos
    b = branches[0]
    inner = _construct(branches[1:], v_pos, v_default)
    if b.positive:
        return mkfacet(b.label, inner, v_default)
    return mkfacet(b.label, v_default, inner)


def store_write(store: Store, target, pc: frozenset, value) -> Store:
    """Write value at target under pc, preserving every other view.

    An address gets its old content folded in as the default; a facet target
    is written through on both sides with the matching branch added; a Star
    target is ignored.
    """
    if isinstance(target, Address):
        store.set(target, construct_facet(pc, value, store.get(target)))
        return store
    if target is STAR:
        return store
    if isinstance(target, Facet):
        store_write(store, target.left, pc | {pos(target.label)}, value)
        store_write(store, target.right, pc | {neg(target.label)}, value)
        return store
    raise WrongTypeError("set! target must be a box, got %s" % render(target))


def store_read(store: Store, target, pc: frozenset):
    """Read target under pc. Facet targets split; contents are pc-filtered."""
    if isinstance(target, Address):
        return _filter_by_pc(store.get(target), pc)
    if target is STAR:
        return STAR
    if isinstance(target, Facet):
        return mkfacet(
            target.label,
            store_read(store, target.left, pc | {pos(target.label)}),
            store_read(store, target.right, pc | {neg(target.label)}),
        )
    raise WrongTypeError("unbox target must be a box, got %s" % render(target))


def _filter_by_pc(value, pc: frozenset):
    if not isinstance(value, Facet):
        return value
    if pos(value.label) in pc:
        return _filter_by_pc(value.left, pc)
    if neg(value.label) in pc:
        return _filter_by_pc(value.right, pc)
    return Facet(value.label, _filter_by_pc(value.left, pc), _filter_by_pc(value.right, pc))


def obs_project(label: LabelId, value, decision: bool):
    """Strip every occurrence of label, keeping the side decision selects."""
    if not isinstance(value, Facet):
        return value
    if value.label == label:
        return obs_project(label, value.left if decision else value.right, decision)
    return Facet(
        value.label,
        obs_project(label, value.left, decision),
        obs_project(label, value.right, decision),
    )


### inspection helpers


def is_canonical(value) -> bool:
    """True when labels strictly increase along every path of the tree."""

    def walk(v, floor: int) -> bool:
        if not isinstance(v, Facet):
            return True
        if v.label.ordinal <= floor:
            return False
        return walk(v.left, v.label.ordinal) and walk(v.right, v.label.ordinal)

    return walk(value, -1)


def contains_facet(value) -> bool:
    if isinstance(value, Facet):
        return True
    if isinstance(value, Pair):
        return contains_facet(value.car) or contains_facet(value.cdr)
    return False


def contains_star(value) -> bool:
    if value is STAR:
        return True
    if isinstance(value, Facet):
        return contains_star(value.left) or contains_star(value.right)
    if isinstance(value, Pair):
        return contains_star(value.car) or contains_star(value.cdr)
    return False


def render(value) -> str:
    """Printed form of a value. This format is a stable external interface."""
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return '"' + value + '"'
    if value is NIL:
        return "'()"
    if isinstance(value, Pair):
        parts = []
        cur = value
        while isinstance(cur, Pair):
            parts.append(render(cur.car))
            cur = cur.cdr
        if cur is NIL:
            return "(" + " ".join(parts) + ")"
        return "(" + " ".join(parts) + " . " + render(cur) + ")"
    if value is STAR:
        return "#star"
    if isinstance(value, Facet):
        return "#facet<%s ? %s : %s>" % (value.label.name, render(value.left), render(value.right))
    if isinstance(value, Closure):
        return "#proc:%s" % (value.name or "lambda")
    if isinstance(value, Primitive):
        return "#proc:%s" % value.name
    if isinstance(value, Address):
        return "#box:%d" % value.index
    if isinstance(value, LabelVal):
        return "#label:%s" % value.label.name
    raise WrongTypeError("unprintable value: %r" % (value,))
