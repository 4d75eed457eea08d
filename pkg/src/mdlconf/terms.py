"""MDL term algebra: guard expressions, terms, free variables and grounding.

Terms are immutable.  Records and choices keep their elements in the order
they were given, but equality, hashing and printing use label order, so two
collections that differ only in element order are the same term.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

from .errors import (
    DuplicateLabelError,
    GroundingError,
    KindMismatchError,
    LabelCollisionError,
    UncoveredVariableError,
)

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
RESERVED_BOOL_NAMES = frozenset({"true", "false"})


def is_identifier(name: str) -> bool:
    return bool(IDENT_RE.match(name))


# --------------------------------------------------------------------------
# Guard expressions


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class BVar:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "BoolExpr"


def _flatten(cls, args) -> tuple:
    out = []
    for a in args:
        if isinstance(a, cls):
            out.extend(a.args)
        else:
            out.append(a)
    return tuple(out)


@dataclass(frozen=True)
class And:
    """N-ary conjunction.  Nested conjunctions are flattened on construction."""

    args: tuple

    def __post_init__(self):
        flat = _flatten(And, self.args)
        if len(flat) < 2:
            raise ValueError("And needs at least two operands")
        object.__setattr__(self, "args", flat)


@dataclass(frozen=True)
class Or:
    """N-ary disjunction.  Nested disjunctions are flattened on construction."""

    args: tuple

    def __post_init__(self):
        flat = _flatten(Or, self.args)
        if len(flat) < 2:
            raise ValueError("Or needs at least two operands")
        object.__setattr__(self, "args", flat)


BoolExpr = Union[Const, BVar, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


def conj(*args: BoolExpr) -> BoolExpr:
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*args: BoolExpr) -> BoolExpr:
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def neg(arg: BoolExpr) -> BoolExpr:
    return Not(arg)


def evaluate(expr: BoolExpr, env: Mapping[str, bool]) -> bool:
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, BVar):
        try:
            return bool(env[expr.name])
        except KeyError:
            raise UncoveredVariableError(expr.name, "boolean") from None
    if isinstance(expr, Not):
        return not evaluate(expr.arg, env)
    if isinstance(expr, And):
        return all(evaluate(a, env) for a in expr.args)
    if isinstance(expr, Or):
        return any(evaluate(a, env) for a in expr.args)
    raise TypeError(f"not a guard expression: {expr!r}")


def guard_vars(expr: BoolExpr) -> frozenset[str]:
    if isinstance(expr, Const):
        return frozenset()
    if isinstance(expr, BVar):
        return frozenset((expr.name,))
    if isinstance(expr, Not):
        return guard_vars(expr.arg)
    return frozenset().union(*(guard_vars(a) for a in expr.args))


def rename_guard(expr: BoolExpr, mapping: Mapping[str, str]) -> BoolExpr:
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, BVar):
        return BVar(mapping.get(expr.name, expr.name))
    if isinstance(expr, Not):
        return Not(rename_guard(expr.arg, mapping))
    return type(expr)(tuple(rename_guard(a, mapping) for a in expr.args))


# --------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Symbol:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Element:
    label: str
    term: "Term"
    guard: BoolExpr = TRUE


def _label_key(e: Element) -> str:
    return e.label


@dataclass(frozen=True, eq=False)
class _Collection:
    elements: tuple = ()
    tail: Var | None = None
    _by_label: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        by_label = {}
        for e in elements:
            if e.label in by_label:
                raise DuplicateLabelError(e.label)
            by_label[e.label] = e
        object.__setattr__(self, "_by_label", by_label)

    def _key(self):
        return (self.sorted_elements(), self.tail)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash((type(self).__name__, self._key()))

    def sorted_elements(self) -> tuple:
        return tuple(sorted(self.elements, key=_label_key))

    def get(self, label: str) -> Element | None:
        return self._by_label.get(label)

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(self._by_label)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Element]:
        return iter(self.elements)


class Record(_Collection):
    """Extensible record ``{l: t, ... | $tail}``."""


class Choice(_Collection):
    """Extensible choice ``(: l: t, ... | $tail :)``."""


Term = Union[Symbol, Var, Record, Choice]
Collection = (Record, Choice)

NIL = Record()
EMPTY_CHOICE = Choice()


def record(*elements: Element, tail: str | None = None, **fields: "Term") -> Record:
    """Convenience constructor: ``record(a=Symbol("int"))``."""
    elems = list(elements) + [Element(k, v) for k, v in fields.items()]
    return Record(tuple(elems), Var(tail) if tail else None)


def choice(*elements: Element, tail: str | None = None, **fields: "Term") -> Choice:
    elems = list(elements) + [Element(k, v) for k, v in fields.items()]
    return Choice(tuple(elems), Var(tail) if tail else None)


def is_nil(t: Term) -> bool:
    return (
        isinstance(t, Record)
        and t.tail is None
        and all(e.guard == FALSE for e in t.elements)
    )


class FreeVars(NamedTuple):
    terms: frozenset
    booleans: frozenset


def _walk_vars(t: Term, terms: set, booleans: set) -> None:
    if isinstance(t, Var):
        terms.add(t.name)
    elif isinstance(t, (Record, Choice)):
        for e in t.elements:
            booleans.update(guard_vars(e.guard))
            _walk_vars(e.term, terms, booleans)
        if t.tail is not None:
            terms.add(t.tail.name)


def free_vars(t: Term) -> FreeVars:
    terms: set = set()
    booleans: set = set()
    _walk_vars(t, terms, booleans)
    return FreeVars(frozenset(terms), frozenset(booleans))


def is_ground(t: Term) -> bool:
    if isinstance(t, Symbol):
        return True
    if isinstance(t, Var):
        return False
    if t.tail is not None:
        return False
    return all(isinstance(e.guard, Const) and is_ground(e.term) for e in t.elements)


def depth(t: Term) -> int:
    """Height of the term tree; symbols, variables and empty collections have depth 1."""
    if isinstance(t, (Symbol, Var)):
        return 1
    return 1 + max((depth(e.term) for e in t.elements), default=0)


def iter_collections(t: Term) -> Iterator[Record | Choice]:
    if isinstance(t, (Record, Choice)):
        yield t
        for e in t.elements:
            yield from iter_collections(e.term)


def tail_kinds(t: Term) -> dict[str, set]:
    """Map each tail variable of ``t`` to the collection classes it closes."""
    kinds: dict[str, set] = {}
    for c in iter_collections(t):
        if c.tail is not None:
            kinds.setdefault(c.tail.name, set()).add(type(c))
    return kinds


def rename_vars(
    t: Term,
    terms: Mapping[str, str] | None = None,
    booleans: Mapping[str, str] | None = None,
) -> Term:
    terms = terms or {}
    booleans = booleans or {}
    if isinstance(t, Symbol):
        return t
    if isinstance(t, Var):
        return Var(terms.get(t.name, t.name))
    elems = tuple(
        Element(e.label, rename_vars(e.term, terms, booleans), rename_guard(e.guard, booleans))
        for e in t.elements
    )
    tail = Var(terms.get(t.tail.name, t.tail.name)) if t.tail is not None else None
    return type(t)(elems, tail)


# --------------------------------------------------------------------------
# Grounding


@dataclass(frozen=True)
class Substitution:
    booleans: Mapping[str, bool] = field(default_factory=dict)
    terms: Mapping[str, Term] = field(default_factory=dict)


def strip(t: Term) -> Term:
    """Normalise a ground term: drop false elements, make every guard ``true``."""
    if isinstance(t, Symbol):
        return t
    if isinstance(t, Var):
        raise GroundingError(f"term variable ${t.name} in a term expected to be ground")
    if t.tail is not None:
        raise GroundingError(f"tail ${t.tail.name} in a term expected to be ground")
    elems = []
    for e in t.elements:
        if not isinstance(e.guard, Const):
            raise GroundingError(f"non-constant guard on element {e.label!r} of a ground term")
        if e.guard.value:
            elems.append(Element(e.label, strip(e.term)))
    return type(t)(tuple(elems))


def _lookup(s: Substitution, name: str) -> Term:
    try:
        return s.terms[name]
    except KeyError:
        raise UncoveredVariableError(name) from None


def ground(t: Term, s: Substitution) -> Term:
    """Apply ``s`` to ``t``.

    Elements whose guard evaluates to false are deleted first, then each tail
    variable is replaced by the elements of its value (which must be a
    collection of the same kind) and remaining variables by their values.
    """
    if isinstance(t, Symbol):
        return t
    if isinstance(t, Var):
        return strip(_lookup(s, t.name))
    elems = []
    for e in t.elements:
        if evaluate(e.guard, s.booleans):
            elems.append(Element(e.label, ground(e.term, s)))
    if t.tail is not None:
        value = strip(_lookup(s, t.tail.name))
        if type(value) is not type(t):
            kind = "record" if isinstance(t, Record) else "choice"
            raise KindMismatchError(
                f"tail ${t.tail.name} of a {kind} is assigned a non-{kind} term"
            )
        present = {e.label for e in elems}
        for e in value.elements:
            if e.label in present:
                raise LabelCollisionError(e.label, t.tail.name)
            elems.append(e)
    return type(t)(tuple(elems))


def eval_guards(t: Term, booleans: Mapping[str, bool]) -> Term:
    """Evaluate guards under ``booleans`` and drop false elements; keep term variables."""
    if isinstance(t, (Symbol, Var)):
        return t
    elems = tuple(
        Element(e.label, eval_guards(e.term, booleans))
        for e in t.elements
        if evaluate(e.guard, booleans)
    )
    return type(t)(elems, t.tail)


def all_labels(terms: Iterable[Term]) -> frozenset[str]:
    out: set = set()
    for t in terms:
        for c in iter_collections(t):
            out.update(c.labels)
    return frozenset(out)
