"""Solving and checking seniority constraint sets.

The solver is a counterexample-guided loop over two layers:

* a Boolean layer: structural decomposition of every constraint yields
  necessary conditions on the guard variables, decided by the embedded DPLL
  procedure with true-first decisions in lexicographic order;
* a term layer: with the guards fixed, term variables collect lower bounds
  (combined by join) and upper bounds (combined by meet) until a fixed point,
  and each variable takes the join of its lower bounds, or the meet of its
  upper bounds when it has none.

A candidate that fails :func:`verify` blocks its Boolean assignment and the
loop continues.  With ``prefer_true`` the Boolean part is then maximised
greedily: each variable still false is tried as true, keeping the earlier
commitments, and kept true whenever that remains satisfiable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Union

from .constraints import Constraint, ConstraintSet, Origin
from .errors import GroundingError, MdlError, UncoveredVariableError
from .sat import CNF, solve_cnf
from .seniority import join, leq, meet
from .syntax import parse_term, render_term
from .terms import (
    EMPTY_CHOICE,
    NIL,
    TRUE,
    BoolExpr,
    Choice,
    Element,
    Record,
    Substitution,
    Symbol,
    Term,
    Var,
    conj,
    depth,
    disj,
    eval_guards,
    free_vars,
    ground,
    iter_collections,
    neg,
    tail_kinds,
)


@dataclass(frozen=True)
class SolverConfig:
    max_rounds: int = 64
    prefer_true: bool = True
    variable_order: str = "lexicographic"

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if self.variable_order != "lexicographic":
            raise ValueError(f"unsupported variable order {self.variable_order!r}")


@dataclass(frozen=True)
class Solution:
    booleans: Mapping[str, bool] = field(default_factory=dict)
    terms: Mapping[str, Term] = field(default_factory=dict)

    def substitution(self) -> Substitution:
        return Substitution(self.booleans, self.terms)


@dataclass(frozen=True)
class Sat:
    solution: Solution


@dataclass(frozen=True)
class Unsat:
    explanation: tuple[Origin, ...] = ()


@dataclass(frozen=True)
class Diverged:
    rounds: int


Verdict = Union[Sat, Unsat, Diverged]


class VerifyResult(NamedTuple):
    ok: bool
    failures: list


def verify(cs: ConstraintSet, s: Solution) -> VerifyResult:
    """Ground both sides of every constraint with ``s`` and check seniority.

    Returns ``(ok, failing origins)``.  A constraint whose grounding fails
    (tail kind mismatch, label collision) counts as failing; a variable
    missing from ``s`` raises :class:`UncoveredVariableError`.
    """
    sub = s.substitution()
    failures = []
    for c in cs.constraints:
        try:
            ok = leq(ground(c.junior, sub), ground(c.senior, sub))
        except UncoveredVariableError:
            raise
        except GroundingError:
            ok = False
        if not ok:
            failures.append(c.origin)
    return VerifyResult(not failures, failures)


# --------------------------------------------------------------------------
# Boolean layer


def _implies(a: BoolExpr, b: BoolExpr) -> BoolExpr:
    if a == TRUE:
        return b
    return disj(neg(a), b)


def _and(*args: BoolExpr) -> BoolExpr:
    return conj(*(a for a in args if a != TRUE))


def necessary_conditions(junior: Term, senior: Term, pc: BoolExpr = TRUE) -> list[BoolExpr]:
    """Guard formulas every solution of ``junior <= senior`` satisfies.

    Only pairs of explicit elements and missing labels without a tail to fall
    back on produce conditions; anything involving variables is left to the
    term layer.
    """
    out: list[BoolExpr] = []
    _necessary(junior, senior, pc, out)
    return out


def _necessary(j: Term, s: Term, pc: BoolExpr, out: list) -> None:
    if isinstance(j, Var) or isinstance(s, Var):
        return
    if isinstance(j, Symbol):
        if isinstance(s, Symbol):
            if j.name != s.name:
                out.append(neg(pc))
        elif isinstance(s, Record):
            for f in s.elements:
                out.append(_implies(pc, neg(f.guard)))
        else:
            out.append(neg(pc))
        return
    if type(j) is not type(s):
        out.append(neg(pc))
        return
    if isinstance(j, Record):
        for f in s.elements:
            e = j.get(f.label)
            if e is None:
                if j.tail is None:
                    out.append(_implies(pc, neg(f.guard)))
                continue
            if j.tail is None:
                out.append(_implies(_and(pc, f.guard), e.guard))
            _necessary(e.term, f.term, _and(pc, e.guard, f.guard), out)
    else:
        for e in j.elements:
            f = s.get(e.label)
            if f is None:
                if s.tail is None:
                    out.append(_implies(pc, neg(e.guard)))
                continue
            if s.tail is None:
                out.append(_implies(_and(pc, e.guard), f.guard))
            _necessary(e.term, f.term, _and(pc, e.guard, f.guard), out)


# --------------------------------------------------------------------------
# Term layer


class _Conflict(Exception):
    pass


class _Diverge(Exception):
    def __init__(self, rounds: int):
        self.rounds = rounds


def _live(t) -> dict:
    return {e.label: e.term for e in t.elements}


def _mk(cls, items: Mapping[str, Term]) -> Term:
    return cls(tuple(Element(k, items[k]) for k in sorted(items)))


def _var_kinds(terms) -> dict:
    """Tail kind of each variable: Record, Choice, None (no tail use) or False (both)."""
    kinds: dict = {}
    for t in terms:
        for name, classes in tail_kinds(t).items():
            kinds.setdefault(name, set()).update(classes)
    return {v: (next(iter(c)) if len(c) == 1 else False) for v, c in kinds.items()}


class TermPhase:
    """Bound propagation and assignment of term variables under fixed guards."""

    def __init__(self, pairs, term_vars, max_rounds: int, trace: list | None = None):
        self.pairs = pairs
        self.vars = sorted(term_vars)
        self.max_rounds = max_rounds
        self.trace = trace
        terms = [t for p in pairs for t in p]
        self.kinds = _var_kinds(terms)
        self.forbidden: dict[str, set] = {}
        for t in terms:
            for c in iter_collections(t):
                if c.tail is not None:
                    self.forbidden.setdefault(c.tail.name, set()).update(c.labels)
        self.lower: dict[str, Term] = {}
        self.upper: dict[str, Term] = {}
        self.changed = False
        self.rounds = 0
        # without a cycle through a variable, no bound gets deeper than this
        self.depth_limit = (len(self.vars) + 1) * max((depth(t) for t in terms), default=1)
        # variables seen directly below a choice whose upper bound is still open
        self.below_choice: set = set()
        # a junior-side variable is best pinned after the variables of its seniors
        self.waits_on: dict[str, set] = {}
        for j, s in pairs:
            above = free_vars(s).terms
            for v in free_vars(j).terms:
                self.waits_on.setdefault(v, set()).update(above - {v})
        self.pin_budget = 32

    # -- bounds ------------------------------------------------------------

    def lo(self, v: str):
        b = self.lower.get(v)
        if b is None and self.kinds.get(v) is Choice:
            return EMPTY_CHOICE
        return b

    def hi(self, v: str):
        b = self.upper.get(v)
        if b is None and self.kinds.get(v) is Record:
            return NIL
        return b

    def _fits(self, v: str, g: Term, as_lower: bool) -> Term:
        kind = self.kinds.get(v)
        if kind is Record:
            if isinstance(g, Symbol) and as_lower:
                return NIL
            if not isinstance(g, Record):
                raise _Conflict
        elif kind is Choice and not isinstance(g, Choice):
            raise _Conflict
        return g

    def add_lower(self, v: str, g: Term) -> None:
        g = self._fits(v, g, True)
        old = self.lower.get(v)
        new = g if old is None else join(old, g)
        if new is None:
            raise _Conflict
        if new != old:
            self._check_growth(new)
            self.lower[v] = new
            self.changed = True

    def add_upper(self, v: str, g: Term) -> None:
        g = self._fits(v, g, False)
        old = self.upper.get(v)
        new = g if old is None else meet(old, g)
        if new is None:
            raise _Conflict
        if new != old:
            self._check_growth(new)
            self.upper[v] = new
            self.changed = True

    def _check_growth(self, bound: Term) -> None:
        if depth(bound) > self.depth_limit:
            raise _Diverge(self.rounds)

    # -- evaluation under bounds -------------------------------------------

    def lower_eval(self, t: Term):
        """A ground term below every admissible value of ``t``, or None."""
        if isinstance(t, Symbol):
            return t
        if isinstance(t, Var):
            return self.lo(t.name)
        if isinstance(t, Record):
            items = {}
            for e in t.elements:
                x = self.lower_eval(e.term)
                if x is None:
                    return None
                items[e.label] = x
            if t.tail is not None:
                low = self.lo(t.tail.name)
                if low is None:
                    return None
                for label, x in _live(low).items():
                    items.setdefault(label, x)
            return _mk(Record, items)
        items = {}
        for e in t.elements:
            x = self.lower_eval(e.term)
            if x is not None:
                items[e.label] = x
        if t.tail is not None:
            for label, x in _live(self.lo(t.tail.name)).items():
                if label in t.labels:
                    raise _Conflict
                items[label] = x
        return _mk(Choice, items)

    def upper_eval(self, t: Term):
        """A ground term above every admissible value of ``t``, or None."""
        if isinstance(t, Symbol):
            return t
        if isinstance(t, Var):
            return self.hi(t.name)
        if isinstance(t, Record):
            items = {}
            for e in t.elements:
                x = self.upper_eval(e.term)
                if x is not None:
                    items[e.label] = x
            if t.tail is not None:
                for label, x in _live(self.hi(t.tail.name)).items():
                    if label in t.labels:
                        raise _Conflict
                    items[label] = x
            return _mk(Record, items)
        items = {}
        for e in t.elements:
            x = self.upper_eval(e.term)
            if x is None:
                return None
            items[e.label] = x
        if t.tail is not None:
            high = self.hi(t.tail.name)
            if high is None:
                return None
            for label, x in _live(high).items():
                if label not in t.labels:
                    items[label] = x
        return _mk(Choice, items)

    # -- propagation -------------------------------------------------------

    def push_lower(self, g: Term, s: Term) -> None:
        """Record the consequences of ``g <= s`` for ground ``g``."""
        if isinstance(s, Var):
            self.add_lower(s.name, g)
        elif isinstance(s, Symbol):
            if not leq(g, s):
                raise _Conflict
        elif isinstance(s, Record):
            if isinstance(g, Symbol):
                if s.elements:
                    raise _Conflict
                if s.tail is not None:
                    self.add_lower(s.tail.name, NIL)
                return
            if not isinstance(g, Record):
                raise _Conflict
            have = _live(g)
            for f in s.elements:
                if f.label not in have:
                    raise _Conflict
                self.push_lower(have[f.label], f.term)
            if s.tail is not None:
                rest = {k: x for k, x in have.items() if k not in s.labels}
                self.add_lower(s.tail.name, _mk(Record, rest))
        else:
            if not isinstance(g, Choice):
                raise _Conflict
            rest = {}
            for label, x in _live(g).items():
                f = s.get(label)
                if f is not None:
                    self.push_lower(x, f.term)
                elif s.tail is not None:
                    rest[label] = x
                else:
                    raise _Conflict
            if s.tail is not None:
                self.add_lower(s.tail.name, _mk(Choice, rest))

    def push_upper(self, j: Term, g: Term) -> None:
        """Record the consequences of ``j <= g`` for ground ``g``."""
        if isinstance(j, Var):
            self.add_upper(j.name, g)
        elif isinstance(j, Symbol):
            if not leq(j, g):
                raise _Conflict
        elif isinstance(j, Record):
            if not isinstance(g, Record):
                raise _Conflict
            rest = {}
            for label, x in _live(g).items():
                e = j.get(label)
                if e is not None:
                    self.push_upper(e.term, x)
                elif j.tail is not None:
                    rest[label] = x
                else:
                    raise _Conflict
            if j.tail is not None:
                self.add_upper(j.tail.name, _mk(Record, rest))
        else:
            if not isinstance(g, Choice):
                raise _Conflict
            have = _live(g)
            for e in j.elements:
                if e.label not in have:
                    raise _Conflict
                self.push_upper(e.term, have[e.label])
            if j.tail is not None:
                rest = {k: x for k, x in have.items() if k not in j.labels}
                self.add_upper(j.tail.name, _mk(Choice, rest))

    def decompose(self, j: Term, s: Term) -> None:
        g = self.lower_eval(j)
        if g is not None:
            self.push_lower(g, s)
        u = self.upper_eval(s)
        if u is not None:
            self.push_upper(j, u)
        elif isinstance(j, Var) and isinstance(s, Choice):
            self.below_choice.add(j.name)
        if isinstance(j, Var) or isinstance(s, Var):
            return
        if isinstance(j, Symbol) or isinstance(s, Symbol):
            if isinstance(j, Symbol) and isinstance(s, Record):
                if s.elements:
                    raise _Conflict
            elif not (isinstance(j, Symbol) and isinstance(s, Symbol)):
                raise _Conflict
            return
        if type(j) is not type(s):
            raise _Conflict
        if isinstance(j, Record):
            for f in s.elements:
                e = j.get(f.label)
                if e is not None:
                    self.decompose(e.term, f.term)
                elif j.tail is None:
                    raise _Conflict
        else:
            for e in j.elements:
                f = s.get(e.label)
                if f is not None:
                    self.decompose(e.term, f.term)
                elif s.tail is None:
                    raise _Conflict

    def fixpoint(self) -> None:
        self.rounds = 0
        log: list = []
        if self.trace is not None:
            self.trace.append(log)
        while True:
            self.rounds += 1
            if self.rounds > self.max_rounds:
                raise _Diverge(self.max_rounds)
            self.changed = False
            for j, s in self.pairs:
                self.decompose(j, s)
            log.append((dict(self.lower), dict(self.upper)))
            if not self.changed:
                return

    def run(self) -> dict[str, Term] | None:
        """Assign every term variable, or return None on a conflict."""
        if any(k is False for k in self.kinds.values()):
            return None
        try:
            self.fixpoint()
        except _Conflict:
            return None
        return self._settle()

    def _settle(self) -> dict[str, Term] | None:
        """Pin unbounded variables one at a time, backtracking over variable and value."""
        pending = [v for v in self.vars if v not in self.lower and self.kinds.get(v) is not Choice]
        if not pending:
            try:
                return {v: self._finish(v) for v in self.vars}
            except _Conflict:
                return None
        ready = [v for v in pending if not self.waits_on.get(v, set()) & set(pending)]
        for v in ready + [v for v in pending if v not in ready]:
            for value in self._pin_values(v):
                if self.pin_budget <= 0:
                    return None
                self.pin_budget -= 1
                saved = dict(self.lower), dict(self.upper), set(self.below_choice)
                try:
                    self.lower[v] = self.upper[v] = value
                    self.fixpoint()
                    values = self._settle()
                    if values is not None:
                        return values
                except _Conflict:
                    pass
                self.lower, self.upper, self.below_choice = saved
        return None

    def _pin_values(self, v: str) -> list[Term]:
        """Candidate values for an unbounded variable, most plausible first."""
        default, other = (EMPTY_CHOICE, NIL) if v in self.below_choice else (NIL, EMPTY_CHOICE)
        upper = self.upper.get(v)
        out = []
        for g in (default if upper is None else upper, other):
            if upper is not None and not leq(g, upper):
                continue
            try:
                g = self._fits(v, g, False)
            except _Conflict:
                continue
            if g not in out:
                out.append(g)
        return out

    def _finish(self, v: str) -> Term:
        kind = self.kinds.get(v)
        bad = self.forbidden.get(v, set())
        if kind is Choice:
            value = self.lower.get(v, EMPTY_CHOICE)
            if bad & set(_live(value)):
                raise _Conflict
            return value
        value = self.lower[v]
        if kind is Record:
            return _mk(Record, {k: x for k, x in _live(value).items() if k not in bad})
        return value


def term_phase(
    cs: ConstraintSet,
    booleans: Mapping[str, bool],
    max_rounds: int = 64,
    trace: list | None = None,
) -> dict[str, Term] | None:
    """Term assignment for fixed guard values (not yet verified)."""
    pairs = [(eval_guards(c.junior, booleans), eval_guards(c.senior, booleans)) for c in cs]
    phase = TermPhase(pairs, cs.term_vars, max_rounds, trace)
    values = phase.run()
    if values is None:
        return None
    # variables that vanished with their guarded elements keep a neutral value
    original = _var_kinds([t for c in cs for t in (c.junior, c.senior)])
    for v in cs.term_vars:
        if v not in phase.kinds and original.get(v) is Choice:
            values[v] = EMPTY_CHOICE
    return values


def bound_trace(cs: ConstraintSet, booleans: Mapping[str, bool], max_rounds: int = 64) -> list:
    """``(lower, upper)`` snapshots of the term phase under ``booleans``.

    One list per fixed-point computation, one snapshot per round.
    """
    trace: list = []
    try:
        term_phase(cs, booleans, max_rounds, trace)
    except _Diverge:
        pass
    return trace


# --------------------------------------------------------------------------
# CEGAR driver


class _Search:
    def __init__(self, cs: ConstraintSet, cfg: SolverConfig):
        self.cs = cs
        self.cfg = cfg
        self.order = sorted(cs.bool_vars)
        self.cnf = CNF(self.order)
        for c in cs.constraints:
            for cond in necessary_conditions(c.junior, c.senior):
                self.cnf.require(cond)
        self.results: dict = {}
        self.diverged: int | None = None

    def candidate(self, booleans: dict) -> Solution | None:
        key = tuple(booleans[v] for v in self.order)
        if key not in self.results:
            found = None
            try:
                values = term_phase(self.cs, booleans, self.cfg.max_rounds)
            except _Diverge as d:
                # undecided for this assignment; other assignments may still work
                self.diverged = d.rounds
                values = None
            if values is not None:
                sol = Solution(dict(booleans), values)
                if verify(self.cs, sol).ok:
                    found = sol
            self.results[key] = found
        return self.results[key]

    def find(self, pins: Mapping[str, bool]) -> Solution | None:
        while True:
            model = solve_cnf(self.cnf, pins, self.order)
            if model is None:
                return None
            booleans = {v: model[v] for v in self.order}
            sol = self.candidate(booleans)
            if sol is not None:
                return sol
            self.cnf.add(tuple(-self.cnf.var(v) if booleans[v] else self.cnf.var(v) for v in self.order))


def _satisfiable(cs: ConstraintSet, cfg: SolverConfig) -> bool | None:
    search = _Search(cs, cfg)
    if search.find({}) is not None:
        return True
    return None if search.diverged is not None else False


def _explain(cs: ConstraintSet, cfg: SolverConfig) -> tuple[Origin, ...]:
    """Deletion-based minimal unsatisfiable subset, reported by origin."""
    core = list(cs.constraints)
    i = 0
    while i < len(core):
        trial = core[:i] + core[i + 1 :]
        if _satisfiable(ConstraintSet.of(trial), cfg) is False:
            core = trial
        else:
            i += 1
    return tuple(c.origin for c in core)


def solve(cs: ConstraintSet, cfg: SolverConfig | None = None) -> Verdict:
    """Sat with a verified solution, Unsat with a minimal conflicting subset, or Diverged.

    Diverged is returned only when no solution was found and bound
    propagation failed to settle for at least one Boolean assignment.
    """
    cfg = cfg or SolverConfig()
    search = _Search(cs, cfg)
    sol = search.find({})
    if sol is None:
        if search.diverged is not None:
            return Diverged(search.diverged)
        return Unsat(_explain(cs, cfg))
    if cfg.prefer_true:
        committed: dict[str, bool] = {}
        for v in search.order:
            if sol.booleans[v]:
                committed[v] = True
                continue
            trial = search.find({**committed, v: True})
            if trial is not None:
                sol = trial
                committed[v] = True
            else:
                committed[v] = False
    return Sat(sol)


# --------------------------------------------------------------------------
# Solution files


def render_solution(s: Solution) -> str:
    lines = [f"bool {k} = {'true' if v else 'false'}" for k, v in s.booleans.items()]
    lines += [f"term {k} = {render_term(v)}" for k, v in s.terms.items()]
    return "".join(f"{line}\n" for line in sorted(lines))


def parse_solution(text: str) -> Solution:
    booleans: dict[str, bool] = {}
    terms: dict[str, Term] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, value = line.partition("=")
        parts = head.split()
        if not sep or len(parts) != 2 or parts[0] not in ("bool", "term"):
            raise MdlError(f"line {lineno}: expected 'bool <name> = ...' or 'term <name> = ...'")
        kind, name = parts
        value = value.strip()
        if kind == "bool":
            if value not in ("true", "false"):
                raise MdlError(f"line {lineno}: boolean value must be true or false")
            booleans[name] = value == "true"
        else:
            terms[name] = parse_term(value)
    return Solution(booleans, terms)
