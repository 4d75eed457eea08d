"""Exhaustive reference solver over a bounded universe of ground terms.

Used as a test oracle for :func:`mdlconf.solver.solve`; it is exponential and
only meant for tiny instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from .constraints import ConstraintSet
from .errors import GroundingError, UniverseTooLarge
from .seniority import leq
from .solver import Sat, Solution, Unsat, Verdict
from .terms import Choice, Element, Record, Substitution, Symbol, Term, free_vars, ground, tail_kinds


@dataclass(frozen=True)
class Universe:
    labels: tuple[str, ...] = ("a", "b", "c")
    symbols: tuple[str, ...] = ("int", "string")
    max_depth: int = 2
    max_bools: int = 10
    max_assignments: int = 200_000


def enumerate_terms(u: Universe) -> list[Term]:
    """Every ground term up to ``u.max_depth``; symbols and empty collections have depth 1."""
    level = [Symbol(s) for s in u.symbols] + [Record(), Choice()]
    for _ in range(u.max_depth - 1):
        options = [None, *level]
        nxt = [Symbol(s) for s in u.symbols]
        for cls in (Record, Choice):
            for picks in itertools.product(options, repeat=len(u.labels)):
                elems = tuple(Element(l, t) for l, t in zip(u.labels, picks) if t is not None)
                nxt.append(cls(elems))
        level = nxt
    return level


def brute_solve(
    cs: ConstraintSet, u: Universe | None = None, fixed: Mapping[str, bool] | None = None
) -> Verdict:
    """Search every Boolean assignment (honouring ``fixed``) and every term assignment from the universe."""
    u = u or Universe()
    fixed = fixed or {}
    bools = sorted(cs.bool_vars)
    if len(bools) > u.max_bools:
        raise UniverseTooLarge(f"{len(bools)} Boolean variables exceed the limit of {u.max_bools}")
    terms = enumerate_terms(u)
    kinds: dict[str, set] = {}
    for c in cs:
        for t in (c.junior, c.senior):
            for v, classes in tail_kinds(t).items():
                kinds.setdefault(v, set()).update(classes)
    tvars = sorted(cs.term_vars)
    domains = []
    for v in tvars:
        k = kinds.get(v, set())
        if len(k) > 1:
            domains.append([])
        elif k:
            cls = next(iter(k))
            domains.append([t for t in terms if isinstance(t, cls)])
        else:
            domains.append(terms)
    size = 2 ** len(bools)
    for d in domains:
        size *= max(len(d), 1)
    if size > u.max_assignments:
        raise UniverseTooLarge(f"{size} candidate assignments exceed the limit of {u.max_assignments}")

    order = bools + tvars
    # each constraint is checked as soon as its last variable is assigned
    checks: dict[int, list] = {}
    for c in cs:
        names = set()
        for t in (c.junior, c.senior):
            f = free_vars(t)
            names |= f.booleans | f.terms
        deps = tuple(sorted(names, key=order.index))
        at = max((order.index(n) for n in names), default=-1)
        checks.setdefault(at, []).append((c, deps, {}))

    booleans: dict[str, bool] = {}
    values: dict[str, Term] = {}

    def holds(c, deps, cache) -> bool:
        key = tuple(booleans[n] if n in booleans else values[n] for n in deps)
        if key not in cache:
            sub = Substitution(booleans, values)
            try:
                cache[key] = leq(ground(c.junior, sub), ground(c.senior, sub))
            except GroundingError:
                cache[key] = False
        return cache[key]

    def ok_at(i: int) -> bool:
        return all(holds(*chk) for chk in checks.get(i, ()))

    def search(i: int) -> bool:
        if i == len(order):
            return True
        name = order[i]
        if i < len(bools):
            for b in (fixed[name],) if name in fixed else (True, False):
                booleans[name] = b
                if ok_at(i) and search(i + 1):
                    return True
            del booleans[name]
            return False
        for t in domains[i - len(bools)]:
            values[name] = t
            if ok_at(i) and search(i + 1):
                return True
        values.pop(name, None)
        return False

    if not ok_at(-1):
        return Unsat(tuple(c.origin for c, _, _ in checks[-1] if not holds(c, (), {})))
    if search(0):
        return Sat(Solution(dict(booleans), dict(values)))
    return Unsat()
