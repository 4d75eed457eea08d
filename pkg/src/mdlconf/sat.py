"""A small DPLL satisfiability checker with Tseitin encoding of guard formulas.

Instances produced by the solver have a handful of variables, so the
procedure favours simplicity: clause scanning for unit propagation and
chronological backtracking.  Decisions follow a caller-supplied variable
order and try ``True`` first, which the solver relies on for its
true-preferring search.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .terms import And, BoolExpr, BVar, Const, Not, Or


class CNF:
    """Clause store with named variables; literals are signed ints."""

    def __init__(self, names: Iterable[str] = ()):
        self.clauses: list[tuple[int, ...]] = []
        self.index: dict[str, int] = {}
        self.nvars = 0
        self._true: int | None = None
        self._cache: dict = {}
        for n in names:
            self.var(n)

    def var(self, name: str) -> int:
        v = self.index.get(name)
        if v is None:
            self.nvars += 1
            v = self.index[name] = self.nvars
        return v

    def fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def add(self, clause: Iterable[int]) -> None:
        self.clauses.append(tuple(clause))

    def encode(self, expr: BoolExpr) -> int:
        """Return a literal equivalent to ``expr``, adding definitional clauses."""
        hit = self._cache.get(expr)
        if hit is not None:
            return hit
        if isinstance(expr, Const):
            if self._true is None:
                self._true = self.fresh()
                self.add((self._true,))
            lit = self._true if expr.value else -self._true
        elif isinstance(expr, BVar):
            lit = self.var(expr.name)
        elif isinstance(expr, Not):
            lit = -self.encode(expr.arg)
        elif isinstance(expr, And):
            args = [self.encode(a) for a in expr.args]
            lit = self.fresh()
            for a in args:
                self.add((-lit, a))
            self.add((lit, *(-a for a in args)))
        elif isinstance(expr, Or):
            args = [self.encode(a) for a in expr.args]
            lit = self.fresh()
            self.add((-lit, *args))
            for a in args:
                self.add((lit, -a))
        else:
            raise TypeError(f"not a guard expression: {expr!r}")
        self._cache[expr] = lit
        return lit

    def require(self, expr: BoolExpr) -> None:
        self.add((self.encode(expr),))


def _propagate(clauses, assign: dict) -> bool:
    changed = True
    while changed:
        changed = False
        for clause in clauses:
            unassigned = None
            n_unassigned = 0
            satisfied = False
            for lit in clause:
                val = assign.get(abs(lit))
                if val is None:
                    n_unassigned += 1
                    unassigned = lit
                elif val == (lit > 0):
                    satisfied = True
                    break
            if satisfied:
                continue
            if n_unassigned == 0:
                return False
            if n_unassigned == 1:
                assign[abs(unassigned)] = unassigned > 0
                changed = True
    return True


def _dpll(clauses, assign: dict, order: list[int]) -> dict | None:
    if not _propagate(clauses, assign):
        return None
    for v in order:
        if v not in assign:
            for value in (True, False):
                trial = dict(assign)
                trial[v] = value
                model = _dpll(clauses, trial, order)
                if model is not None:
                    return model
            return None
    return assign


def solve_cnf(
    cnf: CNF,
    assumptions: Mapping[str, bool] | None = None,
    order: Iterable[str] = (),
) -> dict[str, bool] | None:
    """Find a model honouring ``assumptions``; ``order`` names variables decided first.

    Returns the values of the named variables, or ``None`` when unsatisfiable.
    """
    assign: dict[int, bool] = {}
    for name, value in (assumptions or {}).items():
        v = cnf.var(name)
        if assign.get(v, value) != value:
            return None
        assign[v] = bool(value)
    first = [cnf.var(n) for n in order]
    seen = set(first)
    full = first + [v for v in range(1, cnf.nvars + 1) if v not in seen]
    model = _dpll(cnf.clauses, assign, full)
    if model is None:
        return None
    return {name: model.get(v, True) for name, v in cnf.index.items()}


def satisfiable(expr: BoolExpr) -> bool:
    cnf = CNF()
    cnf.require(expr)
    return solve_cnf(cnf) is not None
