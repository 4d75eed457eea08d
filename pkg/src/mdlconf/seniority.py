"""The seniority order on ground terms, with meet and join.

``leq(a, b)`` reads "a is junior to b": a producer emitting ``a`` can feed a
consumer accepting ``b``.  Symbols are atoms, ``nil`` (the empty record) is
the top of records and symbols, and the empty choice is the bottom of
choices.  Records get smaller as they gain labels, choices get smaller as
they lose labels; element terms are compared covariantly in both.

``meet`` and ``join`` return ``None`` when no bound exists.
"""

from __future__ import annotations

from .terms import FALSE, Choice, Element, Record, Symbol, Term, Var


def _live(c):
    """Label -> term for elements that are not switched off."""
    out = {}
    for e in c.elements:
        if e.guard == FALSE:
            continue
        out[e.label] = e.term
    return out


def _check_ground(*terms):
    for t in terms:
        if isinstance(t, Var) or (not isinstance(t, Symbol) and t.tail is not None):
            raise ValueError("seniority is defined on ground terms only")
        if not isinstance(t, Symbol):
            _check_ground(*(e.term for e in t.elements))


def _is_top(t) -> bool:
    return isinstance(t, Record) and not _live(t)


def leq(t1: Term, t2: Term) -> bool:
    _check_ground(t1, t2)
    return _leq(t1, t2)


def _leq(t1: Term, t2: Term) -> bool:
    if isinstance(t1, Symbol):
        if isinstance(t2, Symbol):
            return t1.name == t2.name
        return _is_top(t2)
    if isinstance(t1, Record):
        if not isinstance(t2, Record):
            return False
        small, big = _live(t1), _live(t2)
        if len(small) < len(big):
            return False
        for label, sub in big.items():
            mine = small.get(label)
            if mine is None or not _leq(mine, sub):
                return False
        return True
    # choice
    if not isinstance(t2, Choice):
        return False
    small, big = _live(t1), _live(t2)
    if len(small) > len(big):
        return False
    for label, sub in small.items():
        other = big.get(label)
        if other is None or not _leq(sub, other):
            return False
    return True


def _build(cls, items: dict) -> Term:
    return cls(tuple(Element(label, items[label]) for label in sorted(items)))


def meet(t1: Term, t2: Term) -> Term | None:
    """Greatest lower bound, or ``None``."""
    _check_ground(t1, t2)
    return _meet(t1, t2)


def _meet(t1: Term, t2: Term) -> Term | None:
    if _leq(t1, t2):
        return t1
    if _leq(t2, t1):
        return t2
    if isinstance(t1, Record) and isinstance(t2, Record):
        a, b = _live(t1), _live(t2)
        out = dict(a)
        for label, sub in b.items():
            if label in out:
                m = _meet(out[label], sub)
                if m is None:
                    return None
                out[label] = m
            else:
                out[label] = sub
        return _build(Record, out)
    if isinstance(t1, Choice) and isinstance(t2, Choice):
        a, b = _live(t1), _live(t2)
        out = {}
        for label in a.keys() & b.keys():
            m = _meet(a[label], b[label])
            if m is not None:
                out[label] = m
        return _build(Choice, out)
    return None


def join(t1: Term, t2: Term) -> Term | None:
    """Least upper bound, or ``None``."""
    _check_ground(t1, t2)
    return _join(t1, t2)


def _join(t1: Term, t2: Term) -> Term | None:
    if _leq(t1, t2):
        return t2
    if _leq(t2, t1):
        return t1
    if isinstance(t1, (Record, Symbol)) and isinstance(t2, (Record, Symbol)):
        if isinstance(t1, Symbol) or isinstance(t2, Symbol):
            return Record()
        a, b = _live(t1), _live(t2)
        out = {}
        for label in a.keys() & b.keys():
            j = _join(a[label], b[label])
            if j is not None:
                out[label] = j
        return _build(Record, out)
    if isinstance(t1, Choice) and isinstance(t2, Choice):
        a, b = _live(t1), _live(t2)
        out = dict(a)
        for label, sub in b.items():
            if label in out:
                j = _join(out[label], sub)
                if j is None:
                    return None
                out[label] = j
            else:
                out[label] = sub
        return _build(Choice, out)
    return None
