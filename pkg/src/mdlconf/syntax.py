"""Concrete text syntax for MDL terms.

::

    term     ::= symbol | $var | record | choice
    record   ::= "{" [element ("," element)*] ["|" $var] "}"
    choice   ::= "(:" [element ("," element)*] ["|" $var] ":)"
    element  ::= label ["(" guard ")"] ":" term
    guard    ::= guard "||" guard | guard "&&" guard | "!" guard
               | "(" guard ")" | "true" | "false" | name

``∨``, ``∧`` and ``¬`` are accepted as spellings of ``||``, ``&&`` and ``!``.
A ``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

from .errors import DuplicateLabelError, MdlSyntaxError
from .terms import (
    FALSE,
    TRUE,
    And,
    BVar,
    BoolExpr,
    Choice,
    Const,
    Element,
    Not,
    Or,
    Record,
    Symbol,
    Term,
    Var,
)

_PUNCT2 = {"(:": "LCHOICE", ":)": "RCHOICE", "||": "OR", "&&": "AND", "<=": "LE", "->": "ARROW"}
_PUNCT1 = {
    "{": "LBRACE",
    "}": "RBRACE",
    "(": "LPAREN",
    ")": "RPAREN",
    ":": "COLON",
    ",": "COMMA",
    "|": "BAR",
    "!": "NOT",
    "=": "EQ",
    "∨": "OR",
    "∧": "AND",
    "¬": "NOT",
}


def _ident_start(c: str) -> bool:
    return c == "_" or ("a" <= c <= "z") or ("A" <= c <= "Z")


def _ident_char(c: str) -> bool:
    return _ident_start(c) or ("0" <= c <= "9")


class _Lexer:
    def __init__(self, text: str, pos: int = 0, source: str | None = None):
        self.text = text
        self.pos = pos
        self.source = source
        self._peeked = None

    def where(self, pos: int) -> tuple[int, int]:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, pos: int | None = None) -> MdlSyntaxError:
        line, col = self.where(self.pos if pos is None else pos)
        return MdlSyntaxError(message, line, col, self.source)

    def _skip(self) -> None:
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c.isspace():
                self.pos += 1
            elif c == "#":
                nl = text.find("\n", self.pos)
                self.pos = len(text) if nl < 0 else nl + 1
            else:
                break

    def _lex(self):
        self._skip()
        text, start = self.text, self.pos
        if start >= len(text):
            return ("EOF", "", start)
        two = text[start : start + 2]
        if two in _PUNCT2:
            self.pos += 2
            return (_PUNCT2[two], two, start)
        c = text[start]
        if c in _PUNCT1:
            self.pos += 1
            return (_PUNCT1[c], c, start)
        if c == "$" or _ident_start(c):
            end = start + 1 if c == "$" else start
            if end >= len(text) or not _ident_start(text[end]):
                raise self.error("expected a variable name after '$'", start)
            while end < len(text) and _ident_char(text[end]):
                end += 1
            self.pos = end
            if c == "$":
                return ("VAR", text[start + 1 : end], start)
            return ("IDENT", text[start:end], start)
        raise self.error(f"unexpected character {c!r}", start)

    def peek(self):
        if self._peeked is None:
            self._peeked = self._lex()
        return self._peeked

    def next(self):
        tok = self.peek()
        self._peeked = None
        return tok

    def expect(self, kind: str, what: str):
        tok = self.next()
        if tok[0] != kind:
            found = "end of input" if tok[0] == "EOF" else repr(tok[1])
            raise self.error(f"expected {what}, found {found}", tok[2])
        return tok

    def offset(self) -> int:
        """Position just after the last consumed token."""
        if self._peeked is not None:
            return self._peeked[2]
        return self.pos


class _Parser:
    def __init__(self, lexer: _Lexer):
        self.lx = lexer

    def term(self) -> Term:
        kind, value, pos = self.lx.next()
        if kind == "IDENT":
            return Symbol(value)
        if kind == "VAR":
            return Var(value)
        if kind == "LBRACE":
            elems, tail = self.collection("RBRACE", "'}'")
            return Record(tuple(elems), tail)
        if kind == "LCHOICE":
            elems, tail = self.collection("RCHOICE", "':)'")
            return Choice(tuple(elems), tail)
        found = "end of input" if kind == "EOF" else repr(value)
        raise self.lx.error(f"expected a term, found {found}", pos)

    def collection(self, close: str, close_text: str):
        elems: list[Element] = []
        seen: set = set()
        tail = None
        lx = self.lx
        if lx.peek()[0] == close:
            lx.next()
            return elems, tail
        if lx.peek()[0] != "BAR":
            while True:
                label_tok = lx.peek()
                elem = self.element()
                if elem.label in seen:
                    err = DuplicateLabelError(elem.label)
                    err.line, err.column = lx.where(label_tok[2])
                    raise err
                seen.add(elem.label)
                elems.append(elem)
                if lx.peek()[0] == "COMMA":
                    lx.next()
                    continue
                break
        if lx.peek()[0] == "BAR":
            lx.next()
            tail = Var(lx.expect("VAR", "a tail variable")[1])
        lx.expect(close, close_text)
        return elems, tail

    def element(self) -> Element:
        label = self.lx.expect("IDENT", "a label")[1]
        guard: BoolExpr = TRUE
        if self.lx.peek()[0] == "LPAREN":
            self.lx.next()
            guard = self.guard()
            self.lx.expect("RPAREN", "')' closing the guard")
        self.lx.expect("COLON", "':' after the label")
        return Element(label, self.term(), guard)

    def guard(self) -> BoolExpr:
        args = [self.conjunction()]
        while self.lx.peek()[0] == "OR":
            self.lx.next()
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self) -> BoolExpr:
        args = [self.unary()]
        while self.lx.peek()[0] == "AND":
            self.lx.next()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> BoolExpr:
        kind, value, pos = self.lx.next()
        if kind == "NOT":
            return Not(self.unary())
        if kind == "LPAREN":
            inner = self.guard()
            self.lx.expect("RPAREN", "')'")
            return inner
        if kind == "IDENT":
            if value == "true":
                return TRUE
            if value == "false":
                return FALSE
            return BVar(value)
        found = "end of input" if kind == "EOF" else repr(value)
        raise self.lx.error(f"expected a guard expression, found {found}", pos)


def parse_term(text: str, source: str | None = None) -> Term:
    """Parse exactly one term from ``text``."""
    lx = _Lexer(text, source=source)
    t = _Parser(lx).term()
    tok = lx.peek()
    if tok[0] != "EOF":
        raise lx.error(f"unexpected {tok[1]!r} after the term", tok[2])
    return t


def parse_term_prefix(text: str, pos: int = 0, source: str | None = None) -> tuple[Term, int]:
    """Parse one term starting at ``pos``; return it with the offset where parsing stopped."""
    lx = _Lexer(text, pos, source)
    t = _Parser(lx).term()
    return t, lx.offset()


def parse_guard(text: str) -> BoolExpr:
    lx = _Lexer(text)
    g = _Parser(lx).guard()
    tok = lx.peek()
    if tok[0] != "EOF":
        raise lx.error(f"unexpected {tok[1]!r} after the guard", tok[2])
    return g


# --------------------------------------------------------------------------
# Printing

_PREC = {Or: 1, And: 2, Not: 3}


def _prec(g: BoolExpr) -> int:
    return _PREC.get(type(g), 4)


def render_guard(g: BoolExpr) -> str:
    if isinstance(g, Const):
        return "true" if g.value else "false"
    if isinstance(g, BVar):
        return g.name
    if isinstance(g, Not):
        inner = render_guard(g.arg)
        return "!" + (f"({inner})" if _prec(g.arg) < 3 else inner)
    op = " || " if isinstance(g, Or) else " && "
    mine = _prec(g)
    parts = []
    for a in g.args:
        s = render_guard(a)
        parts.append(f"({s})" if _prec(a) <= mine else s)
    return op.join(parts)


def _render_elements(t: Record | Choice) -> str:
    parts = []
    for e in t.sorted_elements():
        head = e.label if e.guard == TRUE else f"{e.label}({render_guard(e.guard)})"
        parts.append(f"{head}: {render_term(e.term)}")
    body = ", ".join(parts)
    if t.tail is not None:
        body = f"{body} | ${t.tail.name}" if body else f"| ${t.tail.name}"
    return body


def render_term(t: Term) -> str:
    """Canonical text: labels sorted, ``true`` guards omitted."""
    if isinstance(t, Symbol):
        return t.name
    if isinstance(t, Var):
        return f"${t.name}"
    body = _render_elements(t)
    if isinstance(t, Record):
        return "{" + body + "}"
    return "(: " + body + " :)" if body else "(: :)"
