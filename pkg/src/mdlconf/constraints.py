"""Topologies, interface bundles and seniority-constraint generation.

Topology file (``.topo``)::

    channel Alice.out1 -> Seller.in1

Interface bundle (``.ifc``)::

    service Seller
    in1 AS_in = (: request: {title: string} | $b :)
    out1 SB_out = (: response: {title: string, money: int} | $b :)
    constraint $a <= $d

Port lines are ``in<k>`` or ``out<k>``, optionally followed by a display
alias; a term may span several lines.  Constraint-set file (``.csp``), one
constraint per line::

    channel 1 Alice.out1 -> Seller.in1 :: <junior> <= <senior>
    intra Seller :: $a <= $d
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .derivation import DerivedService
from .errors import MdlError, TopologyError
from .syntax import _Lexer, _Parser, parse_term_prefix, render_term
from .terms import Term, Var, free_vars


@dataclass(frozen=True, order=True)
class PortRef:
    service: str
    direction: str  # "in" | "out"
    port: int

    def __str__(self) -> str:
        return f"{self.service}.{self.direction}{self.port}"


@dataclass(frozen=True)
class Channel:
    id: int
    source: PortRef
    target: PortRef

    def __str__(self) -> str:
        return f"{self.source} -> {self.target}"


@dataclass(frozen=True)
class Topology:
    channels: tuple[Channel, ...] = ()


_ENDPOINT_RE = r"([A-Za-z_][A-Za-z0-9_]*)\.(in|out)([0-9]+)"
_CHANNEL_RE = re.compile(rf"channel\s+{_ENDPOINT_RE}\s*->\s*{_ENDPOINT_RE}\Z")


def load_topology(text: str) -> Topology:
    channels = []
    sources: set = set()
    targets: set = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _CHANNEL_RE.match(line)
        if not m:
            raise TopologyError(f"line {lineno}: expected 'channel <svc>.out<k> -> <svc>.in<m>'")
        src = PortRef(m.group(1), m.group(2), int(m.group(3)))
        dst = PortRef(m.group(4), m.group(5), int(m.group(6)))
        if src.direction != "out" or dst.direction != "in":
            raise TopologyError(f"line {lineno}: channels run from an output port to an input port")
        if src.port < 1 or dst.port < 1:
            raise TopologyError(f"line {lineno}: port indices start at 1")
        if src.service == dst.service and src.port == dst.port:
            raise TopologyError(f"line {lineno}: self-loop on port {src.port} of {src.service}")
        if src in sources:
            raise TopologyError(f"line {lineno}: output port {src} already wired")
        if dst in targets:
            raise TopologyError(f"line {lineno}: input port {dst} already wired")
        sources.add(src)
        targets.add(dst)
        channels.append(Channel(len(channels) + 1, src, dst))
    return Topology(tuple(channels))


# --------------------------------------------------------------------------
# Constraints


@dataclass(frozen=True)
class Origin:
    kind: str  # "channel" | "intra"
    channel: int | None = None
    text: str = ""

    def sort_key(self):
        if self.kind == "channel":
            return (0, self.channel, "")
        return (1, 0, self.text)

    def __str__(self) -> str:
        if self.kind == "channel":
            return f"channel {self.channel} {self.text}"
        return f"intra {self.text}"


@dataclass(frozen=True)
class Constraint:
    junior: Term
    senior: Term
    origin: Origin

    def __str__(self) -> str:
        return f"{self.origin} :: {render_term(self.junior)} <= {render_term(self.senior)}"


@dataclass(frozen=True)
class ConstraintSet:
    constraints: tuple[Constraint, ...]
    bool_vars: frozenset
    term_vars: frozenset

    @classmethod
    def of(cls, constraints: Iterable[Constraint]) -> "ConstraintSet":
        cs = tuple(constraints)
        tv: set = set()
        bv: set = set()
        for c in cs:
            for t in (c.junior, c.senior):
                fv = free_vars(t)
                tv |= fv.terms
                bv |= fv.booleans
        return cls(cs, frozenset(bv), frozenset(tv))

    def __len__(self) -> int:
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)


def generate(top: Topology, services: Mapping[str, DerivedService]) -> ConstraintSet:
    """One constraint per channel, followed by every service's intra constraints."""
    out = []
    for ch in top.channels:
        junior = _resolve(services, ch.source)
        senior = _resolve(services, ch.target)
        out.append(Constraint(junior, senior, Origin("channel", ch.id, str(ch))))
    for name in sorted(services):
        for a, b in services[name].intra_constraints:
            out.append(Constraint(a, b, Origin("intra", None, name)))
    out.sort(key=lambda c: c.origin.sort_key())
    return ConstraintSet.of(out)


def _resolve(services: Mapping[str, DerivedService], ref: PortRef) -> Term:
    svc = services.get(ref.service)
    if svc is None:
        raise TopologyError(f"unknown service {ref.service!r} in {ref}")
    table = svc.input_ifaces if ref.direction == "in" else svc.output_ifaces
    if ref.port not in table:
        raise TopologyError(f"unknown port {ref}")
    return table[ref.port]


# --------------------------------------------------------------------------
# Interface bundles

_PORT_NAME_RE = re.compile(r"(in|out)([0-9]+)\Z")


def parse_bundle(text: str, default_name: str | None = None, source: str | None = None) -> DerivedService:
    lx = _Lexer(text, source=source)
    parser = _Parser(lx)
    name = None
    inputs: dict[int, Term] = {}
    outputs: dict[int, Term] = {}
    intra: list[tuple[Var, Var]] = []
    aliases: dict[str, str] = {}
    while True:
        kind, value, pos = lx.next()
        if kind == "EOF":
            break
        if kind != "IDENT":
            raise lx.error(f"expected a statement, found {value!r}", pos)
        if value == "service":
            if name is not None:
                raise lx.error("second 'service' statement", pos)
            name = lx.expect("IDENT", "a service name")[1]
        elif value == "constraint":
            a = Var(lx.expect("VAR", "a tail variable")[1])
            lx.expect("LE", "'<='")
            b = Var(lx.expect("VAR", "a tail variable")[1])
            intra.append((a, b))
        else:
            m = _PORT_NAME_RE.match(value)
            if not m or int(m.group(2)) < 1:
                raise lx.error(f"expected 'service', 'constraint' or a port name, found {value!r}", pos)
            if lx.peek()[0] == "IDENT":
                aliases[value] = lx.next()[1]
            lx.expect("EQ", "'='")
            term = parser.term()
            table = inputs if m.group(1) == "in" else outputs
            port = int(m.group(2))
            if port in table:
                raise lx.error(f"port {value} defined twice", pos)
            table[port] = term
    name = name or default_name
    if name is None:
        raise TopologyError("interface bundle has no 'service' statement")
    return DerivedService(
        name, dict(sorted(inputs.items())), dict(sorted(outputs.items())), tuple(intra), aliases
    )


def render_bundle(d: DerivedService) -> str:
    lines = [f"service {d.name}"]
    for direction, table in (("in", d.input_ifaces), ("out", d.output_ifaces)):
        for port, term in sorted(table.items()):
            key = f"{direction}{port}"
            alias = d.aliases.get(key)
            head = f"{key} {alias}" if alias else key
            lines.append(f"{head} = {render_term(term)}")
    for a, b in d.intra_constraints:
        lines.append(f"constraint ${a.name} <= ${b.name}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Constraint-set files

_ORIGIN_CH_RE = re.compile(r"channel\s+([0-9]+)\s+(.*)\Z")
_ORIGIN_INTRA_RE = re.compile(r"intra\s+(\S+)\Z")


def render_constraints(cs: ConstraintSet) -> str:
    return "".join(f"{c}\n" for c in cs.constraints)


def parse_constraints(text: str, source: str | None = None) -> ConstraintSet:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, body = line.partition("::")
        if not sep:
            raise TopologyError(f"line {lineno}: expected '<origin> :: <junior> <= <senior>'")
        head = head.strip()
        if m := _ORIGIN_CH_RE.match(head):
            origin = Origin("channel", int(m.group(1)), m.group(2).strip())
        elif m := _ORIGIN_INTRA_RE.match(head):
            origin = Origin("intra", None, m.group(1))
        else:
            raise TopologyError(f"line {lineno}: bad constraint origin {head!r}")
        try:
            junior, pos = parse_term_prefix(body, 0, source)
            lx = _Lexer(body, pos, source)
            lx.expect("LE", "'<='")
            senior, end = parse_term_prefix(body, lx.offset(), source)
            if body[end:].strip():
                raise lx.error("trailing text after the senior term", end)
        except MdlError as err:
            raise TopologyError(f"line {lineno}: {err}") from None
        out.append(Constraint(junior, senior, origin))
    return ConstraintSet.of(out)
