"""Interface derivation from declarative service stubs, and shell routing.

A stub lists a service's processing functions (one per input message label)
and its salvos (output message labels) together with the functions that call
them.  From it we derive one choice-of-records interface per port::

    service Seller
    in 1 request(title:string)
    in 1 payment(title:string, money:int)
    salvo 1 response(title:string, money:int) from request
    salvo 1 invoice(id:int) from payment
    salvo 2 error(msg:string) from request,payment

A shell then re-routes the core ports onto external channels::

    shell Calc
    merge 1,2 -> in 1
    route out 1 -> 1 rename result=factorial
    route out 1 -> 2 rename result=square
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DuplicateLabelError, StubError
from .terms import BVar, Choice, Element, Record, Symbol, Term, Var, disj, is_identifier


@dataclass(frozen=True)
class ProcessingFn:
    name: str
    port: int
    params: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Salvo:
    name: str
    port: int
    params: tuple[tuple[str, str], ...] = ()
    callers: tuple[str, ...] = ()


@dataclass(frozen=True)
class ServiceStub:
    name: str
    inputs: tuple[ProcessingFn, ...] = ()
    salvos: tuple[Salvo, ...] = ()

    def __post_init__(self):
        validate_stub(self)


@dataclass(frozen=True)
class Route:
    core_port: int
    channel: int
    renames: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class ShellSpec:
    service: str | None = None
    input_merges: dict[int, tuple[int, ...]] = field(default_factory=dict)
    output_routes: tuple[Route, ...] = ()


@dataclass(frozen=True)
class DerivedService:
    """Per-port interfaces of one service plus its tail-to-tail constraints.

    ``intra_constraints`` holds ``(junior, senior)`` variable pairs.
    """

    name: str
    input_ifaces: dict[int, Term] = field(default_factory=dict)
    output_ifaces: dict[int, Term] = field(default_factory=dict)
    intra_constraints: tuple[tuple[Var, Var], ...] = ()
    aliases: dict[str, str] = field(default_factory=dict)


# --------------------------------------------------------------------------
# Stub format

_SERVICE_RE = re.compile(r"service\s+(\S+)\Z")
_IN_RE = re.compile(r"in\s+(\S+)\s+([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\Z")
_SALVO_RE = re.compile(
    r"salvo\s+(\S+)\s+([A-Za-z_][A-Za-z0-9_]*)\s*\((.*)\)\s*from\s+(.+)\Z"
)


def _port(text: str, lineno: int) -> int:
    if not text.isdigit() or int(text) < 1:
        raise StubError(f"line {lineno}: bad port index {text!r}")
    return int(text)


def _params(text: str, lineno: int) -> tuple[tuple[str, str], ...]:
    text = text.strip()
    if not text:
        return ()
    out = []
    for chunk in text.split(","):
        name, sep, typ = chunk.partition(":")
        name, typ = name.strip(), typ.strip()
        if not sep or not is_identifier(name) or not is_identifier(typ):
            raise StubError(f"line {lineno}: bad parameter {chunk.strip()!r}, expected name:type")
        out.append((name, typ))
    return tuple(out)


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_stub(text: str) -> ServiceStub:
    name = None
    inputs: list[ProcessingFn] = []
    salvos: list[Salvo] = []
    for lineno, line in _content_lines(text):
        if m := _SERVICE_RE.match(line):
            if name is not None:
                raise StubError(f"line {lineno}: second 'service' line")
            name = m.group(1)
        elif m := _IN_RE.match(line):
            inputs.append(ProcessingFn(m.group(2), _port(m.group(1), lineno), _params(m.group(3), lineno)))
        elif m := _SALVO_RE.match(line):
            callers = tuple(c.strip() for c in m.group(4).split(","))
            salvos.append(
                Salvo(m.group(2), _port(m.group(1), lineno), _params(m.group(3), lineno), callers)
            )
        else:
            raise StubError(f"line {lineno}: cannot parse {line!r}")
    if name is None:
        raise StubError("missing 'service <name>' line")
    return ServiceStub(name, tuple(inputs), tuple(salvos))


def validate_stub(stub: ServiceStub) -> None:
    if not is_identifier(stub.name):
        raise StubError(f"bad service name {stub.name!r}")
    fn_names = set()
    for fn in stub.inputs:
        if fn.name in fn_names:
            raise StubError(f"duplicate processing function {fn.name!r}")
        fn_names.add(fn.name)
        if fn.port < 1:
            raise StubError(f"function {fn.name!r}: bad port index {fn.port}")
        if len({p for p, _ in fn.params}) != len(fn.params):
            raise StubError(f"function {fn.name!r}: duplicate parameter name")
    salvo_names = set()
    for s in stub.salvos:
        if s.name in salvo_names:
            raise StubError(f"duplicate salvo {s.name!r}")
        salvo_names.add(s.name)
        if s.port < 1:
            raise StubError(f"salvo {s.name!r}: bad port index {s.port}")
        if not s.callers:
            raise StubError(f"salvo {s.name!r} has no callers")
        if len({p for p, _ in s.params}) != len(s.params):
            raise StubError(f"salvo {s.name!r}: duplicate parameter name")
        for c in s.callers:
            if c not in fn_names:
                raise StubError(f"salvo {s.name!r} names unknown caller {c!r}")


# --------------------------------------------------------------------------
# Derivation


def enable_var(service: str, fn: str) -> str:
    return f"{service}_{fn}"


def args_var(service: str, fn: str) -> str:
    return f"{service}_{fn}_in"


def extra_var(service: str, salvo: str) -> str:
    return f"{service}_{salvo}_out"


def flow_var(service: str) -> str:
    return f"{service}_flow"


def _message(params, tail: str) -> Record:
    return Record(tuple(Element(p, Symbol(t)) for p, t in params), Var(tail))


def derive_interfaces(stub: ServiceStub) -> DerivedService:
    svc = stub.name

    def enable(fn):
        return enable_var(svc, fn)

    def args(fn):
        return args_var(svc, fn)

    def extra(salvo):
        return extra_var(svc, salvo)

    flow = Var(flow_var(svc))

    used: dict[str, str] = {}

    def claim(var: str, what: str) -> str:
        if var in used:
            raise StubError(f"fresh variable {var!r} for {what} clashes with {used[var]}")
        used[var] = what
        return var

    claim(flow.name, "the flow tail")
    for fn in stub.inputs:
        claim(enable(fn.name), f"function {fn.name}")
        claim(args(fn.name), f"arguments of {fn.name}")
    for s in stub.salvos:
        claim(extra(s.name), f"salvo {s.name}")

    in_elems: dict[int, list] = {1: []}
    for fn in stub.inputs:
        elem = Element(fn.name, _message(fn.params, args(fn.name)), BVar(enable(fn.name)))
        in_elems.setdefault(fn.port, []).append(elem)
    out_elems: dict[int, list] = {1: []}
    for s in stub.salvos:
        guard = disj(*(BVar(enable(c)) for c in s.callers))
        out_elems.setdefault(s.port, []).append(Element(s.name, _message(s.params, extra(s.name)), guard))

    def iface(port, elems):
        return Choice(tuple(elems), flow if port == 1 else None)

    intra = []
    for fn in stub.inputs:
        for s in stub.salvos:
            if fn.name in s.callers:
                intra.append((Var(args(fn.name)), Var(extra(s.name))))
    return DerivedService(
        stub.name,
        {p: iface(p, e) for p, e in sorted(in_elems.items())},
        {p: iface(p, e) for p, e in sorted(out_elems.items())},
        tuple(intra),
    )


# --------------------------------------------------------------------------
# Shell

_SHELL_RE = re.compile(r"shell\s+(\S+)\Z")
_MERGE_RE = re.compile(r"merge\s+(.+?)\s*->\s*in\s+(\S+)\Z")
_ROUTE_RE = re.compile(r"route\s+out\s+(\S+)\s*->\s*(\S+)(?:\s+rename\s+(.+))?\Z")


def parse_shell(text: str) -> ShellSpec:
    service = None
    merges: dict[int, tuple[int, ...]] = {}
    routes: list[Route] = []
    for lineno, line in _content_lines(text):
        if m := _SHELL_RE.match(line):
            service = m.group(1)
        elif m := _MERGE_RE.match(line):
            core = _port(m.group(2), lineno)
            chans = tuple(_port(c.strip(), lineno) for c in m.group(1).split(","))
            if core in merges:
                raise StubError(f"line {lineno}: core input port {core} merged twice")
            merges[core] = chans
        elif m := _ROUTE_RE.match(line):
            renames = []
            if m.group(3):
                for pair in m.group(3).split(","):
                    old, sep, new = (x.strip() for x in pair.partition("="))
                    if not sep or not is_identifier(old) or not is_identifier(new):
                        raise StubError(f"line {lineno}: bad rename {pair.strip()!r}, expected old=new")
                    renames.append((old, new))
            olds = [o for o, _ in renames]
            news = [n for _, n in renames]
            if len(set(olds)) != len(olds) or len(set(news)) != len(news):
                raise StubError(f"line {lineno}: rename map is not injective")
            routes.append(Route(_port(m.group(1), lineno), _port(m.group(2), lineno), tuple(renames)))
        else:
            raise StubError(f"line {lineno}: cannot parse {line!r}")
    return ShellSpec(service, merges, tuple(routes))


def _rename_top(t: Term, renames: dict[str, str]) -> Term:
    if not isinstance(t, Choice):
        raise StubError("shell renaming applies to choice interfaces only")
    missing = sorted(set(renames) - t.labels)
    if missing:
        raise StubError(f"rename of label(s) {', '.join(missing)} absent from the core interface")
    elems = tuple(Element(renames.get(e.label, e.label), e.term, e.guard) for e in t.elements)
    try:
        return Choice(elems, t.tail)
    except DuplicateLabelError as err:
        raise StubError(f"renaming produces duplicate label {err.label!r}") from None


def apply_shell(d: DerivedService, sh: ShellSpec) -> DerivedService:
    if sh.service is not None and sh.service != d.name:
        raise StubError(f"shell is for service {sh.service!r}, not {d.name!r}")

    inputs: dict[int, Term] = {}

    def put(table, ch, term, what):
        if ch in table:
            raise StubError(f"external {what} channel {ch} assigned twice")
        table[ch] = term

    for core, chans in sorted(sh.input_merges.items()):
        if core not in d.input_ifaces:
            raise StubError(f"merge targets unknown core input port {core}")
        for ch in chans:
            put(inputs, ch, d.input_ifaces[core], "input")
    for core, term in sorted(d.input_ifaces.items()):
        if core not in sh.input_merges:
            put(inputs, core, term, "input")

    outputs: dict[int, Term] = {}
    routed = set()
    for r in sh.output_routes:
        if r.core_port not in d.output_ifaces:
            raise StubError(f"route from unknown core output port {r.core_port}")
        routed.add(r.core_port)
        put(outputs, r.channel, _rename_top(d.output_ifaces[r.core_port], dict(r.renames)), "output")
    for core, term in sorted(d.output_ifaces.items()):
        if core not in routed:
            put(outputs, core, term, "output")

    return DerivedService(
        d.name,
        dict(sorted(inputs.items())),
        dict(sorted(outputs.items())),
        d.intra_constraints,
    )
