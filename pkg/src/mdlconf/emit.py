"""Per-service configuration files from a solution.

For every guard variable of a service a ``BV_<name>`` switch is written; for
every record tail variable two text fragments are written, one for
parameter declarations and one for argument lists::

    BV_Seller_payment = false
    TV_Seller_request_in_decl = ", string author"
    TV_Seller_request_in_use = ", author"
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .derivation import DerivedService
from .errors import EmitError, UncoveredVariableError
from .solver import Solution
from .terms import Record, Symbol, free_vars, strip, tail_kinds


@dataclass(frozen=True)
class ServiceConfig:
    service: str
    bool_defs: dict[str, bool] = field(default_factory=dict)
    tail_decl_texts: dict[str, str] = field(default_factory=dict)
    tail_use_texts: dict[str, str] = field(default_factory=dict)


def _service_terms(d: DerivedService):
    yield from d.input_ifaces.values()
    yield from d.output_ifaces.values()
    for a, b in d.intra_constraints:
        yield a
        yield b


def emit_config(d: DerivedService, s: Solution) -> ServiceConfig:
    booleans: set = set()
    term_vars: set = set()
    record_tails: set = set()
    for t in _service_terms(d):
        fv = free_vars(t)
        booleans |= fv.booleans
        term_vars |= fv.terms
        for v, classes in tail_kinds(t).items():
            if Record in classes:
                record_tails.add(v)
    # intra constraints link tails, so a bare variable inherits its partner's kind
    for a, b in d.intra_constraints:
        if a.name in record_tails or b.name in record_tails:
            record_tails |= {a.name, b.name}

    bool_defs = {}
    for b in sorted(booleans):
        if b not in s.booleans:
            raise UncoveredVariableError(b, "boolean")
        bool_defs[b] = bool(s.booleans[b])

    decl, use = {}, {}
    for v in sorted(record_tails):
        if v not in s.terms:
            raise UncoveredVariableError(v)
        value = strip(s.terms[v])
        if not isinstance(value, Record):
            raise EmitError(f"tail ${v} of service {d.name} is instantiated to a non-record")
        parts_decl, parts_use = [], []
        for e in value.sorted_elements():
            if not isinstance(e.term, Symbol):
                raise EmitError(f"field {e.label!r} of ${v} is not a symbol and cannot be emitted")
            parts_decl.append(f", {e.term.name} {e.label}")
            parts_use.append(f", {e.label}")
        decl[v] = "".join(parts_decl)
        use[v] = "".join(parts_use)
    return ServiceConfig(d.name, bool_defs, decl, use)


def render_cfg(cfg: ServiceConfig) -> str:
    lines = [f"BV_{k} = {'true' if v else 'false'}" for k, v in cfg.bool_defs.items()]
    for v, text in cfg.tail_decl_texts.items():
        lines.append(f'TV_{v}_decl = "{text}"')
    for v, text in cfg.tail_use_texts.items():
        lines.append(f'TV_{v}_use = "{text}"')
    return "".join(f"{line}\n" for line in sorted(lines))


def render_header(cfg: ServiceConfig) -> str:
    guard = f"{cfg.service.upper()}_CONFIG_HPP"
    lines = [f"#ifndef {guard}", f"#define {guard}"]
    lines += [f"#define BV_{k}" for k, v in sorted(cfg.bool_defs.items()) if v]
    defs = [f"#define TV_{v}_decl {t}" for v, t in cfg.tail_decl_texts.items()]
    defs += [f"#define TV_{v}_use {t}" for v, t in cfg.tail_use_texts.items()]
    lines += sorted(defs)
    lines.append("#endif")
    return "\n".join(lines) + "\n"


def parse_cfg(text: str) -> dict[str, str | bool]:
    out: dict[str, str | bool] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        key, sep, value = (x.strip() for x in line.partition("="))
        if not sep:
            raise EmitError(f"line {lineno}: expected 'KEY = value'")
        if value in ("true", "false"):
            out[key] = value == "true"
        elif len(value) >= 2 and value[0] == value[-1] == '"':
            out[key] = value[1:-1]
        else:
            raise EmitError(f"line {lineno}: bad value {value!r}")
    return out
