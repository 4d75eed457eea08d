import re

import pytest

from mdlconf.constraints import parse_bundle
from mdlconf.derivation import DerivedService, derive_interfaces, parse_stub
from mdlconf.emit import emit_config, parse_cfg, render_cfg, render_header
from mdlconf.errors import EmitError, UncoveredVariableError
from mdlconf.solver import Solution
from mdlconf.syntax import parse_term
from mdlconf.terms import NIL, Var, free_vars

from conftest import FIXTURES

P = parse_term


def seller():
    return derive_interfaces(parse_stub((FIXTURES / "Seller.stub").read_text()))


def seller_solution(**terms):
    d = seller()
    names = set()
    for t in [*d.input_ifaces.values(), *d.output_ifaces.values()]:
        names |= free_vars(t).terms
    values = {n: NIL for n in names}
    values["Seller_flow"] = P("(: :)")
    values.update({k: P(v) for k, v in terms.items()})
    return Solution({"Seller_request": True, "Seller_payment": False}, values)


def test_texts_for_single_field():
    author = "{author: string}"
    cfg = emit_config(seller(), seller_solution(Seller_request_in=author, Seller_response_out=author))
    assert cfg.tail_decl_texts["Seller_request_in"] == ", string author"
    assert cfg.tail_use_texts["Seller_response_out"] == ", author"


def test_empty_record_gives_empty_texts():
    cfg = emit_config(seller(), seller_solution())
    assert cfg.tail_decl_texts["Seller_error_out"] == ""
    assert cfg.tail_use_texts["Seller_error_out"] == ""


def test_fields_are_sorted_by_label():
    cfg = emit_config(seller(), seller_solution(Seller_payment_in="{zip: int, author: string}"))
    assert cfg.tail_decl_texts["Seller_payment_in"] == ", string author, int zip"
    assert cfg.tail_use_texts["Seller_payment_in"] == ", author, zip"


def test_boolean_switches():
    cfg = emit_config(seller(), seller_solution())
    assert cfg.bool_defs == {"Seller_payment": False, "Seller_request": True}
    text = render_cfg(cfg)
    assert "BV_Seller_payment = false\n" in text


def test_choice_tails_get_no_texts():
    cfg = emit_config(seller(), seller_solution())
    assert "Seller_flow" not in cfg.tail_decl_texts


def test_non_record_tail_value():
    with pytest.raises(EmitError, match="non-record"):
        emit_config(seller(), seller_solution(Seller_request_in="(: :)"))


def test_nested_field_cannot_be_emitted():
    with pytest.raises(EmitError, match="not a symbol"):
        emit_config(seller(), seller_solution(Seller_request_in="{author: {name: string}}"))


def test_uncovered_variable():
    with pytest.raises(UncoveredVariableError):
        emit_config(seller(), Solution({}, {}))


def test_intra_partner_inherits_record_kind():
    d = DerivedService("S", {1: P("(: m: {| $a} :)")}, {}, ((Var("a"), Var("d")),))
    cfg = emit_config(d, Solution({}, {"a": P("{k: int}"), "d": P("{k: int}")}))
    assert cfg.tail_use_texts == {"a": ", k", "d": ", k"}


def test_cfg_is_sorted_and_parses_back():
    author = "{author: string}"
    cfg = emit_config(seller(), seller_solution(Seller_request_in=author))
    text = render_cfg(cfg)
    lines = text.splitlines()
    assert lines == sorted(lines)
    parsed = parse_cfg(text)
    assert parsed["TV_Seller_request_in_decl"] == ", string author"
    assert parsed["BV_Seller_request"] is True


def test_decl_and_use_have_equal_arity():
    cfg = emit_config(seller(), seller_solution(Seller_payment_in="{a: int, b: string, c: int}"))
    for v in cfg.tail_decl_texts:
        assert cfg.tail_decl_texts[v].count(",") == cfg.tail_use_texts[v].count(",")


def test_no_orphan_macros():
    d = seller()
    cfg = emit_config(d, seller_solution())
    names = set()
    for t in [*d.input_ifaces.values(), *d.output_ifaces.values()]:
        fv = free_vars(t)
        names |= fv.terms | fv.booleans
    for key in parse_cfg(render_cfg(cfg)):
        name = re.sub(r"^(BV|TV)_", "", key)
        name = re.sub(r"_(decl|use)$", "", name) if key.startswith("TV_") else name
        assert name in names


def test_header():
    cfg = emit_config(seller(), seller_solution(Seller_request_in="{author: string}"))
    text = render_header(cfg)
    assert "#define BV_Seller_request\n" in text
    assert "BV_Seller_payment" not in text
    assert "#define TV_Seller_request_in_decl , string author\n" in text
    assert text.startswith("#ifndef SELLER_CONFIG_HPP\n")


def test_bundle_service_without_tails():
    d = parse_bundle("service Carol\nin1 = (: share: {money: int} :)\n")
    cfg = emit_config(d, Solution())
    assert render_cfg(cfg) == ""
