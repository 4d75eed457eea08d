import pytest
from hypothesis import given, settings

from mdlconf.errors import DuplicateLabelError, MdlSyntaxError
from mdlconf.syntax import parse_guard, parse_term, render_guard, render_term
from mdlconf.terms import NIL, TRUE, BVar, Choice, Element, Or, Record, Symbol, Var, conj, disj, neg

from strategies import guards, terms


def test_empty_record_is_nil():
    assert parse_term("{}") == NIL
    assert render_term(NIL) == "{}"


def test_choice_with_tail():
    t = parse_term("(: request: {title: string}, payment: {title: string, money: int} | $b :)")
    assert isinstance(t, Choice)
    assert t.labels == {"request", "payment"}
    assert t.tail == Var("b")
    assert t.get("payment").term == Record(
        (Element("title", Symbol("string")), Element("money", Symbol("int")))
    )


def test_guarded_element():
    t = parse_term("(: error(x || y): {msg: string | $f} :)")
    e = t.get("error")
    assert e.guard == Or((BVar("x"), BVar("y")))
    assert e.term.tail == Var("f")


def test_omitted_guard_is_true():
    assert parse_term("{a: int}").get("a").guard == TRUE


def test_unicode_connectives():
    assert parse_guard("x ∨ ¬y ∧ z") == parse_guard("x || !y && z")


def test_render_sorts_labels():
    t = Record((Element("b", Symbol("int")), Element("a", Symbol("string"))))
    assert render_term(t) == "{a: string, b: int}"


@pytest.mark.parametrize(
    "text",
    ["{a: int | $t}", "{| $t}", "(: :)", "(: | $c :)", "(: l(x && !y): {} | $c :)", "$v", "int"],
)
def test_canonical_forms_are_fixpoints(text):
    assert render_term(parse_term(text)) == text


def test_comments_and_whitespace():
    assert parse_term("{ a : int  # field\n , b: string }") == parse_term("{a: int, b: string}")


def test_duplicate_label_reports_position():
    with pytest.raises(DuplicateLabelError) as err:
        parse_term("{a: int,\n a: string}")
    assert err.value.label == "a"
    assert err.value.line == 2


@pytest.mark.parametrize("text", ["{a int}", "(: a: int", "{a: int} extra", "{a: $}", "(: a(x ||): int :)", ""])
def test_syntax_errors_have_line_and_column(text):
    with pytest.raises(MdlSyntaxError) as err:
        parse_term(text)
    assert err.value.line >= 1 and err.value.column >= 1


def test_guard_rendering_uses_minimal_parentheses():
    x, y, z = BVar("x"), BVar("y"), BVar("z")
    assert render_guard(disj(x, conj(y, z))) == "x || y && z"
    assert render_guard(conj(x, disj(y, z))) == "x && (y || z)"
    assert render_guard(neg(disj(x, y))) == "!(x || y)"


@settings(max_examples=300)
@given(terms())
def test_round_trip(t):
    assert parse_term(render_term(t)) == t


@settings(max_examples=200)
@given(guards())
def test_guard_round_trip(g):
    assert parse_guard(render_guard(g)) == g
