import pytest
from hypothesis import given, settings

from mdlconf.errors import (
    DuplicateLabelError,
    KindMismatchError,
    LabelCollisionError,
    UncoveredVariableError,
)
from mdlconf.syntax import parse_term
from mdlconf.terms import (
    NIL,
    Choice,
    Element,
    Record,
    Substitution,
    Symbol,
    depth,
    free_vars,
    ground,
    is_ground,
    strip,
)

from strategies import ground_terms

AS_OUT = parse_term(
    """(: request: {title: $a},
          payment: {title: $a, money: int, id: int},
          share(x): {title: $a, money: int},
          suggest(y): {title: $a} :)"""
)


def test_free_vars():
    assert free_vars(NIL) == (frozenset(), frozenset())
    assert free_vars(AS_OUT) == ({"a"}, {"x", "y"})
    assert free_vars(parse_term("{p: int | $t}")) == ({"t"}, set())


def test_duplicate_labels_rejected_on_construction():
    with pytest.raises(DuplicateLabelError):
        Record((Element("a", Symbol("int")), Element("a", Symbol("int"))))


def test_element_order_does_not_affect_equality():
    assert parse_term("{a: int, b: string}") == parse_term("{b: string, a: int}")
    assert hash(parse_term("(: a: int, b: {} :)")) == hash(parse_term("(: b: {}, a: int :)"))


def test_false_guard_removes_element():
    s = Substitution({"x": True, "y": False}, {"a": Symbol("string")})
    out = ground(AS_OUT, s)
    assert out.labels == {"request", "payment", "share"}
    assert out.get("request").term == parse_term("{title: string}")


def test_tail_splicing():
    t = parse_term("(: response: {title: string} | $b :)")
    s = Substitution({}, {"b": parse_term("(: share: {title: string, money: int} :)")})
    assert ground(t, s) == parse_term(
        "(: response: {title: string}, share: {title: string, money: int} :)"
    )


def test_record_tail_splicing_in_nested_position():
    t = parse_term("(: m: {x: int | $r} :)")
    s = Substitution({}, {"r": parse_term("{author: string}")})
    assert ground(t, s) == parse_term("(: m: {author: string, x: int} :)")


def test_kind_mismatch():
    with pytest.raises(KindMismatchError):
        ground(parse_term("{a: int | $t}"), Substitution({}, {"t": parse_term("(: :)")}))


def test_label_collision():
    with pytest.raises(LabelCollisionError) as err:
        ground(parse_term("{a: int | $t}"), Substitution({}, {"t": parse_term("{a: int}")}))
    assert err.value.label == "a" and err.value.var == "t"


def test_collision_with_removed_element_is_allowed():
    t = parse_term("{a(x): int | $t}")
    out = ground(t, Substitution({"x": False}, {"t": parse_term("{a: string}")}))
    assert out == parse_term("{a: string}")


def test_uncovered_variables():
    with pytest.raises(UncoveredVariableError):
        ground(parse_term("{a: $v}"), Substitution())
    with pytest.raises(UncoveredVariableError) as err:
        ground(parse_term("{a(x): int}"), Substitution())
    assert err.value.kind == "boolean"


def test_ground_term_is_unchanged():
    t = parse_term("(: a: {b: int}, c: string :)")
    assert ground(t, Substitution()) == t


def test_depth_convention():
    assert depth(Symbol("int")) == 1
    assert depth(NIL) == 1
    assert depth(parse_term("{a: int}")) == 2
    assert depth(parse_term("(: a: {b: int} :)")) == 3


@settings(max_examples=200)
@given(ground_terms)
def test_ground_is_idempotent(t):
    once = ground(t, Substitution())
    assert ground(once, Substitution()) == once
    assert is_ground(once)
    assert strip(once) == once
