"""Hypothesis strategies for guards and terms."""

from hypothesis import strategies as st

from mdlconf.terms import FALSE, TRUE, BVar, Choice, Element, Record, Symbol, Var, conj, disj, neg

LABELS = ("a", "b", "c", "title", "money")
SYMBOLS = ("int", "string")

bool_names = st.sampled_from(("x", "y", "z", "p_1"))
var_names = st.sampled_from(("a", "b", "tail", "v2"))


def guards():
    base = st.one_of(st.just(TRUE), st.just(FALSE), bool_names.map(BVar))
    return st.recursive(
        base,
        lambda inner: st.one_of(
            inner.map(neg),
            st.tuples(inner, inner).map(lambda p: conj(*p)),
            st.tuples(inner, inner).map(lambda p: disj(*p)),
        ),
        max_leaves=5,
    )


def _collection(cls, children, guard_st, tails):
    def build(pairs, tail):
        return cls(tuple(Element(l, t, g) for l, (t, g) in pairs.items()), tail)

    return st.builds(
        build,
        st.dictionaries(st.sampled_from(LABELS), st.tuples(children, guard_st), max_size=3),
        tails,
    )


def terms(ground=False, max_leaves=8):
    """Arbitrary terms; with ``ground`` only symbols, constant-true guards and no tails."""
    leaves = st.sampled_from(SYMBOLS).map(Symbol)
    if not ground:
        leaves = st.one_of(leaves, var_names.map(Var))
    guard_st = st.just(TRUE) if ground else guards()
    tails = st.none() if ground else st.one_of(st.none(), var_names.map(Var))
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            _collection(Record, inner, guard_st, tails),
            _collection(Choice, inner, guard_st, tails),
        ),
        max_leaves=max_leaves,
    )


ground_terms = terms(ground=True)
