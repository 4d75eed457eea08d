import pytest

from mdlconf.brute import Universe, brute_solve
from mdlconf.constraints import Constraint, ConstraintSet, Origin, generate, load_topology, parse_constraints
from mdlconf.errors import UncoveredVariableError, UniverseTooLarge
from mdlconf.pipeline import load_service_dir
from mdlconf.seniority import leq
from mdlconf.solver import (
    Diverged,
    Sat,
    Solution,
    SolverConfig,
    Unsat,
    bound_trace,
    necessary_conditions,
    parse_solution,
    render_solution,
    solve,
    verify,
)
from mdlconf.syntax import parse_term, render_guard
from mdlconf.terms import NIL, Symbol

from conftest import FIXTURES
from random_instances import instance

P = parse_term


def channel(junior, senior, n=1):
    return Constraint(P(junior), P(senior), Origin("channel", n, f"A.out{n} -> B.in{n}"))


def three_buyer():
    tb = FIXTURES / "three_buyer"
    return generate(load_topology((tb / "app.topo").read_text()), load_service_dir(tb))


def test_identical_interfaces():
    v = solve(ConstraintSet.of([channel("(: f: {a: int} :)", "(: f: {a: int} :)")]))
    assert v == Sat(Solution({}, {}))


def test_label_mismatch_names_the_channel():
    v = solve(ConstraintSet.of([channel("(: f: {a: int} :)", "(: g: {a: int} :)", 3)]))
    assert isinstance(v, Unsat)
    assert [o.channel for o in v.explanation] == [3]


def test_symbol_hole():
    cs = ConstraintSet.of([channel("{a: int}", "{a: string}")])
    assert isinstance(solve(cs), Unsat)
    assert isinstance(brute_solve(cs), Unsat)


def test_explanation_is_minimal():
    cs = ConstraintSet.of(
        [
            channel("(: f: {} :)", "(: f: {} :)", 1),
            channel("{a: int}", "{a: $v}", 2),
            channel("{a: $v}", "{a: string}", 3),
            channel("(: g(p): {} :)", "(: g(p): {} :)", 4),
        ]
    )
    v = solve(cs)
    assert isinstance(v, Unsat)
    assert [o.channel for o in v.explanation] == [2, 3]


def test_guard_disables_offending_element():
    cs = ConstraintSet.of([channel("(: f: {}, g(p): {} :)", "(: f: {} :)")])
    assert solve(cs) == Sat(Solution({"p": False}, {}))


def test_three_buyer_solution():
    cs = three_buyer()
    v = solve(cs)
    assert isinstance(v, Sat)
    s = v.solution
    assert s.booleans == {"x": True, "y": False, "z": True}
    assert s.terms["b"] == P("(: share: {title: string, money: int} :)")
    assert s.terms["a"] == Symbol("string")
    assert verify(cs, s).ok


def test_flipping_y_breaks_the_suggest_path():
    cs = three_buyer()
    s = solve(cs).solution
    bad = Solution({**s.booleans, "y": True}, s.terms)
    ok, failures = verify(cs, bad)
    assert not ok
    assert str(failures[0]) == "channel 1 Alice.out1 -> Seller.in1"


def test_verify_empty_and_uncovered():
    assert verify(ConstraintSet.of([]), Solution()).ok
    with pytest.raises(UncoveredVariableError):
        verify(ConstraintSet.of([channel("{a: $v}", "{}")]), Solution())


def test_verify_counts_grounding_errors_as_failures():
    cs = ConstraintSet.of([channel("{a: int | $t}", "{}")])
    ok, failures = verify(cs, Solution({}, {"t": P("{a: int}")}))
    assert not ok and len(failures) == 1


def test_recursive_tail_diverges():
    cs = ConstraintSet.of([channel("(: p: (: q: int | $c :) :)", "$c")])
    assert isinstance(solve(cs), Diverged)


def test_round_limit():
    cs = ConstraintSet.of([channel("{a: int}", "$v"), channel("$v", "$w", 2)])
    assert isinstance(solve(cs), Sat)
    assert solve(cs, SolverConfig(max_rounds=1)) == Diverged(1)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(max_rounds=0)
    with pytest.raises(ValueError):
        SolverConfig(variable_order="random")


def test_prefer_true_off_still_sound():
    cs = three_buyer()
    v = solve(cs, SolverConfig(prefer_true=False))
    assert isinstance(v, Sat) and verify(cs, v.solution).ok


def test_necessary_conditions():
    conds = necessary_conditions(P("(: a(p): {}, b(q): {} :)"), P("(: a(r): {} :)"))
    assert sorted(render_guard(c) for c in conds) == ["!p || r", "!q"]
    conds = necessary_conditions(P("{a(p): int}"), P("{a(q): int, b(r): int}"))
    assert sorted(render_guard(c) for c in conds) == ["!q || p", "!r"]
    # a tail on the open side means nothing is forced
    assert necessary_conditions(P("(: a(p): {} :)"), P("(: | $c :)")) == []


def test_unused_choice_tail_defaults_to_empty_choice():
    cs = ConstraintSet.of([channel("(: a(p): {} | $c :)", "(: a: {} :)")])
    v = solve(cs)
    assert v.solution.terms["c"] == P("(: :)")


def test_solution_file_round_trip():
    s = solve(three_buyer()).solution
    text = render_solution(s)
    assert text.splitlines()[0] == "bool x = true"
    assert parse_solution(text) == s


def test_brute_universe_guard():
    cs = ConstraintSet.of([channel("{a: $v, b: $w}", "{a: $x}")])
    with pytest.raises(UniverseTooLarge):
        brute_solve(cs, Universe(max_assignments=1000))


def test_brute_solution_verifies():
    cs = ConstraintSet.of([channel("(: a: {x: int} :)", "(: a: {| $r} | $c :)")])
    v = brute_solve(cs)
    assert isinstance(v, Sat) and verify(cs, v.solution).ok


# -- properties over random instances -----------------------------------------

SEEDS = range(200)


def test_sound_and_deterministic_on_random_instances():
    for seed in SEEDS:
        cs, _ = instance(seed)
        first, second = solve(cs), solve(cs)
        assert first == second
        if isinstance(first, Sat):
            assert verify(cs, first.solution).ok
            assert set(first.solution.booleans) == cs.bool_vars
            assert set(first.solution.terms) == cs.term_vars


def test_true_maximality_against_brute_force():
    checked = 0
    for seed in SEEDS:
        cs, u = instance(seed)
        v = solve(cs)
        if not isinstance(v, Sat):
            continue
        order = sorted(cs.bool_vars)
        for i, name in enumerate(order):
            if v.solution.booleans[name]:
                continue
            pins = {n: v.solution.booleans[n] for n in order[:i]}
            pins[name] = True
            assert isinstance(brute_solve(cs, u, pins), Unsat), (seed, name)
            checked += 1
    assert checked > 20


def _monotone(trace):
    for log in trace:
        for (lo1, hi1), (lo2, hi2) in zip(log, log[1:]):
            for v, b in lo1.items():
                assert leq(b, lo2[v])
            for v, b in hi1.items():
                assert leq(hi2[v], b)


def test_bounds_are_monotone():
    _monotone(bound_trace(three_buyer(), {"x": True, "y": False, "z": True}))
    for seed in SEEDS:
        cs, _ = instance(seed)
        for flag in (True, False):
            _monotone(bound_trace(cs, {b: flag for b in cs.bool_vars}))


def test_unbounded_variable_retries_other_neutral_value():
    # $v1 has no bounds; nil would clash with the empty choice joined into $v0's "a"
    cs = ConstraintSet.of([
        channel("(: a: $v1 :)", "(: | $v0 :)", 1),
        channel("(: a: (: :) :)", "(: b: {} | $v0 :)", 2),
    ])
    v = solve(cs)
    assert isinstance(v, Sat)
    assert v.solution.terms["v1"] == P("(: :)")
    assert verify(cs, v.solution).ok
