from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from ccslm.analysis import (
    analyze,
    clk,
    initial_actions,
    prediction_star,
    sort,
    well_formed,
)
from ccslm.parser import parse_strict
from ccslm.terms import (
    CLOCK,
    TAU,
    Chan,
    CoChan,
    H0,
    H1,
    Horizon,
    Label,
    Name,
    Nil,
    Par,
    Prefix,
    Program,
    ProcessTerm,
    Restrict,
    Sum,
)

from gen import make_program


def entry_of(src: str):
    prog = parse_strict(src)
    return prog.entry, prog


def test_sort_collects_actions_and_guards():
    entry, prog = entry_of("main = a.b.sigma.c.0_1 | ~a.0_0")
    assert sort(entry, prog) == {Chan("a"), Chan("b"), CLOCK, Chan("c"), CoChan("a")}


def test_sort_restriction_removes_both_polarities():
    entry, prog = entry_of("main = (a.0_0) \\ {a}")
    assert sort(entry, prog) == frozenset()


def test_sort_recursive_definition():
    prog = parse_strict("P = a.P; main = P")
    assert sort(prog.entry, prog) == {Chan("a")}


def test_sort_includes_guards():
    entry, prog = entry_of("main = a:{w,~r}.0_0")
    assert sort(entry, prog) == {Chan("a"), Chan("w"), CoChan("r")}


def test_clk_examples():
    entry, prog = entry_of("main = 0_1")
    assert clk(entry, prog) is H1
    entry, prog = entry_of("main = ~r.0_1")
    assert clk(entry, prog) is H1
    entry, prog = entry_of("main = a.0_0")
    assert clk(entry, prog) is H0


def test_clk_laws():
    prog = parse_strict("P = sigma:{sigma}.P; main = (a.0_0 | P) \\ {a}")
    par = prog.entry.body
    assert clk(par, prog) is H1
    assert clk(prog.entry, prog) is H1  # restriction keeps the horizon
    assert clk(par.left, prog) is H0
    assert clk(par.right, prog) is H1


def test_guards_do_not_count_for_clk():
    entry, prog = entry_of("main = a:{sigma}.0_0")
    assert clk(entry, prog) is H0
    assert CLOCK in sort(entry, prog)  # but they are part of the sort


def test_initial_actions():
    entry, _ = entry_of("main = a.c.0_0 + b.d.0_0")
    assert initial_actions(entry) == {Chan("a"), Chan("b")}
    assert initial_actions(Nil(H1)) == frozenset()
    entry, _ = entry_of("main = tau:{a}.0_0 + a.0_0")
    assert initial_actions(entry) == {TAU, Chan("a")}


def test_prediction_star_cuts_at_clock():
    entry, prog = entry_of("main = a.b.sigma.c.0_1 | ~a.0_0")
    pv = prediction_star(entry, prog)
    assert pv.at_h1 == {Chan("a"), Chan("b"), CLOCK, CoChan("a")}
    assert pv.at_h0 == {Chan("a"), Chan("b"), CLOCK, Chan("c"), CoChan("a")}


def test_prediction_star_nil():
    entry, prog = entry_of("main = 0_0")
    pv = prediction_star(entry, prog)
    assert pv.at_h0 == frozenset() and pv.at_h1 == frozenset()


def test_prediction_star_drops_tau_but_descends():
    entry, prog = entry_of("main = tau.a.0_0")
    pv = prediction_star(entry, prog)
    assert pv.at_h0 == {Chan("a")}


def test_prediction_star_ignores_guards():
    entry, prog = entry_of("main = a:{w}.0_0")
    pv = prediction_star(entry, prog)
    assert pv.at_h0 == {Chan("a")}


def test_well_formed_horizon_mismatch():
    prog = parse_strict("main = a.0_0 + sigma.0_1")
    assert any(d.code == "wf/horizon-mismatch" for d in well_formed(prog))


def test_well_formed_clock_stability():
    prog = parse_strict("main = sigma.0_0")
    assert any(d.code == "wf/clock-stability" for d in well_formed(prog))


def test_well_formed_store_is_clean(store_program):
    assert well_formed(store_program) == []


def test_well_formed_undefined_name():
    prog = parse_strict("main = Missing")
    assert any(d.code == "wf/undefined-name" for d in well_formed(prog))


def test_well_formed_unguarded_recursion():
    prog = parse_strict("P = P | a.0_0; main = P")
    assert any(d.code == "wf/unguarded-recursion" for d in well_formed(prog))
    prog = parse_strict("P = Q; Q = P; main = P")
    assert any(d.code == "wf/unguarded-recursion" for d in well_formed(prog))
    prog = parse_strict("P = a.(P | Q); Q = b.Q; main = P")
    assert well_formed(prog) == []  # prefix-guarded cycles are fine


@given(st.integers(0, 10**9))
@settings(max_examples=200)
def test_prediction_antitone(seed):
    prog = make_program(random.Random(seed))
    if well_formed(prog):
        return
    pv = prediction_star(prog.entry, prog)
    assert pv.at_h1 <= pv.at_h0


@given(st.integers(0, 10**9))
@settings(max_examples=100)
def test_fixpoints_are_stable(seed):
    """One extra Kleene round over the final tables changes nothing."""
    prog = make_program(random.Random(seed))
    if well_formed(prog):
        return
    table = analyze(prog)
    again = {n: table._sort(body, table._sort_names) for n, body in prog.defs.items()}
    assert again == table._sort_names
    again_clk = {n: table._clk(body, table._clk_names) for n, body in prog.defs.items()}
    assert again_clk == table._clk_names
    for cut in (H0, H1):
        again_pred = {
            n: table._pred(body, cut, table._pred_names[cut]) for n, body in prog.defs.items()
        }
        assert again_pred == table._pred_names[cut]


def _bounded_prediction(term: ProcessTerm, cut: Horizon, prog: Program, n: int) -> frozenset[Label]:
    """Direct bounded-unfolding definition: the oracle for the fixpoint."""
    if isinstance(term, Nil):
        return frozenset()
    if isinstance(term, Prefix):
        if term.action == CLOCK and cut is H1:
            return frozenset({CLOCK})
        own = frozenset() if term.action == TAU else frozenset({term.action})
        return own | _bounded_prediction(term.cont, cut, prog, n)
    if isinstance(term, (Sum, Par)):
        return _bounded_prediction(term.left, cut, prog, n) | _bounded_prediction(
            term.right, cut, prog, n
        )
    if isinstance(term, Restrict):
        inner = _bounded_prediction(term.body, cut, prog, n)
        return frozenset(
            l for l in inner if l == CLOCK or l.name not in term.channels
        )
    if isinstance(term, Name):
        if n == 0:
            return frozenset()
        return _bounded_prediction(prog.defs[term.id], cut, prog, n - 1)
    raise TypeError(term)


@given(st.integers(0, 10**9))
@settings(max_examples=100, deadline=None)
def test_prediction_star_agrees_with_bounded_unfolding(seed):
    prog = make_program(random.Random(seed))
    if well_formed(prog):
        return
    pv = prediction_star(prog.entry, prog)
    alphabet_size = len(sort(prog.entry, prog)) + sum(
        len(sort(b, prog)) for b in prog.defs.values()
    )
    enough = (len(prog.defs) + 1) * (alphabet_size + 1)
    for cut, expected in ((H0, pv.at_h0), (H1, pv.at_h1)):
        for n in (0, 1, 2):
            assert _bounded_prediction(prog.entry, cut, prog, n) <= expected
        assert _bounded_prediction(prog.entry, cut, prog, enough) == expected
