from __future__ import annotations

import random
from itertools import combinations

from hypothesis import given, settings
from hypothesis import strategies as st

from ccslm.equivalence import (
    CongruenceConfig,
    CongruenceOracle,
    Partition,
    Tristate,
    congruent,
    strong_bisim,
    weak_bisim,
)
from ccslm.parser import parse_strict
from ccslm.statespace import LTS, explore, explore_multi
from ccslm.terms import action_key

from gen import make_random_lts, make_strategic_lts


def naive_strong_bisim(lts: LTS, full_labels: bool = False) -> set[tuple[int, int]]:
    """Greatest-fixpoint oracle: start from all pairs, peel off violations."""
    from ccslm.semantics import strategic_label_key

    def key(t):
        return strategic_label_key(t.label) if full_labels else action_key(t.label.action)

    n = len(lts.states)
    related = {(p, q) for p in range(n) for q in range(n)}
    changed = True
    while changed:
        changed = False
        for p, q in sorted(related):
            ok = True
            for t in lts.outgoing(p):
                if not any(
                    key(u) == key(t) and (t.target, u.target) in related
                    for u in lts.outgoing(q)
                ):
                    ok = False
                    break
            if ok:
                for u in lts.outgoing(q):
                    if not any(
                        key(t) == key(u) and (u.target, t.target) in related
                        for t in lts.outgoing(p)
                    ):
                        ok = False
                        break
            if not ok:
                related.discard((p, q))
                related.discard((q, p))
                changed = True
    return related


def partition_pairs(partition: Partition) -> set[tuple[int, int]]:
    out = set()
    for block in partition.blocks:
        for p in block:
            for q in block:
                out.add((p, q))
    return out


def test_duplicate_summand_bisimilar():
    prog = parse_strict("main = a.0_0 + a.0_0")
    other = parse_strict("main = a.0_0")
    lts, roots = explore_multi(prog, [prog.entry, other.entry])
    assert congruent(lts, roots[0], roots[1]) is Tristate.YES


def test_baseline_tau_targets_not_bisimilar(baseline_program):
    lts = explore(baseline_program)
    taus = [t for t in lts.outgoing(lts.initial)]
    assert len(taus) == 2
    assert congruent(lts, taus[0].target, taus[1].target) is Tristate.NO


@given(st.integers(0, 10**9))
@settings(max_examples=60, deadline=None)
def test_refinement_matches_naive_fixpoint(seed):
    lts = make_random_lts(random.Random(seed), max_states=14)
    partition = strong_bisim(lts)
    assert partition_pairs(partition) == naive_strong_bisim(lts)


@given(st.integers(0, 10**9))
@settings(max_examples=40, deadline=None)
def test_refinement_matches_naive_fixpoint_full_labels(seed):
    lts = make_strategic_lts(random.Random(seed), max_states=10)
    partition = strong_bisim(lts, CongruenceConfig(label_mode="full-strategic"))
    assert partition_pairs(partition) == naive_strong_bisim(lts, full_labels=True)


def test_weak_absorbs_tau():
    prog = parse_strict("main = tau.a.0_0")
    other = parse_strict("main = a.0_0")
    lts, roots = explore_multi(prog, [prog.entry, other.entry])
    assert CongruenceOracle(lts, CongruenceConfig(relation="weak")).congruent(*roots) is Tristate.YES
    assert CongruenceOracle(lts).congruent(*roots) is Tristate.NO  # but not strongly


@given(st.integers(0, 10**9))
@settings(max_examples=40, deadline=None)
def test_strong_refines_weak(seed):
    lts = make_random_lts(random.Random(seed), max_states=12)
    strong = strong_bisim(lts)
    weak = weak_bisim(lts)
    for block in strong.blocks:
        members = sorted(block)
        for p, q in combinations(members, 2):
            assert weak.same_block(p, q)


@given(st.integers(0, 10**9))
@settings(max_examples=40, deadline=None)
def test_full_labels_refine_action_only(seed):
    lts = make_strategic_lts(random.Random(seed), max_states=12)
    coarse = strong_bisim(lts)
    fine = strong_bisim(lts, CongruenceConfig(label_mode="full-strategic"))
    for block in fine.blocks:
        members = sorted(block)
        for p, q in combinations(members, 2):
            assert coarse.same_block(p, q)


@given(st.integers(0, 10**9))
@settings(max_examples=40, deadline=None)
def test_partition_is_a_partition(seed):
    lts = make_random_lts(random.Random(seed), max_states=15)
    partition = strong_bisim(lts)
    seen = set()
    for block in partition.blocks:
        assert block, "blocks are nonempty"
        assert not (block & seen), "blocks are disjoint"
        seen |= block
    assert seen == set(range(len(lts.states)))


def test_congruent_reflexive(store_program):
    lts = explore(store_program)
    assert congruent(lts, 0, 0) is Tristate.YES


def test_store_states_differ(store_defs_program):
    lts = explore(store_defs_program)
    assert congruent(lts, 0, 1) is Tristate.NO  # S has r/w, the written store only the tick


def test_truncated_exploration_is_inconclusive():
    prog = parse_strict("P = a.(P | P); main = P | P")
    lts = explore(prog, bound=10)
    assert not lts.complete
    oracle = CongruenceOracle(lts)
    answer = oracle.congruent(0, 1)
    assert answer is Tristate.INCONCLUSIVE
    assert oracle.saw_inconclusive


def test_weak_config_forbids_full_labels():
    import pytest

    with pytest.raises(ValueError):
        CongruenceConfig(relation="weak", label_mode="full-strategic")
