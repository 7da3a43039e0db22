"""Coherence checking: observability, independence and the Diamond Property,
plus the classical determinacy/confluence baselines they generalise.

All checks run over a bounded exploration; the reachable state set is
exactly the derivative closure, so checking every state realises the usual
co-inductive argument ("exhibit a derivation-closed class and check each
member").  Verdicts are sound: a positive answer is never produced from a
truncated exploration or an inconclusive congruence query.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .analysis import well_formed
from .equivalence import CongruenceConfig, CongruenceOracle, Tristate, saturate
from .semantics import Transition, blocked_set, blocking_leq, prediction_leq
from .statespace import LTS, explore
from .terms import (
    Chan,
    Clock,
    CoChan,
    H1,
    Program,
    Tau,
    action_key,
    format_action,
    is_visible,
)


@dataclass(frozen=True)
class Violation:
    kind: str  # "not-observable" | "no-reconvergence" | "monotonicity-failed"
    state: int
    pair: tuple[Transition, Transition]
    detail: str


@dataclass
class CoherenceReport:
    verdict: str  # "coherent" | "incoherent" | "inconclusive"
    violations: list[Violation]
    states_checked: int


def _rendezvous_or_tau(action) -> bool:
    return isinstance(action, (Chan, CoChan, Tau))


def observable_violations(
    lts: LTS,
    cfg: Optional[CongruenceConfig] = None,
    oracle: Optional[CongruenceOracle] = None,
) -> list[Violation]:
    """Competing visible transitions must predict each other within the tick.

    A pair competes when the actions differ or the targets are not congruent;
    silent pairs are exempt (tau races to non-congruent states are allowed),
    and so are mixed visible/silent pairs, since the condition quantifies
    over label pairs only.
    """
    if oracle is None:
        oracle = CongruenceOracle(lts, cfg)
    violations: list[Violation] = []
    for sid in range(len(lts.states)):
        out = lts.outgoing(sid)
        for i, t1 in enumerate(out):
            for t2 in out[i + 1 :]:
                a1, a2 = t1.label.action, t2.label.action
                if not (is_visible(a1) and is_visible(a2)):
                    continue
                if a1 == a2:
                    answer = oracle.congruent(t1.target, t2.target)
                    if answer is Tristate.YES:
                        continue
                    in_scope = answer is Tristate.NO
                else:
                    in_scope = True
                ok = a1 in t2.label.prediction.at_h1 and a2 in t1.label.prediction.at_h1
                if ok:
                    continue
                if in_scope:
                    violations.append(
                        Violation(
                            "not-observable",
                            sid,
                            (t1, t2),
                            f"competing actions {format_action(a1)} and {format_action(a2)} "
                            "do not predict each other within the clock horizon",
                        )
                    )
                # else: congruence inconclusive; the oracle has recorded it
    return violations


def _independence(
    t1: Transition, t2: Transition, oracle: CongruenceOracle
) -> Tristate:
    """Independence of a same-source pair (a pair may be a transition with itself).

    Independent pairs are the ones the priority scheme does not already
    serialize: either neither blocks the other inside the tick, or they are
    equal-action transitions that genuinely diverge.  Clock transitions pair
    only with themselves; mixed clock/non-clock races are never independent.
    """
    a1, a2 = t1.label.action, t2.label.action
    both_clock = isinstance(a1, Clock) and isinstance(a2, Clock)
    if not (both_clock or (_rendezvous_or_tau(a1) and _rendezvous_or_tau(a2))):
        return Tristate.NO
    silent_pair = isinstance(a1, Tau) and isinstance(a2, Tau)
    if not silent_pair:
        if a1 not in blocked_set(t2.label.blocking, H1) and a2 not in blocked_set(
            t1.label.blocking, H1
        ):
            return Tristate.YES
    if a1 == a2:
        answer = oracle.congruent(t1.target, t2.target)
        if answer is Tristate.NO:
            return Tristate.YES
        if answer is Tristate.INCONCLUSIVE:
            return Tristate.INCONCLUSIVE
    return Tristate.NO


def independent(
    t1: Transition,
    t2: Transition,
    lts: LTS,
    cfg: Optional[CongruenceConfig] = None,
) -> bool:
    """Boolean view of independence (inconclusive counts as not independent)."""
    if t1.source != t2.source:
        raise ValueError("independence is defined for transitions from one state")
    return _independence(t1, t2, CongruenceOracle(lts, cfg)) is Tristate.YES


def _search_reconvergence(
    t1: Transition, t2: Transition, lts: LTS, oracle: CongruenceOracle
) -> tuple[bool, bool, bool]:
    """Look for the closing square of an independent divergence.

    Returns (found, mono_failed_only, inconclusive): the second flag is set
    when a congruent reconvergence exists but every one breaks the label
    monotonicity constraints; the third when truncation hid the answer.
    """

    def mono_ok(u: Transition, original: Transition) -> bool:
        if not blocking_leq(u.label.blocking, original.label.blocking):
            return False
        if isinstance(original.label.action, (Chan, CoChan)):
            if not prediction_leq(u.label.prediction, original.label.prediction):
                return False
        return True

    a1, a2 = t1.label.action, t2.label.action
    candidates1 = [u for u in lts.outgoing(t1.target) if u.label.action == a2]
    candidates2 = [u for u in lts.outgoing(t2.target) if u.label.action == a1]
    congruent_but_not_mono = False
    inconclusive = False
    for u1 in candidates1:
        for u2 in candidates2:
            answer = oracle.congruent(u1.target, u2.target)
            if answer is Tristate.NO:
                continue
            mono = mono_ok(u1, t2) and mono_ok(u2, t1)
            if answer is Tristate.YES and mono:
                return True, False, False
            if answer is Tristate.YES:
                congruent_but_not_mono = True
            elif mono:
                inconclusive = True
    if not lts.complete and not lts.expanded[t1.target]:
        inconclusive = True
    if not lts.complete and not lts.expanded[t2.target]:
        inconclusive = True
    return False, congruent_but_not_mono, inconclusive


def diamond_violations(
    state: int,
    lts: LTS,
    cfg: Optional[CongruenceConfig] = None,
    oracle: Optional[CongruenceOracle] = None,
    inconclusive_sink: Optional[list[bool]] = None,
) -> list[Violation]:
    """Every independent divergence from a state must close monotonically.

    Pairs include each transition against itself: a one-shot prefix that is
    not self-blocking competes with itself for a single partner and must be
    repeatable to be coherent.
    """
    lts.check_state(state)
    if oracle is None:
        oracle = CongruenceOracle(lts, cfg)
    violations: list[Violation] = []
    out = lts.outgoing(state)
    for i, t1 in enumerate(out):
        for t2 in out[i:]:
            verdict = _independence(t1, t2, oracle)
            if verdict is Tristate.NO:
                continue
            found, mono_only, inconclusive = _search_reconvergence(t1, t2, lts, oracle)
            if found:
                continue
            if verdict is Tristate.INCONCLUSIVE or inconclusive:
                if inconclusive_sink is not None:
                    inconclusive_sink.append(True)
                continue
            a1 = format_action(t1.label.action)
            a2 = format_action(t2.label.action)
            if mono_only:
                violations.append(
                    Violation(
                        "monotonicity-failed",
                        state,
                        (t1, t2),
                        f"the {a1}/{a2} divergence reconverges only with more "
                        "blocking or a wider prediction",
                    )
                )
            else:
                violations.append(
                    Violation(
                        "no-reconvergence",
                        state,
                        (t1, t2),
                        f"independent divergence on {a1} and {a2} has no reconvergence",
                    )
                )
    return violations


def check_coherence(
    program: Program,
    bound: Optional[int] = None,
    cfg: Optional[CongruenceConfig] = None,
) -> CoherenceReport:
    """Explore the program and check observability plus the Diamond Property
    on every reachable derivative."""
    problems = well_formed(program)
    if problems:
        raise ValueError(
            "program is not well-formed: " + "; ".join(d.render() for d in problems)
        )
    lts = explore(program, bound)
    oracle = CongruenceOracle(lts, cfg)
    inconclusive_sink: list[bool] = []
    violations = observable_violations(lts, cfg, oracle)
    for sid in range(len(lts.states)):
        violations.extend(
            diamond_violations(sid, lts, cfg, oracle, inconclusive_sink)
        )
    violations.sort(key=lambda v: (v.state, v.kind, v.detail))
    if violations:
        verdict = "incoherent"
    elif not lts.complete or oracle.saw_inconclusive or inconclusive_sink:
        verdict = "inconclusive"
    else:
        verdict = "coherent"
    return CoherenceReport(verdict, violations, len(lts.states))


# ---------------------------------------------------------------------------
# Classical baselines

def _edges_for_mode(lts: LTS, mode: str):
    if mode == "weak":
        return saturate(lts)
    edges = [[] for _ in lts.states]
    for t in lts.transitions:
        edges[t.source].append((action_key(t.label.action), t.target))
    return edges


def _oracle_for_mode(lts: LTS, cfg: Optional[CongruenceConfig], mode: str) -> CongruenceOracle:
    if cfg is None:
        cfg = CongruenceConfig(relation=mode)
    return CongruenceOracle(lts, cfg)


def milner_determinate(
    lts: LTS, cfg: Optional[CongruenceConfig] = None, mode: str = "strong"
) -> bool:
    """Same-action transitions from any derivative lead to congruent states.

    mode picks the transition relation (strong edges or weak saturation);
    the congruence defaults to the matching bisimilarity.  Inconclusive
    congruence answers count as failure.
    """
    oracle = _oracle_for_mode(lts, cfg, mode)
    for sid, out in enumerate(_edges_for_mode(lts, mode)):
        by_action: dict = {}
        for key, target in out:
            by_action.setdefault(key, []).append(target)
        for targets in by_action.values():
            first = targets[0]
            for other in targets[1:]:
                if oracle.congruent(first, other) is not Tristate.YES:
                    return False
    return True


def milner_confluent(
    lts: LTS, cfg: Optional[CongruenceConfig] = None, mode: str = "strong"
) -> bool:
    """Determinacy plus reconvergence of every distinctly-labelled divergence."""
    if not milner_determinate(lts, cfg, mode):
        return False
    oracle = _oracle_for_mode(lts, cfg, mode)
    edges = _edges_for_mode(lts, mode)
    for sid, out in enumerate(edges):
        for i, (k1, q1) in enumerate(out):
            for k2, q2 in out[i + 1 :]:
                if k1 == k2:
                    continue
                closed = False
                for k1b, q1b in edges[q1]:
                    if k1b != k2:
                        continue
                    for k2b, q2b in edges[q2]:
                        if k2b != k1:
                            continue
                        if oracle.congruent(q1b, q2b) is Tristate.YES:
                            closed = True
                            break
                    if closed:
                        break
                if not closed:
                    return False
    return True
