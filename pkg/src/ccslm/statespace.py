"""Bounded explicit-state exploration and LTS utilities.

Exploration is a deterministic BFS over canonical terms: state numbering
follows discovery order, and discovery order follows the engine's sorted
transition listings, so identical inputs always produce identical state
spaces.  A bound on the state count guards recursion through parallel
composition; hitting it marks the LTS incomplete rather than failing.
"""

from __future__ import annotations

import json
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, TYPE_CHECKING

from .analysis import analyze
from .parser import pretty
from .semantics import Transition, enabled_transitions
from .terms import Program, ProcessTerm, Tau, canonicalize

if TYPE_CHECKING:  # pragma: no cover
    from .equivalence import CongruenceConfig, Tristate

DEFAULT_BOUND = 10_000


def default_bound() -> int:
    """Exploration bound, overridable through the CCSLM_BOUND variable."""
    raw = os.environ.get("CCSLM_BOUND")
    if raw is not None:
        try:
            value = int(raw)
            if value > 0:
                return value
        except ValueError:
            pass
    return DEFAULT_BOUND


@dataclass
class LTS:
    """Explored transition system over canonical, deduplicated states."""

    states: list[ProcessTerm]
    transitions: list[Transition]
    initial: int = 0
    complete: bool = True
    expanded: list[bool] = field(default_factory=list)
    _outgoing: Optional[list[list[Transition]]] = field(default=None, repr=False)

    def outgoing(self, state: int) -> list[Transition]:
        if self._outgoing is None:
            table: list[list[Transition]] = [[] for _ in self.states]
            for t in self.transitions:
                table[t.source].append(t)
            self._outgoing = table
        return self._outgoing[state]

    def check_state(self, state: int) -> None:
        if not 0 <= state < len(self.states):
            raise KeyError(f"unknown state id {state}")


def explore_multi(
    program: Program, entries: list[ProcessTerm], bound: Optional[int] = None
) -> tuple[LTS, list[int]]:
    """BFS closure of several root terms under one program's definitions.

    Returns the LTS plus the state ids of the roots (in input order).  The
    roots share one state table, so syntactically equal roots coincide.
    """
    if bound is None:
        bound = default_bound()
    states: list[ProcessTerm] = []
    index: dict[ProcessTerm, int] = {}
    expanded: list[bool] = []
    transitions: list[Transition] = []
    complete = True
    queue: deque[int] = deque()

    def intern(term: ProcessTerm) -> Optional[int]:
        sid = index.get(term)
        if sid is not None:
            return sid
        if len(states) >= bound:
            return None
        sid = len(states)
        states.append(term)
        expanded.append(False)
        index[term] = sid
        queue.append(sid)
        return sid

    roots: list[int] = []
    for entry in entries:
        sid = intern(canonicalize(entry))
        if sid is None:
            raise ValueError("bound too small to hold the root states")
        roots.append(sid)

    try:
        while queue:
            sid = queue.popleft()
            source = states[sid]
            if __debug__:
                source_clk = analyze(program).clk(source)
            for label, target in enabled_transitions(source, program):
                tid = intern(canonicalize(target))
                if tid is None:
                    complete = False
                    break
                if __debug__:
                    assert analyze(program).clk(states[tid]) == source_clk, (
                        "clock horizon changed across a transition"
                    )
                transitions.append(Transition(sid, label, tid))
            else:
                expanded[sid] = True
                continue
            break  # bound hit: stop exploring entirely
    except RecursionError:
        raise ValueError(
            "state terms exceed the supported structural depth; the program "
            "appears to stack unboundedly many operators per step"
        ) from None

    lts = LTS(states, transitions, initial=roots[0], complete=complete, expanded=expanded)
    return lts, roots


def explore(program: Program, bound: Optional[int] = None) -> LTS:
    """BFS from the program entry; complete=False iff the bound truncated it."""
    lts, _ = explore_multi(program, [program.entry], bound)
    return lts


@dataclass
class NormalFormResult:
    """Silent-reduction endpoints: states reachable by tau with no tau left."""

    normal_forms: frozenset[int]
    unique_modulo_cong: "Tristate"


def normal_forms(
    lts: LTS, from_state: int = 0, cfg: "Optional[CongruenceConfig]" = None
) -> NormalFormResult:
    """All tau-reachable states without tau-successors, plus a uniqueness verdict.

    Uniqueness is judged modulo the configured congruence and is inconclusive
    whenever the exploration was truncated.
    """
    from .equivalence import CongruenceOracle, Tristate

    lts.check_state(from_state)
    seen = {from_state}
    queue = deque([from_state])
    while queue:
        sid = queue.popleft()
        for t in lts.outgoing(sid):
            if isinstance(t.label.action, Tau) and t.target not in seen:
                seen.add(t.target)
                queue.append(t.target)
    forms = frozenset(
        sid
        for sid in seen
        if not any(isinstance(t.label.action, Tau) for t in lts.outgoing(sid))
    )
    if not lts.complete:
        return NormalFormResult(forms, Tristate.INCONCLUSIVE)
    oracle = CongruenceOracle(lts, cfg)
    verdict = Tristate.YES
    ordered = sorted(forms)
    for i, s1 in enumerate(ordered):
        for s2 in ordered[i + 1 :]:
            answer = oracle.congruent(s1, s2)
            if answer is Tristate.NO:
                return NormalFormResult(forms, Tristate.NO)
            if answer is Tristate.INCONCLUSIVE:
                verdict = Tristate.INCONCLUSIVE
    return NormalFormResult(forms, verdict)


def find_trace(
    lts: LTS,
    state_goal: Optional[Callable[[int], bool]] = None,
    action_goal: Optional[Callable[[object], bool]] = None,
) -> Optional[list[Transition]]:
    """Shortest transition path witnessing a goal, or None.

    The search succeeds at a state satisfying state_goal (the empty trace if
    the initial state does) or at the first edge whose action satisfies
    action_goal.  None is conclusive only when the LTS is complete.
    """
    if state_goal is not None and state_goal(lts.initial):
        return []
    parent: dict[int, Transition] = {}
    seen = {lts.initial}
    queue = deque([lts.initial])

    def path_to(t: Transition) -> list[Transition]:
        path = [t]
        while path[0].source != lts.initial:
            path.insert(0, parent[path[0].source])
        return path

    while queue:
        sid = queue.popleft()
        for t in lts.outgoing(sid):
            if action_goal is not None and action_goal(t.label.action):
                return path_to(t)
            if t.target not in seen:
                seen.add(t.target)
                parent[t.target] = t
                if state_goal is not None and state_goal(t.target):
                    return path_to(t)
                queue.append(t.target)
    return None


def export_lts(lts: LTS, format: str = "json") -> bytes:
    """Serialize the LTS as canonical JSON or a DOT digraph."""
    from .jsonio import dumps_canonical, lts_to_dict, render_label

    if format == "json":
        return dumps_canonical(lts_to_dict(lts)).encode("utf-8")
    if format == "dot":
        lines = ["digraph lts {"]
        for sid, term in enumerate(lts.states):
            shape = ' shape=doublecircle' if sid == lts.initial else ""
            lines.append(f'  s{sid} [label="{_dot_escape(pretty(term))}"{shape}];')
        for t in lts.transitions:
            lines.append(
                f'  s{t.source} -> s{t.target} [label="{_dot_escape(render_label(t.label))}"];'
            )
        lines.append("}")
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown export format {format!r}")


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')
