"""Static analysis: sorts, clock horizons, initial actions and predictions.

Everything here is a syntactic least fixpoint over the definition system,
computed by Kleene iteration on a finite label lattice and memoized per
program.  The well-formedness checker enforces the conditions the
operational rules rely on (clock stability across derivations, horizon
agreement inside threads, guarded recursion).
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

from .parser import Diagnostic
from .terms import (
    CLOCK,
    Action,
    Clock,
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
    Span,
    Sum,
    ThreadTerm,
    is_visible,
)

_NO_SPAN = Span(1, 1, 0)


@dataclass(frozen=True)
class PredictionValue:
    """A prediction: the labels in competition, indexed by clock horizon.

    Antitone in the horizon: widening the horizon cuts labels behind the
    clock, so at_h1 is always a subset of at_h0.
    """

    at_h0: frozenset[Label]
    at_h1: frozenset[Label]

    def __post_init__(self) -> None:
        if not self.at_h1 <= self.at_h0:
            raise ValueError("prediction must be antitone: at_h1 must be a subset of at_h0")

    def at(self, horizon: Horizon) -> frozenset[Label]:
        return self.at_h1 if horizon is H1 else self.at_h0


EMPTY_PREDICTION = PredictionValue(frozenset(), frozenset())


def _restricted(labels: frozenset[Label], channels: frozenset[str]) -> frozenset[Label]:
    """Remove a channel set and its co-names from a label set."""
    return frozenset(
        l for l in labels if isinstance(l, Clock) or l.name not in channels
    )


class ProgramAnalysis:
    """Immutable per-program tables for sort, clk and prediction queries."""

    def __init__(self, program: Program):
        self.program = program
        self._undefined = sorted(self._collect_undefined())
        self._sort_memo: dict[ProcessTerm, frozenset[Label]] = {}
        self._clk_memo: dict[ProcessTerm, Horizon] = {}
        self._pred_memo: dict[tuple[Horizon, ProcessTerm], frozenset[Label]] = {}
        if not self._undefined:
            self._sort_names = self._fix_names(lambda body, env: self._sort(body, env))
            self._clk_names = self._fix_clk()
            self._pred_names = {
                c: self._fix_names(lambda body, env, c=c: self._pred(body, c, env))
                for c in (H0, H1)
            }

    # -- name resolution ----------------------------------------------------

    def _collect_undefined(self) -> set[str]:
        missing: set[str] = set()

        def walk(term: ProcessTerm) -> None:
            if isinstance(term, Name):
                if term.id not in self.program.defs:
                    missing.add(term.id)
            elif isinstance(term, (Par, Sum)):
                walk(term.left)
                walk(term.right)
            elif isinstance(term, Restrict):
                walk(term.body)
            elif isinstance(term, Prefix):
                walk(term.cont)

        for body in self.program.defs.values():
            walk(body)
        walk(self.program.entry)
        return missing

    def _require_resolved(self) -> None:
        if self._undefined:
            raise KeyError(f"undefined process names: {', '.join(self._undefined)}")

    # -- Kleene fixpoints over the definition system --------------------------

    def _fix_names(self, step) -> dict[str, frozenset[Label]]:
        env = {name: frozenset() for name in self.program.defs}
        while True:
            new = {name: step(body, env) for name, body in self.program.defs.items()}
            if new == env:
                return env
            env = new

    def _fix_clk(self) -> dict[str, Horizon]:
        env = {name: H0 for name in self.program.defs}
        while True:
            new = {name: self._clk(body, env) for name, body in self.program.defs.items()}
            if new == env:
                return env
            env = new

    # -- sort -----------------------------------------------------------------

    def _sort(self, term: ProcessTerm, env: dict[str, frozenset[Label]]) -> frozenset[Label]:
        if isinstance(term, Nil):
            return frozenset({CLOCK}) if term.horizon is H1 else frozenset()
        if isinstance(term, Prefix):
            own = frozenset({term.action}) if is_visible(term.action) else frozenset()
            return own | term.guard | self._sort(term.cont, env)
        if isinstance(term, (Sum, Par)):
            return self._sort(term.left, env) | self._sort(term.right, env)
        if isinstance(term, Restrict):
            return _restricted(self._sort(term.body, env), term.channels)
        if isinstance(term, Name):
            return env[term.id]
        raise TypeError(f"not a term: {term!r}")

    def sort(self, term: ProcessTerm) -> frozenset[Label]:
        """Free labels of a term: prefix actions and guards, minus restrictions."""
        self._require_resolved()
        if term not in self._sort_memo:
            self._sort_memo[term] = self._sort(term, self._sort_names)
        return self._sort_memo[term]

    # -- clk ------------------------------------------------------------------

    def _clk(self, term: ProcessTerm, env: dict[str, Horizon]) -> Horizon:
        if isinstance(term, Nil):
            return term.horizon
        if isinstance(term, Prefix):
            own = H1 if term.action == CLOCK else H0
            return max(own, self._clk(term.cont, env))
        if isinstance(term, (Sum, Par)):
            return max(self._clk(term.left, env), self._clk(term.right, env))
        if isinstance(term, Restrict):
            return self._clk(term.body, env)
        if isinstance(term, Name):
            return env[term.id]
        raise TypeError(f"not a term: {term!r}")

    def clk(self, term: ProcessTerm) -> Horizon:
        """Clock horizon: H1 iff the clock occurs as a prefix or nil annotation.

        Guards do not count; they constrain scheduling but never synchronise
        on the tick.
        """
        self._require_resolved()
        if term not in self._clk_memo:
            self._clk_memo[term] = self._clk(term, self._clk_names)
        return self._clk_memo[term]

    # -- predictions ------------------------------------------------------------

    def _pred(
        self, term: ProcessTerm, cut: Horizon, env: dict[str, frozenset[Label]]
    ) -> frozenset[Label]:
        if isinstance(term, Nil):
            return frozenset()
        if isinstance(term, Prefix):
            if term.action == CLOCK and cut is H1:
                return frozenset({CLOCK})
            own = frozenset({term.action}) if is_visible(term.action) else frozenset()
            return own | self._pred(term.cont, cut, env)
        if isinstance(term, (Sum, Par)):
            return self._pred(term.left, cut, env) | self._pred(term.right, cut, env)
        if isinstance(term, Restrict):
            return _restricted(self._pred(term.body, cut, env), term.channels)
        if isinstance(term, Name):
            return env[term.id]
        raise TypeError(f"not a term: {term!r}")

    def prediction_at(self, term: ProcessTerm, cut: Horizon) -> frozenset[Label]:
        self._require_resolved()
        key = (cut, term)
        if key not in self._pred_memo:
            self._pred_memo[key] = self._pred(term, cut, self._pred_names[cut])
        return self._pred_memo[key]

    def prediction_star(self, term: ProcessTerm) -> PredictionValue:
        """All labels syntactically reachable before the clock, per horizon.

        Prefix actions only (no guards); silent prefixes are skipped over but
        contribute nothing themselves, since predictions range over labels.
        """
        return PredictionValue(self.prediction_at(term, H0), self.prediction_at(term, H1))


_ANALYSES: "weakref.WeakKeyDictionary[Program, ProgramAnalysis]" = weakref.WeakKeyDictionary()


def analyze(program: Program) -> ProgramAnalysis:
    """Analysis table for a program, computed once and cached."""
    table = _ANALYSES.get(program)
    if table is None:
        table = ProgramAnalysis(program)
        _ANALYSES[program] = table
    return table


def sort(term: ProcessTerm, program: Program) -> frozenset[Label]:
    return analyze(program).sort(term)


def clk(term: ProcessTerm, program: Program) -> Horizon:
    return analyze(program).clk(term)


def prediction_star(term: ProcessTerm, program: Program) -> PredictionValue:
    return analyze(program).prediction_star(term)


def initial_actions(thread: ThreadTerm) -> frozenset[Action]:
    """Actions syntactically at the start of a thread; may contain tau."""
    if isinstance(thread, Nil):
        return frozenset()
    if isinstance(thread, Prefix):
        return frozenset({thread.action})
    if isinstance(thread, Sum):
        return initial_actions(thread.left) | initial_actions(thread.right)
    raise TypeError(f"not a thread: {thread!r}")


# ---------------------------------------------------------------------------
# Well-formedness

def _span_of(term: ProcessTerm) -> Span:
    return term.span if term.span is not None else _NO_SPAN


def well_formed(program: Program) -> list[Diagnostic]:
    """Check the program against the conditions the transition rules assume.

    Empty result iff: every name resolves, recursion is prefix-guarded, both
    summands of a sum share a horizon, the continuation of a clock prefix is
    synchronous, and restriction sets name plain channels.
    """
    diags: list[Diagnostic] = []
    defined = set(program.defs)

    def walk_names(term: ProcessTerm) -> None:
        if isinstance(term, Name):
            if term.id not in defined:
                diags.append(
                    Diagnostic(
                        "error",
                        _span_of(term),
                        f"undefined process name {term.id}",
                        "wf/undefined-name",
                    )
                )
        elif isinstance(term, (Par, Sum)):
            walk_names(term.left)
            walk_names(term.right)
        elif isinstance(term, Restrict):
            walk_names(term.body)
        elif isinstance(term, Prefix):
            walk_names(term.cont)

    for body in program.defs.values():
        walk_names(body)
    walk_names(program.entry)
    if diags:
        return diags

    # Guarded recursion: every definition cycle must pass under a prefix,
    # otherwise transition derivation would not terminate.
    exposed: dict[str, set[str]] = {}

    def exposed_names(term: ProcessTerm) -> set[str]:
        if isinstance(term, Name):
            return {term.id}
        if isinstance(term, (Par, Sum)):
            return exposed_names(term.left) | exposed_names(term.right)
        if isinstance(term, Restrict):
            return exposed_names(term.body)
        return set()  # Nil and Prefix guard everything below them

    for name, body in program.defs.items():
        exposed[name] = exposed_names(body)
    for start in program.defs:
        seen: set[str] = set()
        frontier = set(exposed[start])
        while frontier:
            nxt = frontier.pop()
            if nxt == start:
                diags.append(
                    Diagnostic(
                        "error",
                        _span_of(program.defs[start]),
                        f"unguarded recursion through {start}; every cycle must pass under a prefix",
                        "wf/unguarded-recursion",
                    )
                )
                break
            if nxt not in seen:
                seen.add(nxt)
                frontier |= exposed[nxt]
    if diags:
        return diags

    table = analyze(program)

    def walk(term: ProcessTerm) -> None:
        if isinstance(term, Sum):
            if table.clk(term.left) != table.clk(term.right):
                diags.append(
                    Diagnostic(
                        "error",
                        _span_of(term),
                        "summands have different clock horizons",
                        "wf/horizon-mismatch",
                    )
                )
            walk(term.left)
            walk(term.right)
        elif isinstance(term, Prefix):
            if term.action == CLOCK and table.clk(term.cont) is not H1:
                diags.append(
                    Diagnostic(
                        "error",
                        _span_of(term),
                        "a clock prefix needs a synchronous continuation "
                        "(the horizon must stay stable across the tick)",
                        "wf/clock-stability",
                    )
                )
            walk(term.cont)
        elif isinstance(term, Par):
            walk(term.left)
            walk(term.right)
        elif isinstance(term, Restrict):
            for chan in sorted(term.channels):
                if chan in ("sigma", "tau"):
                    diags.append(
                        Diagnostic(
                            "error",
                            _span_of(term),
                            f"restriction sets hold channel names only, not '{chan}'",
                            "wf/bad-channel",
                        )
                    )
            walk(term.body)

    for body in program.defs.values():
        walk(body)
    walk(program.entry)
    return diags
