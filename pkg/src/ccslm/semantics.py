"""Strategic transitions: the blocking/prediction algebra and the SOS rules.

A transition carries a strategic label: the action itself, a blocking
relation (horizon-scoped label sets whose possible synchronisation vetoes
the step) and a prediction (the competing labels visible up to the clock).
Synchronisation and solo steps in a parallel composition are gated by the
`eschews` test between predictions and blockings.
"""

from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass

from .analysis import EMPTY_PREDICTION, PredictionValue, ProgramAnalysis, analyze, initial_actions
from .terms import (
    CLOCK,
    TAU,
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
    Sum,
    action_key,
    canonicalize,
    complement,
    is_visible,
    label_key,
    term_key,
)


@dataclass(frozen=True)
class Blocking:
    """Blocking relation: a set of (horizon, labels) vetoes."""

    entries: frozenset[tuple[Horizon, frozenset[Label]]]


EMPTY_BLOCKING = Blocking(frozenset())


@dataclass(frozen=True)
class StrategicLabel:
    action: Action
    blocking: Blocking
    prediction: PredictionValue


@dataclass(frozen=True)
class Transition:
    """An edge of an explored LTS; endpoints are state ids."""

    source: int
    label: StrategicLabel
    target: int


def blocked_set(blocking: Blocking, horizon: Horizon) -> frozenset[Label]:
    """Labels blocked within a horizon: entries whose scope is contained in it."""
    out: set[Label] = set()
    for scope, labels in blocking.entries:
        if scope.within(horizon):
            out |= labels
    return frozenset(out)


def blocking_leq(b1: Blocking, b2: Blocking) -> bool:
    """b1 blocks in no more contexts than b2 (pointwise over both horizons)."""
    return all(blocked_set(b1, c) <= blocked_set(b2, c) for c in (H0, H1))


def blocking_union(b1: Blocking, b2: Blocking) -> Blocking:
    return Blocking(b1.entries | b2.entries)


def blocking_restrict(blocking: Blocking, channels: frozenset[str]) -> Blocking:
    """Drop a channel set (and its co-names) from every entry."""
    return Blocking(
        frozenset(
            (scope, frozenset(l for l in labels if isinstance(l, Clock) or l.name not in channels))
            for scope, labels in blocking.entries
        )
    )


def prediction_leq(i1: PredictionValue, i2: PredictionValue) -> bool:
    return i1.at_h0 <= i2.at_h0 and i1.at_h1 <= i2.at_h1


def prediction_sum(i1: PredictionValue, i2: PredictionValue) -> PredictionValue:
    return PredictionValue(i1.at_h0 | i2.at_h0, i1.at_h1 | i2.at_h1)


def prediction_restrict(pred: PredictionValue, channels: frozenset[str]) -> PredictionValue:
    keep = lambda ls: frozenset(l for l in ls if isinstance(l, Clock) or l.name not in channels)
    return PredictionValue(keep(pred.at_h0), keep(pred.at_h1))


def eschews(pred: PredictionValue, blocking: Blocking) -> bool:
    """True iff the prediction offers no synchronisation partner to any veto.

    For every entry (C, L) of the blocking, the prediction at C must be
    disjoint from the complements of L.  Antitone in both arguments.
    """
    for scope, labels in blocking.entries:
        offered = pred.at(scope)
        if any(complement(l) in offered for l in labels):
            return False
    return True


def _extend_prediction(pred: PredictionValue, extra: frozenset[Label]) -> PredictionValue:
    return PredictionValue(pred.at_h0 | extra, pred.at_h1 | extra)


def strategic_label_key(label: StrategicLabel) -> tuple:
    """Deterministic sort key for transition listings."""
    return (
        action_key(label.action),
        tuple(
            sorted(
                (int(scope), tuple(sorted(label_key(l) for l in labels)))
                for scope, labels in label.blocking.entries
            )
        ),
        tuple(sorted(label_key(l) for l in label.prediction.at_h0)),
        tuple(sorted(label_key(l) for l in label.prediction.at_h1)),
    )


class UnguardedRecursionError(RuntimeError):
    """A definition unfolded back into itself without passing a prefix."""


class _Engine:
    """Structural transition derivation with per-term memoization.

    The lock keeps the unfolding-cycle tracker coherent when several
    threads derive over the same program; memoized results are immutable.
    """

    def __init__(self, analysis: ProgramAnalysis):
        self.analysis = analysis
        self.defs = analysis.program.defs
        self._memo: dict[ProcessTerm, tuple[tuple[StrategicLabel, ProcessTerm], ...]] = {}
        self._unfolding: set[str] = set()
        self._lock = threading.RLock()

    def transitions(self, term: ProcessTerm) -> tuple[tuple[StrategicLabel, ProcessTerm], ...]:
        cached = self._memo.get(term)
        if cached is not None:
            return cached
        with self._lock:
            if term in self._memo:
                return self._memo[term]
            out = self._derive(term)
            # Deduplicate (same strategic label, same state up to canonical
            # form), then fix a deterministic listing order.
            seen: dict[tuple, tuple[StrategicLabel, ProcessTerm]] = {}
            for label, target in out:
                key = (strategic_label_key(label), term_key(canonicalize(target)))
                if key not in seen:
                    seen[key] = (label, target)
            result = tuple(seen[k] for k in sorted(seen))
            self._memo[term] = result
            return result

    def _derive(self, term: ProcessTerm) -> list[tuple[StrategicLabel, ProcessTerm]]:
        if isinstance(term, Nil):
            return []

        if isinstance(term, Name):  # rule (Con): unfold the definition
            if term.id in self._unfolding:
                raise UnguardedRecursionError(
                    f"definition {term.id} unfolds into itself without a prefix"
                )
            self._unfolding.add(term.id)
            try:
                return list(self.transitions(self.defs[term.id]))
            finally:
                self._unfolding.discard(term.id)

        if isinstance(term, Prefix):  # rule (Act)
            blocking = Blocking(frozenset({(self.analysis.clk(term.cont), term.guard)}))
            return [(StrategicLabel(term.action, blocking, EMPTY_PREDICTION), term.cont)]

        if isinstance(term, Sum):  # rule (Sum), both sides
            out = []
            for own, other in ((term.left, term.right), (term.right, term.left)):
                competitors = initial_actions(other)
                for label, target in self.transitions(own):
                    extra = frozenset(
                        a for a in competitors if is_visible(a) and a != label.action
                    )
                    extended = StrategicLabel(
                        label.action,
                        label.blocking,
                        _extend_prediction(label.prediction, extra),
                    )
                    out.append((extended, target))
            return out

        if isinstance(term, Par):  # rules (Par) and (Com), both sides
            out = []
            sides = (term.left, term.right)
            trans = tuple(self.transitions(side) for side in sides)
            for i in (0, 1):
                own, other = sides[i], sides[1 - i]
                other_pred = self.analysis.prediction_star(other)
                other_clk = self.analysis.clk(other)
                for label, target in trans[i]:
                    # (Par): a solo step must not be a clock the sibling shares,
                    # and the sibling must not offer a partner for any veto.
                    if label.action == CLOCK and other_clk is H1:
                        continue
                    if not eschews(other_pred, label.blocking):
                        continue
                    moved = StrategicLabel(
                        label.action,
                        label.blocking,
                        prediction_sum(label.prediction, other_pred),
                    )
                    pair = (moved, Par(target, other) if i == 0 else Par(other, target))
                    out.append(pair)
            for l1, t1 in trans[0]:  # (Com): synchronise complementary labels
                if not is_visible(l1.action):
                    continue
                partner = complement(l1.action)
                for l2, t2 in trans[1]:
                    if l2.action != partner:
                        continue
                    if not eschews(l1.prediction, l2.blocking):
                        continue
                    if not eschews(l2.prediction, l1.blocking):
                        continue
                    # a|~a is tau; sigma|sigma stays sigma, open to more participants
                    action: Action = CLOCK if l1.action == CLOCK else TAU
                    fused = StrategicLabel(
                        action,
                        blocking_union(l1.blocking, l2.blocking),
                        prediction_sum(l1.prediction, l2.prediction),
                    )
                    out.append((fused, Par(t1, t2)))
            return out

        if isinstance(term, Restrict):  # rule (Restr)
            out = []
            for label, target in self.transitions(term.body):
                action = label.action
                if is_visible(action) and not isinstance(action, Clock):
                    if action.name in term.channels:
                        continue
                pruned = StrategicLabel(
                    action,
                    blocking_restrict(label.blocking, term.channels),
                    prediction_restrict(label.prediction, term.channels),
                )
                out.append((pruned, Restrict(target, term.channels)))
            return out

        raise TypeError(f"not a term: {term!r}")


_ENGINES: "weakref.WeakKeyDictionary[Program, _Engine]" = weakref.WeakKeyDictionary()


def _engine(program: Program) -> _Engine:
    engine = _ENGINES.get(program)
    if engine is None:
        engine = _Engine(analyze(program))
        _ENGINES[program] = engine
    return engine


def enabled_transitions(
    term: ProcessTerm, program: Program
) -> tuple[tuple[StrategicLabel, ProcessTerm], ...]:
    """All strategic transitions of a term, deduplicated and in listing order.

    Duplicates (same label and same canonical target, e.g. from the symmetric
    rule variants on syntactically equal siblings) are folded.  Assumes the
    program is well-formed.
    """
    return _engine(program).transitions(term)
