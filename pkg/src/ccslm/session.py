"""Interactive stepping sessions, shared by the CLI stepper and the HTTP API.

A session grows its state table lazily as transitions are listed and fired,
so stepping never explores more than the user has looked at.  The cursor is
always reachable from the initial state through the recorded history.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .semantics import StrategicLabel, enabled_transitions
from .terms import Program, ProcessTerm, canonicalize


class StepError(Exception):
    """A step request that does not fit the current session state."""


@dataclass
class SessionState:
    program: Program
    states: list[ProcessTerm] = field(default_factory=list)
    cursor: int = 0
    history: list[tuple[int, int, int]] = field(default_factory=list)  # (from, index, to)

    def __post_init__(self) -> None:
        self._index: dict[ProcessTerm, int] = {}
        self._listings: dict[int, list[tuple[StrategicLabel, int]]] = {}
        self.cursor = self._intern(canonicalize(self.program.entry))

    def _intern(self, term: ProcessTerm) -> int:
        sid = self._index.get(term)
        if sid is None:
            sid = len(self.states)
            self.states.append(term)
            self._index[term] = sid
        return sid

    def term_of(self, state: int) -> ProcessTerm:
        if not 0 <= state < len(self.states):
            raise KeyError(f"unknown state id {state}")
        return self.states[state]

    def listing(self, state: int) -> list[tuple[StrategicLabel, int]]:
        """Enabled transitions of a state, with lazily assigned target ids."""
        self.term_of(state)
        cached = self._listings.get(state)
        if cached is None:
            cached = [
                (label, self._intern(canonicalize(target)))
                for label, target in enabled_transitions(self.states[state], self.program)
            ]
            self._listings[state] = cached
        return cached

    def step(self, from_state: int, index: int) -> int:
        """Fire the index-th transition of the cursor state; returns the new state."""
        self.term_of(from_state)
        if from_state != self.cursor:
            raise StepError(
                f"step requested from state {from_state} but the session is at {self.cursor}"
            )
        entries = self.listing(from_state)
        if not 0 <= index < len(entries):
            raise StepError(f"transition index {index} out of range (0..{len(entries) - 1})")
        target = entries[index][1]
        self.history.append((from_state, index, target))
        self.cursor = target
        return target

    def undo(self) -> int:
        """Pop the last fired transition; returns the restored state."""
        if not self.history:
            raise StepError("nothing to undo")
        from_state, _, _ = self.history.pop()
        self.cursor = from_state
        return from_state
