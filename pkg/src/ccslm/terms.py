"""Data model for the calculus: labels, actions, horizons and process terms.

Terms are immutable (frozen dataclasses) and hashable, so they can be shared
freely across workers and used directly as dictionary keys for state
deduplication.  Canonical forms (sorted, flattened parallel and sum nodes)
give a structural state identity that is coarser than raw syntax but still
purely syntactic; behavioural equality lives in the equivalence module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, Mapping, NamedTuple, Optional, Union


class Span(NamedTuple):
    """Source extent of a syntax node: 1-based line and column, plus length."""

    line: int
    column: int
    length: int


class Horizon(IntEnum):
    """Clock horizon: H0 runs asynchronously, H1 joins every clock tick.

    Read as sets of clock names, H0 is empty and H1 is the singleton clock,
    so the subset order coincides with the numeric order.
    """

    H0 = 0
    H1 = 1

    def within(self, other: "Horizon") -> bool:
        """Subset test between horizons."""
        return self <= other


H0 = Horizon.H0
H1 = Horizon.H1


# ---------------------------------------------------------------------------
# Labels and actions


@dataclass(frozen=True)
class Chan:
    name: str


@dataclass(frozen=True)
class CoChan:
    name: str


@dataclass(frozen=True)
class Clock:
    """The single broadcast clock."""


@dataclass(frozen=True)
class Tau:
    """The silent action; not a label."""


CLOCK = Clock()
TAU = Tau()

Label = Union[Chan, CoChan, Clock]
Action = Union[Label, Tau]  # actions adjoin tau to the labels


def is_visible(action: Action) -> bool:
    return not isinstance(action, Tau)


def complement(label: Label) -> Label:
    """Complement of a label: channel and co-name swap, the clock is its own."""
    if isinstance(label, Chan):
        return CoChan(label.name)
    if isinstance(label, CoChan):
        return Chan(label.name)
    if isinstance(label, Clock):
        return CLOCK
    raise TypeError(f"not a label: {label!r}")


def format_label(label: Label) -> str:
    if isinstance(label, Chan):
        return label.name
    if isinstance(label, CoChan):
        return "~" + label.name
    if isinstance(label, Clock):
        return "sigma"
    raise TypeError(f"not a label: {label!r}")


def format_action(action: Action) -> str:
    return "tau" if isinstance(action, Tau) else format_label(action)


def label_key(label: Label) -> tuple:
    """Total order on labels: clock first, then channels, then co-names."""
    if isinstance(label, Clock):
        return (0, "")
    if isinstance(label, Chan):
        return (1, label.name)
    return (2, label.name)


def action_key(action: Action) -> tuple:
    if isinstance(action, Tau):
        return (-1, "")
    return label_key(action)


# ---------------------------------------------------------------------------
# Terms

ProcessTerm = Union["Name", "Par", "Restrict", "Nil", "Prefix", "Sum"]
ThreadTerm = Union["Nil", "Prefix", "Sum"]


@dataclass(frozen=True)
class Name:
    """Reference to a defined process; the recursion mechanism."""

    id: str
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class Par:
    left: ProcessTerm
    right: ProcessTerm
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class Restrict:
    """Restriction of rendezvous channels; co-names are bound with them."""

    body: ProcessTerm
    channels: frozenset[str]
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class Nil:
    """Inactive thread, annotated with its horizon (not inferable when empty)."""

    horizon: Horizon
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class Prefix:
    """Guarded action prefix: may fire `action` unless a guard label can sync."""

    action: Action
    guard: frozenset[Label]
    cont: ProcessTerm
    span: Optional[Span] = field(default=None, compare=False)


@dataclass(frozen=True)
class Sum:
    left: ThreadTerm
    right: ThreadTerm
    span: Optional[Span] = field(default=None, compare=False)


def is_thread(term: ProcessTerm) -> bool:
    return isinstance(term, (Nil, Prefix, Sum))


@dataclass(frozen=True, eq=False)
class Program:
    """A set of mutually recursive definitions plus the entry process.

    Equality is identity: programs act as cache keys for the analysis tables.
    The defs mapping is never mutated after construction.
    """

    defs: Mapping[str, ProcessTerm]
    entry: ProcessTerm


# ---------------------------------------------------------------------------
# Canonicalization

def iter_par(term: ProcessTerm) -> Iterator[ProcessTerm]:
    """Leaves of a nested parallel composition, left to right."""
    stack = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Par):
            stack.append(t.right)
            stack.append(t.left)
        else:
            yield t


def iter_sum(term: ThreadTerm) -> Iterator[ThreadTerm]:
    stack: list[ThreadTerm] = [term]
    while stack:
        t = stack.pop()
        if isinstance(t, Sum):
            stack.append(t.right)
            stack.append(t.left)
        else:
            yield t


def nest_par(children: list[ProcessTerm]) -> ProcessTerm:
    """Balanced parallel composition: keeps term depth logarithmic, so wide
    states grown by exploration never exhaust the recursion limit."""
    if len(children) == 1:
        return children[0]
    mid = len(children) // 2
    return Par(nest_par(children[:mid]), nest_par(children[mid:]))


def nest_sum(children: list[ThreadTerm]) -> ThreadTerm:
    if len(children) == 1:
        return children[0]
    mid = len(children) // 2
    return Sum(nest_sum(children[:mid]), nest_sum(children[mid:]))


def term_key(term: ProcessTerm) -> tuple:
    """Deterministic total order on terms: variant tag, then payload."""
    if isinstance(term, Nil):
        return (0, int(term.horizon))
    if isinstance(term, Prefix):
        return (
            1,
            action_key(term.action),
            tuple(sorted(label_key(l) for l in term.guard)),
            term_key(term.cont),
        )
    if isinstance(term, Sum):
        return (2, term_key(term.left), term_key(term.right))
    if isinstance(term, Name):
        return (3, term.id)
    if isinstance(term, Par):
        return (4, term_key(term.left), term_key(term.right))
    if isinstance(term, Restrict):
        return (5, term_key(term.body), tuple(sorted(term.channels)))
    raise TypeError(f"not a term: {term!r}")


def canonicalize(term: ProcessTerm) -> ProcessTerm:
    """Normal form for state identity; idempotent.

    Flattens and sorts parallel/sum nodes, merges directly nested
    restrictions, strips empty ones, and drops asynchronous nils from
    parallel compositions.  Each step is behaviourally transparent (the
    symmetric rules make parallel/sum commutative and associative,
    `P\\A\\B` prunes exactly like `P\\(A∪B)`, and an H0 nil neither moves,
    predicts, nor blocks); that transitions are preserved up to
    canonicalizing targets is verified by test, not assumed.  Merging
    matters beyond dedup: unfoldings that stack restrictions per step
    would otherwise grow states of unbounded structural depth.
    """
    if isinstance(term, (Nil, Name)):
        return term
    if isinstance(term, Prefix):
        return Prefix(term.action, term.guard, canonicalize(term.cont), span=term.span)
    if isinstance(term, Restrict):
        body = canonicalize(term.body)
        channels = term.channels
        if isinstance(body, Restrict):  # canonical bodies nest at most once
            channels = channels | body.channels
            body = body.body
        if not channels:
            return body
        return Restrict(body, channels, span=term.span)
    if isinstance(term, Sum):
        children = sorted((canonicalize(c) for c in iter_sum(term)), key=term_key)
        return nest_sum(children)
    if isinstance(term, Par):
        children = sorted((canonicalize(c) for c in iter_par(term)), key=term_key)
        alive = [c for c in children if c != Nil(H0)]
        return nest_par(alive) if alive else Nil(H0)
    raise TypeError(f"not a term: {term!r}")


def term_eq(t1: ProcessTerm, t2: ProcessTerm) -> bool:
    """Structural equality modulo canonical form (the LTS state identity)."""
    return canonicalize(t1) == canonicalize(t2)
