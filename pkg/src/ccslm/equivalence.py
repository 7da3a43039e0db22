"""The congruence oracle: strong and weak bisimilarity over an explored LTS.

Bisimilarity is computed by partition refinement (split blocks by signature
until stable).  Weak equivalence saturates the transition relation first
(tau* a tau* for visible actions, reflexive tau* for tau) and then refines
on action-only labels.  On a truncated exploration the oracle degrades to
tristate answers: states that can reach an unexpanded state have unreliable
signatures, so questions touching them come back inconclusive.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, Optional, TYPE_CHECKING

from .semantics import strategic_label_key
from .terms import Tau, action_key

if TYPE_CHECKING:  # pragma: no cover
    from .statespace import LTS


class Tristate(Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CongruenceConfig:
    """Which congruence the checkers use.

    label_mode picks how transition labels are matched: by action alone
    (the classical reading) or by the full strategic label.  Weak
    equivalence abstracts labels anyway, so it forces action-only mode.
    """

    relation: str = "strong"  # "strong" | "weak"
    label_mode: str = "action-only"  # "action-only" | "full-strategic"

    def __post_init__(self) -> None:
        if self.relation not in ("strong", "weak"):
            raise ValueError(f"unknown relation {self.relation!r}")
        if self.label_mode not in ("action-only", "full-strategic"):
            raise ValueError(f"unknown label mode {self.label_mode!r}")
        if self.relation == "weak" and self.label_mode != "action-only":
            raise ValueError("weak equivalence implies action-only label matching")


DEFAULT_CONFIG = CongruenceConfig()


@dataclass
class Partition:
    """Disjoint blocks of state ids covering all states."""

    blocks: list[frozenset[int]]

    def __post_init__(self) -> None:
        self.block_of: dict[int, int] = {}
        for i, block in enumerate(self.blocks):
            for sid in block:
                self.block_of[sid] = i

    def same_block(self, s1: int, s2: int) -> bool:
        return self.block_of[s1] == self.block_of[s2]


def _refine(n_states: int, edges: list[list[tuple[Hashable, int]]]) -> Partition:
    """Coarsest stable partition under the given labelled edge relation."""
    block_of = [0] * n_states
    n_blocks = 1
    while True:
        groups: dict[tuple, list[int]] = {}
        for sid in range(n_states):
            sig = frozenset((key, block_of[target]) for key, target in edges[sid])
            groups.setdefault((block_of[sid], sig), []).append(sid)
        if len(groups) == n_blocks:
            break
        # stable renumbering: blocks ordered by their smallest member
        ordered = sorted(groups.values(), key=min)
        for i, members in enumerate(ordered):
            for sid in members:
                block_of[sid] = i
        n_blocks = len(ordered)
    blocks: dict[int, set[int]] = {}
    for sid, b in enumerate(block_of):
        blocks.setdefault(b, set()).add(sid)
    return Partition([frozenset(blocks[b]) for b in sorted(blocks)])


def _strong_edges(lts: "LTS", label_mode: str) -> list[list[tuple[Hashable, int]]]:
    edges: list[list[tuple[Hashable, int]]] = [[] for _ in lts.states]
    for t in lts.transitions:
        key: Hashable
        if label_mode == "full-strategic":
            key = strategic_label_key(t.label)
        else:
            key = action_key(t.label.action)
        edges[t.source].append((key, t.target))
    return edges


_TAU_KEY = action_key(Tau())


def saturate(lts: "LTS") -> list[list[tuple[Hashable, int]]]:
    """Weak transition relation: tau* a tau* for visible a, reflexive tau*.

    Edge keys are action keys; the tau edges include the empty step, so
    refinement over this relation computes weak bisimilarity.
    """
    n = len(lts.states)
    closure: list[set[int]] = []
    for sid in range(n):
        seen = {sid}
        queue = deque([sid])
        while queue:
            s = queue.popleft()
            for t in lts.outgoing(s):
                if isinstance(t.label.action, Tau) and t.target not in seen:
                    seen.add(t.target)
                    queue.append(t.target)
        closure.append(seen)
    edges: list[list[tuple[Hashable, int]]] = [[] for _ in range(n)]
    for sid in range(n):
        weak: set[tuple[Hashable, int]] = {(_TAU_KEY, u) for u in closure[sid]}
        for mid in closure[sid]:
            for t in lts.outgoing(mid):
                if isinstance(t.label.action, Tau):
                    continue
                key = action_key(t.label.action)
                for end in closure[t.target]:
                    weak.add((key, end))
        edges[sid] = sorted(weak)
    return edges


def strong_bisim(lts: "LTS", cfg: CongruenceConfig = DEFAULT_CONFIG) -> Partition:
    """Coarsest strong bisimulation partition under the configured labels."""
    if cfg.relation != "strong":
        raise ValueError("strong_bisim requires cfg.relation == 'strong'")
    return _refine(len(lts.states), _strong_edges(lts, cfg.label_mode))


def weak_bisim(lts: "LTS") -> Partition:
    """Coarsest weak bisimulation (observation equivalence) partition."""
    return _refine(len(lts.states), saturate(lts))


class CongruenceOracle:
    """Tristate congruence queries over one LTS, with cached partitions.

    The oracle records whether it ever had to answer inconclusively, which
    the coherence checker uses to down-grade its verdict.
    """

    def __init__(self, lts: "LTS", cfg: Optional[CongruenceConfig] = None):
        self.lts = lts
        self.cfg = cfg if cfg is not None else DEFAULT_CONFIG
        self.saw_inconclusive = False
        self._partition: Optional[Partition] = None
        self._tainted: Optional[set[int]] = None

    @property
    def partition(self) -> Partition:
        if self._partition is None:
            if self.cfg.relation == "weak":
                self._partition = weak_bisim(self.lts)
            else:
                self._partition = strong_bisim(self.lts, self.cfg)
        return self._partition

    def _taint(self) -> set[int]:
        # States whose forward closure leaves the explored region: their
        # behaviour is not fully known, so partition answers about them
        # cannot be trusted.
        if self._tainted is None:
            unexpanded = {
                sid for sid, done in enumerate(self.lts.expanded) if not done
            }
            reverse: list[list[int]] = [[] for _ in self.lts.states]
            for t in self.lts.transitions:
                reverse[t.target].append(t.source)
            seen = set(unexpanded)
            queue = deque(unexpanded)
            while queue:
                sid = queue.popleft()
                for prev in reverse[sid]:
                    if prev not in seen:
                        seen.add(prev)
                        queue.append(prev)
            self._tainted = seen
        return self._tainted

    def congruent(self, s1: int, s2: int) -> Tristate:
        self.lts.check_state(s1)
        self.lts.check_state(s2)
        if s1 == s2:
            return Tristate.YES
        if not self.lts.complete:
            tainted = self._taint()
            if s1 in tainted or s2 in tainted:
                self.saw_inconclusive = True
                return Tristate.INCONCLUSIVE
        return Tristate.YES if self.partition.same_block(s1, s2) else Tristate.NO


def congruent(
    lts: "LTS", s1: int, s2: int, cfg: Optional[CongruenceConfig] = None
) -> Tristate:
    """One-shot congruence query; builds a throwaway oracle."""
    return CongruenceOracle(lts, cfg).congruent(s1, s2)
