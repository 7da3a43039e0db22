"""Independent classical-CCS transition oracle for conservativity tests.

Implements the textbook rules directly (Act, Sum, Par interleaving, Com,
Restr, Con) with no blocking or prediction machinery, so it shares no code
path with the engine it checks.
"""

from __future__ import annotations

from ccslm.terms import (
    TAU,
    Action,
    Chan,
    Clock,
    CoChan,
    Name,
    Nil,
    Par,
    Prefix,
    Program,
    ProcessTerm,
    Restrict,
    Sum,
    complement,
    is_visible,
)


def ccs_transitions(term: ProcessTerm, program: Program) -> set[tuple[Action, ProcessTerm]]:
    if isinstance(term, Nil):
        return set()
    if isinstance(term, Name):
        return ccs_transitions(program.defs[term.id], program)
    if isinstance(term, Prefix):
        return {(term.action, term.cont)}
    if isinstance(term, Sum):
        return ccs_transitions(term.left, program) | ccs_transitions(term.right, program)
    if isinstance(term, Par):
        left = ccs_transitions(term.left, program)
        right = ccs_transitions(term.right, program)
        out: set[tuple[Action, ProcessTerm]] = set()
        for action, target in left:
            out.add((action, Par(target, term.right)))
        for action, target in right:
            out.add((action, Par(term.left, target)))
        for a1, t1 in left:
            if not is_visible(a1) or isinstance(a1, Clock):
                continue
            partner = complement(a1)
            for a2, t2 in right:
                if a2 == partner:
                    out.add((TAU, Par(t1, t2)))
        return out
    if isinstance(term, Restrict):
        out = set()
        for action, target in ccs_transitions(term.body, program):
            if isinstance(action, (Chan, CoChan)) and action.name in term.channels:
                continue
            out.add((action, Restrict(target, term.channels)))
        return out
    raise TypeError(f"not a term: {term!r}")
