"""Workbench for a priority-guarded, single-clock process calculus.

Parse process terms, derive strategic transitions (actions with blocking
relations and prediction functions), explore state spaces, and check
determinacy, confluence, observability and coherence.
"""

from .analysis import (
    PredictionValue,
    clk,
    initial_actions,
    prediction_star,
    sort,
    well_formed,
)
from .coherence import (
    CoherenceReport,
    Violation,
    check_coherence,
    diamond_violations,
    independent,
    milner_confluent,
    milner_determinate,
    observable_violations,
)
from .equivalence import (
    CongruenceConfig,
    CongruenceOracle,
    Partition,
    Tristate,
    congruent,
    strong_bisim,
    weak_bisim,
)
from .parser import Diagnostic, ParseError, parse, parse_strict, pretty
from .semantics import (
    Blocking,
    StrategicLabel,
    Transition,
    blocked_set,
    blocking_leq,
    blocking_restrict,
    blocking_union,
    enabled_transitions,
    eschews,
    prediction_leq,
    prediction_restrict,
    prediction_sum,
)
from .statespace import (
    LTS,
    NormalFormResult,
    explore,
    explore_multi,
    export_lts,
    find_trace,
    normal_forms,
)
from .terms import (
    CLOCK,
    TAU,
    Action,
    Chan,
    Clock,
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
    Restrict,
    Sum,
    canonicalize,
    complement,
    term_eq,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
