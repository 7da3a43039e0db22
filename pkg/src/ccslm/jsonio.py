"""Shared JSON serialization for CLI output and the HTTP API.

Both front ends answer through these functions, so the same question about
the same program yields byte-identical JSON: keys are sorted by the encoder
and every label array is pre-sorted on its rendered form.
"""

from __future__ import annotations

import json
from typing import Iterable

from .analysis import PredictionValue
from .coherence import CoherenceReport, Violation
from .parser import Diagnostic, pretty
from .semantics import Blocking, StrategicLabel, Transition
from .statespace import LTS, NormalFormResult
from .terms import Label, format_action, format_label


def dumps_canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _labels(labels: Iterable[Label]) -> list[str]:
    return sorted(format_label(l) for l in labels)


def blocking_to_list(blocking: Blocking) -> list[dict]:
    entries = [
        {"horizon": int(scope), "labels": _labels(labels)}
        for scope, labels in blocking.entries
    ]
    entries.sort(key=lambda e: (e["horizon"], e["labels"]))
    return entries


def prediction_to_dict(pred: PredictionValue) -> dict:
    return {"h0": _labels(pred.at_h0), "h1": _labels(pred.at_h1)}


def label_to_dict(label: StrategicLabel) -> dict:
    return {
        "action": format_action(label.action),
        "blocking": blocking_to_list(label.blocking),
        "prediction": prediction_to_dict(label.prediction),
    }


def transition_to_dict(t: Transition) -> dict:
    out = label_to_dict(t.label)
    out["source"] = t.source
    out["target"] = t.target
    return out


def render_label(label: StrategicLabel) -> str:
    """Human-readable strategic label, e.g. ``r:{(1,{w})}[{w};{w}]``."""
    entries = ",".join(
        f"({e['horizon']},{{{','.join(e['labels'])}}})" for e in blocking_to_list(label.blocking)
    )
    pred = prediction_to_dict(label.prediction)
    return (
        f"{format_action(label.action)}:{{{entries}}}"
        f"[{{{','.join(pred['h0'])}}};{{{','.join(pred['h1'])}}}]"
    )


def lts_to_dict(lts: LTS) -> dict:
    return {
        "initial": lts.initial,
        "complete": lts.complete,
        "states": [{"id": i, "term": pretty(term)} for i, term in enumerate(lts.states)],
        "transitions": [transition_to_dict(t) for t in lts.transitions],
    }


def violation_to_dict(v: Violation) -> dict:
    return {
        "kind": v.kind,
        "state": v.state,
        "pair": [transition_to_dict(t) for t in v.pair],
        "detail": v.detail,
    }


def report_to_dict(report: CoherenceReport) -> dict:
    return {
        "verdict": report.verdict,
        "statesChecked": report.states_checked,
        "violations": [violation_to_dict(v) for v in report.violations],
    }


def normal_forms_to_dict(result: NormalFormResult, lts: LTS) -> dict:
    return {
        "normalForms": [
            {"id": sid, "term": pretty(lts.states[sid])} for sid in sorted(result.normal_forms)
        ],
        "unique": result.unique_modulo_cong.value,
    }


def diagnostic_to_dict(d: Diagnostic) -> dict:
    return {
        "severity": d.severity,
        "line": d.span.line,
        "column": d.span.column,
        "length": d.span.length,
        "message": d.message,
        "code": d.code,
    }


def listing_to_dicts(
    entries: list[tuple[StrategicLabel, int]]
) -> list[dict]:
    """Transition listing for the stepping surfaces (CLI and API)."""
    out = []
    for index, (label, target) in enumerate(entries):
        d = label_to_dict(label)
        d["index"] = index
        d["target"] = target
        out.append(d)
    return out
