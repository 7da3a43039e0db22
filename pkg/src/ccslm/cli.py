"""Command-line front end.

Exit codes: 0 success / property holds, 1 property fails, 2 usage or
parse/well-formedness error, 3 inconclusive (exploration bound hit).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import jsonio
from .analysis import well_formed
from .coherence import check_coherence
from .equivalence import CongruenceConfig, CongruenceOracle, Tristate
from .parser import Diagnostic, parse, pretty
from .session import SessionState, StepError
from .statespace import explore, explore_multi, export_lts, normal_forms
from .terms import Name, Program, Span

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_ERROR = 2
EXIT_INCONCLUSIVE = 3


def _load(path: str) -> tuple[Optional[Program], list[Diagnostic]]:
    try:
        with open(path, encoding="utf-8") as handle:
            src = handle.read()
    except OSError as err:
        return None, [Diagnostic("error", Span(1, 1, 0), str(err), "io/read")]
    result = parse(src)
    if isinstance(result, list):
        return None, result
    return result, well_formed(result)


def _report_diagnostics(diags: list[Diagnostic], as_json: bool) -> None:
    if as_json:
        print(jsonio.dumps_canonical({"diagnostics": [jsonio.diagnostic_to_dict(d) for d in diags]}))
    for d in diags:
        print(d.render(), file=sys.stderr)


def _config(args: argparse.Namespace) -> CongruenceConfig:
    relation = getattr(args, "cong", "strong")
    labels = getattr(args, "labels", "action")
    mode = "full-strategic" if labels == "full" else "action-only"
    if relation == "weak":
        mode = "action-only"
    return CongruenceConfig(relation=relation, label_mode=mode)


def cmd_check(args: argparse.Namespace) -> int:
    program, diags = _load(args.file)
    if program is None or diags:
        _report_diagnostics(diags, args.json)
        return EXIT_ERROR
    if args.json:
        print(jsonio.dumps_canonical({"diagnostics": []}))
    else:
        print("ok")
    return EXIT_OK


def cmd_lts(args: argparse.Namespace) -> int:
    program, diags = _load(args.file)
    if program is None or diags:
        _report_diagnostics(diags, False)
        return EXIT_ERROR
    lts = explore(program, args.bound)
    sys.stdout.write(export_lts(lts, args.format).decode("utf-8"))
    if args.format == "json":
        sys.stdout.write("\n")
    return EXIT_OK if lts.complete else EXIT_INCONCLUSIVE


def cmd_coherence(args: argparse.Namespace) -> int:
    program, diags = _load(args.file)
    if program is None or diags:
        _report_diagnostics(diags, args.json)
        return EXIT_ERROR
    report = check_coherence(program, args.bound, _config(args))
    if args.json:
        print(jsonio.dumps_canonical(jsonio.report_to_dict(report)))
    else:
        print(f"verdict: {report.verdict} ({report.states_checked} states checked)")
        for v in report.violations:
            print(f"  state {v.state}: {v.kind}: {v.detail}")
    if report.verdict == "coherent":
        return EXIT_OK
    if report.verdict == "incoherent":
        return EXIT_FAILS
    return EXIT_INCONCLUSIVE


def cmd_reduce(args: argparse.Namespace) -> int:
    program, diags = _load(args.file)
    if program is None or diags:
        _report_diagnostics(diags, args.json)
        return EXIT_ERROR
    lts = explore(program, args.bound)
    result = normal_forms(lts, lts.initial, _config(args))
    if args.json:
        print(jsonio.dumps_canonical(jsonio.normal_forms_to_dict(result, lts)))
    else:
        for sid in sorted(result.normal_forms):
            print(f"normal form {sid}: {pretty(lts.states[sid])}")
        print(f"unique modulo congruence: {result.unique_modulo_cong.value}")
    if result.unique_modulo_cong is Tristate.YES:
        return EXIT_OK
    if result.unique_modulo_cong is Tristate.NO:
        return EXIT_FAILS
    return EXIT_INCONCLUSIVE


def cmd_bisim(args: argparse.Namespace) -> int:
    program, diags = _load(args.file)
    if program is None or diags:
        _report_diagnostics(diags, args.json)
        return EXIT_ERROR
    for name in (args.name1, args.name2):
        if name not in program.defs:
            print(f"unknown process name {name}", file=sys.stderr)
            return EXIT_ERROR
    lts, roots = explore_multi(program, [Name(args.name1), Name(args.name2)], args.bound)
    answer = CongruenceOracle(lts, _config(args)).congruent(roots[0], roots[1])
    if args.json:
        print(jsonio.dumps_canonical({"bisimilar": answer.value}))
    else:
        print(f"{args.name1} and {args.name2}: {answer.value}")
    if answer is Tristate.YES:
        return EXIT_OK
    if answer is Tristate.NO:
        return EXIT_FAILS
    return EXIT_INCONCLUSIVE


def cmd_step(args: argparse.Namespace) -> int:
    program, diags = _load(args.file)
    if program is None or diags:
        _report_diagnostics(diags, False)
        return EXIT_ERROR
    try:
        return _step_loop(SessionState(program))
    except BrokenPipeError:
        return EXIT_OK


def _step_loop(session: SessionState) -> int:
    out = sys.stdout
    while True:
        state = session.cursor
        out.write(f"state {state}: {pretty(session.term_of(state))}\n")
        entries = session.listing(state)
        if not entries:
            out.write("  (no transitions)\n")
        for i, (label, target) in enumerate(entries):
            out.write(f"  [{i}] {jsonio.render_label(label)} -> {target}\n")
        out.write("choice> ")
        out.flush()
        line = sys.stdin.readline()
        if not line:
            return EXIT_OK
        choice = line.strip()
        if choice in ("q", "quit", ""):
            return EXIT_OK
        if choice in ("u", "undo"):
            try:
                session.undo()
            except StepError as err:
                out.write(f"{err}\n")
            continue
        try:
            session.step(state, int(choice))
        except (ValueError, StepError) as err:
            out.write(f"invalid choice: {err}\n")


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import run_server

    run_server(port=args.port, file=args.file)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccslm",
        description="Workbench for priority-guarded, single-clock process terms",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_bound(p: argparse.ArgumentParser) -> None:
        p.add_argument("--bound", type=int, default=None, help="state exploration bound")

    def add_cong(p: argparse.ArgumentParser) -> None:
        p.add_argument("--cong", choices=("strong", "weak"), default="strong")
        p.add_argument("--labels", choices=("action", "full"), default="action")

    def add_json(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="print the report as JSON")

    p = sub.add_parser("check", help="parse and well-formedness check")
    p.add_argument("file")
    add_json(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("lts", help="explore and export the state space")
    p.add_argument("file")
    add_bound(p)
    p.add_argument("--format", choices=("dot", "json"), default="json")
    p.set_defaults(func=cmd_lts)

    p = sub.add_parser("step", help="interactive transition stepper")
    p.add_argument("file")
    p.set_defaults(func=cmd_step)

    p = sub.add_parser("coherence", help="check observability and the diamond property")
    p.add_argument("file")
    add_bound(p)
    add_cong(p)
    add_json(p)
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("reduce", help="silent-reduction normal forms and uniqueness")
    p.add_argument("file")
    add_bound(p)
    add_cong(p)
    add_json(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("bisim", help="bisimilarity of two defined processes")
    p.add_argument("file")
    p.add_argument("name1")
    p.add_argument("name2")
    add_bound(p)
    add_cong(p)
    add_json(p)
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("serve", help="run the HTTP/JSON stepping service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("file", nargs="?", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def run_cli(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_ERROR if err.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
