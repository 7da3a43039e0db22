"""Concrete syntax: tokenizer, recursive-descent parser and pretty-printer.

Grammar (EBNF), for `.ccslm` files (UTF-8, `#` comments to end of line):

    program  := (def ";")* "main" "=" proc (";")? ;
    def      := UPNAME "=" proc ;
    proc     := sum ("|" sum)* ;
    sum      := prefixed ("+" prefixed)* ;
    prefixed := act (":" "{" labellist? "}")? "." prefixed | atom ;
    atom     := "0_0" | "0_1" | UPNAME | "(" proc ")" | atom "\\" "{" chanlist? "}" ;
    act      := "tau" | "sigma" | "~"? LOWNAME ;
    label    := "sigma" | "~"? LOWNAME ;

Channels are lowercase identifiers, process names start uppercase.  Parsing is
all-or-nothing: either a Program or a non-empty list of Diagnostics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .terms import (
    CLOCK,
    TAU,
    Action,
    Chan,
    CoChan,
    H0,
    H1,
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
    format_action,
    format_label,
    is_thread,
    label_key,
)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    span: Span
    message: str
    code: str

    def render(self) -> str:
        return f"{self.span.line}:{self.span.column}: {self.severity}: {self.message} [{self.code}]"


class ParseError(Exception):
    """Raised by parse_strict when the source does not parse."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(d.render() for d in diagnostics))
        self.diagnostics = diagnostics


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nil>0_[01])
  | (?P<upname>[A-Z][A-Za-z0-9_]*)
  | (?P<lowname>[a-z][a-z0-9_]*)
  | (?P<sym>[=;.+|\\{}(),:~])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"main", "tau", "sigma"}


@dataclass(frozen=True)
class _Token:
    kind: str  # "nil" | "upname" | "lowname" | "sym" | "eof"
    text: str
    line: int
    column: int
    offset: int

    def span(self, length: Optional[int] = None) -> Span:
        return Span(self.line, self.column, len(self.text) if length is None else length)


def _tokenize(src: str) -> tuple[list[_Token], list[Diagnostic]]:
    tokens: list[_Token] = []
    diags: list[Diagnostic] = []
    line, col, pos = 1, 1, 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            diags.append(
                Diagnostic("error", Span(line, col, 1), f"unexpected character {src[pos]!r}", "parse/char")
            )
            pos += 1
            col += 1
            continue
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, text, line, col, pos))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col, pos))
    return tokens, diags


class _Parser:
    def __init__(self, tokens: list[_Token], src: str):
        self.tokens = tokens
        self.src = src
        self.pos = 0
        self.diags: list[Diagnostic] = []

    # -- token helpers ------------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_sym(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "sym" and tok.text == text

    def eat_sym(self, text: str) -> Optional[_Token]:
        if self.at_sym(text):
            return self.next()
        return None

    def expect_sym(self, text: str, what: str) -> _Token:
        tok = self.eat_sym(text)
        if tok is None:
            raise self._error(self.peek(), f"expected '{text}' {what}")
        return tok

    def _error(self, tok: _Token, message: str, code: str = "parse/unexpected") -> ParseError:
        shown = tok.text if tok.kind != "eof" else "end of input"
        diag = Diagnostic("error", tok.span(), f"{message}, found {shown!r}", code)
        return ParseError([diag])

    def _node_span(self, start: _Token) -> Span:
        end = self.tokens[self.pos - 1] if self.pos > 0 else start
        length = max(end.offset + len(end.text) - start.offset, len(start.text))
        return Span(start.line, start.column, length)

    # -- grammar ------------------------------------------------------------

    def parse_program(self) -> Optional[Program]:
        defs: dict[str, ProcessTerm] = {}
        entry: Optional[ProcessTerm] = None
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                if entry is None:
                    self.diags.append(
                        Diagnostic("error", tok.span(), "missing 'main' definition", "parse/no-main")
                    )
                break
            if entry is not None:
                self.diags.append(
                    Diagnostic("error", tok.span(), "content after 'main' definition", "parse/trailing")
                )
                break
            try:
                if tok.kind == "lowname" and tok.text == "main":
                    self.next()
                    self.expect_sym("=", "after 'main'")
                    entry = self.parse_proc()
                    self.eat_sym(";")
                elif tok.kind == "upname":
                    name_tok = self.next()
                    self.expect_sym("=", f"after definition name {name_tok.text}")
                    body = self.parse_proc()
                    self.expect_sym(";", "after definition")
                    if name_tok.text in defs:
                        self.diags.append(
                            Diagnostic(
                                "error",
                                name_tok.span(),
                                f"duplicate definition of {name_tok.text}",
                                "parse/dup-def",
                            )
                        )
                    else:
                        defs[name_tok.text] = body
                else:
                    raise self._error(tok, "expected a definition or 'main'")
            except ParseError as err:
                self.diags.extend(err.diagnostics)
                self._recover()
        if self.diags or entry is None:
            return None
        return Program(defs, entry)

    def _recover(self) -> None:
        """Skip to just past the next ';' so later definitions still parse."""
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                return
            self.next()
            if tok.kind == "sym" and tok.text == ";":
                return

    def parse_proc(self) -> ProcessTerm:
        start = self.peek()
        out = self.parse_sum()
        while self.eat_sym("|"):
            right = self.parse_sum()
            out = Par(out, right, span=self._node_span(start))
        return out

    def parse_sum(self) -> ProcessTerm:
        start = self.peek()
        first = self.parse_prefixed()
        if not self.at_sym("+"):
            return first
        children = [self._require_thread(first, start)]
        while self.eat_sym("+"):
            op_start = self.peek()
            child = self.parse_prefixed()
            children.append(self._require_thread(child, op_start))
        out: ThreadTerm = children[0]
        for child in children[1:]:
            out = Sum(out, child, span=self._node_span(start))
        return out

    def _require_thread(self, term: ProcessTerm, at: _Token) -> ThreadTerm:
        if is_thread(term):
            return term
        raise ParseError(
            [
                Diagnostic(
                    "error",
                    at.span(),
                    "sum operands must be threads (nil, prefix or sum)",
                    "parse/sum-operand",
                )
            ]
        )

    def parse_prefixed(self) -> ProcessTerm:
        tok = self.peek()
        if tok.kind == "lowname" and tok.text not in _KEYWORDS:
            return self._parse_prefix()
        if tok.kind == "lowname" and tok.text in ("tau", "sigma"):
            return self._parse_prefix()
        if tok.kind == "sym" and tok.text == "~":
            return self._parse_prefix()
        return self.parse_atom()

    def _parse_prefix(self) -> Prefix:
        start = self.peek()
        action = self._parse_act()
        guard: frozenset[Label] = frozenset()
        if self.eat_sym(":"):
            self.expect_sym("{", "to open the guard set")
            guard = frozenset(self._parse_labellist())
            self.expect_sym("}", "to close the guard set")
        self.expect_sym(".", "after the action prefix")
        cont = self.parse_prefixed()
        return Prefix(action, guard, cont, span=self._node_span(start))

    def _parse_act(self) -> Action:
        tok = self.peek()
        if tok.kind == "lowname" and tok.text == "tau":
            self.next()
            return TAU
        return self._parse_label("action")

    def _parse_label(self, what: str) -> Label:
        tok = self.next()
        if tok.kind == "sym" and tok.text == "~":
            name = self.next()
            if name.kind != "lowname" or name.text in _KEYWORDS:
                raise self._error(name, "expected a channel name after '~'")
            return CoChan(name.text)
        if tok.kind == "lowname":
            if tok.text == "sigma":
                return CLOCK
            if tok.text == "tau":
                raise ParseError(
                    [
                        Diagnostic(
                            "error",
                            tok.span(),
                            f"'tau' is not a label and cannot appear in a {what} position",
                            "parse/guard-tau",
                        )
                    ]
                )
            if tok.text == "main":
                raise self._error(tok, f"expected a {what}")
            return Chan(tok.text)
        raise self._error(tok, f"expected a {what}")

    def _parse_labellist(self) -> list[Label]:
        labels: list[Label] = []
        if self.at_sym("}"):
            return labels
        labels.append(self._parse_label("guard label"))
        while self.eat_sym(","):
            labels.append(self._parse_label("guard label"))
        return labels

    def parse_atom(self) -> ProcessTerm:
        tok = self.peek()
        out: ProcessTerm
        if tok.kind == "nil":
            self.next()
            out = Nil(H1 if tok.text == "0_1" else H0, span=tok.span())
        elif tok.kind == "upname":
            self.next()
            out = Name(tok.text, span=tok.span())
        elif self.at_sym("("):
            self.next()
            out = self.parse_proc()
            self.expect_sym(")", "to close the parenthesis")
        else:
            raise self._error(tok, "expected a process")
        while self.at_sym("\\"):
            start = self.next()
            self.expect_sym("{", "to open the restriction set")
            channels = self._parse_chanlist()
            self.expect_sym("}", "to close the restriction set")
            out = Restrict(out, frozenset(channels), span=self._node_span(start))
        return out

    def _parse_chanlist(self) -> list[str]:
        channels: list[str] = []
        if self.at_sym("}"):
            return channels
        channels.append(self._parse_chan())
        while self.eat_sym(","):
            channels.append(self._parse_chan())
        return channels

    def _parse_chan(self) -> str:
        tok = self.next()
        if tok.kind == "sym" and tok.text == "~":
            raise ParseError(
                [
                    Diagnostic(
                        "error",
                        tok.span(),
                        "restriction sets hold channel names only; the co-name is bound implicitly",
                        "parse/restrict-label",
                    )
                ]
            )
        if tok.kind == "lowname" and tok.text in ("sigma", "tau"):
            raise ParseError(
                [
                    Diagnostic(
                        "error",
                        tok.span(),
                        f"'{tok.text}' cannot be restricted; restriction sets hold channel names only",
                        "parse/restrict-label",
                    )
                ]
            )
        if tok.kind != "lowname":
            raise self._error(tok, "expected a channel name")
        return tok.text


def parse(src: str) -> Union[Program, list[Diagnostic]]:
    """Parse source text into a Program, or return all syntax errors.

    All-or-nothing: a Program is returned only when there are no errors.
    Semantic checks (clock stability, name resolution) live in well_formed.
    """
    tokens, diags = _tokenize(src)
    parser = _Parser(tokens, src)
    parser.diags.extend(diags)
    program = parser.parse_program()
    if parser.diags:
        return parser.diags
    assert program is not None
    return program


def parse_strict(src: str) -> Program:
    """Parse, raising ParseError with the diagnostics on failure."""
    result = parse(src)
    if isinstance(result, list):
        raise ParseError(result)
    return result


# ---------------------------------------------------------------------------
# Pretty-printer

def _pp_labelset(labels: frozenset[Label]) -> str:
    return "{" + ",".join(format_label(l) for l in sorted(labels, key=label_key)) + "}"


def _pp_atom(term: ProcessTerm) -> str:
    if isinstance(term, Nil):
        return "0_1" if term.horizon is H1 else "0_0"
    if isinstance(term, Name):
        return term.id
    if isinstance(term, Restrict):
        return f"{_pp_atom(term.body)} \\ {{{','.join(sorted(term.channels))}}}"
    return "(" + _pp_proc(term) + ")"


def _pp_prefixed(term: ProcessTerm) -> str:
    if isinstance(term, Prefix):
        act = format_action(term.action)
        guard = "" if not term.guard else ":" + _pp_labelset(term.guard)
        return f"{act}{guard}.{_pp_prefixed(term.cont)}"
    return _pp_atom(term)


def _pp_sum(term: ProcessTerm) -> str:
    if isinstance(term, Sum):
        return f"{_pp_sum(term.left)} + {_pp_prefixed(term.right)}"
    return _pp_prefixed(term)


def _pp_proc(term: ProcessTerm) -> str:
    if isinstance(term, Par):
        return f"{_pp_proc(term.left)} | {_pp_sum(term.right)}"
    return _pp_sum(term)


def pretty(value: Union[Program, ProcessTerm]) -> str:
    """Render a term or program back to concrete syntax (exact round-trip)."""
    if isinstance(value, Program):
        lines = [f"{name} = {_pp_proc(body)};" for name, body in value.defs.items()]
        lines.append(f"main = {_pp_proc(value.entry)}")
        return "\n".join(lines)
    return _pp_proc(value)
