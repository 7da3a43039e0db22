"""HTTP/JSON stepping API, the surface the web explorer consumes.

Every POST /program creates a fresh immutable snapshot with its own session
cursor; the program id doubles as the session token.  All JSON bodies go
through the shared canonical serializer, so answers match the CLI byte for
byte.
"""

from __future__ import annotations

import itertools
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from . import jsonio
from .analysis import well_formed
from .coherence import check_coherence
from .equivalence import CongruenceConfig
from .parser import parse, pretty
from .session import SessionState, StepError
from .statespace import explore
from .terms import Program

_FRONTEND_DIR = Path(__file__).resolve().parent.parent.parent / "frontend"


def _json_response(obj, status_code: int = 200) -> Response:
    return Response(
        content=jsonio.dumps_canonical(obj),
        status_code=status_code,
        media_type="application/json",
    )


def create_app(preload: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="ccslm stepping service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    sessions: dict[str, SessionState] = {}
    session_locks: dict[str, threading.Lock] = {}
    ids = itertools.count(1)
    lock = threading.Lock()

    def register(program: Program) -> str:
        with lock:
            program_id = str(next(ids))
            sessions[program_id] = SessionState(program)
            session_locks[program_id] = threading.Lock()
        return program_id

    def lookup(program_id: str) -> Optional[SessionState]:
        return sessions.get(program_id)

    if preload is not None:
        source = Path(preload).read_text(encoding="utf-8")
        result = parse(source)
        if isinstance(result, list) or well_formed(result):
            raise ValueError(f"preloaded program {preload} does not check")
        register(result)

    @app.get("/health")
    def health() -> Response:
        return _json_response({"status": "ok"})

    @app.post("/program")
    async def post_program(request: Request) -> Response:
        body = await request.json()
        source = body.get("source", "") if isinstance(body, dict) else ""
        result = parse(source)
        if isinstance(result, list):
            diags = result
        else:
            diags = well_formed(result)
        if diags:
            return _json_response(
                {"diagnostics": [jsonio.diagnostic_to_dict(d) for d in diags]},
                status_code=400,
            )
        assert isinstance(result, Program)
        program_id = register(result)
        return _json_response({"programId": program_id, "diagnostics": []})

    @app.get("/program/{program_id}/state/{state}/transitions")
    def get_transitions(program_id: str, state: int) -> Response:
        session = lookup(program_id)
        if session is None:
            return _json_response({"error": "unknown program id"}, status_code=404)
        try:
            with session_locks[program_id]:
                entries = session.listing(state)
        except KeyError:
            return _json_response({"error": "unknown state id"}, status_code=404)
        return _json_response(jsonio.listing_to_dicts(entries))

    @app.post("/program/{program_id}/step")
    async def post_step(program_id: str, request: Request) -> Response:
        session = lookup(program_id)
        if session is None:
            return _json_response({"error": "unknown program id"}, status_code=404)
        body = await request.json()
        try:
            from_state, index = int(body["from"]), int(body["index"])
        except (KeyError, TypeError, ValueError):
            return _json_response({"error": "malformed step request"}, status_code=400)
        try:
            with session_locks[program_id]:
                new_state = session.step(from_state, index)
        except KeyError:
            return _json_response({"error": "unknown state id"}, status_code=404)
        except StepError as err:
            return _json_response({"error": str(err)}, status_code=409)
        return _json_response(
            {"newState": new_state, "stateTerm": pretty(session.term_of(new_state))}
        )

    @app.post("/program/{program_id}/undo")
    def post_undo(program_id: str) -> Response:
        session = lookup(program_id)
        if session is None:
            return _json_response({"error": "unknown program id"}, status_code=404)
        try:
            with session_locks[program_id]:
                new_state = session.undo()
        except StepError as err:
            return _json_response({"error": str(err)}, status_code=409)
        return _json_response(
            {"newState": new_state, "stateTerm": pretty(session.term_of(new_state))}
        )

    @app.get("/program/{program_id}/lts")
    def get_lts(program_id: str, bound: Optional[int] = None) -> Response:
        session = lookup(program_id)
        if session is None:
            return _json_response({"error": "unknown program id"}, status_code=404)
        lts = explore(session.program, bound)
        return _json_response(jsonio.lts_to_dict(lts))

    @app.get("/program/{program_id}/coherence")
    def get_coherence(
        program_id: str,
        bound: Optional[int] = None,
        cong: str = "strong",
        labels: str = "action",
    ) -> Response:
        session = lookup(program_id)
        if session is None:
            return _json_response({"error": "unknown program id"}, status_code=404)
        mode = "full-strategic" if labels == "full" and cong == "strong" else "action-only"
        cfg = CongruenceConfig(relation=cong, label_mode=mode)
        report = check_coherence(session.program, bound, cfg)
        return _json_response(jsonio.report_to_dict(report))

    if _FRONTEND_DIR.is_dir():
        app.mount("/ui", StaticFiles(directory=_FRONTEND_DIR, html=True), name="ui")

    return app


def run_server(port: int = 8000, file: Optional[str] = None) -> None:
    import uvicorn

    uvicorn.run(create_app(preload=file), host="127.0.0.1", port=port, log_level="warning")
