"""HTTP wire protocol: JSON request/response plus a server-sent event stream.

Every response body carries an ``ok`` flag; failures add a typed
``error`` code (the EngineError code) and a message. Request models
reject unknown fields, and the action payload is a closed discriminated
union, so schema drift fails loudly instead of being ignored.
"""

from __future__ import annotations

import asyncio
import json
from typing import Annotated, Literal, Union

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, ConfigDict, Field

from .content import dump_canonical
from .errors import EngineError
from .service import EngineService
from .session import NotFound


class _Body(BaseModel):
    model_config = ConfigDict(extra="forbid")


class StartLevelAction(_Body):
    action: Literal["start_level"]
    level: int
    now: float | None = None


class AdvanceAction(_Body):
    action: Literal["advance"]
    to: Literal["next", "submit"] = "next"
    arrangement: dict[str, str] | None = None
    now: float | None = None


class ProbeAction(_Body):
    action: Literal["probe"]
    block: str
    x: float
    y: Literal[0, 1]
    now: float | None = None


class AttachAction(_Body):
    action: Literal["attach"]
    block: str
    target: str
    side: Literal["left", "right", "above", "gap"]
    now: float | None = None


class PlaceSeedAction(_Body):
    action: Literal["place_seed"]
    block: str
    x: float = 0.0
    now: float | None = None


class DetachAction(_Body):
    action: Literal["detach"]
    block: str
    now: float | None = None


class PuzzlePlaceAction(_Body):
    action: Literal["puzzle_place"]
    slot: int
    block: str
    now: float | None = None


class PuzzleClearAction(_Body):
    action: Literal["puzzle_clear"]
    slot: int
    now: float | None = None


class EnterCreationAction(_Body):
    action: Literal["enter_creation"]
    now: float | None = None


class AssembleAction(_Body):
    action: Literal["assemble"]
    degree: str
    tenon: list[str] | None = None
    mortise: list[str] | None = None
    now: float | None = None


class FinalizeAction(_Body):
    action: Literal["finalize"]
    name: str
    now: float | None = None


class PlayAction(_Body):
    action: Literal["play"]
    now: float | None = None


class HintCheckAction(_Body):
    action: Literal["hint_check"]
    now: float | None = None


class SaveAction(_Body):
    action: Literal["save"]
    now: float | None = None


SessionAction = Annotated[
    Union[
        StartLevelAction,
        AdvanceAction,
        ProbeAction,
        AttachAction,
        PlaceSeedAction,
        DetachAction,
        PuzzlePlaceAction,
        PuzzleClearAction,
        EnterCreationAction,
        AssembleAction,
        FinalizeAction,
        PlayAction,
        HintCheckAction,
        SaveAction,
    ],
    Field(discriminator="action"),
]


class CreateSessionRequest(_Body):
    session_id: str | None = None
    now: float | None = None


class LoadSessionRequest(_Body):
    session_id: str


class AnalyzeRequest(_Body):
    degrees: list[str]
    key: str = "C"


class RenderRequest(_Body):
    building: dict
    tempo_bpm: float = Field(default=90, gt=0, le=400)
    chord_beats: int = Field(default=2, ge=1, le=16)


def _ok(payload: dict) -> JSONResponse:
    return JSONResponse({"ok": True, **payload})


def _fail(exc: EngineError) -> JSONResponse:
    status = 404 if isinstance(exc, NotFound) else 400
    return JSONResponse(
        {"ok": False, "error": exc.code, "message": str(exc)}, status_code=status
    )


def create_app(
    content_dir: str | None = None, store_dir: str | None = None
) -> FastAPI:
    service = EngineService(content_dir, store_dir)
    app = FastAPI(title="chordblocks", version="0.1.0")
    app.state.service = service

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        del request
        return _fail(exc)

    @app.exception_handler(RequestValidationError)
    async def schema_error_handler(request: Request, exc: RequestValidationError):
        del request
        return JSONResponse(
            {"ok": False, "error": "E_SCHEMA", "message": str(exc.errors()[:3])},
            status_code=422,
        )

    @app.get("/")
    async def index():
        return _ok({"name": "chordblocks", "levels": len(service.levels)})

    @app.get("/levels")
    async def levels():
        return _ok({"levels": service.levels_view()})

    @app.get("/symbols")
    async def symbols():
        return _ok({"symbols": service.symbols_view()})

    @app.get("/matrix")
    async def matrix():
        return _ok({"matrix": service.matrix_view()})

    @app.post("/analyze")
    async def analyze(body: AnalyzeRequest):
        return _ok({"analysis": service.analyze(body.degrees, body.key)})

    @app.post("/render")
    async def render(body: RenderRequest):
        data = service.render_building_doc(
            body.building, body.tempo_bpm, body.chord_beats
        )
        return Response(content=data, media_type="audio/midi")

    @app.post("/sessions")
    async def create_session(body: CreateSessionRequest | None = None):
        body = body or CreateSessionRequest()
        session = service.create_session(body.session_id, body.now)
        return _ok({"session": session.snapshot()})

    @app.post("/sessions/load")
    async def load_session(body: LoadSessionRequest):
        session = service.load(body.session_id)
        return _ok({"session": session.snapshot()})

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return _ok({"session": service.session(session_id).snapshot()})

    @app.post("/sessions/{session_id}/actions")
    async def act(session_id: str, body: SessionAction):
        payload = body.model_dump(exclude_none=True)
        result = await asyncio.to_thread(service.act, session_id, payload)
        return _ok({"result": result, "session": service.session(session_id).snapshot()})

    @app.get("/sessions/{session_id}/events.json")
    async def events_json(session_id: str, after: int = -1):
        return _ok({"events": service.events(session_id, after)})

    @app.get("/sessions/{session_id}/events")
    async def events_stream(request: Request, session_id: str,
                            after: int = -1, wait: float = 0.0):
        service.session(session_id)  # 404 before the stream starts
        last_id_header = request.headers.get("last-event-id")
        start_after = int(last_id_header) if last_id_header else after

        async def stream():
            cursor = start_after
            deadline = asyncio.get_event_loop().time() + wait
            while True:
                for record in service.events(session_id, cursor):
                    cursor = record["seq"]
                    data = json.dumps(record, separators=(",", ":"))
                    yield f"id: {record['seq']}\nevent: {record['type']}\ndata: {data}\n\n"
                if asyncio.get_event_loop().time() >= deadline:
                    break
                if await request.is_disconnected():
                    break
                await asyncio.sleep(0.1)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


def serve(port: int = 8572, content_dir: str | None = None,
          store_dir: str | None = None, host: str = "127.0.0.1") -> None:
    """Run the engine service until interrupted."""
    import uvicorn

    app = create_app(content_dir, store_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


def canonical_json_response(doc: dict) -> Response:
    """Canonical-form JSON (used where byte-stable output matters)."""
    return Response(content=dump_canonical(doc), media_type="application/json")
