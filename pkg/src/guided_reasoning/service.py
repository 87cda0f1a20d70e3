"""HTTP service: session creation, live step-event streaming (SSE), protocol
and map retrieval, and the protocol-grounded follow-up dialogue.

Sessions run on worker threads; each session's processing is sequential and
sessions share no mutable state. Terminal sessions are persisted one JSON
document per session and survive restarts.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse, StreamingResponse
from pydantic import BaseModel

from .argmap import ArgumentMap, map_from_dict, map_to_dict, map_to_json
from .config import AppConfig
from .export import render_dot, render_protocol, render_svg
from .gateway import ChatGateway, GatewayError
from .guide import (
    FailureInfo,
    GuideConfig,
    GuideSession,
    SessionState,
    Stage,
    answer_followup,
    run_pros_cons_guide,
    run_suspension_guide,
)
from .protocol import ReasoningProtocol

TERMINAL_STAGES = {Stage.DELIVERED.value, Stage.FAILED.value}


@dataclass(frozen=True)
class StepEvent:
    """One progress step of a session, streamed to subscribers. Sequence
    numbers are gapless per session; the last event is Delivered or Failed."""

    session_id: str
    seq: int
    stage: str
    payload: dict

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "seq": self.seq,
            "stage": self.stage,
            "payload": self.payload,
        }


@dataclass
class SessionRecord:
    session: GuideSession
    events: list[StepEvent] = field(default_factory=list)
    cond: threading.Condition = field(default_factory=threading.Condition)

    @property
    def terminal(self) -> bool:
        return bool(self.events) and self.events[-1].stage in TERMINAL_STAGES

    def append(self, stage: str, payload: dict) -> None:
        with self.cond:
            self.events.append(
                StepEvent(
                    session_id=self.session.id,
                    seq=len(self.events),
                    stage=stage,
                    payload=payload,
                )
            )
            self.cond.notify_all()


class SessionStore:
    """In-memory session registry with file-backed persistence for finished
    sessions."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self._records: dict[str, SessionRecord] = {}
        self._lock = threading.Lock()
        self._load_existing()

    def _load_existing(self) -> None:
        if not self.data_dir.is_dir():
            return
        for path in sorted(self.data_dir.glob("*.json")):
            try:
                record = _record_from_dict(json.loads(path.read_text(encoding="utf-8")))
            except (json.JSONDecodeError, KeyError, ValueError):
                continue
            self._records[record.session.id] = record

    def add(self, record: SessionRecord) -> None:
        with self._lock:
            self._records[record.session.id] = record

    def get(self, session_id: str) -> SessionRecord:
        with self._lock:
            record = self._records.get(session_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return record

    def persist(self, record: SessionRecord) -> None:
        self.data_dir.mkdir(parents=True, exist_ok=True)
        path = self.data_dir / f"{record.session.id}.json"
        path.write_text(
            json.dumps(_record_to_dict(record), indent=1), encoding="utf-8"
        )


def _record_to_dict(record: SessionRecord) -> dict:
    session = record.session
    doc = {
        "id": session.id,
        "problem": session.problem_statement,
        "guide": session.guide,
        "state": session.state.value,
        "answer": session.answer,
        "protocol": session.protocol.to_dicts(),
        "events": [e.to_dict() for e in record.events],
        "map": map_to_dict(session.map) if session.map else None,
    }
    if session.failure:
        doc["failure"] = {
            "stage": session.failure.stage.value,
            "cause": session.failure.cause,
            "last_completed": (
                session.failure.last_completed.value
                if session.failure.last_completed
                else None
            ),
        }
    return doc


def _record_from_dict(doc: dict) -> SessionRecord:
    session = GuideSession(
        problem_statement=doc["problem"],
        guide=doc.get("guide", "pros_cons"),
        id=doc["id"],
    )
    session.state = SessionState(doc["state"])
    session.answer = doc.get("answer")
    session.protocol = ReasoningProtocol.from_dicts(doc.get("protocol", []))
    if doc.get("map"):
        session.map = map_from_dict(doc["map"])
    if doc.get("failure"):
        raw = doc["failure"]
        session.failure = FailureInfo(
            stage=Stage(raw["stage"]),
            cause=raw["cause"],
            last_completed=Stage(raw["last_completed"]) if raw.get("last_completed") else None,
        )
    record = SessionRecord(session=session)
    record.events = [
        StepEvent(
            session_id=e["session_id"],
            seq=e["seq"],
            stage=e["stage"],
            payload=e["payload"],
        )
        for e in doc.get("events", [])
    ]
    return record


class CreateSessionBody(BaseModel):
    problem: str
    guide: str = "pros_cons"


class FollowupBody(BaseModel):
    question: str


GatewayFactory = Callable[[], tuple[ChatGateway, ChatGateway]]


def create_app(
    config: AppConfig | None = None,
    gateway_factory: GatewayFactory | None = None,
    data_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service. `gateway_factory` yields a fresh (client, expert)
    pair per session run or follow-up; by default gateways are built from the
    config document."""
    config = config or AppConfig()
    factory = gateway_factory or config.build_gateways
    store = SessionStore(data_dir or config.data_dir)
    guide_cfg = config.guide_config()

    app = FastAPI(title="guided-reasoning", version="0.1.0")
    app.state.store = store
    # The chat UI may be served from another origin during development.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def run_session(record: SessionRecord, body: CreateSessionBody) -> None:
        client, expert = factory()

        def on_stage(stage: Stage, payload: dict) -> None:
            record.append(stage.value, _safe_payload(payload))

        if body.guide == "suspension":
            session = run_suspension_guide(
                body.problem,
                client,
                expert,
                n_paraphrases=guide_cfg.n_paraphrases,
                cfg=guide_cfg,
                on_stage=on_stage,
            )
        else:
            session = run_pros_cons_guide(
                body.problem, client, expert, guide_cfg, on_stage=on_stage
            )
        session.id = record.session.id
        with record.cond:
            record.session = session
            record.cond.notify_all()
        store.persist(record)

    @app.post("/v1/sessions")
    def create_session(body: CreateSessionBody) -> dict:
        if not body.problem.strip():
            raise HTTPException(status_code=422, detail="problem must be non-empty")
        if body.guide not in ("pros_cons", "suspension"):
            raise HTTPException(status_code=422, detail=f"unknown guide {body.guide!r}")
        record = SessionRecord(
            session=GuideSession(
                problem_statement=body.problem, guide=body.guide, id=uuid.uuid4().hex[:12]
            )
        )
        store.add(record)
        worker = threading.Thread(target=run_session, args=(record, body), daemon=True)
        worker.start()
        return {"session_id": record.session.id}

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        record = store.get(session_id)
        with record.cond:
            return {
                "state": record.session.state.value,
                "answer": record.session.answer,
            }

    @app.get("/v1/sessions/{session_id}/events")
    def get_events(session_id: str, request: Request) -> StreamingResponse:
        record = store.get(session_id)
        last_id = request.headers.get("last-event-id")
        after = int(last_id) if last_id and last_id.isdigit() else -1
        return StreamingResponse(
            _sse_stream(record, after),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    @app.get("/v1/sessions/{session_id}/protocol", response_class=PlainTextResponse)
    def get_protocol(session_id: str) -> str:
        record = store.get(session_id)
        with record.cond:
            return render_protocol(record.session.protocol)

    def _map_or_409(session_id: str) -> ArgumentMap:
        record = store.get(session_id)
        with record.cond:
            argmap = record.session.map
        if argmap is None:
            raise HTTPException(status_code=409, detail="session has no argument map yet")
        return argmap

    @app.get("/v1/sessions/{session_id}/map.svg")
    def get_map_svg(session_id: str) -> Response:
        return Response(render_svg(_map_or_409(session_id)), media_type="image/svg+xml")

    @app.get("/v1/sessions/{session_id}/map.dot")
    def get_map_dot(session_id: str) -> Response:
        return Response(
            render_dot(_map_or_409(session_id)), media_type="text/vnd.graphviz"
        )

    @app.get("/v1/sessions/{session_id}/map.json")
    def get_map_json(session_id: str) -> Response:
        return Response(
            map_to_json(_map_or_409(session_id)), media_type="application/json"
        )

    @app.post("/v1/sessions/{session_id}/followup")
    def followup(session_id: str, body: FollowupBody) -> dict:
        record = store.get(session_id)
        with record.cond:
            session = record.session
        if not session.terminal:
            raise HTTPException(
                status_code=409,
                detail=f"session is {session.state.value}; wait for Delivered or Failed",
            )
        client, _expert = factory()
        try:
            answer = answer_followup(session, body.question, client, guide_cfg)
        except GatewayError as exc:
            raise HTTPException(
                status_code=502, detail=f"gateway failure during Followup: {exc}"
            )
        return {"answer": answer}

    return app


def _safe_payload(payload: dict) -> dict:
    try:
        json.dumps(payload)
        return payload
    except (TypeError, ValueError):
        return {"repr": repr(payload)}


def _format_sse(event: StepEvent) -> str:
    return f"id: {event.seq}\nevent: step\ndata: {json.dumps(event.to_dict())}\n\n"


def _sse_stream(record: SessionRecord, after: int) -> Iterator[str]:
    """Backlog first, then live events until the terminal event is sent."""
    next_seq = after + 1
    while True:
        with record.cond:
            while len(record.events) <= next_seq and not record.terminal:
                record.cond.wait(timeout=10.0)
            chunk = record.events[next_seq:]
            done = record.terminal
        for event in chunk:
            yield _format_sse(event)
            next_seq = event.seq + 1
        if done and chunk == []:
            return
        if done and chunk and chunk[-1].stage in TERMINAL_STAGES:
            return
