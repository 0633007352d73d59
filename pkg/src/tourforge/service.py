"""HTTP facade over the engine: dashboards, recording, tours, generation,
playback. All domain documents are returned as canonical JSON bytes so traces
and tour files fetched over HTTP compare byte-for-byte with CLI output.
"""
from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .canonical import canonical_json
from .dashboard import dashboard_from_dict, dashboard_to_dict, state_from_dict
from .errors import (
    BackendTimeoutError,
    BackendTransportError,
    GenerationBusyError,
    GenerationFailedError,
    RevisionConflictError,
    SpecSyntaxError,
    TourForgeError,
    UnknownIdError,
)
from .events import (
    RecordingSession,
    change_to_dict,
    event_from_dict,
    log_from_dict,
    log_to_dict,
)
from .generation import GenerationBackend, MockChat, RemoteChat, generate_tour, regenerate_step
from .playback import export_playback_trace, frame_at, frame_to_dict
from .store import FileStore
from .templates import template_generate
from .tours import (
    CommunicationGoal,
    Tour,
    create_tour,
    edit_step_content,
    insert_interactive_steps,
    insert_standalone_step,
    metadata_from_dict,
    revalidate,
    set_step_goal,
    set_step_overlay_offset,
    state_at,
    tour_from_dict,
    tour_to_dict,
)

ENV_PREFIX = "TOURFORGE_"


@dataclass
class ServiceConfig:
    listen: str = "127.0.0.1:8600"
    store_dir: str = "tourforge-store"
    mode: str = "template-only"  # remote | mock | template-only
    llm_url: str | None = None
    llm_model: str | None = None
    llm_key: str | None = None
    llm_timeout: float = 30.0
    mock_dir: str | None = None
    frontend_dir: str | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("remote", "mock", "template-only"):
            raise SpecSyntaxError(f"config.mode: unknown mode {self.mode!r}")
        if self.mode == "template-only" and (self.llm_url or self.llm_model or self.llm_key):
            raise SpecSyntaxError("template-only mode takes no backend settings")
        if self.mode == "remote" and not (self.llm_url and self.llm_model):
            raise SpecSyntaxError("remote mode needs llm_url and llm_model")
        if self.mode == "mock" and not self.mock_dir:
            raise SpecSyntaxError("mock mode needs mock_dir")


def load_config(path: str | Path | None = None,
                env: dict[str, str] | None = None) -> ServiceConfig:
    """Config file first, then TOURFORGE_* environment overrides."""
    env = os.environ if env is None else env
    doc: dict[str, Any] = {}
    if path is not None:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))

    def pick(env_key: str, doc_key: str, default: Any) -> Any:
        if ENV_PREFIX + env_key in env:
            return env[ENV_PREFIX + env_key]
        return doc.get(doc_key, default)

    timeout = pick("LLM_TIMEOUT", "llmTimeout", 30.0)
    return ServiceConfig(
        listen=pick("LISTEN", "listen", "127.0.0.1:8600"),
        store_dir=pick("STORE", "storeDir", "tourforge-store"),
        mode=pick("MODE", "mode", "template-only"),
        llm_url=pick("LLM_URL", "llmUrl", None),
        llm_model=pick("LLM_MODEL", "llmModel", None),
        llm_key=pick("LLM_KEY", "llmKey", None),
        llm_timeout=float(timeout),
        mock_dir=pick("MOCK_DIR", "mockDir", None),
        frontend_dir=pick("FRONTEND_DIR", "frontendDir", None),
    )


def make_backend(config: ServiceConfig) -> GenerationBackend | None:
    if config.mode == "remote":
        return RemoteChat(endpoint=config.llm_url, model=config.llm_model,
                          auth_token=config.llm_key, timeout=config.llm_timeout)
    if config.mode == "mock":
        return MockChat.from_dir(config.mock_dir)
    return None


_STATUS_BY_ERROR: list[tuple[type, int]] = [
    (UnknownIdError, 404),
    (RevisionConflictError, 409),
    (GenerationBusyError, 409),
    (BackendTimeoutError, 504),
    (BackendTransportError, 502),
    (GenerationFailedError, 502),
]


def _status_for(error: TourForgeError) -> int:
    for cls, status in _STATUS_BY_ERROR:
        if isinstance(error, cls):
            return status
    return 400


def _canonical(doc: Any, status: int = 200) -> Response:
    return Response(content=canonical_json(doc), status_code=status,
                    media_type="application/json")


def create_app(config: ServiceConfig | None = None,
               backend: GenerationBackend | None = None) -> FastAPI:
    config = config or ServiceConfig()
    store = FileStore(config.store_dir)
    if backend is None:
        backend = make_backend(config)

    app = FastAPI(title="tourforge", version="0.1.0")
    app.state.config = config
    app.state.store = store
    app.state.backend = backend

    sessions: dict[str, RecordingSession] = {}
    generation_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def generation_lock(tour_id: str) -> threading.Lock:
        with locks_guard:
            return generation_locks.setdefault(tour_id, threading.Lock())

    @app.exception_handler(TourForgeError)
    async def domain_error(_: Request, error: TourForgeError) -> JSONResponse:
        return JSONResponse(status_code=_status_for(error), content=error.to_payload())

    @app.exception_handler(RequestValidationError)
    async def body_error(_: Request, error: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"code": "syntax_error", "message": "invalid request body",
                     "details": {"errors": json.loads(json.dumps(error.errors(), default=str))}},
        )

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    # -- dashboards ----------------------------------------------------------

    @app.post("/dashboards")
    def ingest_dashboard(doc: dict = Body(...)) -> Response:
        dashboard = dashboard_from_dict(doc)
        store.save_dashboard(dashboard)
        return _canonical(dashboard_to_dict(dashboard), status=201)

    @app.get("/dashboards")
    def list_dashboards() -> Response:
        listing = [{"id": d.id, "title": d.title} for d in store.list_dashboards()]
        return _canonical(listing)

    @app.get("/dashboards/{dashboard_id}")
    def get_dashboard(dashboard_id: str) -> Response:
        return _canonical(dashboard_to_dict(store.load_dashboard(dashboard_id)))

    @app.get("/dashboards/{dashboard_id}/tours")
    def list_tours(dashboard_id: str) -> Response:
        store.load_dashboard(dashboard_id)  # 404 for unknown dashboards
        return _canonical([tour_to_dict(t) for t in store.list_tours(dashboard_id)])

    # -- recording -----------------------------------------------------------

    @app.post("/dashboards/{dashboard_id}/recordings")
    def start_recording(dashboard_id: str, doc: dict = Body(default={})) -> Response:
        dashboard = store.load_dashboard(dashboard_id)
        if "tourId" in doc:
            # anchor the recording at the replayed state of an existing tour
            tour = store.load_tour(doc["tourId"])
            position = int(doc.get("position", len(tour.steps)))
            state = state_at(dashboard, tour, position)
        else:
            state = state_from_dict(doc.get("startState", {}), "startState")
        session_id = uuid.uuid4().hex[:12]
        sessions[session_id] = RecordingSession(dashboard, state)
        return _canonical({"sessionId": session_id}, status=201)

    def _session(session_id: str) -> RecordingSession:
        if session_id not in sessions:
            raise UnknownIdError(f"unknown recording session '{session_id}'",
                                 details={"session": session_id})
        return sessions[session_id]

    @app.post("/recordings/{session_id}/events")
    def record_event(session_id: str, doc: dict = Body(...)) -> Response:
        session = _session(session_id)
        change = session.record(event_from_dict(doc))
        return _canonical(change_to_dict(change))

    @app.post("/recordings/{session_id}/stop")
    def stop_recording(session_id: str) -> Response:
        session = sessions.pop(session_id, None)
        if session is None:
            raise UnknownIdError(f"unknown recording session '{session_id}'",
                                 details={"session": session_id})
        return _canonical(log_to_dict(session.stop()))

    # -- tours ----------------------------------------------------------------

    @app.post("/tours")
    def create_tour_endpoint(doc: dict = Body(...)) -> Response:
        log = log_from_dict(doc.get("log"))
        meta = metadata_from_dict(doc.get("metadata"))
        store.load_dashboard(log.dashboard_id)  # the tour must target a known dashboard
        tour_id = doc.get("id")
        tour = create_tour(log, meta, tour_id=tour_id)
        store.save_tour(tour)
        return _canonical(tour_to_dict(tour), status=201)

    @app.get("/tours/{tour_id}")
    def get_tour(tour_id: str) -> Response:
        return _canonical(tour_to_dict(store.load_tour(tour_id)))

    @app.put("/tours/{tour_id}")
    def put_tour(tour_id: str, doc: dict = Body(...)) -> Response:
        tour = tour_from_dict(doc)
        if tour.id != tour_id:
            raise SpecSyntaxError("tour id in body does not match the URL")
        # clients express structural edits (e.g. step deletion) through PUT;
        # re-replay so stale flags stay sound no matter what was sent
        tour = revalidate(tour, store.load_dashboard(tour.dashboard_id))
        store.save_tour(tour)
        return _canonical(tour_to_dict(tour))

    @app.delete("/tours/{tour_id}", status_code=204)
    def delete_tour(tour_id: str) -> Response:
        store.delete_tour(tour_id)
        return Response(status_code=204)

    def _load_pair(tour_id: str) -> tuple[Tour, Any]:
        tour = store.load_tour(tour_id)
        dashboard = store.load_dashboard(tour.dashboard_id)
        return tour, dashboard

    @app.post("/tours/{tour_id}/generate")
    def generate(tour_id: str, doc: dict = Body(default={})) -> Response:
        tour, dashboard = _load_pair(tour_id)
        mode = doc.get("mode", "template")
        lock = generation_lock(tour_id)
        if not lock.acquire(blocking=False):
            raise GenerationBusyError(
                f"a generation for tour '{tour_id}' is already running",
                details={"tour": tour_id},
            )
        try:
            if mode == "template":
                updated = template_generate(tour, dashboard)
            elif mode == "llm":
                if backend is None:
                    raise SpecSyntaxError(
                        "service runs in template-only mode; no llm backend configured"
                    )
                updated = generate_tour(tour, dashboard, backend)
            else:
                raise SpecSyntaxError(f"generate mode must be llm|template, got {mode!r}")
            store.save_tour(updated)
        finally:
            lock.release()
        return _canonical(tour_to_dict(updated))

    @app.post("/tours/{tour_id}/steps/{k}/regenerate")
    def regenerate(tour_id: str, k: int, doc: dict = Body(default={})) -> Response:
        tour, dashboard = _load_pair(tour_id)
        if not 0 <= k < len(tour.steps):
            raise UnknownIdError(f"tour has no step {k}", details={"step": k})
        step_id = tour.steps[k].id
        if "goal" in doc or "instruction" in doc:
            goal = doc.get("goal")
            goal_override = CommunicationGoal(goal) if goal else tour.steps[k].goal_override
            tour = set_step_goal(tour, step_id, goal_override, doc.get("instruction"))
        mode = doc.get("mode", "llm" if backend is not None else "template")
        lock = generation_lock(tour_id)
        if not lock.acquire(blocking=False):
            raise GenerationBusyError(
                f"a generation for tour '{tour_id}' is already running",
                details={"tour": tour_id},
            )
        try:
            if mode == "template":
                updated = template_generate(tour, dashboard, only_step=k)
            else:
                if backend is None:
                    raise SpecSyntaxError(
                        "service runs in template-only mode; no llm backend configured"
                    )
                updated = regenerate_step(tour, dashboard, step_id, backend)
            store.save_tour(updated)
        finally:
            lock.release()
        return _canonical(tour_to_dict(updated))

    @app.put("/tours/{tour_id}/steps/{k}")
    def edit_step(tour_id: str, k: int, doc: dict = Body(...)) -> Response:
        tour, _ = _load_pair(tour_id)
        if not 0 <= k < len(tour.steps):
            raise UnknownIdError(f"tour has no step {k}", details={"step": k})
        step_id = tour.steps[k].id
        if "title" in doc or "description" in doc:
            tour = edit_step_content(tour, step_id, doc.get("title"), doc.get("description"))
        if "goalOverride" in doc or "stepInstruction" in doc:
            goal = doc.get("goalOverride")
            tour = set_step_goal(
                tour, step_id,
                CommunicationGoal(goal) if goal else None,
                doc.get("stepInstruction"),
            )
        if "overlayOffset" in doc:
            offset = doc["overlayOffset"]
            tour = set_step_overlay_offset(
                tour, step_id,
                (offset["dx"], offset["dy"]) if offset is not None else None,
            )
        store.save_tour(tour)
        return _canonical(tour_to_dict(tour))

    @app.post("/tours/{tour_id}/steps")
    def insert_steps(tour_id: str, doc: dict = Body(...)) -> Response:
        tour, dashboard = _load_pair(tour_id)
        position = doc.get("position")
        if not isinstance(position, int):
            raise SpecSyntaxError("insert needs an integer 'position'")
        if "log" in doc:
            tour = insert_interactive_steps(tour, dashboard, position,
                                            log_from_dict(doc["log"]))
        elif "instruction" in doc:
            tour = insert_standalone_step(tour, position, doc["instruction"])
        else:
            raise SpecSyntaxError("insert needs either 'log' or 'instruction'")
        store.save_tour(tour)
        return _canonical(tour_to_dict(tour))

    # -- playback -------------------------------------------------------------

    @app.get("/tours/{tour_id}/frames")
    def frames(tour_id: str) -> Response:
        tour, dashboard = _load_pair(tour_id)
        return _canonical(export_playback_trace(dashboard, tour))

    @app.get("/tours/{tour_id}/frames/{k}")
    def frame(tour_id: str, k: int) -> Response:
        tour, dashboard = _load_pair(tour_id)
        return _canonical(frame_to_dict(frame_at(dashboard, tour, k)))

    frontend = config.frontend_dir
    if frontend and Path(frontend).is_dir():
        app.mount("/app", StaticFiles(directory=frontend, html=True), name="app")

    return app


def run(config: ServiceConfig) -> None:
    import uvicorn

    host, _, port = config.listen.partition(":")
    uvicorn.run(create_app(config), host=host or "127.0.0.1",
                port=int(port or 8600), log_level="info")
