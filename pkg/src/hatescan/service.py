"""HTTP API over reports, mention drill-down and expansion sessions.

The service is a thin façade: report bytes come straight from the files a
scan wrote, mention hits from hits.jsonl, and session endpoints call the
expansion module. No statistic is computed here. Every non-2xx response
body is {"status", "code", "message"}.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field as dc_field

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .embeddings import VectorStore, load_vectors
from .errors import (
    DuplicateDecisionError,
    HatescanError,
    NotInQueueError,
    OovError,
    SessionStateError,
    StaleSessionError,
)
from .expansion import (
    DEFAULT_K,
    Session,
    SessionStore,
    commit,
    decide,
    next_suggestions,
    open_session,
    session_to_dict,
)
from .lexicon import Category, Lexicon, load_lexicon, save_lexicon
from .pipeline import HITS_JSONL, REPORT_JSON, RunConfig, run_scan


class ApiError(Exception):
    """Maps straight onto the error body shape."""

    def __init__(self, status: int, code: str, message: str) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={
        "status": status, "code": code, "message": message})


class DecisionBody(BaseModel):
    term: str
    verdict: str


class OpenSessionBody(BaseModel):
    category: str
    k: int = DEFAULT_K


@dataclass
class ServiceState:
    """Mutable backend state; lexicon writes are serialized on a lock."""

    lexicon_path: str
    output_dir: str
    vectors_path: str | None = None
    state_dir: str = "hatescan-sessions"
    scan_config: RunConfig | None = None

    lexicon: Lexicon = dc_field(init=False)
    sessions: dict[str, Session] = dc_field(default_factory=dict)
    jobs: dict[str, dict] = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        self.lexicon = load_lexicon(self.lexicon_path)
        self.store_dir = SessionStore(self.state_dir)
        self.lock = threading.Lock()
        self._vectors: VectorStore | None = None
        self._hits_cache: tuple[float, list[dict]] | None = None
        self._report_cache: tuple[float, bytes, str] | None = None

    def vectors(self) -> VectorStore:
        if self._vectors is None:
            if not self.vectors_path or not os.path.exists(self.vectors_path):
                raise ApiError(409, "no_vectors",
                               "no vector store configured; train or supply one")
            self._vectors = load_vectors(self.vectors_path)
        return self._vectors

    def report_bytes(self) -> tuple[bytes, str]:
        """Raw report.json bytes and the fingerprint inside it (ETag)."""
        path = os.path.join(self.output_dir, REPORT_JSON)
        if not os.path.exists(path):
            raise ApiError(409, "no_report",
                           "no report available; run a scan first")
        mtime = os.path.getmtime(path)
        if self._report_cache is None or self._report_cache[0] != mtime:
            with open(path, "rb") as f:
                body = f.read()
            fingerprint = json.loads(body)["config"]["fingerprint"]
            self._report_cache = (mtime, body, fingerprint)
        return self._report_cache[1], self._report_cache[2]

    def hit_records(self) -> list[dict]:
        path = os.path.join(self.output_dir, HITS_JSONL)
        if not os.path.exists(path):
            raise ApiError(409, "no_report",
                           "no hit log available; run a scan first")
        mtime = os.path.getmtime(path)
        if self._hits_cache is None or self._hits_cache[0] != mtime:
            records = []
            with open(path, encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        records.append(json.loads(line))
            records.sort(key=lambda r: (r["doc_id"], r["start"]))
            self._hits_cache = (mtime, records)
        return self._hits_cache[1]

    def known_target_ids(self) -> set[str]:
        body, _ = self.report_bytes()
        return {t["target_id"] for t in json.loads(body)["targets"]}

    def session(self, session_id: str) -> Session:
        if session_id in self.sessions:
            return self.sessions[session_id]
        try:
            session = self.store_dir.load_session(session_id)
        except SessionStateError:
            raise ApiError(404, "unknown_session",
                           f"unknown session: {session_id}")
        self.sessions[session_id] = session
        return session


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="hatescan", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError):
        return _error_response(exc.status, exc.code, exc.message)

    @app.exception_handler(HatescanError)
    async def handle_domain_error(request: Request, exc: HatescanError):
        status, code = _map_domain_error(exc)
        return _error_response(status, code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError):
        return _error_response(400, "bad_request", str(exc))

    @app.exception_handler(404)
    async def handle_404(request: Request, exc):
        return _error_response(404, "not_found", "no such endpoint or resource")

    @app.get("/api/report")
    def get_report() -> Response:
        body, fingerprint = state.report_bytes()
        return Response(content=body, media_type="application/json",
                        headers={"ETag": f'"{fingerprint}"'})

    @app.get("/api/targets/{target_id}/mentions")
    def get_mentions(target_id: str, category: str | None = None,
                     offset: int = 0, limit: int = 50) -> dict:
        if category is not None:
            try:
                cat = Category(category)
            except ValueError:
                raise ApiError(400, "unknown_category",
                               f"unknown category: {category}")
        if target_id not in state.known_target_ids():
            raise ApiError(404, "unknown_target",
                           f"unknown target: {target_id}")
        if offset < 0 or limit < 0:
            raise ApiError(400, "bad_request", "offset and limit must be >= 0")
        records = [r for r in state.hit_records() if r["target_id"] == target_id]
        if category is not None:
            records = [r for r in records if cat.value in r["hits"]]
        return {
            "total": len(records),
            "offset": offset,
            "limit": limit,
            "hits": records[offset:offset + limit],
        }

    @app.post("/api/sessions", status_code=201)
    def post_session(body: OpenSessionBody) -> dict:
        try:
            category = Category(body.category)
        except ValueError:
            raise ApiError(400, "unknown_category",
                           f"unknown category: {body.category}")
        with state.lock:
            memory = state.store_dir.load_reject_memory()
            session = open_session(state.lexicon, category, state.vectors(),
                                   k=body.k, reject_memory=memory)
            state.sessions[session.id] = session
            state.store_dir.save_session(session)
        return session_to_dict(session)

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return session_to_dict(state.session(session_id))

    @app.get("/api/sessions/{session_id}/next")
    def get_next(session_id: str, n: int = 10) -> dict:
        session = state.session(session_id)
        suggestions = next_suggestions(session, n)
        return {
            "session_id": session.id,
            "remaining": len(session.queue),
            "suggestions": [
                {"term": s.term, "source_term": s.source_term, "score": s.score}
                for s in suggestions
            ],
        }

    @app.post("/api/sessions/{session_id}/decisions")
    def post_decision(session_id: str, body: DecisionBody) -> dict:
        session = state.session(session_id)
        with state.lock:
            decide(session, body.term, body.verdict)
            state.store_dir.save_session(session)
        return {
            "session_id": session.id,
            "decided": len(session.decisions),
            "remaining": len(session.queue),
        }

    @app.post("/api/sessions/{session_id}/commit")
    def post_commit(session_id: str) -> dict:
        session = state.session(session_id)
        with state.lock:
            memory = state.store_dir.load_reject_memory()
            new_version = commit(session, state.lexicon, memory)
            save_lexicon(state.lexicon, state.lexicon_path)
            state.store_dir.save_session(session)
            state.store_dir.save_reject_memory(memory)
        return {
            "session_id": session.id,
            "lexicon_version": new_version,
            "accepted": len(session.accepted_terms()),
            "rejected": len(session.rejected_terms()),
        }

    @app.post("/api/scan", status_code=202)
    def post_scan() -> dict:
        if state.scan_config is None:
            raise ApiError(409, "no_scan_config",
                           "serve was started without corpus/targets configuration")
        job_id = uuid.uuid4().hex
        state.jobs[job_id] = {"id": job_id, "status": "running", "error": None}

        def run() -> None:
            try:
                run_scan(state.scan_config)
                state.jobs[job_id]["status"] = "done"
            except Exception as exc:
                state.jobs[job_id]["status"] = "failed"
                state.jobs[job_id]["error"] = str(exc)

        threading.Thread(target=run, daemon=True).start()
        return {"job_id": job_id, "status": "running"}

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str) -> dict:
        job = state.jobs.get(job_id)
        if job is None:
            raise ApiError(404, "unknown_job", f"unknown job: {job_id}")
        return job

    return app


def _map_domain_error(exc: HatescanError) -> tuple[int, str]:
    if isinstance(exc, StaleSessionError):
        return 409, "stale_session"
    if isinstance(exc, DuplicateDecisionError):
        return 422, "duplicate_decision"
    if isinstance(exc, NotInQueueError):
        return 422, "not_in_queue"
    if isinstance(exc, SessionStateError):
        return 409, "session_state"
    if isinstance(exc, OovError):
        return 422, "out_of_vocabulary"
    return 422, "invalid_input"
