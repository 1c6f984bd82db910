"""HTTP JSON facade over the session store.

Every mutating route returns the full updated session state so the UI
can replace what it renders wholesale; typed pipeline errors map to 400
or 404 with {"error": code, "message": ...} bodies.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    DblpNlqError,
    EmptyQuestionError,
    IndexOutOfRangeError,
    UnknownSessionError,
)
from .session import ExampleQuestion, SessionStore, load_default_examples

_STATUS = {
    UnknownSessionError: 404,
    IndexOutOfRangeError: 400,
    EmptyQuestionError: 400,
}


class CreateSessionBody(BaseModel):
    question: str


class EntitySelectionBody(BaseModel):
    mention_index: int
    candidate_index: int


class TemplateSelectionBody(BaseModel):
    template_index: int


class QueryBody(BaseModel):
    sparql: str


def create_app(store: SessionStore,
               examples: list[ExampleQuestion] | None = None) -> FastAPI:
    if examples is None:
        examples = load_default_examples()
    app = FastAPI(title="dblpnlq", docs_url=None, redoc_url=None)
    # the web client is served from a different origin in development
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    @app.exception_handler(DblpNlqError)
    async def _pipeline_error(request, exc: DblpNlqError):
        status = 500
        for cls, code in _STATUS.items():
            if isinstance(exc, cls):
                status = code
                break
        return JSONResponse(status_code=status, content=exc.to_dict())

    @app.post("/api/sessions")
    def create_session(body: CreateSessionBody):
        return store.create(body.question).to_dict()

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        return store.get(session_id).to_dict()

    @app.post("/api/sessions/{session_id}/entity-selection")
    def entity_selection(session_id: str, body: EntitySelectionBody):
        return store.select_entity(session_id, body.mention_index,
                                   body.candidate_index).to_dict()

    @app.post("/api/sessions/{session_id}/template-selection")
    def template_selection(session_id: str, body: TemplateSelectionBody):
        return store.select_template(session_id, body.template_index).to_dict()

    @app.post("/api/sessions/{session_id}/query")
    def run_query(session_id: str, body: QueryBody):
        return store.run_query(session_id, body.sparql).to_dict()

    @app.post("/api/sessions/{session_id}/regenerate")
    def regenerate(session_id: str):
        return store.regenerate(session_id).to_dict()

    @app.get("/api/examples")
    def list_examples():
        return {"examples": [e.to_dict() for e in examples]}

    return app
