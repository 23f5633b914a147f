"""HTTP facade over sessions: JSON in/out, all state kept in memory.

Sessions are keyed by server-assigned sequential ids, serialized per session
with a lock, and evicted after an idle timeout.  Field names mirror the
domain types, so responses can be replayed against the library directly.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field as dataclass_field

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .engine import DecisionState, PropagationResult, Violation
from .model import FeatureModel, UnknownFeatureError, parse_model
from .recommend import Catalog, Recommendation, parse_catalog
from .session import (
    Session,
    SessionError,
    StaleRecommendationError,
    apply_recommendation,
    decide,
    new_session,
    recommendations,
    retract,
    suggest_next,
)

__all__ = ["ServiceConfig", "create_app"]


@dataclass
class ServiceConfig:
    model_path: str
    catalog_path: str
    host: str = "127.0.0.1"
    port: int = 8000
    facet: str | None = None
    default_k: int = 5
    session_timeout_minutes: float = 60.0


@dataclass
class _StoredSession:
    session: Session
    lock: threading.Lock = dataclass_field(default_factory=threading.Lock)
    last_access: float = dataclass_field(default_factory=time.monotonic)


class _SessionStore:
    def __init__(self, timeout_minutes: float):
        self._sessions: dict[str, _StoredSession] = {}
        self._timeout = timeout_minutes * 60.0
        self._counter = 0
        self._lock = threading.Lock()

    def create(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.id] = _StoredSession(session)

    def next_id(self) -> str:
        with self._lock:
            self._counter += 1
            return f"s{self._counter}"

    def get(self, session_id: str) -> _StoredSession | None:
        with self._lock:
            now = time.monotonic()
            for sid in [sid for sid, st in self._sessions.items() if now - st.last_access > self._timeout]:
                del self._sessions[sid]
            stored = self._sessions.get(session_id)
            if stored is not None:
                stored.last_access = now
            return stored


class DecisionRequest(BaseModel):
    feature: str
    choice: str


class ApplyRequest(BaseModel):
    config_id: str


def _violation_json(v: Violation) -> dict:
    return {
        "kind": v.kind,
        "features": list(v.features),
        "witness": [{"feature": fid, "state": st.value} for fid, st in v.witness],
        "text": v.describe(),
    }


def _delta_json(result: PropagationResult, config) -> list[dict]:
    out = []
    for fid, st in result.derived:
        prov = config.provenance(fid)
        out.append({
            "feature": fid,
            "state": st.value,
            "provenance": prov.value if prov is not None else None,
        })
    return out


def _model_json(m: FeatureModel) -> dict:
    return {
        "root": m.root,
        "features": [
            {
                "id": f.id,
                "parent": f.parent,
                "variability": f.variability.value,
                "attributes": [
                    {
                        "name": a.name,
                        "kind": a.kind,
                        **({"lo": a.lo, "hi": a.hi} if a.kind == "int" else {"values": list(a.values)}),
                    }
                    for a in f.attributes
                ],
            }
            for f in m.features
        ],
        "groups": [
            {"parent": g.parent, "lower": g.lower, "upper": g.upper, "members": list(g.members)}
            for g in m.groups
        ],
        "cross_constraints": [
            {"kind": c.kind.value, "a": c.a, "b": c.b} for c in m.cross_constraints
        ],
        "facets": [{"name": f.name, "members": list(f.members)} for f in m.facets],
    }


def _session_json(s: Session) -> dict:
    states = {}
    for f in s.model.features:
        prov = s.config.provenance(f.id)
        states[f.id] = {
            "state": s.config.state(f.id).value,
            "provenance": prov.value if prov is not None else None,
        }
    return {
        "session_id": s.id,
        "status": s.status.value,
        "facet": s.facet,
        "states": states,
        "suggested": suggest_next(s),
    }


def _recommendation_json(r: Recommendation, shared: set[str]) -> dict:
    return {
        "config_id": r.config_id,
        "similarity": r.similarity,
        "valid": r.valid,
        "features": sorted(r.features),
        "shared_features": sorted(shared),
    }


def create_app(config: ServiceConfig) -> FastAPI:
    model = parse_model(open(config.model_path, encoding="utf-8").read())
    catalog = parse_catalog(open(config.catalog_path, encoding="utf-8").read(), model)
    store = _SessionStore(config.session_timeout_minutes)
    app = FastAPI(title="plconf")
    # The web client may be served from a different origin than the API.
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])

    def not_found(session_id: str) -> JSONResponse:
        return JSONResponse(status_code=404, content={"error": f"unknown session: {session_id}"})

    @app.get("/model")
    def get_model() -> dict:
        return _model_json(model)

    @app.post("/sessions", status_code=201)
    def create_session() -> dict:
        s = new_session(model, catalog, session_id=store.next_id(), facet=config.facet)
        store.create(s)
        return {"session_id": s.id, "status": s.status.value}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        stored = store.get(session_id)
        if stored is None:
            return not_found(session_id)
        with stored.lock:
            return _session_json(stored.session)

    @app.post("/sessions/{session_id}/decisions")
    def post_decision(session_id: str, req: DecisionRequest):
        stored = store.get(session_id)
        if stored is None:
            return not_found(session_id)
        with stored.lock:
            s = stored.session
            try:
                choice = DecisionState(req.choice)
            except ValueError:
                return JSONResponse(status_code=400, content={"error": f"unknown choice: {req.choice}"})
            if choice is DecisionState.UNDECIDED:
                return JSONResponse(status_code=400, content={"error": "choice must be selected or rejected"})
            try:
                result = decide(s, req.feature, choice)
            except UnknownFeatureError:
                return JSONResponse(status_code=400, content={"error": f"unknown feature: {req.feature}"})
            except SessionError as exc:
                return JSONResponse(status_code=409, content={"error": str(exc)})
            if result.violations:
                return JSONResponse(status_code=409, content={
                    "outcome": "conflict",
                    "feature": req.feature,
                    "choice": req.choice,
                    "status": s.status.value,
                    "violations": [_violation_json(v) for v in result.violations],
                })
            return {
                "outcome": "consistent",
                "feature": req.feature,
                "choice": req.choice,
                "status": s.status.value,
                "derived": _delta_json(result, s.config),
                "suggested": suggest_next(s),
            }

    @app.delete("/sessions/{session_id}/decisions/{feature}")
    def delete_decision(session_id: str, feature: str):
        stored = store.get(session_id)
        if stored is None:
            return not_found(session_id)
        with stored.lock:
            s = stored.session
            try:
                result = retract(s, feature)
            except UnknownFeatureError:
                return JSONResponse(status_code=400, content={"error": f"unknown feature: {feature}"})
            except SessionError as exc:
                return JSONResponse(status_code=400, content={"error": str(exc)})
            return {
                "outcome": "consistent",
                "feature": feature,
                "status": s.status.value,
                "derived": _delta_json(result, s.config),
                "suggested": suggest_next(s),
            }

    @app.get("/sessions/{session_id}/recommendations")
    def get_recommendations(session_id: str, k: int | None = None):
        stored = store.get(session_id)
        if stored is None:
            return not_found(session_id)
        with stored.lock:
            s = stored.session
            try:
                recs = recommendations(s, k if k is not None else config.default_k)
            except SessionError as exc:
                return JSONResponse(status_code=409, content={"error": str(exc)})
            except ValueError as exc:
                return JSONResponse(status_code=400, content={"error": str(exc)})
            selected = s.config.selected()
            return {
                "facet": s.facet,
                "recommendations": [_recommendation_json(r, r.features & selected) for r in recs],
            }

    @app.post("/sessions/{session_id}/apply")
    def post_apply(session_id: str, req: ApplyRequest):
        stored = store.get(session_id)
        if stored is None:
            return not_found(session_id)
        with stored.lock:
            s = stored.session
            try:
                result = apply_recommendation(s, req.config_id)
            except StaleRecommendationError as exc:
                return JSONResponse(status_code=409, content={"error": str(exc)})
            except SessionError as exc:
                return JSONResponse(status_code=409, content={"error": str(exc)})
            return {
                "outcome": "consistent",
                "config_id": req.config_id,
                "status": s.status.value,
                "derived": _delta_json(result, s.config),
            }

    return app
