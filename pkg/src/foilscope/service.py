"""HTTP session service for the web client.

Endpoints (JSON bodies, schema version under ``v``)::

    GET  /maps                      bundled map catalog
    POST /sessions                  create (idempotent per map/variant/seed/config)
    GET  /sessions/{id}             full session body incl. history
    POST /sessions/{id}/foils       submit a foil, get the explanation
    GET  /polls/{token}             poll an over-cap submission

Sessions persist to ``data_dir`` in the dialogue serialization format; on
restart they are replayed from their seeds, which reproduces the identical
history. Foil submission is the only mutating call and is append-only,
serialized per session by a lock; different sessions run concurrently.
"""
from __future__ import annotations

import hashlib
import json
import os
import secrets
import threading

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .dialogue import (
    DialogueConfig,
    MissingPreconditionExplanation,
    CostAbstractionExplanation,
    Session,
    replay_session,
)
from .environments import bundled_maps, load_actions, load_map, vocabulary_for
from .model import ContractViolation, InvalidPlanError

API_VERSION = 1

_ALIAS_VARIANTS = {
    "sokoban_switch_prec": ("sokoban_switch", "sokoban-switch-prec"),
    "sokoban_switch_cost": ("sokoban_switch", "sokoban-switch-cost"),
}


class CreateSessionRequest(BaseModel):
    map_id: str
    variant: str | None = None
    seed: int = 0
    config: dict = Field(default_factory=dict)


class FoilRequest(BaseModel):
    actions: list[str]


def _canonical_target(map_id: str, variant: str | None):
    """Resolve aliases and pick the effective variant for a bundled map."""
    if map_id in _ALIAS_VARIANTS:
        base, alias_variant = _ALIAS_VARIANTS[map_id]
        map_id, variant = base, (variant or alias_variant)
    entry = next((m for m in bundled_maps() if m.map_id == map_id), None)
    if entry is None:
        raise HTTPException(status_code=404, detail=f"unknown map {map_id!r}")
    if variant is None:
        variant = entry.default_variant or entry.variants[0]
    if variant not in entry.variants:
        raise HTTPException(
            status_code=422,
            detail=f"map {map_id!r} has no variant {variant!r}",
        )
    return entry, variant


def _session_id(map_id: str, variant: str, seed: int, config: DialogueConfig) -> str:
    key = json.dumps(
        {"map_id": map_id, "variant": variant, "seed": seed, "config": config.to_payload()},
        sort_keys=True,
    )
    return hashlib.sha1(key.encode("utf-8")).hexdigest()[:16]


def _describe(name: str) -> str:
    return name.replace("_", " ")


def _headline_confidence(explanation):
    if isinstance(explanation, MissingPreconditionExplanation):
        return explanation.confidence
    if isinstance(explanation, CostAbstractionExplanation):
        return min(e["confidence"] for e in explanation.entries)
    return None


def create_app(data_dir: str | None = None, compute_cap: int | None = None) -> FastAPI:
    app = FastAPI(title="foilscope", version=str(API_VERSION))
    sessions: dict = {}
    locks: dict = {}
    polls: dict = {}
    registry_lock = threading.Lock()

    def _persist(session: Session) -> None:
        if not data_dir:
            return
        os.makedirs(data_dir, exist_ok=True)
        path = os.path.join(data_dir, f"{session.session_id}.json")
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as handle:
            handle.write(session.serialize() + "\n")
        os.replace(tmp, path)

    def _restore() -> None:
        if not data_dir or not os.path.isdir(data_dir):
            return
        for name in sorted(os.listdir(data_dir)):
            if not name.endswith(".json"):
                continue
            with open(os.path.join(data_dir, name), encoding="utf-8") as handle:
                payload = json.load(handle)
            session = replay_session(payload)
            sessions[session.session_id] = session
            locks[session.session_id] = threading.Lock()

    def _session_body(session: Session) -> dict:
        env = session.env
        # the compiled plan trajectory ends at the synthetic end marker
        live_states = list(session.plan_trajectory.states[:-1])
        body = session.to_payload()
        body.update(
            {
                "grid": env.static_layout(),
                "plan_states": [env.describe_state(s) for s in live_states],
                "vocabulary_info": [
                    {"name": n, "description": _describe(n)} for n in session.vocab.names
                ],
            }
        )
        return body

    def _get_session(session_id: str):
        with registry_lock:
            session = sessions.get(session_id)
            lock = locks.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session, lock

    def _explain_body(session: Session) -> dict:
        entry = session.history[-1]
        explanation = entry.explanation
        trace = None
        if isinstance(explanation, MissingPreconditionExplanation):
            trace = list(explanation.trace)
        return {
            "v": API_VERSION,
            "explanation": explanation.to_payload(),
            "rendered_text": entry.rendered_text,
            "confidence": _headline_confidence(explanation),
            "trace": trace,
        }

    @app.get("/maps")
    def get_maps() -> dict:
        return {
            "v": API_VERSION,
            "maps": [
                {
                    "map_id": m.map_id,
                    "title": m.title,
                    "variants": list(m.variants),
                    "default_variant": m.default_variant or m.variants[0],
                }
                for m in bundled_maps()
            ],
        }

    @app.post("/sessions", status_code=201)
    def create_session(request: CreateSessionRequest) -> dict:
        entry, variant = _canonical_target(request.map_id, request.variant)
        known = set(DialogueConfig().to_payload())
        unknown = set(request.config) - known
        if unknown:
            raise HTTPException(
                status_code=422, detail=f"unknown config keys: {sorted(unknown)}"
            )
        try:
            config = DialogueConfig.from_payload(request.config)
        except (ContractViolation, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        session_id = _session_id(entry.map_id, variant, request.seed, config)
        with registry_lock:
            existing = sessions.get(session_id)
        if existing is not None:
            return _session_body(existing)
        env = load_map(entry.map_id, variant)
        plan = load_actions(env, f"{entry.map_id}.plan")
        try:
            session = Session(
                env,
                vocabulary_for(env),
                plan,
                seed=request.seed,
                config=config,
                map_id=entry.map_id,
                variant=variant,
                session_id=session_id,
            )
        except InvalidPlanError as exc:  # pragma: no cover - bundled plans are valid
            raise HTTPException(status_code=500, detail=str(exc))
        with registry_lock:
            if session_id not in sessions:
                sessions[session_id] = session
                locks[session_id] = threading.Lock()
            session = sessions[session_id]
        _persist(session)
        return _session_body(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        session, _ = _get_session(session_id)
        return _session_body(session)

    @app.post("/sessions/{session_id}/foils")
    def submit_foil(session_id: str, request: FoilRequest):
        session, lock = _get_session(session_id)
        if not request.actions:
            raise HTTPException(status_code=422, detail="empty action list")
        resolved = []
        for token in request.actions:
            try:
                resolved.append(session.env.action(token))
            except ContractViolation:
                raise HTTPException(
                    status_code=422,
                    detail={"message": f"unknown action mnemonic {token!r}", "token": token},
                )

        def _run() -> dict:
            with lock:
                try:
                    session.explain(resolved)
                except ContractViolation as exc:
                    raise HTTPException(status_code=422, detail=str(exc))
                _persist(session)
                return _explain_body(session)

        if compute_cap is not None and session.config.budget > compute_cap:
            token = secrets.token_hex(8)
            with registry_lock:
                polls[token] = None

            def _background() -> None:
                try:
                    body = _run()
                except HTTPException as exc:
                    body = {"v": API_VERSION, "error": exc.detail}
                with registry_lock:
                    polls[token] = body

            threading.Thread(target=_background, daemon=True).start()
            from fastapi.responses import JSONResponse

            return JSONResponse(status_code=202, content={"v": API_VERSION, "poll": token})
        return _run()

    @app.get("/polls/{token}")
    def poll(token: str):
        with registry_lock:
            if token not in polls:
                raise HTTPException(status_code=404, detail=f"unknown poll token {token!r}")
            body = polls[token]
        if body is None:
            from fastapi.responses import JSONResponse

            return JSONResponse(status_code=202, content={"v": API_VERSION, "status": "pending"})
        return body

    _restore()
    return app
