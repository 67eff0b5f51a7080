"""HTTP service exposing interactive command sessions.

A session owns a world, its grounding registry, the template library, and
the evolving environment state.  Commands run the full pipeline
(NL -> CQ -> grounded LTL -> plan); stepping executes the pending plan one
action at a time while progressing the residual specification.

Pipeline failures are returned as 200 responses with the ``error`` field
populated so a console can display the failure kind; only transport-level
problems (unknown session, malformed body) map to HTTP errors.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import ltl
from .frontend import ContextualQuery, FrontendError, extract_cq
from .grounding import GroundingError, GroundingLexicon, PropRegistry, build_registry, label_state
from .planner import PlannerError, plan, progress
from .templates import TemplateError, TemplateLibrary, instantiate
from .world import (
    Cell,
    HeldByAgent,
    InContainer,
    StateExplosion,
    ToyState,
    WorldConfig,
    action_from_str,
    action_to_str,
    initial_state,
    state_bound,
    transition,
    validate_state,
)

DEFAULT_SESSION_TTL_S = 30 * 60.0


class MissingTemplate(Exception):
    pass


@dataclass
class WorldBundle:
    world: WorldConfig
    lexicon: GroundingLexicon
    registry: PropRegistry


@dataclass
class Session:
    id: str
    world_id: str
    bundle: WorldBundle
    current: ToyState
    pending_plan: list[str] = field(default_factory=list)
    cursor: int = 0
    residual: ltl.LtlFormula | None = None
    history: list[dict] = field(default_factory=list)
    last_access: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


class CommandBody(BaseModel):
    text: str
    pos_mode: bool | None = None


class SessionBody(BaseModel):
    world_id: str | None = None


def render_state(w: WorldConfig, s: ToyState) -> dict:
    def loc_json(loc) -> dict:
        if isinstance(loc, Cell):
            return {"kind": "cell", "cell": loc.cell}
        if isinstance(loc, HeldByAgent):
            return {"kind": "held"}
        if isinstance(loc, InContainer):
            return {"kind": "in_container", "container": loc.container}
        raise TypeError(f"unknown location {loc!r}")

    from .world import entity_cell

    return {
        "grid": {"width": w.grid_width, "height": w.grid_height},
        "agent_cell": s.agent_cell,
        "holding": s.held_entity(),
        "toys": [
            {
                "id": t.id,
                "shape": t.shape,
                "color": t.color,
                "cell": entity_cell(w, s, t.id),
                "location": loc_json(s.toy_loc(t.id)),
            }
            for t in w.toys
        ],
        "containers": [
            {
                "id": c.id,
                "kind": c.kind,
                "cell": entity_cell(w, s, c.id),
                "location": loc_json(s.container_loc(c.id)),
            }
            for c in w.containers
        ],
        "rooms": [{"id": r.id, "cells": sorted(r.cells)} for r in w.rooms],
    }


def create_app(bundles: dict[str, WorldBundle], default_world: str,
               library: TemplateLibrary, pos_mode: bool = True,
               session_ttl_s: float = DEFAULT_SESSION_TTL_S,
               plan_state_cap: int = 500_000) -> FastAPI:
    if default_world not in bundles:
        raise KeyError(f"default world {default_world!r} is not registered")

    app = FastAPI(title="groundsmith", version="0.1.0")
    sessions: dict[str, Session] = {}
    sessions_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400,
                            content={"kind": "MalformedBody", "detail": str(exc)})

    def error_response(status: int, kind: str, detail: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"kind": kind, "detail": detail})

    def evict_idle() -> None:
        now = time.monotonic()
        with sessions_lock:
            stale = [sid for sid, s in sessions.items() if now - s.last_access > session_ttl_s]
            for sid in stale:
                del sessions[sid]

    def get_session(sid: str) -> Session | None:
        evict_idle()
        with sessions_lock:
            session = sessions.get(sid)
            if session is not None:
                session.last_access = time.monotonic()
            return session

    @app.post("/sessions")
    async def create_session(body: SessionBody | None = None):
        evict_idle()
        world_id = (body.world_id if body and body.world_id else default_world)
        bundle = bundles.get(world_id)
        if bundle is None:
            return error_response(404, "UnknownWorld", f"no world named {world_id!r}")
        session = Session(
            id=uuid.uuid4().hex,
            world_id=world_id,
            bundle=bundle,
            current=initial_state(bundle.world),
        )
        with sessions_lock:
            sessions[session.id] = session
        return {
            "session_id": session.id,
            "world_id": world_id,
            "state": render_state(bundle.world, session.current),
        }

    @app.get("/sessions/{sid}/state")
    async def get_state(sid: str):
        session = get_session(sid)
        if session is None:
            return error_response(404, "UnknownSession", f"no session {sid!r}")
        with session.lock:
            return {"state": render_state(session.bundle.world, session.current)}

    @app.post("/sessions/{sid}/command")
    async def command(sid: str, body: CommandBody):
        session = get_session(sid)
        if session is None:
            return error_response(404, "UnknownSession", f"no session {sid!r}")
        use_pos = pos_mode if body.pos_mode is None else body.pos_mode
        bundle = session.bundle
        with session.lock:
            response: dict = {"cq": None, "ltl": None, "plan": None, "accepted": False}
            outcome = "ok"
            try:
                cq = extract_cq(body.text, bundle.lexicon)
                if not use_pos:
                    cq = ContextualQuery(cq.descriptor, cq.params, param_pos=None)
                response["cq"] = {"descriptor": cq.descriptor, "params": list(cq.params)}
                template = library.get(cq.descriptor)
                if template is None:
                    raise MissingTemplate(f"no template learned for class {cq.descriptor}")
                grounded = instantiate(template, cq, bundle.registry, bundle.lexicon)
                response["ltl"] = ltl.format_ltl(grounded)
                bound = state_bound(bundle.world)
                if bound > plan_state_cap:
                    raise StateExplosion(
                        f"world state bound {bound} exceeds the planning cap "
                        f"{plan_state_cap}; interactive planning needs a small world")
                result = plan(bundle.world, session.current, grounded, bundle.registry,
                              cap=plan_state_cap)
                actions = [action_to_str(a) for a in result.actions]
                response["plan"] = actions
                response["accepted"] = True
                session.pending_plan = actions
                session.cursor = 0
                session.residual = result.steps[0].spec
            except (FrontendError, GroundingError, TemplateError, PlannerError,
                    StateExplosion, MissingTemplate) as exc:
                response["error"] = {"kind": type(exc).__name__, "detail": str(exc)}
                outcome = type(exc).__name__
                session.pending_plan = []
                session.cursor = 0
                session.residual = None
            session.history.append({
                "text": body.text,
                "cq": response["cq"],
                "ltl": response["ltl"],
                "outcome": outcome,
            })
            return response

    @app.post("/sessions/{sid}/step")
    async def step(sid: str):
        session = get_session(sid)
        if session is None:
            return error_response(404, "UnknownSession", f"no session {sid!r}")
        bundle = session.bundle
        with session.lock:
            if session.cursor >= len(session.pending_plan):
                return error_response(409, "PlanExhausted", "no pending plan action")
            action_str = session.pending_plan[session.cursor]
            session.cursor += 1
            action = action_from_str(action_str)
            session.current = transition(bundle.world, session.current, action)
            validate_state(bundle.world, session.current)
            if session.residual is not None:
                labels = label_state(bundle.registry, bundle.world, session.current,
                                     restrict=ltl.atoms(session.residual))
                session.residual = progress(session.residual, labels)
            remaining = ltl.format_ltl(session.residual) if session.residual is not None else None
            done = isinstance(session.residual, ltl.TrueConst)
            return {
                "action": action_str,
                "state": render_state(bundle.world, session.current),
                "remaining_spec": remaining,
                "steps_left": len(session.pending_plan) - session.cursor,
                "done": done,
            }

    @app.post("/sessions/{sid}/reset")
    async def reset(sid: str):
        session = get_session(sid)
        if session is None:
            return error_response(404, "UnknownSession", f"no session {sid!r}")
        with session.lock:
            session.current = initial_state(session.bundle.world)
            session.pending_plan = []
            session.cursor = 0
            session.residual = None
            return {"state": render_state(session.bundle.world, session.current)}

    @app.get("/worlds")
    async def worlds():
        return {"worlds": sorted(bundles), "default": default_world}

    return app


def bundle_for_world(world: WorldConfig, lexicon: GroundingLexicon | None = None) -> WorldBundle:
    from .grounding import lexicon_from_world

    lex = lexicon if lexicon is not None else lexicon_from_world(world)
    return WorldBundle(world=world, lexicon=lex, registry=build_registry(world, lex))
