"""HTTP session service.

Runs plan narration as an interactive protocol: a client creates a
session from a scene and plan, requests one directive at a time, and
reports each placement back.  The server judges placement accuracy with
the independent resolver, advances the scene along the plan's canonical
positions, and appends every completed step to a per-session log file
(one JSON object per line).
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from fastapi import Body, FastAPI, HTTPException

from . import analytics
from .costs import CoefficientTable
from .engine import (
    Alternative,
    EngineConfig,
    GenerationError,
    InteractionContext,
    generate,
    naive_generate,
)
from .resolver import ResolutionError, check_placement
from .scene import (
    MoveDirective, Scene, Vec3, apply_move, load_plan, load_scene, scene_data,
)

GENERATORS = ("egt", "naive")


def load_coefficients() -> CoefficientTable:
    """Default coefficients, unless EGT_COEFFS names a JSON file."""
    path = os.environ.get("EGT_COEFFS")
    if not path:
        return EngineConfig().table
    return CoefficientTable.from_json(Path(path).read_text())


@dataclass
class PendingDirective:
    directive_id: str
    best: Alternative
    alternatives: List[Alternative]


@dataclass
class Session:
    id: str
    scene: Scene
    plan: List[MoveDirective]
    generator: str
    config: EngineConfig
    log_path: Optional[Path]
    cursor: int = 0
    ctx: InteractionContext = field(default_factory=InteractionContext)
    pending: Optional[PendingDirective] = None
    log: List[analytics.LogEntry] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def done(self) -> bool:
        return self.cursor >= len(self.plan)


def _alternative_data(alt: Alternative) -> dict:
    return {
        "surface": alt.surface,
        "depth": alt.depth,
        "props": alt.props,
        "cost": round(alt.cost, 6),
        "selectable": alt.selectable,
    }


def _session_state(session: Session) -> dict:
    return {
        "id": session.id,
        "scene": scene_data(session.scene),
        "cursor": session.cursor,
        "planLength": len(session.plan),
        "generator": session.generator,
        "done": session.done,
        "pendingDirectiveId": session.pending.directive_id if session.pending else None,
    }


def create_app(log_dir: Optional[Path] = None,
               table: Optional[CoefficientTable] = None) -> FastAPI:
    app = FastAPI(title="blockspeak")
    sessions: Dict[str, Session] = {}
    registry_lock = threading.Lock()
    coeffs = table if table is not None else load_coefficients()

    def _get(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(404, f"unknown session {session_id}")
        return session

    @app.post("/sessions", status_code=201)
    def create_session(body: dict = Body(...)) -> dict:
        generator = body.get("generator", "egt")
        if generator not in GENERATORS:
            raise HTTPException(400, f"generator must be one of {GENERATORS}")
        try:
            scene = load_scene(body["scene"])
            plan = load_plan(body["plan"])
        except (KeyError, TypeError, ValueError) as exc:
            raise HTTPException(400, f"invalid scene or plan: {exc}")
        session_id = uuid.uuid4().hex[:12]
        log_path = None
        if log_dir is not None:
            log_dir.mkdir(parents=True, exist_ok=True)
            log_path = log_dir / f"{session_id}.jsonl"
        session = Session(
            id=session_id, scene=scene, plan=plan, generator=generator,
            config=EngineConfig(table=coeffs), log_path=log_path,
        )
        with registry_lock:
            sessions[session_id] = session
        return {"id": session_id, "scene": scene_data(scene)}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        session = _get(session_id)
        with session.lock:
            return _session_state(session)

    @app.post("/sessions/{session_id}/step")
    def next_step(session_id: str) -> dict:
        session = _get(session_id)
        with session.lock:
            if session.pending is None:
                if session.done:
                    raise HTTPException(409, "plan exhausted")
                move = session.plan[session.cursor]
                try:
                    if session.generator == "naive":
                        best = naive_generate(
                            move, session.scene, session.ctx, session.config.table
                        )
                        alternatives = [best]
                    else:
                        result = generate(move, session.scene, session.ctx, session.config)
                        best = result.best
                        alternatives = list(result.alternatives)
                except GenerationError as exc:
                    raise HTTPException(400, f"step {session.cursor}: {exc}")
                session.pending = PendingDirective(
                    directive_id=f"{session.id}-{session.cursor}",
                    best=best,
                    alternatives=alternatives,
                )
            pending = session.pending
            return {
                "directive": pending.best.surface,
                "alternatives": [_alternative_data(a) for a in pending.alternatives],
                "directiveId": pending.directive_id,
            }

    @app.post("/sessions/{session_id}/action")
    def submit_action(session_id: str, body: dict = Body(...)) -> dict:
        session = _get(session_id)
        with session.lock:
            pending = session.pending
            if pending is None or body.get("directiveId") != pending.directive_id:
                raise HTTPException(409, "no matching pending directive")
            try:
                placed_at = Vec3(*(float(v) for v in body["placedAt"]))
                response_ms = float(body["responseTimeMs"])
                if response_ms < 0:
                    raise ValueError("responseTimeMs must be non-negative")
                speech_ms = body.get("speechDurationMs")
                speech_s = None if speech_ms is None else float(speech_ms) / 1000.0
            except (KeyError, TypeError, ValueError) as exc:
                raise HTTPException(400, f"invalid action: {exc}")

            move = session.plan[session.cursor]
            try:
                accurate = check_placement(
                    pending.best.tree, placed_at, session.scene, session.ctx
                )
            except ResolutionError:
                accurate = False
            support = session.scene.support_of(move.to_pos)
            next_scene, placed_id = apply_move(session.scene, move)

            duration = (
                speech_s
                if speech_s is not None
                else analytics.estimate_utterance_duration(pending.best.surface)
            )
            entry = analytics.LogEntry(
                step=session.cursor,
                surface=pending.best.surface,
                features=pending.best.features,
                depth=pending.best.depth,
                utterance_duration=duration,
                response_time=response_ms / 1000.0,
                accurate=accurate,
                subject=session.id,
            )
            session.log.append(entry)
            if session.log_path is not None:
                with session.log_path.open("a") as fh:
                    fh.write(json.dumps(analytics.log_entry_to_data(entry)) + "\n")

            session.scene = next_scene
            session.ctx = session.ctx.advanced(placed_id, support.id if support else None)
            session.cursor += 1
            session.pending = None
            return {"accurate": accurate, "nextAvailable": not session.done}

    @app.get("/sessions/{session_id}/log")
    def get_log(session_id: str) -> dict:
        session = _get(session_id)
        with session.lock:
            return {"entries": [analytics.log_entry_to_data(e) for e in session.log]}

    return app
