"""HTTP/JSON facade over teaching sessions for a live human teacher.

Endpoints (all JSON; errors are ``{"code", "message"}``)::

    POST /sessions                  create from a builtin name or inline scenario
    GET  /sessions/{id}             full state document
    POST /sessions/{id}/actions     apply one teacher response (optimistic version)
    GET  /scenarios                 builtin scenario list

Sessions live in memory. Writes to one session are serialized behind a
lock and bump a version; stale writers get 409. A state document is a
pure function of the session value, so reads need no coordination.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import learners, protocol
from .domain import featurize
from .learners import LearnerSpec, LinearHypothesis
from .scenarios import (
    BUILTIN_SCENARIOS,
    Scenario,
    ScenarioError,
    scenario_from_doc,
)

LEARNER_NAMES = {
    "logreg-ml": LearnerSpec.logreg_ml,
    "1nn": LearnerSpec.one_nn,
    "logreg-reg": lambda: LearnerSpec.logreg_reg(1.0),
    "knn": lambda: LearnerSpec.knn(3),
}

_GRID = 160  # contour sampling resolution per axis


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


@dataclass
class _Entry:
    session: protocol.TeachingSession
    version: int
    lock: threading.Lock


class SessionStore:
    """In-memory session map; ids are unguessable, versions only grow."""

    def __init__(self):
        self._entries: dict[str, _Entry] = {}
        self._lock = threading.Lock()

    def create(self, session: protocol.TeachingSession) -> tuple[str, _Entry]:
        session_id = secrets.token_urlsafe(16)
        entry = _Entry(session=session, version=1, lock=threading.Lock())
        with self._lock:
            self._entries[session_id] = entry
        return session_id, entry

    def get(self, session_id: str) -> _Entry:
        with self._lock:
            entry = self._entries.get(session_id)
        if entry is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return entry


def boundary_polylines(session: protocol.TeachingSession):
    """Decision-boundary polylines in the plane of the first two features.

    Exact in two cases: a 2-D linear hypothesis (the boundary is a line in
    the plotted feature plane), or a higher-dimensional linear hypothesis
    whose first two features are bare attribute references that determine
    every attribute any current feature reads (then the composed
    classifier restricted to the plotted plane is a computable function
    and its zero level set is contoured). Otherwise None.
    """
    hypothesis = session.hypothesis
    if not isinstance(hypothesis, LinearHypothesis):
        return None
    features = session.feature_set
    if features.dim < 2:
        return None
    universe = session.scenario.universe
    if not universe:
        return None
    pts = np.array(
        [featurize(features, item)[:2] for item in universe.values()]
    )
    pad = 0.2 * np.maximum(pts.max(axis=0) - pts.min(axis=0), 1.0)
    lo = pts.min(axis=0) - pad
    hi = pts.max(axis=0) + pad
    bounds = (float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1]))

    if features.dim == 2:
        segment = learners.line_boundary_points(hypothesis, bounds)
        return None if segment is None else [segment]

    from . import exprlang

    f1, f2 = features.features[0], features.features[1]
    if not (isinstance(f1.tree, exprlang.Attr) and isinstance(f2.tree, exprlang.Attr)):
        return None
    n1, n2 = f1.tree.name, f2.tree.name
    if n1 == n2:
        return None
    used = set()
    for f in features.features:
        used |= f.attr_names()
    if not used <= {n1, n2}:
        return None

    xs = np.linspace(bounds[0], bounds[1], _GRID)
    ys = np.linspace(bounds[2], bounds[3], _GRID)
    z = np.empty((_GRID, _GRID))
    from .domain import Item

    for i, x in enumerate(xs):
        for j, yv in enumerate(ys):
            probe = Item("~probe", {n1: float(x), n2: float(yv)})
            z[i, j] = hypothesis.w @ featurize(features, probe) + hypothesis.b

    from skimage import measure

    polylines = []
    for contour in measure.find_contours(z, 0.0):
        polylines.append(
            [
                [
                    float(np.interp(r, np.arange(_GRID), xs)),
                    float(np.interp(c, np.arange(_GRID), ys)),
                ]
                for r, c in contour
            ]
        )
    return polylines or None


def state_doc(session_id: str, entry: _Entry) -> dict:
    session = entry.session
    scenario = session.scenario
    features = session.feature_set
    classify = learners.as_item_classifier(session.hypothesis, features)
    pending = session.pending.to_doc() if session.pending else None
    invalidation_set = None
    if session.pending and session.pending.invalidation is not None:
        invalidation_set = [
            [oid, int(y)] for oid, y in session.pending.invalidation
        ]
    return {
        "session_id": session_id,
        "version": entry.version,
        "phase": session.phase,
        "outcome": session.outcome,
        "round": session.round,
        "learner": session.spec.kind,
        "training": [[oid, int(y)] for oid, y in session.training.examples],
        "features": list(session.feature_ids),
        "pool": [
            {"id": f.id, "expr": f.expr, "used": f.id in session.feature_ids}
            for f in scenario.pool
        ],
        "training_error_ids": session.training_error_ids,
        "pending_request": pending,
        "invalidation_set": invalidation_set,
        "hypothesis": learners.hypothesis_to_doc(session.hypothesis),
        "boundary_polyline": boundary_polylines(session),
        "predictions": {
            oid: int(classify(item)) for oid, item in scenario.universe.items()
        },
        "objects": [
            {"id": item.id, "attrs": {k: float(v) for k, v in item.attrs.items()}}
            for item in scenario.universe.values()
        ],
        "featurized": {
            oid: [float(v) for v in featurize(features, item)]
            for oid, item in scenario.universe.items()
        },
        "event_log": [event.to_doc() for event in session.events],
    }


def _parse_scenario(payload) -> Scenario:
    ref = payload.get("scenario")
    if isinstance(ref, str):
        if ref not in BUILTIN_SCENARIOS:
            raise ApiError(400, "unknown_scenario", f"no builtin scenario {ref!r}")
        return BUILTIN_SCENARIOS[ref]["generator"]()
    if isinstance(ref, dict):
        try:
            return scenario_from_doc(ref)
        except ScenarioError as exc:
            raise ApiError(400, "bad_scenario", str(exc)) from None
    raise ApiError(400, "bad_scenario", "scenario must be a builtin name or object")


def _parse_learner(payload) -> LearnerSpec:
    name = payload.get("learner")
    factory = LEARNER_NAMES.get(name)
    if factory is None:
        raise ApiError(
            400, "unknown_learner", f"learner must be one of {sorted(LEARNER_NAMES)}"
        )
    return factory()


def create_app() -> FastAPI:
    from fastapi.middleware.cors import CORSMiddleware

    app = FastAPI(title="teachbench", version="0.1.0")
    # desk tool: the UI may be served from elsewhere during development
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore()
    app.state.store = store

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"code": exc.code, "message": exc.message}
        )

    @app.get("/scenarios")
    def list_scenarios():
        return {
            "scenarios": [
                {"name": name, "description": info["description"]}
                for name, info in BUILTIN_SCENARIOS.items()
            ]
        }

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        payload = await _json_body(request)
        scenario = _parse_scenario(payload)
        spec = _parse_learner(payload)
        try:
            session = protocol.new_session(scenario, spec)
        except protocol.ProtocolError as exc:
            raise ApiError(400, "inconsistent_learner", str(exc)) from None
        session_id, entry = store.create(session)
        return state_doc(session_id, entry)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return state_doc(session_id, store.get(session_id))

    @app.post("/sessions/{session_id}/actions")
    async def post_action(session_id: str, request: Request):
        payload = await _json_body(request)
        entry = store.get(session_id)
        if "version" not in payload or "response" not in payload:
            raise ApiError(
                422, "bad_request", "body must carry 'version' and 'response'"
            )
        try:
            response = protocol.response_from_doc(payload["response"])
        except (protocol.ProtocolError, KeyError, TypeError, ValueError) as exc:
            raise ApiError(422, "bad_response", f"malformed response: {exc}") from None
        with entry.lock:
            if payload["version"] != entry.version:
                raise ApiError(
                    409,
                    "version_conflict",
                    f"version {payload['version']} is stale (now {entry.version})",
                )
            try:
                entry.session = protocol.step(entry.session, response)
            except protocol.ProtocolError as exc:
                raise ApiError(422, "bad_response", str(exc)) from None
            entry.version += 1
        return state_doc(session_id, entry)

    _mount_frontend(app)
    return app


async def _json_body(request: Request) -> dict:
    try:
        payload = await request.json()
    except Exception:
        raise ApiError(422, "bad_request", "body must be JSON") from None
    if not isinstance(payload, dict):
        raise ApiError(422, "bad_request", "body must be a JSON object")
    return payload


def _mount_frontend(app: FastAPI) -> None:
    # serve the built browser UI when it exists next to the repo root
    from pathlib import Path

    from fastapi.staticfiles import StaticFiles

    dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if dist.is_dir():
        app.mount("/ui", StaticFiles(directory=str(dist), html=True), name="ui")


app = create_app()
