"""Human-in-the-loop campaign manager.

A session wraps a resumable strategy runner around outcomes supplied by a
human (or an external simulator). Sessions are event-sourced: the persisted
file holds the creation header and the suggest/record event log, and load
replays the log through the deterministic runner, verifying the stored
snapshot. Exposed over a local HTTP/JSON API consumed by the CLI and the
browser client.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
from pydantic import BaseModel

from .core import NonMonotoneOracleError
from .strategies import StrategySpec, make_runner
from .svc import MajorityFallbackSignal, platt_calibrate, select_gamma_cv, svc_fit
from .transforms import Transform, crash_transform_grid, crash_transform_inner, ice_breaking_transform, identity_transform
from .volume import uncertain_volume

SESSION_FILE_VERSION = 1

READY = "ready_to_suggest"
AWAITING = "awaiting_outcome"
COMPLETE = "complete"
CORRUPT = "corrupt"

SESSION_STRATEGY_KINDS = ("ag", "ai", "gg", "gi", "amc")


class SessionError(Exception):
    def __init__(self, code: str, message: str, status_code: int = 400, witnesses=None):
        self.code = code
        self.status_code = status_code
        self.witnesses = witnesses
        super().__init__(message)

    def payload(self) -> dict:
        body = {"code": self.code, "message": str(self)}
        if self.witnesses is not None:
            body["witnesses"] = self.witnesses
        return body


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def transform_from_request(data, dimension: int) -> Transform:
    """Accept null (identity), a preset name, or a full transform document."""
    if data is None:
        return identity_transform(dimension)
    if isinstance(data, str):
        presets = {
            "identity": lambda: identity_transform(dimension),
            "ice-breaking": ice_breaking_transform,
            "crash-grid": crash_transform_grid,
            "crash-inner": crash_transform_inner,
        }
        if data not in presets:
            raise SessionError("unknown_transform", f"unknown transform preset {data!r}")
        return presets[data]()
    return Transform.from_dict(data)


@dataclass
class Session:
    id: str
    created_at: str
    transform: Transform
    strategy: StrategySpec
    runner: object
    events: list = field(default_factory=list)
    history: list = field(default_factory=list)
    pending: np.ndarray | None = None
    status: str = READY
    corrupt_witnesses: list | None = None
    v_history: list = field(default_factory=list)

    @classmethod
    def create(cls, transform: Transform, strategy: StrategySpec) -> "Session":
        if strategy.kind not in SESSION_STRATEGY_KINDS:
            raise SessionError(
                "bad_strategy",
                f"sessions support {SESSION_STRATEGY_KINDS}, got {strategy.kind!r}",
            )
        if transform.dimension != strategy.dimension:
            raise SessionError(
                "dimension_mismatch",
                f"transform has {transform.dimension} dimensions, strategy {strategy.dimension}",
            )
        runner = _session_runner(strategy, transform)
        return cls(
            id=uuid.uuid4().hex,
            created_at=_now(),
            transform=transform,
            strategy=strategy,
            runner=runner,
        )

    # ---- operations ----

    def suggest(self) -> dict:
        if self.status == CORRUPT:
            raise SessionError("corrupt", "session is corrupt", 409, self.corrupt_witnesses)
        if self.status == COMPLETE:
            return self._completion_notice()
        if self.pending is None:
            point = self.runner.propose()
            if point is None:
                self.status = COMPLETE
                self.events.append({"type": "completed"})
                return self._completion_notice()
            self.pending = point
            self.status = AWAITING
            self.events.append({"type": "suggested", "point": point.tolist()})
        return {
            "complete": False,
            "unit": self.pending.tolist(),
            "physical": self.transform.to_physical(self.pending).tolist(),
            "units": self.transform.unit_labels(),
            "status": self.status,
        }

    def record(self, label: int) -> dict:
        if self.status == CORRUPT:
            raise SessionError("corrupt", "session is corrupt", 409, self.corrupt_witnesses)
        if self.status != AWAITING or self.pending is None:
            raise SessionError("not_awaiting", "no pending suggestion to answer", 409)
        if label not in (-1, 1):
            raise SessionError("bad_label", f"label must be -1 or 1, got {label!r}")
        self.events.append({"type": "recorded", "label": int(label)})
        try:
            rec = self.runner.feed(int(label))
        except NonMonotoneOracleError as exc:
            self.status = CORRUPT
            self.corrupt_witnesses = exc.witnesses()
            self.pending = None
            raise SessionError("corrupt", str(exc), 409, self.corrupt_witnesses) from exc
        self.history.append(rec)
        self.pending = None
        self.status = READY
        report = uncertain_volume(self.runner.state)
        self.v_history.append(report.v_uncertain)
        return {
            "status": self.status,
            "n_evaluated": self.runner.state.n_evaluated,
            "volume": {
                "v_negative": report.v_negative,
                "v_positive": report.v_positive,
                "v_uncertain": report.v_uncertain,
                "method": report.method,
            },
        }

    def _completion_notice(self) -> dict:
        v = uncertain_volume(self.runner.state).v_uncertain
        return {"complete": True, "status": COMPLETE, "final_v_uncertain": v}

    # ---- serialization ----

    def summary(self) -> dict:
        state = self.runner.state
        return {
            "id": self.id,
            "created_at": self.created_at,
            "status": self.status,
            "strategy": self.strategy.to_dict(),
            "n_evaluated": state.n_evaluated,
            "v_uncertain": self.v_history[-1] if self.v_history else 1.0,
            "v_history": list(self.v_history),
            "pending": None if self.pending is None else {
                "unit": self.pending.tolist(),
                "physical": self.transform.to_physical(self.pending).tolist(),
            },
            "corrupt_witnesses": self.corrupt_witnesses,
        }

    def document(self) -> dict:
        state = self.runner.state
        return {
            "version": SESSION_FILE_VERSION,
            "id": self.id,
            "created_at": self.created_at,
            "transform": self.transform.to_dict(),
            "strategy": self.strategy.to_dict(),
            "events": list(self.events),
            "snapshot": {
                "status": self.status,
                "pending": None if self.pending is None else self.pending.tolist(),
                "points": state.points.tolist(),
                "labels": state.labels.tolist(),
                "neg_frontier": sorted(state.neg_frontier.tolist()),
                "pos_frontier": sorted(state.pos_frontier.tolist()),
                "v_history": list(self.v_history),
                "corrupt_witnesses": self.corrupt_witnesses,
                "history": [r.to_dict() for r in self.history],
            },
        }

    @classmethod
    def replay(cls, doc: dict) -> "Session":
        """Rebuild a session by replaying its event log; verifies that the
        result matches the persisted snapshot."""
        strategy = StrategySpec.from_dict(doc["strategy"])
        transform = Transform.from_dict(doc["transform"])
        session = cls(
            id=doc["id"],
            created_at=doc["created_at"],
            transform=transform,
            strategy=strategy,
            runner=_session_runner(strategy, transform),
        )
        for event in doc["events"]:
            kind = event["type"]
            if kind == "suggested":
                point = session.runner.propose()
                if point is None or not np.array_equal(point, np.asarray(event["point"])):
                    raise SessionError(
                        "replay_mismatch",
                        f"event log proposes {event['point']}, runner proposes "
                        f"{None if point is None else point.tolist()}",
                        500,
                    )
                session.pending = point
                session.status = AWAITING
            elif kind == "recorded":
                try:
                    rec = session.runner.feed(int(event["label"]))
                except NonMonotoneOracleError as exc:
                    session.status = CORRUPT
                    session.corrupt_witnesses = exc.witnesses()
                    session.pending = None
                    continue
                session.history.append(rec)
                session.pending = None
                session.status = READY
                session.v_history.append(uncertain_volume(session.runner.state).v_uncertain)
            elif kind == "completed":
                session.status = COMPLETE
            else:
                raise SessionError("bad_event", f"unknown event type {kind!r}", 500)
        session.events = list(doc["events"])
        snap = doc.get("snapshot")
        if snap is not None:
            rebuilt = session.document()["snapshot"]
            if rebuilt != snap:
                raise SessionError("replay_mismatch", "snapshot does not match replayed state", 500)
        return session

    # ---- reporting ----

    def report(self, slice_dims=(0, 1), grid: int = 64, fixed=None) -> dict:
        state = self.runner.state
        p = state.dimension
        vol = uncertain_volume(state)
        doc = {
            "session_id": self.id,
            "status": self.status,
            "n_evaluated": state.n_evaluated,
            "v_uncertain": vol.v_uncertain,
            "v_negative": vol.v_negative,
            "v_positive": vol.v_positive,
            "v_history": list(self.v_history),
            "evaluated": [
                {
                    "index": i + 1,
                    "unit": state.points[i].tolist(),
                    "physical": self.transform.to_physical(state.points[i]).tolist(),
                    "label": int(state.labels[i]),
                }
                for i in range(state.n_evaluated)
            ],
            "neg_frontier": state.neg_frontier.tolist(),
            "pos_frontier": state.pos_frontier.tolist(),
            "pending": None
            if self.pending is None
            else {
                "unit": self.pending.tolist(),
                "physical": self.transform.to_physical(self.pending).tolist(),
            },
            "unit_labels": self.transform.unit_labels(),
            "corrupt_witnesses": self.corrupt_witnesses,
        }
        model = self._fit_boundary_model()
        doc["svc"] = None if model is None else model.to_dict()
        doc["slice"] = self._slice_raster(model, slice_dims, grid, fixed)
        return doc

    def _fit_boundary_model(self):
        state = self.runner.state
        labels = state.labels
        if min(int((labels == -1).sum()), int((labels == 1).sum())) < 5:
            return None
        try:
            gamma = select_gamma_cv(state.points, labels, seed=self.strategy.seed)
        except MajorityFallbackSignal:
            return None
        return platt_calibrate(svc_fit(state.points, labels, gamma))

    def _slice_raster(self, model, slice_dims, grid, fixed) -> dict:
        state = self.runner.state
        p = state.dimension
        dims = tuple(int(d) for d in slice_dims)[:2] if p > 1 else (0, 0)
        if p > 1 and (len(set(dims)) != 2 or any(d < 0 or d >= p for d in dims)):
            raise SessionError("bad_slice", f"slice_dims must be two distinct dims < {p}")
        if fixed is None:
            fixed = [0.5] * p
        fixed = [float(v) for v in fixed]
        if len(fixed) != p:
            raise SessionError("bad_slice", f"fixed values must list all {p} coordinates")
        centers = (np.arange(grid) + 0.5) / grid
        queries = np.tile(np.asarray(fixed), (grid * grid, 1))
        xx, yy = np.meshgrid(centers, centers, indexing="ij")
        queries[:, dims[0]] = xx.ravel()
        if p > 1:
            queries[:, dims[1]] = yy.ravel()
        codes = state.classify_many(queries).reshape(grid, grid)
        out = {
            "dims": list(dims),
            "fixed": fixed,
            "grid": grid,
            # raster[i][j]: class at dims[0] = (i+0.5)/grid, dims[1] = (j+0.5)/grid
            "raster": codes.astype(int).tolist(),
            "uncertain_fraction": float((codes == 0).mean()),
        }
        if model is not None:
            out["decision"] = model.decision_values(queries).reshape(grid, grid).tolist()
        else:
            out["decision"] = None
        return out


def _session_runner(strategy: StrategySpec, transform: Transform):
    lawful = None
    sample = None
    if any(d.lawful_unit_values() is not None for d in transform.dims):
        lawful = transform.lawful_mask
        lattice = transform.lawful_lattice()
        if lattice is not None:
            def sample(rng, size, _lattice=lattice):
                return _lattice[rng.integers(0, _lattice.shape[0], size=size)]
    return make_runner(strategy, lawful_fn=lawful, sample_fn=sample)


class SessionStore:
    """One JSON file per session under a data directory; atomic writes."""

    def __init__(self, data_dir):
        self.data_dir = str(data_dir)
        os.makedirs(self.data_dir, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> str:
        return os.path.join(self.data_dir, f"{session_id}.json")

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self, transform: Transform, strategy: StrategySpec) -> Session:
        session = Session.create(transform, strategy)
        with self.lock(session.id):
            self._sessions[session.id] = session
            self.save(session)
        return session

    def save(self, session: Session) -> None:
        path = self._path(session.id)
        fd, tmp = tempfile.mkstemp(dir=self.data_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(session.document(), fh, indent=1)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def get(self, session_id: str) -> Session:
        if session_id in self._sessions:
            return self._sessions[session_id]
        path = self._path(session_id)
        if not os.path.exists(path):
            raise SessionError("not_found", f"no session {session_id}", 404)
        with open(path) as fh:
            doc = json.load(fh)
        session = Session.replay(doc)
        self._sessions[session_id] = session
        return session

    def list_ids(self) -> list:
        return sorted(
            name[:-5] for name in os.listdir(self.data_dir) if name.endswith(".json")
        )


# ---------------------------------------------------------------------------
# HTTP API
# ---------------------------------------------------------------------------


class CreateSessionBody(BaseModel):
    strategy: dict
    transform: dict | str | None = None


class OutcomeBody(BaseModel):
    label: int


def create_app(data_dir, token: str | None = None):
    """FastAPI app exposing the session API (and nothing else)."""
    from fastapi import FastAPI
    from fastapi.responses import JSONResponse

    app = FastAPI(title="monogrid sessions", version="1")
    store = SessionStore(data_dir)
    app.state.store = store

    @app.exception_handler(SessionError)
    async def _session_error(request, exc: SessionError):
        return JSONResponse(status_code=exc.status_code, content=exc.payload())

    @app.middleware("http")
    async def _auth(request, call_next):
        if token is not None and request.headers.get("x-auth-token") != token:
            return JSONResponse(status_code=401, content={"code": "unauthorized", "message": "missing or bad token"})
        return await call_next(request)

    @app.get("/sessions")
    def list_sessions():
        return [store.get(sid).summary() for sid in store.list_ids()]

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        try:
            strategy = StrategySpec.from_dict(body.strategy)
        except (KeyError, TypeError, ValueError) as exc:
            raise SessionError("bad_strategy", f"invalid strategy: {exc}") from exc
        transform = transform_from_request(body.transform, strategy.dimension)
        session = store.create(transform, strategy)
        return session.summary()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = store.get(session_id)
        doc = session.document()
        doc["summary"] = session.summary()
        return doc

    @app.post("/sessions/{session_id}/suggest")
    def suggest(session_id: str):
        with store.lock(session_id):
            session = store.get(session_id)
            out = session.suggest()
            store.save(session)
            return out

    @app.post("/sessions/{session_id}/outcome")
    def outcome(session_id: str, body: OutcomeBody):
        with store.lock(session_id):
            session = store.get(session_id)
            try:
                out = session.record(body.label)
            finally:
                store.save(session)
            return out

    @app.get("/sessions/{session_id}/report")
    def report(session_id: str, slice_dims: str = "0,1", grid: int = 64, fixed: str = ""):
        session = store.get(session_id)
        dims = [int(v) for v in slice_dims.split(",") if v != ""]
        if session.strategy.dimension == 1:
            dims = [0, 0]
        fixed_vals = None if fixed == "" else [float(v) for v in fixed.split(",")]
        return session.report(slice_dims=dims, grid=grid, fixed=fixed_vals)

    return app
