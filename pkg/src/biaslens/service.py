"""HTTP facade over the library for the operator console.

Sessions are uploaded once and persisted to disk (one directory per
session holding the three canonical input files plus a manifest), then
queried read-only: metrics, risk, inference, and sweeps are plain function
calls over the parsed dataset, so responses are value-identical to direct
library use. Belief networks are cached per (policy, alpha, min_support).
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, File, HTTPException, Request, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .beliefnet import (
    BeliefNetwork,
    OUTCOME_NODE,
    build_network,
    conditional_rates,
    infer,
)
from .dataset import AttributeSchema, Dataset, parse_dataset
from .errors import BiaslensError, InconsistentEvidenceError
from .metrics import DecisionPolicy, group_metrics
from .risk import ImpactProfile, ensemble_risk, risk_report, whatif_sweep
from . import reports

DEFAULT_MAX_UPLOAD_BYTES = 10 * 1024 * 1024


@dataclass
class Session:
    session_id: str
    dataset: Dataset
    created_at: float
    lock: threading.Lock = field(default_factory=threading.Lock)
    network_cache: dict[tuple, BeliefNetwork] = field(default_factory=dict)

    def network(self, policy: DecisionPolicy, alpha: float, min_support: int) -> BeliefNetwork:
        key = (policy.kind, policy.theta, policy.top_k, alpha, min_support)
        cached = self.network_cache.get(key)
        if cached is not None:
            return cached
        with self.lock:
            cached = self.network_cache.get(key)
            if cached is None:
                cached = build_network(self.dataset, policy, alpha=alpha,
                                       min_support=min_support)
                self.network_cache[key] = cached
        return cached


class SessionStore:
    """Disk-backed session registry. Sessions survive restarts."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, predictions: bytes, attributes: bytes, schema: bytes) -> Session:
        parsed_schema = AttributeSchema.from_json(schema)
        dataset = parse_dataset(predictions, attributes, parsed_schema)
        session_id = uuid.uuid4().hex
        created_at = time.time()
        directory = self.root / session_id
        directory.mkdir(parents=True)
        (directory / "predictions.csv").write_bytes(predictions)
        (directory / "attributes.csv").write_bytes(attributes)
        (directory / "schema.json").write_bytes(schema)
        manifest = {
            "session_id": session_id,
            "created_at": created_at,
            "record_count": len(dataset.records),
            "gallery_size": len(dataset.gallery),
        }
        (directory / "manifest.json").write_text(json.dumps(manifest, indent=2))
        session = Session(session_id=session_id, dataset=dataset, created_at=created_at)
        with self._lock:
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is not None:
            return session
        directory = self.root / session_id
        manifest = directory / "manifest.json"
        if not manifest.exists():
            raise KeyError(session_id)
        schema = AttributeSchema.from_json((directory / "schema.json").read_bytes())
        dataset = parse_dataset(
            (directory / "predictions.csv").read_bytes(),
            (directory / "attributes.csv").read_bytes(),
            schema,
        )
        created_at = json.loads(manifest.read_text())["created_at"]
        session = Session(session_id=session_id, dataset=dataset, created_at=created_at)
        with self._lock:
            # another thread may have loaded it concurrently; keep the first
            session = self._sessions.setdefault(session_id, session)
        return session


def _parse_policy(policy: str | None, theta: float | None, top_k: str | None) -> DecisionPolicy:
    kind = policy or "rank_threshold"
    parsed_top_k: int | str = "all"
    if top_k not in (None, "", "all"):
        try:
            parsed_top_k = int(top_k)
        except ValueError:
            raise HTTPException(422, detail=f"top_k must be an integer or 'all', got {top_k!r}")
    try:
        return DecisionPolicy(kind=kind, theta=theta if theta is not None else 0.0,
                              top_k=parsed_top_k)
    except BiaslensError as exc:
        raise HTTPException(422, detail=str(exc)) from exc


def _parse_hypothetical(text: str | None, dataset: Dataset) -> dict[str, str] | None:
    """attr:value pairs, comma separated, e.g. gender:Male,glasses:False."""
    if not text:
        return None
    values: dict[str, str] = {}
    for item in text.split(","):
        if ":" not in item:
            raise HTTPException(422, detail=f"hypothetical entries must be attr:value, got {item!r}")
        attribute, value = item.split(":", 1)
        attribute, value = attribute.strip(), value.strip()
        if not dataset.schema.has(attribute):
            raise HTTPException(422, detail=f"unknown attribute {attribute!r}")
        if value not in dataset.schema.domain(attribute):
            raise HTTPException(
                422, detail=f"label {value!r} is not in the domain of {attribute!r}")
        values[attribute] = value
    missing = set(dataset.schema.names) - set(values)
    if missing:
        raise HTTPException(
            422, detail=f"hypothetical subject is missing attributes {sorted(missing)}")
    return values


def create_app(sessions_dir: str | Path = "biaslens-sessions",
               max_upload_bytes: int | None = None,
               console_dir: str | Path | None = None) -> FastAPI:
    store = SessionStore(sessions_dir)
    cap = max_upload_bytes or DEFAULT_MAX_UPLOAD_BYTES
    app = FastAPI(title="biaslens", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )

    def get_session(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except KeyError:
            raise HTTPException(404, detail=f"unknown session {session_id!r}") from None

    async def read_upload(upload: UploadFile, name: str) -> bytes:
        data = await upload.read()
        if len(data) > cap:
            raise HTTPException(413, detail=f"{name} exceeds the {cap} byte upload cap")
        return data

    @app.exception_handler(InconsistentEvidenceError)
    async def _evidence_handler(request: Request, exc: InconsistentEvidenceError):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(BiaslensError)
    async def _input_handler(request: Request, exc: BiaslensError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.post("/sessions", status_code=201)
    async def create_session(predictions: UploadFile, attributes: UploadFile,
                             schema_upload: UploadFile = File(alias="schema")):
        payload = {
            "predictions": await read_upload(predictions, "predictions"),
            "attributes": await read_upload(attributes, "attributes"),
            "schema": await read_upload(schema_upload, "schema"),
        }
        session = store.create(payload["predictions"], payload["attributes"],
                               payload["schema"])
        return {
            "session_id": session.session_id,
            "record_count": len(session.dataset.records),
            "gallery_size": len(session.dataset.gallery),
        }

    @app.get("/sessions/{session_id}/metrics")
    def get_metrics(session_id: str, policy: str | None = None,
                    theta: float | None = None, top_k: str | None = None):
        session = get_session(session_id)
        decision = _parse_policy(policy, theta, top_k)
        report = group_metrics(session.dataset, decision)
        return {
            "session_id": session_id,
            "params": {"policy": reports.policy_echo(decision)},
            "report": reports.metrics_document(report, session.dataset),
        }

    @app.get("/sessions/{session_id}/risk")
    def get_risk(session_id: str, policy: str | None = None,
                 theta: float | None = None, top_k: str | None = None,
                 impact_fmr: float = 1.0, impact_fnmr: float = 1.0,
                 hypothetical: str | None = None):
        session = get_session(session_id)
        decision = _parse_policy(policy, theta, top_k)
        try:
            profile = ImpactProfile(impact_fmr=impact_fmr, impact_fnmr=impact_fnmr)
        except BiaslensError as exc:
            raise HTTPException(422, detail=str(exc)) from exc
        report = risk_report(session.dataset, decision, profile)
        body = {
            "session_id": session_id,
            "params": {"policy": reports.policy_echo(decision),
                       "profile": {"impact_fmr": profile.impact_fmr,
                                   "impact_fnmr": profile.impact_fnmr}},
            "report": reports.risk_document(report),
        }
        values = _parse_hypothetical(hypothetical, session.dataset)
        if values is not None:
            body["hypothetical"] = _hypothetical_block(values, report)
        return body

    @app.post("/sessions/{session_id}/infer")
    def post_infer(session_id: str, body: dict):
        session = get_session(session_id)
        query = body.get("query")
        if not isinstance(query, str) or not query:
            raise HTTPException(422, detail="body must carry a query node name")
        evidence = body.get("evidence") or {}
        if not isinstance(evidence, dict):
            raise HTTPException(422, detail="evidence must be an object of node: label")
        alpha = body.get("alpha", 1.0)
        min_support = body.get("min_support", 5)
        if not isinstance(alpha, (int, float)) or alpha < 0:
            raise HTTPException(422, detail="alpha must be a number >= 0")
        if not isinstance(min_support, int) or min_support < 0:
            raise HTTPException(422, detail="min_support must be an integer >= 0")
        policy_body = body.get("policy") or {}
        decision = _parse_policy(policy_body.get("kind"), policy_body.get("theta"),
                                 str(policy_body["top_k"]) if "top_k" in policy_body else None)
        net = session.network(decision, float(alpha), min_support)
        try:
            posterior = infer(net, query, evidence)
            rates = conditional_rates(net, evidence) if query == OUTCOME_NODE else None
        except InconsistentEvidenceError:
            raise
        except BiaslensError as exc:
            # bad query/evidence names are parameter errors, not parse errors
            raise HTTPException(422, detail=str(exc)) from exc
        return {
            "session_id": session_id,
            "report": reports.posterior_document(query, evidence, posterior, rates,
                                                 float(alpha), min_support, decision),
        }

    @app.get("/sessions/{session_id}/sweep")
    def get_sweep(session_id: str, thetas: str = "0", impacts: str = "1:1",
                  policy: str | None = None, top_k: str | None = None):
        session = get_session(session_id)
        decision = _parse_policy(policy, 0.0, top_k)
        try:
            theta_grid = [float(x) for x in thetas.split(",") if x.strip() != ""]
            profile_grid = []
            for pair in impacts.split(","):
                if pair.strip() == "":
                    continue
                fmr_text, _, fnmr_text = pair.partition(":")
                profile_grid.append(ImpactProfile(float(fmr_text), float(fnmr_text)))
        except (ValueError, BiaslensError) as exc:
            raise HTTPException(422, detail=f"bad sweep grids: {exc}") from exc
        if not theta_grid or not profile_grid:
            raise HTTPException(422, detail="sweep grids must be non-empty")
        for theta in theta_grid:
            if not (0.0 <= theta <= 1.0):
                raise HTTPException(422, detail=f"theta must be in [0, 1], got {theta}")
        points = whatif_sweep(session.dataset, profile_grid, theta_grid, policy=decision)
        return {
            "session_id": session_id,
            "params": {
                "policy": reports.policy_echo(decision),
                "thetas": theta_grid,
                "impacts": [[p.impact_fmr, p.impact_fnmr] for p in profile_grid],
            },
            "report": reports.sweep_document(points),
        }

    if console_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/console", StaticFiles(directory=str(console_dir), html=True),
                  name="console")

    return app


def _hypothetical_block(values: dict[str, str], report) -> dict:
    from .dataset import SubjectAttributes

    subject = SubjectAttributes(subject_id="hypothetical", values=values)
    missing = [
        (a, v) for a, v in sorted(values.items()) if report.entry_for(a, v) is None
    ]
    if missing:
        a, v = missing[0]
        return {
            "attributes": values,
            "risk": reports.num(None),
            "excluded_reason": f"group {a}={v} has no risk entry",
        }
    return {
        "attributes": values,
        "risk": reports.num(ensemble_risk(subject, list(report.entries))),
        "excluded_reason": None,
    }
