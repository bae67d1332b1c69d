"""HTTP surface over the engine, consumed by the web workspace.

Routes call the exact same engine functions as the CLI; a query response
body is byte-for-byte the CLI's stdout for the same world, query, and seed
(the new version id, when a write happens, travels in the
``X-Fabula-Version-Id`` header so the body stays canonical).

Error mapping: 400 malformed input, 404 unknown id, 409 version-tree rule
violations.
"""

from __future__ import annotations

import json
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .causal_physics import (
    AnyQuery,
    CounterfactualQuery,
    InterventionQuery,
    PhysicsSettings,
    execute,
    materialize_result_world,
    result_json,
)
from .directive_assembly import (
    CandidateEventSpec,
    CreativeBrief,
    Directive,
    check_conformance,
    evaluate_candidates,
)
from .errors import (
    InvalidWorldError,
    QueryError,
    UnknownNodeError,
    VersionGraphError,
)
from .fixtures import linear_telling_world, macbeth_world, three_cause_discovery_world
from .narrative_physics import (
    SCORE_NAMES,
    ScorerSettings,
    evenly_spaced_anchors,
    sample_trajectory,
)
from .version_store import BranchPolicy, Source, VersionStore
from .world_model import WorldState, canonical_world_json

_FIXTURES = {
    "macbeth": macbeth_world,
    "linear": linear_telling_world,
    "three_cause": three_cause_discovery_world,
}


class CreateVersionRequest(BaseModel):
    world: WorldState
    parent_id: Optional[str] = None
    source: Source = "manual_edit"
    branch_policy: BranchPolicy = "auto"


class ReparentRequest(BaseModel):
    new_parent_id: Optional[str] = None


class QueryRequest(BaseModel):
    query: AnyQuery
    version_id: Optional[str] = None
    seed: Optional[int] = None
    branch_policy: BranchPolicy = "auto"
    record: bool = True


class EvaluateRequest(BaseModel):
    directive: Directive
    candidates: list[CandidateEventSpec]
    version_id: Optional[str] = None
    seed: int = 0


class BriefCheckRequest(BaseModel):
    brief: CreativeBrief
    revised_world: WorldState
    base_version_id: Optional[str] = None
    base_world: Optional[WorldState] = None


def build_app(project_dir: Optional[str] = None,
              seed_fixture: Optional[str] = None) -> FastAPI:
    store = VersionStore(project_dir)
    project_id = "default" if project_dir is None else str(project_dir).rstrip("/").rsplit("/", 1)[-1]
    if seed_fixture is not None and not store.rows():
        builder = _FIXTURES.get(seed_fixture)
        if builder is None:
            raise QueryError(f"unknown fixture {seed_fixture!r}")
        store.create_version(builder(), source="ingestion")

    app = FastAPI(title="fabula", docs_url=None, redoc_url=None)

    @app.exception_handler(UnknownNodeError)
    async def _unknown(request: Request, exc: UnknownNodeError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(VersionGraphError)
    async def _tree(request: Request, exc: VersionGraphError):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(InvalidWorldError)
    async def _invalid(request: Request, exc: InvalidWorldError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(QueryError)
    async def _query_error(request: Request, exc: QueryError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    def _versions_payload() -> dict:
        return {
            "project_id": project_id,
            "active_id": store.active_id,
            "versions": [row.model_dump(mode="json") for row in store.rows()],
        }

    def _resolve_version(version_id: Optional[str]) -> str:
        vid = version_id or store.active_id
        if vid is None:
            raise UnknownNodeError("project has no versions")
        return vid

    @app.get("/projects/{pid}/versions")
    def project_versions(pid: str) -> dict:
        if pid != project_id:
            raise UnknownNodeError(pid)
        return _versions_payload()

    @app.get("/versions")
    def versions() -> dict:
        return _versions_payload()

    @app.post("/versions", status_code=201)
    def create_version(body: CreateVersionRequest) -> dict:
        parent = body.parent_id
        if parent is None and store.rows():
            parent = store.active_id
        row = store.create_version(body.world, parent_id=parent,
                                   source=body.source,
                                   branch_policy=body.branch_policy)
        return {"version": row.model_dump(mode="json")}

    @app.get("/versions/diff")
    def diff(a: str, b: str) -> dict:
        return store.diff_versions(a, b).model_dump(mode="json")

    @app.post("/versions/{vid}/promote")
    def promote(vid: str) -> dict:
        row = store.promote_branch(vid)
        return {"version": row.model_dump(mode="json")}

    @app.post("/versions/{vid}/reparent")
    def reparent(vid: str, body: ReparentRequest) -> dict:
        row = store.reparent(vid, body.new_parent_id)
        return {"version": row.model_dump(mode="json")}

    @app.delete("/versions/{vid}")
    def delete(vid: str) -> dict:
        store.delete_version(vid)
        return {"deleted": vid, "active_id": store.active_id}

    @app.get("/worlds/{vid}")
    def world(vid: str) -> Response:
        text = canonical_world_json(store.world(vid))
        return Response(content=text, media_type="application/json")

    @app.post("/query")
    def query(body: QueryRequest) -> Response:
        vid = _resolve_version(body.version_id)
        base = store.world(vid)
        result = execute(base, body.query, PhysicsSettings(), seed=body.seed)
        headers = {}
        if body.record and isinstance(body.query,
                                      (InterventionQuery, CounterfactualQuery)):
            revised = materialize_result_world(base, body.query, result)
            row = store.create_version(
                revised,
                parent_id=vid,
                source="pipeline_run",
                branch_policy=body.branch_policy,
                counterfactual_origin=isinstance(body.query, CounterfactualQuery),
            )
            headers["X-Fabula-Version-Id"] = row.id
        return Response(content=result_json(result),
                        media_type="application/json", headers=headers)

    @app.get("/scores")
    def scores(version_id: Optional[str] = None, scorer: str = "all",
               anchors: int = 7, focals: Optional[str] = None) -> dict:
        if scorer not in ("all", *SCORE_NAMES):
            raise QueryError(f"unknown scorer {scorer!r}")
        vid = _resolve_version(version_id)
        world = store.world(vid)
        focal_ids = ([f for f in focals.split(",") if f] if focals
                     else [e.id for e in world.entities])
        cfg = ScorerSettings.from_env()
        anchor_list = evenly_spaced_anchors(world, anchors)
        reports = sample_trajectory(world, focal_ids, anchor_list, cfg)
        return {
            "version_id": vid,
            "focal_ids": focal_ids,
            "anchors": anchor_list,
            "trajectory": [
                {
                    "anchor_syuzhet": rep.anchor_syuzhet,
                    "scores": (rep.scores if scorer == "all"
                               else {scorer: rep.scores[scorer]}),
                }
                for rep in reports
            ],
        }

    @app.post("/candidates/evaluate")
    def candidates_evaluate(body: EvaluateRequest) -> dict:
        vid = _resolve_version(body.version_id)
        world = store.world(vid)
        evaluations = evaluate_candidates(
            world, body.directive, body.candidates,
            scorers=ScorerSettings.from_env(), seed=body.seed)
        return {
            "version_id": vid,
            "evaluations": [ev.model_dump(mode="json") for ev in evaluations],
        }

    @app.post("/brief/check")
    def brief_check(body: BriefCheckRequest) -> dict:
        if body.base_world is not None:
            base = body.base_world
        else:
            base = store.world(_resolve_version(body.base_version_id))
        report = check_conformance(body.brief, base, body.revised_world)
        payload = report.model_dump(mode="json")
        payload["ok"] = report.ok
        return payload

    return app
