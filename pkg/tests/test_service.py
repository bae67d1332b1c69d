"""HTTP surface: routing, error mapping, write recording, CLI parity."""

import json

import pytest
from fastapi.testclient import TestClient

from fabula.causal_physics import (
    ObservationQuery,
    PhysicsSettings,
    execute,
    result_json,
)
from fabula.cli import main
from fabula.fixtures import macbeth_world
from fabula.service import build_app
from fabula.world_model import CausalEdge, Entity, WorldState, canonical_world_json

INTERVENTION = {
    "kind": "intervention",
    "focal_ids": ["ENT_MACBETH"],
    "anchor_fabula": 900,
    "interventions": {"assignments": {"ENT_MACBETH.ambition": 0.1}},
    "target_ids": ["ENT_MACBETH"],
}

COUNTERFACTUAL = {**INTERVENTION, "kind": "counterfactual",
                  "evidence_node_ids": ["ENT_LADY_MACBETH"]}

OBSERVATION = {"kind": "observation", "focal_ids": ["ENT_MACBETH"],
               "anchor_fabula": 600}


@pytest.fixture()
def client(tmp_path):
    app = build_app(project_dir=str(tmp_path / "proj"), seed_fixture="macbeth")
    with TestClient(app) as c:
        yield c


def _root_id(client) -> str:
    return client.get("/versions").json()["versions"][0]["id"]


def _shadow_id(client) -> str:
    resp = client.post("/query", json={"query": COUNTERFACTUAL, "seed": 1})
    return resp.headers["X-Fabula-Version-Id"]


# -- version listing -------------------------------------------------------------------


def test_versions_listing_and_project_scoping(client):
    payload = client.get("/versions").json()
    assert payload["project_id"] == "proj"
    assert len(payload["versions"]) == 1
    assert payload["versions"][0]["source"] == "ingestion"
    assert payload["active_id"] == payload["versions"][0]["id"]

    scoped = client.get("/projects/proj/versions")
    assert scoped.status_code == 200
    assert scoped.json() == payload

    assert client.get("/projects/elsewhere/versions").status_code == 404


def test_create_version_parents_at_active(client):
    root = _root_id(client)
    world = macbeth_world().model_copy(update={
        "entities": [*macbeth_world().entities,
                     Entity(id="ENT_PORTER", location_id="LOC_INVERNESS_CASTLE")]})
    resp = client.post("/versions", json={
        "world": json.loads(canonical_world_json(world))})
    assert resp.status_code == 201
    row = resp.json()["version"]
    assert row["ancestor_id"] == root
    assert row["world_id"] == "factual"
    assert row["source"] == "manual_edit"


def test_create_version_rejects_inconsistent_world(client):
    world = WorldState(
        entities=[Entity(id="ENT_ONLY")],
        causal_topology=[CausalEdge(
            source_id="ENT_ONLY", target_id="ENT_NOBODY",
            causality_type="mutation", trait_target="resolve",
            trait_delta=0.5, evidence_strength="weak", causal_force=5.0,
            fabula_time=0)])
    resp = client.post("/versions", json={
        "world": json.loads(canonical_world_json(world))})
    assert resp.status_code == 400
    assert "ENT_NOBODY" in resp.json()["error"]


def test_malformed_body_maps_to_400(client):
    assert client.post("/versions", json={"world": {"entities": 3}}).status_code == 400
    assert client.post("/query", json={"query": {"kind": "observation"}}).status_code == 400


# -- worlds and diff -------------------------------------------------------------------


def test_world_body_is_canonical_json(client):
    root = _root_id(client)
    resp = client.get(f"/worlds/{root}")
    assert resp.status_code == 200
    assert resp.content.decode("utf-8") == canonical_world_json(macbeth_world())


def test_world_unknown_version_404(client):
    assert client.get("/worlds/v9999").status_code == 404


def test_diff_route_is_not_shadowed_by_version_paths(client):
    root = _root_id(client)
    resp = client.post("/query", json={"query": INTERVENTION, "seed": 1})
    new_id = resp.headers["X-Fabula-Version-Id"]

    diff = client.get("/versions/diff", params={"a": root, "b": new_id})
    assert diff.status_code == 200
    # The pinned trait lands as a timeline step, so the entity reads changed.
    assert "ENT_MACBETH" in diff.json()["nodes_changed"]["entities"]


def test_diff_requires_both_endpoints(client):
    assert client.get("/versions/diff", params={"a": _root_id(client)}).status_code == 400


def test_diff_unknown_version_404(client):
    root = _root_id(client)
    assert client.get("/versions/diff",
                      params={"a": root, "b": "v9999"}).status_code == 404


# -- query -------------------------------------------------------------------


def test_query_body_matches_engine_and_cli_bytes(client, tmp_path):
    resp = client.post("/query", json={"query": OBSERVATION, "seed": 3,
                                       "record": False})
    assert resp.status_code == 200

    expected = result_json(execute(
        macbeth_world(),
        ObservationQuery(focal_ids=["ENT_MACBETH"], anchor_fabula=600),
        PhysicsSettings(), seed=3))
    assert resp.content.decode("utf-8") == expected

    # Same engine document as the CLI emits (stdout framing aside).
    world_file = tmp_path / "world.json"
    world_file.write_text(canonical_world_json(macbeth_world()), encoding="utf-8")
    query_file = tmp_path / "query.json"
    query_file.write_text(json.dumps(OBSERVATION), encoding="utf-8")
    import contextlib
    import io
    buffer = io.StringIO()
    with contextlib.redirect_stdout(buffer):
        assert main(["query", str(world_file), str(query_file),
                     "--seed", "3"]) == 0
    assert buffer.getvalue() == resp.content.decode("utf-8") + "\n"


def test_query_intervention_records_and_reports_version(client):
    before = len(client.get("/versions").json()["versions"])
    resp = client.post("/query", json={"query": INTERVENTION, "seed": 1})
    assert resp.status_code == 200
    new_id = resp.headers["X-Fabula-Version-Id"]

    listing = client.get("/versions").json()["versions"]
    assert len(listing) == before + 1
    row = next(r for r in listing if r["id"] == new_id)
    assert row["source"] == "pipeline_run"
    assert row["world_id"] == "factual"
    assert row["ancestor_id"] == _root_id(client)


def test_query_counterfactual_lands_on_shadow_branch(client):
    new_id = _shadow_id(client)
    listing = client.get("/versions").json()["versions"]
    row = next(r for r in listing if r["id"] == new_id)
    assert row["world_id"] == "shadow"


def test_query_record_false_writes_nothing(client):
    before = client.get("/versions").json()["versions"]
    resp = client.post("/query", json={"query": INTERVENTION, "seed": 1,
                                       "record": False})
    assert resp.status_code == 200
    assert "X-Fabula-Version-Id" not in resp.headers
    assert client.get("/versions").json()["versions"] == before


def test_query_observation_never_records(client):
    resp = client.post("/query", json={"query": OBSERVATION})
    assert resp.status_code == 200
    assert "X-Fabula-Version-Id" not in resp.headers
    assert len(client.get("/versions").json()["versions"]) == 1


def test_query_unknown_version_404(client):
    resp = client.post("/query", json={"query": OBSERVATION,
                                       "version_id": "v9999"})
    assert resp.status_code == 404


def test_query_unknown_focal_404(client):
    bad = {**OBSERVATION, "focal_ids": ["ENT_NOBODY"]}
    assert client.post("/query", json={"query": bad}).status_code == 404


# -- promote / reparent / delete -------------------------------------------------------------------


def test_promote_shadow_creates_factual_row(client):
    root = _root_id(client)
    shadow = _shadow_id(client)
    resp = client.post(f"/versions/{shadow}/promote")
    assert resp.status_code == 200
    row = resp.json()["version"]
    assert row["world_id"] == "factual"
    assert row["source"] == "promotion"
    assert row["ancestor_id"] == root
    # The shadow line itself stays in the tree.
    listing = {r["id"]: r for r in client.get("/versions").json()["versions"]}
    assert listing[shadow]["world_id"] == "shadow"


def test_promote_factual_row_conflicts(client):
    assert client.post(f"/versions/{_root_id(client)}/promote").status_code == 409


def test_promote_unknown_version_404(client):
    assert client.post("/versions/v9999/promote").status_code == 404


def test_reparent_moves_a_row(client):
    root = _root_id(client)
    first = client.post("/query", json={
        "query": INTERVENTION, "seed": 1,
        "version_id": root}).headers["X-Fabula-Version-Id"]
    second = client.post("/query", json={
        "query": INTERVENTION, "seed": 2,
        "version_id": root}).headers["X-Fabula-Version-Id"]
    listing = {r["id"]: r for r in client.get("/versions").json()["versions"]}
    assert listing[second]["ancestor_id"] == root

    resp = client.post(f"/versions/{second}/reparent",
                       json={"new_parent_id": first})
    assert resp.status_code == 200
    assert resp.json()["version"]["ancestor_id"] == first


def test_reparent_rejects_cycles_and_second_roots(client):
    root = _root_id(client)
    child = client.post("/query", json={
        "query": INTERVENTION, "seed": 1}).headers["X-Fabula-Version-Id"]
    # Root under its own descendant: cycle.
    resp = client.post(f"/versions/{root}/reparent",
                       json={"new_parent_id": child})
    assert resp.status_code == 409
    # Child to null while a root exists: second root.
    resp = client.post(f"/versions/{child}/reparent",
                       json={"new_parent_id": None})
    assert resp.status_code == 409


def test_reparent_unknown_target_404(client):
    child = client.post("/query", json={
        "query": INTERVENTION, "seed": 1}).headers["X-Fabula-Version-Id"]
    resp = client.post(f"/versions/{child}/reparent",
                       json={"new_parent_id": "v9999"})
    assert resp.status_code == 404


def test_delete_leaf_updates_active(client):
    child = client.post("/query", json={
        "query": INTERVENTION, "seed": 1}).headers["X-Fabula-Version-Id"]
    resp = client.delete(f"/versions/{child}")
    assert resp.status_code == 200
    assert resp.json()["deleted"] == child
    assert resp.json()["active_id"] == _root_id(client)


def test_delete_root_with_many_children_conflicts(client):
    root = _root_id(client)
    # Recording moves the active pointer, so pin both runs to the root.
    client.post("/query", json={"query": INTERVENTION, "seed": 1,
                                "version_id": root})
    client.post("/query", json={"query": COUNTERFACTUAL, "seed": 1,
                                "version_id": root})
    assert client.delete(f"/versions/{root}").status_code == 409


# -- scores / candidates / brief -------------------------------------------------------------------


def test_scores_endpoint_shape_and_projection(client):
    resp = client.get("/scores", params={"anchors": 4, "scorer": "mystery",
                                         "focals": "ENT_DUNCAN,ENT_MACBETH"})
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["version_id"] == _root_id(client)
    assert payload["focal_ids"] == ["ENT_DUNCAN", "ENT_MACBETH"]
    assert len(payload["anchors"]) == 4
    for step in payload["trajectory"]:
        assert list(step["scores"]) == ["mystery"]


def test_scores_unknown_scorer_400(client):
    assert client.get("/scores", params={"scorer": "zeal"}).status_code == 400


def test_candidates_evaluate_ranks_and_reports_gates(client):
    directive = {"focal_ids": ["ENT_MACBETH"], "weights": {"suspense": 1.0}}
    feasible = {
        "event": {"id": "EVT_NEW_OMEN", "event_type": "action",
                  "actor_ids": ["ENT_MACBETH"],
                  "location_id": "LOC_INVERNESS_CASTLE",
                  "fabula_time": 1500},
        "edges": []}
    stuck = {
        "event": {"id": "EVT_FAR_RITE", "event_type": "action",
                  "actor_ids": ["ENT_MACBETH"],
                  "location_id": "LOC_DUNGEON", "fabula_time": 1500},
        "edges": []}
    resp = client.post("/candidates/evaluate", json={
        "directive": directive, "candidates": [stuck, feasible]})
    assert resp.status_code == 200
    evaluations = resp.json()["evaluations"]
    assert [e["candidate_id"] for e in evaluations] == ["EVT_NEW_OMEN",
                                                        "EVT_FAR_RITE"]
    assert evaluations[0]["feasible"] is True
    assert evaluations[1]["feasible"] is False
    assert any(not g["passed"] and g["name"] == "spatial"
               for g in evaluations[1]["gates"])


def test_brief_check_roundtrip(client):
    root = _root_id(client)
    world_text = client.get(f"/worlds/{root}").content.decode("utf-8")
    resp = client.post("/brief/check", json={
        "brief": {}, "revised_world": json.loads(world_text),
        "base_version_id": root})
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["ok"] is True
    assert payload["miracle_steps"] == []
