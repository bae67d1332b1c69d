"""Command-line surface: validate, query, score, audit-affective, export,
ingest-fixture, serve.

Exit codes: 0 success, 1 validation or engine failure, 2 malformed input.
All engine output is canonical JSON (sorted keys, two-space indent) so a
repeated run with the same seed is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from pathlib import Path
from typing import Optional

from pydantic import TypeAdapter, ValidationError

from . import fixtures
from .causal_physics import (
    AnyQuery,
    CounterfactualQuery,
    InterventionQuery,
    ObservationQuery,
    PhysicsSettings,
    execute,
    materialize_result_world,
    result_json,
)
from .errors import FabulaError
from .narrative_physics import (
    SCORE_NAMES,
    ScorerSettings,
    evenly_spaced_anchors,
    sample_trajectory,
)
from .version_store import VersionStore
from .world_model import WorldState, canonical_world_json, validate_world

FIXTURE_BUILDERS = {
    "macbeth": fixtures.macbeth_world,
    "linear": fixtures.linear_telling_world,
    "three_cause": fixtures.three_cause_discovery_world,
}

_QUERY_ADAPTER: TypeAdapter = TypeAdapter(AnyQuery)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_world(path: str) -> WorldState:
    return WorldState.model_validate_json(Path(path).read_text(encoding="utf-8"))


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        world = _load_world(args.world)
    except (OSError, ValidationError, json.JSONDecodeError) as exc:
        return _fail(str(exc), 2)
    report = validate_world(world)
    print(json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True))
    return 0 if report.ok else 1


def cmd_query(args: argparse.Namespace) -> int:
    try:
        world = _load_world(args.world)
        query = _QUERY_ADAPTER.validate_json(
            Path(args.query).read_text(encoding="utf-8"))
    except (OSError, ValidationError, json.JSONDecodeError) as exc:
        return _fail(str(exc), 2)

    report = validate_world(world)
    if not report.ok:
        return _fail(f"world invalid: {report.errors[0].message}", 1)

    settings = PhysicsSettings()
    try:
        result = execute(world, query, settings, seed=args.seed)
    except FabulaError as exc:
        return _fail(str(exc), 1)
    print(result_json(result))

    if args.project:
        store = VersionStore(args.project)
        if not store.rows():
            store.create_version(world, source="ingestion")
        parent = store.active_id
        if isinstance(query, (InterventionQuery, CounterfactualQuery)):
            revised = materialize_result_world(world, query, result)
            row = store.create_version(
                revised,
                parent_id=parent,
                source="pipeline_run",
                branch_policy=args.branch_policy,
                counterfactual_origin=isinstance(query, CounterfactualQuery),
            )
            print(f"version: {row.id} ({row.world_id})", file=sys.stderr)
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    try:
        world = _load_world(args.world)
    except (OSError, ValidationError, json.JSONDecodeError) as exc:
        return _fail(str(exc), 2)
    if args.scorer not in ("all", *SCORE_NAMES):
        return _fail(f"unknown scorer {args.scorer!r}; pick from {SCORE_NAMES}", 2)
    focals = args.focals or [e.id for e in world.entities]
    cfg = ScorerSettings.from_env()
    anchors = evenly_spaced_anchors(world, args.anchors)
    reports = sample_trajectory(world, focals, anchors, cfg)
    payload = {
        "focal_ids": focals,
        "anchors": anchors,
        "trajectory": [
            {
                "anchor_syuzhet": rep.anchor_syuzhet,
                "scores": (rep.scores if args.scorer == "all"
                           else {args.scorer: rep.scores[args.scorer]}),
            }
            for rep in reports
        ],
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_audit_affective(args: argparse.Namespace) -> int:
    root = Path(args.fixtures_dir)
    worlds: list[tuple[str, WorldState]] = []
    if root.is_dir():
        for path in sorted(root.glob("*.json")):
            try:
                worlds.append((path.stem, _load_world(str(path))))
            except (ValidationError, json.JSONDecodeError) as exc:
                return _fail(f"{path.name}: {exc}", 2)
    if not worlds:
        return _fail(f"no world JSON files under {root}", 2)

    cfg = ScorerSettings.from_env()
    samples: dict[str, list[float]] = {name: [] for name in SCORE_NAMES}
    for _, world in worlds:
        focals = [e.id for e in world.entities]
        anchors = evenly_spaced_anchors(world, args.anchors)
        for rep in sample_trajectory(world, focals, anchors, cfg):
            for name, value in rep.scores.items():
                samples[name].append(value)

    print(f"{'scorer':<18} {'min':>8} {'median':>8} {'mean':>8} {'max':>8}")
    for name in SCORE_NAMES:
        values = samples[name]
        print(f"{name:<18} {min(values):>8.4f} {statistics.median(values):>8.4f} "
              f"{statistics.fmean(values):>8.4f} {max(values):>8.4f}")
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    if args.source in FIXTURE_BUILDERS:
        world = FIXTURE_BUILDERS[args.source]()
    else:
        try:
            world = _load_world(args.source)
        except (OSError, ValidationError, json.JSONDecodeError) as exc:
            return _fail(str(exc), 2)
    text = canonical_world_json(world)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_ingest_fixture(args: argparse.Namespace) -> int:
    builder = FIXTURE_BUILDERS.get(args.name)
    if builder is None:
        return _fail(f"unknown fixture {args.name!r}; "
                     f"available: {sorted(FIXTURE_BUILDERS)}", 2)
    store = VersionStore(args.project)
    try:
        if store.rows():
            row = store.create_version(builder(), parent_id=store.active_id,
                                       source="ingestion")
        else:
            row = store.create_version(builder(), source="ingestion")
    except FabulaError as exc:
        return _fail(str(exc), 1)
    print(f"version: {row.id} ({row.world_id})")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import build_app

    app = build_app(project_dir=args.project, seed_fixture=args.fixture)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fabula",
        description="Versioned storyworlds with causal and affective physics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a world file's invariants")
    p.add_argument("world")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("query", help="run a typed query against a world")
    p.add_argument("world")
    p.add_argument("query")
    p.add_argument("--branch-policy", choices=["auto", "mainline", "shadow"],
                   default="auto")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--project", default=None,
                   help="version-store directory to record the run into")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("score", help="affect trajectories over syuzhet anchors")
    p.add_argument("world")
    p.add_argument("--scorer", default="all")
    p.add_argument("--anchors", type=int, default=7)
    p.add_argument("--focals", nargs="*", default=None)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("audit-affective",
                       help="score summary table over a directory of worlds")
    p.add_argument("fixtures_dir")
    p.add_argument("--anchors", type=int, default=7)
    p.set_defaults(func=cmd_audit_affective)

    p = sub.add_parser("export", help="emit canonical world JSON")
    p.add_argument("source", help="shipped fixture name or world file path")
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("ingest-fixture", help="seed a project with a shipped world")
    p.add_argument("name")
    p.add_argument("--project", required=True)
    p.set_defaults(func=cmd_ingest_fixture)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--project", default=None)
    p.add_argument("--fixture", default=None,
                   help="seed an empty project with a shipped fixture")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
