"""Candidate next-beat evaluation and writing-brief assembly.

A directive names what the telling should optimize (weighted scorer blend,
or a target value).  Candidate events are screened by three pragmatic gates
(affordance, spatial, propagation feasibility), applied to a forked world,
rescored, and ranked.  The winner is folded into a creative brief: the
envelope of allowed trait movement, required and forbidden events, knowledge
guards, and the tension tables the next scene should respect.  Conformance
checking is the inverse move — given a brief and a revised world, flag every
unlicensed miracle.
"""

from __future__ import annotations

import math
from typing import Literal, Optional, Sequence

from pydantic import BaseModel, Field

from .causal_physics import (
    CausalPhysicsResult,
    InterventionQuery,
    InterventionSpec,
    PhysicsSettings,
    execute,
    materialize_result_world,
)
from .errors import InvalidWorldError, QueryError, UnknownNodeError
from .narrative_physics import (
    EFFECT_TRAITS,
    ScorerSettings,
    score_all,
    score_emotion,
    threat_hope_masses,
    trait_kl_magnitudes,
)
from .world_model import (
    CausalEdge,
    EventNode,
    WorldState,
    family_of,
    reconstruct_entity,
    terminal_actual,
    terminal_fabula,
    validate_world,
)

__all__ = [
    "Directive",
    "CandidateEventSpec",
    "GateCheck",
    "CandidateEvaluation",
    "TraitEnvelope",
    "CreativeBrief",
    "ConformanceReport",
    "evaluate_candidates",
    "assemble_brief",
    "check_conformance",
]

ENVELOPE_SLACK_SCALE = 0.2
AFFORDANCE_TRAIT_FLOOR = 0.5


class Directive(BaseModel):
    mode: Literal["maximize", "target"] = "maximize"
    weights: dict[str, float] = Field(default_factory=dict)
    target_value: Optional[float] = None
    focal_ids: list[str]
    anchor_syuzhet: Optional[int] = None
    syuzhet_window: Optional[tuple[int, int]] = None
    must_not_learn: list[tuple[str, str]] = Field(default_factory=list)


class CandidateEventSpec(BaseModel):
    event: EventNode
    edges: list[CausalEdge] = Field(default_factory=list)
    insert_at_syuzhet: Optional[int] = None


class GateCheck(BaseModel):
    name: Literal["affordance", "spatial", "feasibility"]
    passed: bool
    detail: str = ""


class CandidateEvaluation(BaseModel):
    candidate_id: str
    feasible: bool
    gates: list[GateCheck] = Field(default_factory=list)
    objective: Optional[float] = None
    scores: dict[str, float] = Field(default_factory=dict)
    result: Optional[CausalPhysicsResult] = None

    model_config = {"arbitrary_types_allowed": True}

    # The materialized candidate world rides along for brief assembly but
    # stays out of serialized payloads.
    def attach_world(self, world: WorldState) -> None:
        object.__setattr__(self, "_world", world)

    @property
    def world(self) -> Optional[WorldState]:
        return getattr(self, "_world", None)


class TraitEnvelope(BaseModel):
    node_id: str
    trait: str
    low: float
    high: float
    counterpart_id: Optional[str] = None


class CreativeBrief(BaseModel):
    must_event_ids: list[str] = Field(default_factory=list)
    must_not_event_ids: list[str] = Field(default_factory=list)
    licensed_edge_keys: list[str] = Field(default_factory=list)
    envelopes: list[TraitEnvelope] = Field(default_factory=list)
    hidden_predecessor_ids: dict[str, list[str]] = Field(default_factory=dict)
    must_not_learn: list[tuple[str, str]] = Field(default_factory=list)
    threat_hope: dict[str, dict[str, dict[str, float]]] = Field(default_factory=dict)
    hidden_channel_ids: list[str] = Field(default_factory=list)
    trait_kl: dict[str, dict[str, float]] = Field(default_factory=dict)
    emotion_headroom: dict[str, dict[str, float]] = Field(default_factory=dict)
    syuzhet_window: Optional[tuple[int, int]] = None


class ConformanceReport(BaseModel):
    miracle_steps: list[str] = Field(default_factory=list)
    envelope_violations: list[str] = Field(default_factory=list)
    guard_violations: list[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.miracle_steps or self.envelope_violations
                    or self.guard_violations)


def _edge_key(edge: CausalEdge) -> str:
    return f"{edge.source_id}|{edge.target_id}|{edge.causality_type}|{edge.trait_target or ''}"


def _unlocked_reachable(world: WorldState, a: str, b: str) -> bool:
    if a == b:
        return True
    adj: dict[str, set[str]] = {}
    for edge in world.spatial_topology:
        if edge.is_locked:
            continue
        adj.setdefault(edge.source_id, set()).add(edge.target_id)
        adj.setdefault(edge.target_id, set()).add(edge.source_id)
    frontier = {a}
    seen = {a}
    while frontier:
        nxt = set()
        for node in frontier:
            for other in adj.get(node, ()):
                if other == b:
                    return True
                if other not in seen:
                    seen.add(other)
                    nxt.add(other)
        frontier = nxt
    return False


# -- gates -------------------------------------------------------------------


def _gate_affordance(world: WorldState, spec: CandidateEventSpec) -> GateCheck:
    event = spec.event
    for edge in spec.edges:
        if edge.causality_type != "affordance_gate" or edge.target_id != event.id:
            continue
        if not world.has_node(edge.source_id):
            return GateCheck(name="affordance", passed=False,
                             detail=f"object {edge.source_id} missing")
        obj = world.node(edge.source_id)
        matching = [a for a in getattr(obj, "affordances", [])
                    if a.action == event.event_type]
        if not matching:
            return GateCheck(
                name="affordance", passed=False,
                detail=f"{edge.source_id} offers no {event.event_type!r} affordance")
        required = matching[0].required_trait
        if required:
            for actor in event.actor_ids:
                snap = reconstruct_entity(world, actor, event.fabula_time)
                value = snap.traits.get(required)
                if value is None or value.value < AFFORDANCE_TRAIT_FLOOR:
                    return GateCheck(
                        name="affordance", passed=False,
                        detail=f"{actor} lacks {required} >= {AFFORDANCE_TRAIT_FLOOR}")
    return GateCheck(name="affordance", passed=True)


def _gate_spatial(world: WorldState, spec: CandidateEventSpec) -> GateCheck:
    event = spec.event
    if not event.location_id:
        return GateCheck(name="spatial", passed=True)
    for actor in event.actor_ids:
        if not world.has_node(actor):
            return GateCheck(name="spatial", passed=False,
                             detail=f"actor {actor} missing")
        snap = reconstruct_entity(world, actor, event.fabula_time)
        if snap.location_id and not _unlocked_reachable(
                world, snap.location_id, event.location_id):
            return GateCheck(
                name="spatial", passed=False,
                detail=f"{actor} cannot reach {event.location_id} from {snap.location_id}")
    return GateCheck(name="spatial", passed=True)


def _fork_with_candidate(world: WorldState, spec: CandidateEventSpec) -> WorldState:
    event = spec.event
    if world.has_node(event.id):
        raise QueryError(f"candidate id {event.id!r} already present")
    if spec.insert_at_syuzhet is None:
        next_index = max((e.syuzhet_index for e in world.events), default=-1) + 1
        events = [*world.events, event.model_copy(update={"syuzhet_index": next_index})]
    else:
        at = spec.insert_at_syuzhet
        events = [e.model_copy(update={"syuzhet_index": e.syuzhet_index + 1})
                  if e.syuzhet_index >= at else e
                  for e in world.events]
        events.append(event.model_copy(update={"syuzhet_index": at}))
    forked = world.model_copy(update={
        "events": events,
        "causal_topology": [*world.causal_topology, *spec.edges],
    })
    report = validate_world(forked)
    if not report.ok:
        raise InvalidWorldError(
            "; ".join(f.message for f in report.errors))
    return forked


def evaluate_candidates(
    world: WorldState,
    directive: Directive,
    candidates: Sequence[CandidateEventSpec],
    physics: PhysicsSettings | None = None,
    scorers: ScorerSettings | None = None,
    seed: int = 0,
) -> list[CandidateEvaluation]:
    """Screen, simulate, score, and rank candidate next beats.

    Ranking is by objective descending, candidate id ascending on ties, and
    infeasible candidates sink to the bottom carrying their gate report.
    """
    phys = physics or PhysicsSettings()
    cfg = scorers or ScorerSettings()
    evaluations: list[CandidateEvaluation] = []

    for spec in candidates:
        gates = [_gate_affordance(world, spec), _gate_spatial(world, spec)]
        if not all(g.passed for g in gates):
            evaluations.append(CandidateEvaluation(
                candidate_id=spec.event.id, feasible=False, gates=gates))
            continue

        forked = _fork_with_candidate(world, spec)
        effect_targets = [e.target_id for e in spec.edges
                          if e.causality_type in ("mutation", "mutation_social")]
        query = InterventionQuery(
            focal_ids=list(dict.fromkeys([*directive.focal_ids, *effect_targets])),
            anchor_fabula=spec.event.fabula_time,
            interventions=InterventionSpec(assignments={spec.event.id: True}),
            target_ids=effect_targets,
        )
        run_settings = phys.model_copy(update={"preflight_mode": "off"})
        result = execute(forked, query, run_settings, seed=seed)

        licensed = {_edge_key(e) for e in spec.edges
                    if e.causality_type in ("mutation", "mutation_social")}
        if licensed:
            fired = any(set(m.edges) & licensed for m in result.mutations)
            gate = GateCheck(
                name="feasibility", passed=fired,
                detail="" if fired else "no licensed effect edge fires")
        else:
            gate = GateCheck(name="feasibility", passed=True)
        gates.append(gate)
        if not gate.passed:
            evaluations.append(CandidateEvaluation(
                candidate_id=spec.event.id, feasible=False, gates=gates,
                result=result))
            continue

        materialized = materialize_result_world(forked, query, result)
        anchor = directive.anchor_syuzhet
        if anchor is None:
            anchor = max((e.syuzhet_index for e in materialized.events), default=0)
        scores = score_all(materialized, directive.focal_ids, anchor, cfg)

        blend = sum(directive.weights.get(name, 0.0) * value
                    for name, value in scores.items())
        if directive.mode == "target":
            if directive.target_value is None:
                raise QueryError("target mode needs target_value")
            objective = -abs(blend - directive.target_value)
        else:
            objective = blend

        evaluation = CandidateEvaluation(
            candidate_id=spec.event.id, feasible=True, gates=gates,
            objective=objective, scores=scores, result=result)
        evaluation.attach_world(materialized)
        evaluations.append(evaluation)

    evaluations.sort(key=lambda ev: (
        not ev.feasible,
        -(ev.objective if ev.objective is not None else -math.inf),
        ev.candidate_id,
    ))
    return evaluations


# -- brief assembly -------------------------------------------------------------------


def _envelope(node_id: str, trait: str, post: float, inertia: float,
              counterpart_id: Optional[str] = None,
              lo_bound: float = 0.0, hi_bound: float = 1.0) -> TraitEnvelope:
    slack = (1.0 - inertia) * ENVELOPE_SLACK_SCALE
    return TraitEnvelope(
        node_id=node_id, trait=trait,
        low=max(lo_bound, post - slack), high=min(hi_bound, post + slack),
        counterpart_id=counterpart_id)


def _trait_inertia(world: WorldState, node_id: str, trait: str,
                   counterpart_id: Optional[str]) -> float:
    if counterpart_id is not None:
        for rel in world.social_topology:
            if rel.source_id == node_id and rel.target_id == counterpart_id:
                metric = rel.metrics.get(trait)
                if metric is not None:
                    return metric.inertia
        return 0.5
    if family_of(node_id) == "world_trait":
        for wt in world.world_traits:
            if wt.id == node_id:
                return wt.inertia
        return 0.5
    try:
        ent = world.entity(node_id)
    except UnknownNodeError:
        return 0.5
    tv = ent.traits.get(trait)
    return tv.inertia if tv is not None else 0.5


def assemble_brief(
    base_world: WorldState,
    spec: CandidateEventSpec,
    result: CausalPhysicsResult,
    directive: Directive,
    candidate_world: WorldState | None = None,
    scorers: ScorerSettings | None = None,
) -> CreativeBrief:
    """Turn a winning candidate into the writing contract for the next pass."""
    cfg = scorers or ScorerSettings()
    world = candidate_world or base_world
    anchor = directive.anchor_syuzhet
    if anchor is None:
        anchor = max((e.syuzhet_index for e in world.events), default=0)
    window = directive.syuzhet_window or (anchor, anchor)

    envelopes: list[TraitEnvelope] = []
    seen_envelopes: set[tuple[str, str, Optional[str]]] = set()
    for mutation in result.mutations:
        key = (mutation.node_id, mutation.trait, mutation.counterpart_id)
        if key in seen_envelopes:
            continue
        seen_envelopes.add(key)
        inertia = _trait_inertia(base_world, *key)
        lo = -1.0 if mutation.counterpart_id else 0.0
        envelopes.append(_envelope(mutation.node_id, mutation.trait,
                                   mutation.new, inertia, mutation.counterpart_id,
                                   lo_bound=lo))
    for item in result.blocked:
        if item.trait is None or family_of(item.target_id) not in ("entity", "world_trait"):
            continue
        key = (item.target_id, item.trait, item.counterpart_id)
        if key in seen_envelopes:
            continue
        seen_envelopes.add(key)
        inertia = _trait_inertia(base_world, *key)
        if item.counterpart_id is not None:
            post = 0.0
            for rel in base_world.social_topology:
                if rel.source_id == item.target_id and rel.target_id == item.counterpart_id:
                    metric = rel.metrics.get(item.trait)
                    if metric is not None:
                        post = metric.value
            envelopes.append(_envelope(item.target_id, item.trait, post, inertia,
                                       item.counterpart_id, lo_bound=-1.0))
        else:
            try:
                post = terminal_actual(base_world, item.target_id, item.trait)
            except UnknownNodeError:
                continue
            envelopes.append(_envelope(item.target_id, item.trait, post, inertia))

    # Forbidden reveals: any utterance that would teach a guarded event.
    must_not: set[str] = set()
    for event in world.events:
        if event.event_type != "utterance":
            continue
        for holder, eid in directive.must_not_learn:
            if holder in event.addressee_ids and eid in event.referenced_event_ids:
                must_not.add(event.id)

    syuzhet_of = {e.id: e.syuzhet_index for e in world.events}
    hidden_predecessors: dict[str, list[str]] = {}
    from .narrative_physics import _event_ancestors  # shared lens

    must_ids = [spec.event.id]
    for eid in must_ids:
        ancestors = _event_ancestors(world, eid)
        hidden = sorted(a for a in ancestors
                        if syuzhet_of.get(a, 10**9) > window[0])
        if hidden:
            hidden_predecessors[eid] = hidden

    hidden_channels = sorted({
        e.via_channel_id for e in world.events
        if e.via_channel_id and e.syuzhet_index > anchor})

    headroom: dict[str, dict[str, float]] = {}
    for focal in directive.focal_ids:
        if not world.has_node(focal):
            continue
        headroom[focal] = {
            effect: 1.0 - score_emotion(world, focal, effect, cfg)
            for effect in sorted(EFFECT_TRAITS)}

    return CreativeBrief(
        must_event_ids=must_ids,
        must_not_event_ids=sorted(must_not),
        licensed_edge_keys=sorted(_edge_key(e) for e in spec.edges),
        envelopes=sorted(envelopes, key=lambda e: (e.node_id, e.trait, e.counterpart_id or "")),
        hidden_predecessor_ids=hidden_predecessors,
        must_not_learn=list(directive.must_not_learn),
        threat_hope=threat_hope_masses(world, directive.focal_ids, anchor, cfg),
        hidden_channel_ids=hidden_channels,
        trait_kl=trait_kl_magnitudes(world, directive.focal_ids, anchor, cfg),
        emotion_headroom=headroom,
        syuzhet_window=directive.syuzhet_window,
    )


# -- conformance -------------------------------------------------------------------


def check_conformance(brief: CreativeBrief, base_world: WorldState,
                      revised_world: WorldState,
                      tolerance: float = 1e-9) -> ConformanceReport:
    """Audit a revised world against its brief.

    Miracles: events appearing without being required or licensed, required
    events missing, entities materializing from nowhere, and trait movement
    with no envelope.  Envelope violations: licensed traits landing outside
    their band.  Guard violations: a protected character shown learning a
    protected event.
    """
    report = ConformanceReport()
    base_events = {e.id for e in base_world.events}
    revised_events = {e.id for e in revised_world.events}

    licensed_targets = {key.split("|")[1] for key in brief.licensed_edge_keys}
    for eid in sorted(revised_events - base_events):
        if eid in brief.must_event_ids or eid in licensed_targets:
            continue
        report.miracle_steps.append(f"event {eid} appears without license")
    for eid in brief.must_event_ids:
        if eid not in revised_events:
            report.miracle_steps.append(f"required event {eid} missing")
    for eid in brief.must_not_event_ids:
        if eid in revised_events:
            report.guard_violations.append(f"forbidden event {eid} present")

    base_entities = {e.id for e in base_world.entities}
    for ent in revised_world.entities:
        if ent.id not in base_entities:
            report.miracle_steps.append(f"entity {ent.id} appears without license")

    enveloped = {(e.node_id, e.trait, e.counterpart_id): e for e in brief.envelopes}
    for ent in revised_world.entities:
        if ent.id not in base_entities:
            continue
        base_ent = base_world.entity(ent.id)
        names = set(base_ent.traits) | {
            t for d in base_ent.state_timeline for t in d.trait_values}
        names |= set(ent.traits) | {
            t for d in ent.state_timeline for t in d.trait_values}
        for trait in sorted(names):
            try:
                before = terminal_actual(base_world, ent.id, trait)
            except UnknownNodeError:
                before = None
            try:
                after = terminal_actual(revised_world, ent.id, trait)
            except UnknownNodeError:
                continue
            envelope = enveloped.get((ent.id, trait, None))
            if envelope is not None:
                if not (envelope.low - tolerance <= after <= envelope.high + tolerance):
                    report.envelope_violations.append(
                        f"{ent.id}.{trait}={after:.4f} outside "
                        f"[{envelope.low:.4f}, {envelope.high:.4f}]")
            elif before is None or abs(after - before) > tolerance:
                report.miracle_steps.append(
                    f"{ent.id}.{trait} moved without envelope")

    for rel in revised_world.social_topology:
        for axis, metric in rel.metrics.items():
            envelope = enveloped.get((rel.source_id, axis, rel.target_id))
            base_value = None
            for base_rel in base_world.social_topology:
                if (base_rel.source_id == rel.source_id
                        and base_rel.target_id == rel.target_id):
                    base_metric = base_rel.metrics.get(axis)
                    if base_metric is not None:
                        base_value = base_metric.value
            if envelope is not None:
                if not (envelope.low - tolerance <= metric.value <= envelope.high + tolerance):
                    report.envelope_violations.append(
                        f"{rel.source_id}->{rel.target_id}.{axis}={metric.value:.4f} "
                        f"outside [{envelope.low:.4f}, {envelope.high:.4f}]")
            elif base_value is not None and abs(metric.value - base_value) > tolerance:
                report.miracle_steps.append(
                    f"{rel.source_id}->{rel.target_id}.{axis} moved without envelope")

    for holder, guarded_event in brief.must_not_learn:
        for event in revised_world.events:
            if (event.event_type == "utterance"
                    and holder in event.addressee_ids
                    and guarded_event in event.referenced_event_ids):
                report.guard_violations.append(
                    f"{holder} learns {guarded_event} via {event.id}")
        if revised_world.has_node(holder):
            snap = reconstruct_entity(revised_world, holder,
                                      terminal_fabula(revised_world))
            for belief in snap.beliefs:
                if belief.target_id == guarded_event:
                    report.guard_violations.append(
                        f"{holder} holds belief about {guarded_event}")

    report.miracle_steps.sort()
    report.envelope_violations.sort()
    report.guard_violations.sort()
    return report
