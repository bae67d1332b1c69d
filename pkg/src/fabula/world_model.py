"""Typed storyworld state: nodes, edges, validation, and time-indexed reconstruction.

A world is a snapshot of six node families (entities, events, locations,
objects, channels, world-level traits) plus three edge families (causal,
social, spatial).  Every event carries two clocks: ``fabula_time`` (when it
happens in-world) and ``syuzhet_index`` (when the audience learns of it).
Entity state over fabula time is stored as a baseline plus an append-only
delta timeline; `reconstruct_entity` replays it.
"""

from __future__ import annotations

import json
from typing import Iterable, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import UnknownNodeError

__all__ = [
    "AmbientVector",
    "Affordance",
    "AxisMetric",
    "Belief",
    "CausalEdge",
    "Channel",
    "Entity",
    "EntitySnapshot",
    "EventNode",
    "EVIDENCE_WEIGHT",
    "Finding",
    "GlobalTrait",
    "Location",
    "ObjectNode",
    "RelationshipAxis",
    "RelationshipEdge",
    "SpatialEdge",
    "StateDelta",
    "TraitVector",
    "ValidationReport",
    "WorldState",
    "WorldTraitDelta",
    "canonical_world_json",
    "edge_weight",
    "family_of",
    "load_world",
    "reconstruct_entity",
    "terminal_actual",
    "terminal_fabula",
    "validate_world",
]

EvidenceStrength = Literal["weak", "moderate", "strong"]
CausalityType = Literal[
    "chain_reaction",
    "mutation",
    "mutation_social",
    "affordance_gate",
    "ambient_propagation",
]
RelationshipAxis = Literal["affinity", "fear", "power_dynamic"]

# Evidence strength scales edge force into a propagation weight.
EVIDENCE_WEIGHT: dict[str, float] = {"weak": 0.25, "moderate": 0.5, "strong": 0.75}

ID_PREFIXES: dict[str, str] = {
    "entity": "ENT_",
    "event": "EVT_",
    "location": "LOC_",
    "object": "OBJ_",
    "channel": "CHN_",
    "world_trait": "WORLD_",
}

RELATIONSHIP_AXES: tuple[str, ...] = ("affinity", "fear", "power_dynamic")

# Open-ended; unknown kinds validate with a warning, not an error.
KNOWN_EVENT_TYPES: frozenset[str] = frozenset(
    {
        "action",
        "violence",
        "utterance",
        "perception",
        "movement",
        "discovery",
        "state_change",
        "ritual",
    }
)


def family_of(node_id: str) -> Optional[str]:
    """Node family implied by an id prefix, or None if the prefix is foreign."""
    for family, prefix in ID_PREFIXES.items():
        if node_id.startswith(prefix):
            return family
    return None


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class TraitVector(_Frozen):
    value: float
    inertia: float = 0.5
    evidence_strength: EvidenceStrength = "moderate"

    @field_validator("value", "inertia")
    @classmethod
    def _unit(cls, v: float) -> float:
        return _clamp(v, 0.0, 1.0)


class Belief(_Frozen):
    target_id: str
    perceived_state: str
    value: Optional[float] = None
    confidence: float = 0.5
    inertia: float = 0.5
    established_at_fabula: int = 0
    acquired_via_event_id: Optional[str] = None
    acquired_via_channel_id: Optional[str] = None

    @field_validator("confidence", "inertia")
    @classmethod
    def _unit(cls, v: float) -> float:
        return _clamp(v, 0.0, 1.0)


class StateDelta(_Frozen):
    """One timeline step: values written at (and visible from) fabula_time."""

    fabula_time: int
    trait_values: dict[str, float] = Field(default_factory=dict)
    trait_inertias: dict[str, float] = Field(default_factory=dict)
    beliefs_added: list[Belief] = Field(default_factory=list)
    beliefs_removed: list[str] = Field(default_factory=list)
    status: Optional[Literal["alive", "dead", "unknown"]] = None
    location_id: Optional[str] = None


class Entity(_Frozen):
    id: str
    traits: dict[str, TraitVector] = Field(default_factory=dict)
    beliefs: list[Belief] = Field(default_factory=list)
    constants: list[str] = Field(default_factory=list)
    location_id: Optional[str] = None
    status: Literal["alive", "dead", "unknown"] = "alive"
    state_timeline: list[StateDelta] = Field(default_factory=list)


class EventNode(_Frozen):
    id: str
    event_type: str = "action"
    actor_ids: list[str] = Field(default_factory=list)
    target_ids: list[str] = Field(default_factory=list)
    location_id: Optional[str] = None
    fabula_time: int = 0
    syuzhet_index: int = 0
    weight: float = 1.0
    # Utterance-only routing fields.
    speaker_id: Optional[str] = None
    addressee_ids: list[str] = Field(default_factory=list)
    via_channel_id: Optional[str] = None
    content: Optional[str] = None
    truth_value: Optional[bool] = None
    referenced_event_ids: list[str] = Field(default_factory=list)

    @property
    def participant_ids(self) -> list[str]:
        seen: list[str] = []
        for nid in (*self.actor_ids, *self.target_ids,
                    *([self.speaker_id] if self.speaker_id else []),
                    *self.addressee_ids):
            if nid not in seen:
                seen.append(nid)
        return seen


class AmbientVector(_Frozen):
    value: float
    volatility: float = 0.0  # stored for fixtures; no equation consumes it
    evidence_strength: EvidenceStrength = "moderate"

    @field_validator("value", "volatility")
    @classmethod
    def _unit(cls, v: float) -> float:
        return _clamp(v, 0.0, 1.0)


class Location(_Frozen):
    id: str
    ambient_state: dict[str, AmbientVector] = Field(default_factory=dict)
    capacity: Optional[int] = None


class Affordance(_Frozen):
    action: str
    target_type: str
    required_trait: Optional[str] = None


class ObjectNode(_Frozen):
    id: str
    location_id: Optional[str] = None
    owner_id: Optional[str] = None
    properties: dict[str, float | str | bool] = Field(default_factory=dict)
    affordances: list[Affordance] = Field(default_factory=list)


class Channel(_Frozen):
    id: str
    medium: str = "speech"
    directionality: Literal["one_way", "two_way"] = "two_way"
    participant_ids: list[str] = Field(default_factory=list)
    intelligibility: dict[str, float] = Field(default_factory=dict)
    established_at_fabula: int = 0
    terminated_at_fabula: Optional[int] = None


class WorldTraitDelta(_Frozen):
    fabula_time: int
    value: float


class GlobalTrait(_Frozen):
    id: str
    value: float
    inertia: float = 0.5
    evidence_strength: EvidenceStrength = "moderate"
    state_timeline: list[WorldTraitDelta] = Field(default_factory=list)

    @field_validator("value", "inertia")
    @classmethod
    def _unit(cls, v: float) -> float:
        return _clamp(v, 0.0, 1.0)


class CausalEdge(_Frozen):
    source_id: str
    target_id: str
    causality_type: CausalityType
    mechanism: str = ""
    evidence_strength: EvidenceStrength = "moderate"
    causal_force: float = Field(default=5.0, ge=0.0, le=10.0)
    fabula_time: int = 0
    propagation_delay: int = 0
    trait_target: Optional[str] = None
    trait_delta: Optional[float] = None
    rel_counterpart_id: Optional[str] = None


class AxisMetric(_Frozen):
    value: float
    inertia: float = 0.5
    evidence_strength: EvidenceStrength = "moderate"
    last_updated_fabula: int = 0
    observed: bool = True

    @field_validator("value")
    @classmethod
    def _signed_unit(cls, v: float) -> float:
        return _clamp(v, -1.0, 1.0)

    @field_validator("inertia")
    @classmethod
    def _unit(cls, v: float) -> float:
        return _clamp(v, 0.0, 1.0)


class RelationshipEdge(_Frozen):
    source_id: str
    target_id: str
    metrics: dict[str, AxisMetric] = Field(default_factory=dict)


class SpatialEdge(_Frozen):
    source_id: str
    target_id: str
    is_locked: bool = False
    barrier_item_id: Optional[str] = None


class WorldState(_Frozen):
    world_id: Literal["factual", "shadow"] = "factual"
    fabula_time_spacing: int = 100
    intelligibility_threshold: float = 0.5
    entities: list[Entity] = Field(default_factory=list)
    events: list[EventNode] = Field(default_factory=list)
    locations: list[Location] = Field(default_factory=list)
    objects: list[ObjectNode] = Field(default_factory=list)
    channels: list[Channel] = Field(default_factory=list)
    world_traits: list[GlobalTrait] = Field(default_factory=list)
    causal_topology: list[CausalEdge] = Field(default_factory=list)
    social_topology: list[RelationshipEdge] = Field(default_factory=list)
    spatial_topology: list[SpatialEdge] = Field(default_factory=list)

    # -- id lookups -------------------------------------------------------

    def _index(self) -> dict[str, object]:
        # model_copy shares __dict__, so key the cache on the identity of the
        # node lists themselves: any replaced list invalidates it.  (Node
        # lists are never mutated in place anywhere in this package.)
        groups = (self.entities, self.events, self.locations,
                  self.objects, self.channels, self.world_traits)
        key = tuple(id(g) for g in groups)
        cached = self.__dict__.get("_node_index")
        if cached is None or cached[0] != key:
            index: dict[str, object] = {}
            for group in groups:
                for node in group:
                    index[node.id] = node
            cached = (key, index)
            object.__setattr__(self, "_node_index", cached)
        return cached[1]

    def node(self, node_id: str) -> object:
        try:
            return self._index()[node_id]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._index()

    def entity(self, entity_id: str) -> Entity:
        node = self.node(entity_id)
        if not isinstance(node, Entity):
            raise UnknownNodeError(entity_id)
        return node

    def event(self, event_id: str) -> EventNode:
        node = self.node(event_id)
        if not isinstance(node, EventNode):
            raise UnknownNodeError(event_id)
        return node

    def all_node_ids(self) -> list[str]:
        return list(self._index().keys())


class EntitySnapshot(BaseModel):
    """Entity state as reconstructed at a fabula time (mutable working copy)."""

    id: str
    at_fabula: int
    traits: dict[str, TraitVector] = Field(default_factory=dict)
    beliefs: list[Belief] = Field(default_factory=list)
    status: Literal["alive", "dead", "unknown"] = "alive"
    location_id: Optional[str] = None


class Finding(BaseModel):
    severity: Literal["error", "warning"]
    rule: str
    subject: str
    message: str


class ValidationReport(BaseModel):
    errors: list[Finding] = Field(default_factory=list)
    warnings: list[Finding] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


# -- reconstruction --------------------------------------------------------


def reconstruct_entity(world: WorldState, entity_id: str, fabula_time: int) -> EntitySnapshot:
    """Replay an entity's delta timeline up to (and including) `fabula_time`.

    Deltas apply in list order; beliefs established after the cursor are
    excluded even when present in the baseline, so a snapshot never leaks
    knowledge from the entity's future.
    """
    ent = world.entity(entity_id)
    traits = dict(ent.traits)
    beliefs = [b for b in ent.beliefs if b.established_at_fabula <= fabula_time]
    status = ent.status
    location_id = ent.location_id

    for delta in ent.state_timeline:
        if delta.fabula_time > fabula_time:
            continue
        for name, value in delta.trait_values.items():
            prior = traits.get(name)
            if prior is None:
                traits[name] = TraitVector(value=value)
            else:
                traits[name] = prior.model_copy(update={"value": _clamp(value, 0.0, 1.0)})
        for name, inertia in delta.trait_inertias.items():
            prior = traits.get(name)
            if prior is None:
                traits[name] = TraitVector(value=0.0, inertia=inertia)
            else:
                traits[name] = prior.model_copy(update={"inertia": _clamp(inertia, 0.0, 1.0)})
        if delta.beliefs_removed:
            gone = set(delta.beliefs_removed)
            beliefs = [b for b in beliefs if b.target_id not in gone]
        for belief in delta.beliefs_added:
            if belief.established_at_fabula <= fabula_time:
                beliefs.append(belief)
        if delta.status is not None:
            status = delta.status
        if delta.location_id is not None:
            location_id = delta.location_id

    return EntitySnapshot(
        id=ent.id,
        at_fabula=fabula_time,
        traits=traits,
        beliefs=beliefs,
        status=status,
        location_id=location_id,
    )


def reconstruct_world_trait(world: WorldState, trait_id: str, fabula_time: int) -> float:
    node = world.node(trait_id)
    if not isinstance(node, GlobalTrait):
        raise UnknownNodeError(trait_id)
    value = node.value
    for delta in node.state_timeline:
        if delta.fabula_time <= fabula_time:
            value = delta.value
    return value


def terminal_fabula(world: WorldState) -> int:
    """Latest fabula time touched by any event or timeline delta (0 if none)."""
    times = [e.fabula_time for e in world.events]
    for ent in world.entities:
        times.extend(d.fabula_time for d in ent.state_timeline)
    for wt in world.world_traits:
        times.extend(d.fabula_time for d in wt.state_timeline)
    return max(times) if times else 0


def terminal_actual(world: WorldState, entity_id: str, trait: str) -> float:
    """Trait value at the world's terminal fabula time."""
    snapshot = reconstruct_entity(world, entity_id, terminal_fabula(world))
    if trait not in snapshot.traits:
        raise UnknownNodeError(f"{entity_id}.{trait}")
    return snapshot.traits[trait].value


def edge_weight(edge: CausalEdge) -> float:
    """Propagation weight: evidence multiplier x force normalized to [0, 1]."""
    return EVIDENCE_WEIGHT[edge.evidence_strength] * (edge.causal_force / 10.0)


# -- validation ------------------------------------------------------------

_MODALITY_ENDPOINTS: dict[str, tuple[set[str], set[str]]] = {
    "chain_reaction": ({"event"}, {"event"}),
    "mutation": ({"event"}, {"entity", "world_trait"}),
    "mutation_social": ({"event"}, {"entity"}),
    "affordance_gate": ({"object"}, {"event"}),
    "ambient_propagation": ({"location"}, {"entity", "event"}),
}


def validate_world(world: WorldState) -> ValidationReport:
    """Structural validation.  Findings are data; nothing raises.

    Errors cover id-prefix discipline, duplicate ids, reference closure,
    utterance field discipline, syuzhet contiguous-uniqueness, causal
    modality endpoint rules, and timeline ordering.  Axis-parity gaps,
    dead actors, unknown event kinds, and channel-membership drift are
    warnings.
    """
    errors: list[Finding] = []
    warnings: list[Finding] = []

    def err(rule: str, subject: str, message: str) -> None:
        errors.append(Finding(severity="error", rule=rule, subject=subject, message=message))

    def warn(rule: str, subject: str, message: str) -> None:
        warnings.append(Finding(severity="warning", rule=rule, subject=subject, message=message))

    groups: list[tuple[str, Iterable]] = [
        ("entity", world.entities),
        ("event", world.events),
        ("location", world.locations),
        ("object", world.objects),
        ("channel", world.channels),
        ("world_trait", world.world_traits),
    ]
    seen_ids: set[str] = set()
    for family, nodes in groups:
        prefix = ID_PREFIXES[family]
        for node in nodes:
            if not node.id.startswith(prefix):
                err("id_prefix", node.id, f"{family} id must start with {prefix!r}")
            if node.id in seen_ids:
                err("duplicate_id", node.id, "node id appears more than once")
            seen_ids.add(node.id)

    def resolve(subject: str, ref: Optional[str], expected: Optional[set[str]] = None) -> None:
        if ref is None:
            return
        if not world.has_node(ref):
            err("id_closure", subject, f"reference {ref!r} does not resolve")
            return
        if expected is not None:
            fam = family_of(ref)
            if fam not in expected:
                err("id_closure", subject, f"reference {ref!r} is a {fam}, expected {sorted(expected)}")

    # Entities: locations, belief targets + provenance, timeline refs.
    for ent in world.entities:
        resolve(ent.id, ent.location_id, {"location"})
        for belief in ent.beliefs:
            resolve(ent.id, belief.target_id)
            resolve(ent.id, belief.acquired_via_event_id, {"event"})
            resolve(ent.id, belief.acquired_via_channel_id, {"channel"})
        last = None
        for delta in ent.state_timeline:
            if last is not None and delta.fabula_time < last:
                err("timeline_order", ent.id, "state_timeline not sorted by fabula_time")
                break
            last = delta.fabula_time
        for delta in ent.state_timeline:
            resolve(ent.id, delta.location_id, {"location"})
            for belief in delta.beliefs_added:
                resolve(ent.id, belief.target_id)
                resolve(ent.id, belief.acquired_via_event_id, {"event"})
                resolve(ent.id, belief.acquired_via_channel_id, {"channel"})

    # Events: participants, utterance discipline, syuzhet bookkeeping.
    syuzhet_seen: dict[int, str] = {}
    for evt in world.events:
        for ref in evt.actor_ids + evt.target_ids:
            resolve(evt.id, ref)
        resolve(evt.id, evt.location_id, {"location"})
        for ref in evt.referenced_event_ids:
            resolve(evt.id, ref, {"event"})
        is_utterance = evt.event_type == "utterance"
        has_routing = bool(evt.speaker_id or evt.addressee_ids or evt.via_channel_id)
        if is_utterance:
            if not (evt.speaker_id and evt.addressee_ids and evt.via_channel_id):
                err("utterance_fields", evt.id,
                    "utterance events need speaker_id, addressee_ids, via_channel_id")
            resolve(evt.id, evt.speaker_id, {"entity"})
            resolve(evt.id, evt.via_channel_id, {"channel"})
            for ref in evt.addressee_ids:
                resolve(evt.id, ref, {"entity"})
            if evt.via_channel_id and world.has_node(evt.via_channel_id):
                channel = world.node(evt.via_channel_id)
                members = set(channel.participant_ids)
                for who in [evt.speaker_id, *evt.addressee_ids]:
                    if who and who not in members:
                        warn("channel_membership", evt.id,
                             f"{who} routed via {channel.id} without being a participant")
        elif has_routing:
            err("utterance_fields", evt.id,
                f"event_type {evt.event_type!r} carries utterance routing fields")
        if evt.event_type not in KNOWN_EVENT_TYPES:
            warn("event_type_unknown", evt.id, f"unrecognized event_type {evt.event_type!r}")
        if evt.syuzhet_index in syuzhet_seen:
            err("syuzhet_unique", evt.id,
                f"syuzhet_index {evt.syuzhet_index} already used by {syuzhet_seen[evt.syuzhet_index]}")
        else:
            syuzhet_seen[evt.syuzhet_index] = evt.id

    if syuzhet_seen:
        lo, hi = min(syuzhet_seen), max(syuzhet_seen)
        if len(syuzhet_seen) != hi - lo + 1:
            err("syuzhet_contiguous", "world",
                f"syuzhet indices must be contiguous; saw {len(syuzhet_seen)} distinct in [{lo}, {hi}]")

    # Alive-actor rule: acting while dead at the event's fabula time.
    for evt in world.events:
        for actor in evt.actor_ids:
            if world.has_node(actor) and isinstance(world.node(actor), Entity):
                status = reconstruct_entity(world, actor, evt.fabula_time).status
                if status == "dead":
                    warn("alive_actor", evt.id, f"actor {actor} is dead at fabula {evt.fabula_time}")

    for obj in world.objects:
        resolve(obj.id, obj.location_id, {"location"})
        resolve(obj.id, obj.owner_id, {"entity"})

    for channel in world.channels:
        if not channel.participant_ids:
            warn("channel_membership", channel.id, "channel has no participants")
        for ref in channel.participant_ids:
            resolve(channel.id, ref, {"entity"})
        for ref in channel.intelligibility:
            resolve(channel.id, ref, {"entity"})

    # Causal edges: closure + modality endpoint rules + field requirements.
    for edge in world.causal_topology:
        subject = f"{edge.source_id}->{edge.target_id}"
        resolve(subject, edge.source_id)
        resolve(subject, edge.target_id)
        resolve(subject, edge.rel_counterpart_id, {"entity"})
        if not (world.has_node(edge.source_id) and world.has_node(edge.target_id)):
            continue
        src_fam, tgt_fam = family_of(edge.source_id), family_of(edge.target_id)
        allowed_src, allowed_tgt = _MODALITY_ENDPOINTS[edge.causality_type]
        if src_fam not in allowed_src or tgt_fam not in allowed_tgt:
            err("modality_endpoints", subject,
                f"{edge.causality_type} cannot connect {src_fam} -> {tgt_fam}")
            continue
        if edge.causality_type in ("mutation", "mutation_social") and not edge.trait_target:
            err("mutation_fields", subject, f"{edge.causality_type} edge needs trait_target")
        if edge.causality_type == "mutation_social":
            if edge.trait_target not in RELATIONSHIP_AXES:
                err("mutation_fields", subject,
                    f"mutation_social trait_target must be one of {RELATIONSHIP_AXES}")
            if not edge.rel_counterpart_id:
                err("mutation_fields", subject, "mutation_social edge needs rel_counterpart_id")
        if (edge.causality_type == "ambient_propagation"
                and family_of(edge.target_id) == "entity" and not edge.trait_target):
            err("mutation_fields", subject, "ambient edge into an entity needs trait_target")

    # Social edges: closure + symmetric per-axis coverage by mutation_social edges.
    social_cover: set[tuple[frozenset[str], str]] = set()
    for edge in world.causal_topology:
        if edge.causality_type == "mutation_social" and edge.rel_counterpart_id and edge.trait_target:
            social_cover.add((frozenset({edge.target_id, edge.rel_counterpart_id}), edge.trait_target))
    for rel in world.social_topology:
        subject = f"{rel.source_id}->{rel.target_id}"
        resolve(subject, rel.source_id, {"entity"})
        resolve(subject, rel.target_id, {"entity"})
        for axis, metric in rel.metrics.items():
            if axis not in RELATIONSHIP_AXES:
                err("axis_unknown", subject, f"unknown relationship axis {axis!r}")
                continue
            if metric.observed:
                dyad = frozenset({rel.source_id, rel.target_id})
                if (dyad, axis) not in social_cover:
                    warn("axis_parity", subject,
                         f"observed axis {axis!r} has no covering mutation_social edge")

    for spatial in world.spatial_topology:
        subject = f"{spatial.source_id}->{spatial.target_id}"
        resolve(subject, spatial.source_id, {"location"})
        resolve(subject, spatial.target_id, {"location"})
        resolve(subject, spatial.barrier_item_id, {"object"})

    return ValidationReport(errors=errors, warnings=warnings)


# -- serialization ----------------------------------------------------------


def canonical_world_json(world: WorldState) -> str:
    """Stable JSON text (sorted keys) used for hashing and byte comparisons."""
    return json.dumps(world.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def dump_world(world: WorldState, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(world.model_dump(mode="json"), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_world(path: str) -> WorldState:
    with open(path, "r", encoding="utf-8") as fh:
        return WorldState.model_validate(json.load(fh))
