"""Anchored ego-graph slicing and isolated sandboxes.

`slice_ego_graph` cuts a k-hop neighborhood around a focal set at a fabula
anchor: entities arrive as anchor-time snapshots, events from the focal
future are excluded (unless explicitly named as query targets), and world
traits always ride along.  `create_sandbox` turns a payload into a mutable
multigraph working copy that the causal physics can mutate freely without
touching the source world.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

import networkx as nx
from pydantic import BaseModel, Field

from .errors import UnknownNodeError
from .world_model import (
    Belief,
    CausalEdge,
    Channel,
    EntitySnapshot,
    EventNode,
    GlobalTrait,
    Location,
    ObjectNode,
    RelationshipEdge,
    SpatialEdge,
    WorldState,
    family_of,
    reconstruct_entity,
    reconstruct_world_trait,
)

__all__ = ["EgoPayload", "Sandbox", "slice_ego_graph", "create_sandbox"]

DEFAULT_HOP_LIMIT = 2


class EgoPayload(BaseModel):
    focal_ids: list[str]
    anchor_fabula: int
    hop_limit: int
    intelligibility_threshold: float = 0.5
    entities: dict[str, EntitySnapshot] = Field(default_factory=dict)
    events: dict[str, EventNode] = Field(default_factory=dict)
    locations: dict[str, Location] = Field(default_factory=dict)
    objects: dict[str, ObjectNode] = Field(default_factory=dict)
    channels: dict[str, Channel] = Field(default_factory=dict)
    world_traits: dict[str, GlobalTrait] = Field(default_factory=dict)
    causal_edges: list[CausalEdge] = Field(default_factory=list)
    social_edges: list[RelationshipEdge] = Field(default_factory=list)
    spatial_edges: list[SpatialEdge] = Field(default_factory=list)

    def node_ids(self) -> set[str]:
        return (set(self.entities) | set(self.events) | set(self.locations)
                | set(self.objects) | set(self.channels) | set(self.world_traits))


def _adjacency(world: WorldState, anchor_fabula: int, admissible: set[str]) -> dict[str, set[str]]:
    """Undirected hop graph over admissible nodes.  Channels link their
    participants pairwise (one hop) and sit one hop off each participant."""
    adj: dict[str, set[str]] = {nid: set() for nid in admissible}

    def link(a: Optional[str], b: Optional[str]) -> None:
        if a and b and a in adj and b in adj and a != b:
            adj[a].add(b)
            adj[b].add(a)

    for edge in world.causal_topology:
        link(edge.source_id, edge.target_id)
    for edge in world.social_topology:
        link(edge.source_id, edge.target_id)
    for edge in world.spatial_topology:
        link(edge.source_id, edge.target_id)
    for evt in world.events:
        if evt.id not in adj:
            continue
        for pid in evt.participant_ids:
            link(evt.id, pid)
        link(evt.id, evt.location_id)
        link(evt.id, evt.via_channel_id)
    for ent in world.entities:
        loc = reconstruct_entity(world, ent.id, anchor_fabula).location_id
        link(ent.id, loc)
    for obj in world.objects:
        link(obj.id, obj.location_id)
        link(obj.id, obj.owner_id)
    for channel in world.channels:
        if channel.established_at_fabula > anchor_fabula:
            continue
        if channel.terminated_at_fabula is not None and channel.terminated_at_fabula <= anchor_fabula:
            continue
        members = [p for p in channel.participant_ids if p in adj]
        for i, a in enumerate(members):
            link(a, channel.id)
            for b in members[i + 1:]:
                link(a, b)
    return adj


def slice_ego_graph(
    world: WorldState,
    focal_ids: Iterable[str],
    anchor_fabula: int,
    hop_limit: int = DEFAULT_HOP_LIMIT,
    query_target_ids: Iterable[str] = (),
) -> EgoPayload:
    """Cut the k-hop neighborhood of the focal set at a fabula anchor.

    Events with fabula_time > anchor are invisible (neither included nor
    traversed) unless named in `query_target_ids`.  World traits are always
    included.  Edges ride along only when both endpoints made the cut.
    """
    focals = list(focal_ids)
    targets = set(query_target_ids)
    for nid in [*focals, *targets]:
        if not world.has_node(nid):
            raise UnknownNodeError(nid)

    admissible = {
        nid for nid in world.all_node_ids()
        if family_of(nid) != "event"
        or world.event(nid).fabula_time <= anchor_fabula
        or nid in targets
    }
    adj = _adjacency(world, anchor_fabula, admissible)

    included: set[str] = set()
    frontier: deque[tuple[str, int]] = deque()
    for nid in focals:
        if nid in admissible and nid not in included:
            included.add(nid)
            frontier.append((nid, 0))
    while frontier:
        nid, depth = frontier.popleft()
        if depth >= hop_limit:
            continue
        for neighbor in adj.get(nid, ()):
            if neighbor not in included:
                included.add(neighbor)
                frontier.append((neighbor, depth + 1))

    payload = EgoPayload(
        focal_ids=focals,
        anchor_fabula=anchor_fabula,
        hop_limit=hop_limit,
        intelligibility_threshold=world.intelligibility_threshold,
    )
    for nid in sorted(included):
        family = family_of(nid)
        if family == "entity":
            payload.entities[nid] = reconstruct_entity(world, nid, anchor_fabula)
        elif family == "event":
            payload.events[nid] = world.event(nid)
        elif family == "location":
            payload.locations[nid] = world.node(nid)
        elif family == "object":
            payload.objects[nid] = world.node(nid)
        elif family == "channel":
            payload.channels[nid] = world.node(nid)
    for trait in world.world_traits:
        at_anchor = reconstruct_world_trait(world, trait.id, anchor_fabula)
        payload.world_traits[trait.id] = trait.model_copy(
            update={"value": at_anchor, "state_timeline": []})

    present = payload.node_ids()
    payload.causal_edges = [e for e in world.causal_topology
                            if e.source_id in present and e.target_id in present]
    payload.social_edges = [e for e in world.social_topology
                            if e.source_id in present and e.target_id in present]
    payload.spatial_edges = [e for e in world.spatial_topology
                             if e.source_id in present and e.target_id in present]
    return payload


@dataclass
class TraitState:
    value: float
    inertia: float


@dataclass
class Sandbox:
    """Mutable working copy of an ego payload.

    All numeric state lives in plain dict stores; the multigraph carries
    structure (typed edges) and is what interventions mutilate.  Nothing in
    here aliases the source world.
    """

    graph: nx.MultiDiGraph
    anchor_fabula: int
    focal_ids: list[str]
    query_type: str
    intelligibility_threshold: float
    traits: dict[str, dict[str, TraitState]]
    axes: dict[tuple[str, str, str], TraitState]
    activation: dict[str, float]
    status: dict[str, str]
    entity_location: dict[str, Optional[str]]
    beliefs: dict[str, list[Belief]]
    ambient: dict[str, dict[str, float]]
    world_traits: dict[str, TraitState]
    events: dict[str, EventNode]
    channels: dict[str, Channel]
    objects: dict[str, ObjectNode]
    causal_edges: list[CausalEdge]
    spatial_edges: list[SpatialEdge]
    disabled_objects: set[str] = field(default_factory=set)
    disabled_channels: set[str] = field(default_factory=set)
    invalidated_events: set[str] = field(default_factory=set)
    pinned_traits: dict[tuple[str, str], float] = field(default_factory=dict)

    def event_active(self, event_id: str) -> bool:
        return self.activation.get(event_id, 0.0) > 0.0 and event_id not in self.invalidated_events

    def trait_state(self, entity_id: str, trait: str) -> TraitState:
        try:
            return self.traits[entity_id][trait]
        except KeyError:
            raise UnknownNodeError(f"{entity_id}.{trait}") from None

    def axis_state(self, source_id: str, counterpart_id: str, axis: str) -> TraitState:
        key = (source_id, counterpart_id, axis)
        if key not in self.axes:
            self.axes[key] = TraitState(value=0.0, inertia=0.5)
        return self.axes[key]

    def location_of(self, node_id: str) -> Optional[str]:
        if node_id in self.entity_location:
            return self.entity_location[node_id]
        if node_id in self.events:
            return self.events[node_id].location_id
        if node_id in self.objects:
            return self.objects[node_id].location_id
        if node_id in self.ambient:
            return node_id
        return None

    def _spatial_adjacency(self, unlocked_only: bool) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {}
        for edge in self.spatial_edges:
            if unlocked_only and edge.is_locked:
                continue
            adj.setdefault(edge.source_id, set()).add(edge.target_id)
            adj.setdefault(edge.target_id, set()).add(edge.source_id)
        return adj

    def spatial_hops(self, a: str, b: str, unlocked_only: bool = False) -> float:
        """Undirected hop count between two locations; inf when disconnected."""
        if a == b:
            return 0.0
        adj = self._spatial_adjacency(unlocked_only)
        seen = {a}
        frontier = deque([(a, 0)])
        while frontier:
            nid, depth = frontier.popleft()
            for neighbor in adj.get(nid, ()):
                if neighbor == b:
                    return float(depth + 1)
                if neighbor not in seen:
                    seen.add(neighbor)
                    frontier.append((neighbor, depth + 1))
        return math.inf

    def reachable(self, a: str, b: str) -> bool:
        """True when an unbroken, unlocked connected_to path joins a to b."""
        return self.spatial_hops(a, b, unlocked_only=True) < math.inf


def create_sandbox(payload: EgoPayload, query_type: str = "observation") -> Sandbox:
    """Materialize an isolated sandbox from a payload."""
    graph = nx.MultiDiGraph()
    for nid in sorted(payload.node_ids()):
        graph.add_node(nid, family=family_of(nid))

    traits = {
        eid: {name: TraitState(value=tv.value, inertia=tv.inertia)
              for name, tv in snap.traits.items()}
        for eid, snap in payload.entities.items()
    }
    axes: dict[tuple[str, str, str], TraitState] = {}
    for rel in payload.social_edges:
        for axis, metric in rel.metrics.items():
            axes[(rel.source_id, rel.target_id, axis)] = TraitState(
                value=metric.value, inertia=metric.inertia)
        graph.add_edge(rel.source_id, rel.target_id, kind="relationship", data=rel)

    for eid, snap in payload.entities.items():
        if snap.location_id and snap.location_id in payload.locations:
            graph.add_edge(eid, snap.location_id, kind="located_in")
    for oid, obj in payload.objects.items():
        if obj.location_id and obj.location_id in payload.locations:
            graph.add_edge(oid, obj.location_id, kind="located_in")
        if obj.owner_id and obj.owner_id in payload.entities:
            graph.add_edge(oid, obj.owner_id, kind="owned_by")
    for edge in payload.spatial_edges:
        graph.add_edge(edge.source_id, edge.target_id, kind="connected_to", data=edge)
    for edge in payload.causal_edges:
        graph.add_edge(edge.source_id, edge.target_id, kind="causal",
                       modality=edge.causality_type, data=edge)
    for cid, channel in payload.channels.items():
        members = [p for p in channel.participant_ids if p in payload.entities]
        for i, a in enumerate(members):
            graph.add_edge(a, cid, kind="communicating_with")
            graph.add_edge(cid, a, kind="communicating_with")
            for b in members[i + 1:]:
                graph.add_edge(a, b, kind="communicating_with", via=cid)
                graph.add_edge(b, a, kind="communicating_with", via=cid)
        for listener, level in channel.intelligibility.items():
            if (listener in payload.entities and listener not in channel.participant_ids
                    and level >= payload.intelligibility_threshold):
                graph.add_edge(cid, listener, kind="eavesdropped_by", level=level)

    return Sandbox(
        graph=graph,
        anchor_fabula=payload.anchor_fabula,
        focal_ids=list(payload.focal_ids),
        query_type=query_type,
        intelligibility_threshold=payload.intelligibility_threshold,
        traits=traits,
        axes=axes,
        activation={eid: 1.0 for eid in payload.events},
        status={eid: snap.status for eid, snap in payload.entities.items()},
        entity_location={eid: snap.location_id for eid, snap in payload.entities.items()},
        beliefs={eid: list(snap.beliefs) for eid, snap in payload.entities.items()},
        ambient={lid: {k: v.value for k, v in loc.ambient_state.items()}
                 for lid, loc in payload.locations.items()},
        world_traits={tid: TraitState(value=wt.value, inertia=wt.inertia)
                      for tid, wt in payload.world_traits.items()},
        events=dict(payload.events),
        channels=dict(payload.channels),
        objects=dict(payload.objects),
        causal_edges=list(payload.causal_edges),
        spatial_edges=list(payload.spatial_edges),
    )
