"""Propagation physics over sandboxes: observation, surgery, and counterfactuals.

Impulse arithmetic: an edge pushes its target trait with impulse
``I = delta_src * w`` (authored delta edges) or ``I = (V_source - V_target) * w``
(ambient edges), where ``w`` is evidence-strength times force/10, halved on a
mechanism/trait mismatch.  Per target the average impulse
``I_bar = sum(I) / max(1, sum(w))`` must clear the trait's inertia gate
(|I_bar| > inertia + eps) to apply ``delta = I_bar - sign(I_bar) * inertia``;
otherwise every contributing edge lands in the blocked ledger.  An optional
noisy-OR mode replaces the hard gate with per-edge logistic probabilities
aggregated as ``1 - prod(1 - p_i)``.

Interventions pin values and sever inbound structure; counterfactuals first
rectify the sandbox to observed evidence (precision-weighted blend per trait),
then cut, then propagate.  Event surgery cascades along chain_reaction edges;
channel surgery also invalidates the utterances it carried and drops beliefs
that cite either.
"""

from __future__ import annotations

import json
import math
import random
from typing import Literal, Mapping, Optional, Sequence

import networkx as nx
from pydantic import BaseModel, Field

from .amwn import PreflightReport, preflight
from .ego_graph import EgoPayload, Sandbox, TraitState, create_sandbox, slice_ego_graph
from .errors import QueryError, UnknownNodeError
from .world_model import (
    Belief,
    CausalEdge,
    StateDelta,
    WorldState,
    WorldTraitDelta,
    edge_weight,
    family_of,
    reconstruct_entity,
    terminal_fabula,
)

__all__ = [
    "PhysicsSettings",
    "InterventionSpec",
    "ObservationQuery",
    "InterventionQuery",
    "CounterfactualQuery",
    "Mutation",
    "BlockedImpulse",
    "HiddenDelta",
    "CausalPhysicsResult",
    "MECHANISM_TRAIT_MAP",
    "apply_do",
    "abduce",
    "propagate",
    "execute",
    "materialize_result_world",
    "result_json",
]

# Admissible mechanism kinds per trait; a mismatch halves the edge weight.
# Traits absent from the map accept any mechanism.
MECHANISM_TRAIT_MAP: dict[str, frozenset[str]] = {
    "ambition": frozenset({"psychological", "social", "supernatural"}),
    "guilt": frozenset({"psychological", "moral"}),
    "paranoia": frozenset({"psychological", "supernatural", "epistemic"}),
    "courage": frozenset({"psychological", "physical"}),
    "fear": frozenset({"psychological", "physical", "supernatural"}),
    "grief": frozenset({"psychological", "existential", "physical"}),
    "suspicion": frozenset({"epistemic", "psychological", "social"}),
    "loyalty": frozenset({"social", "psychological", "moral"}),
    "vengeance": frozenset({"psychological", "social", "moral"}),
    "trust": frozenset({"social", "epistemic", "psychological"}),
}

MECHANISM_MISMATCH_ATTENUATION = 0.5


class PhysicsSettings(BaseModel):
    epsilon: float = 1e-9
    noisy_or: bool = False
    noisy_or_beta: float = 10.0
    noisy_or_threshold: float = 0.5
    distribution_execution: bool = False
    baseline_drift_rho: float = 0.0
    mechanism_mismatch_attenuation: float = MECHANISM_MISMATCH_ATTENUATION
    evidence_precision: float = 1.0
    legacy_belief_blend: bool = False
    preflight_mode: Literal["off", "advisory", "prune"] = "advisory"
    allow_unobserved_confounders: bool = False
    hop_limit: int = 2


class InterventionSpec(BaseModel):
    """Surgical assignments.  Keys: ``ENT_X.trait`` pins a trait value,
    ``WORLD_X`` pins a world trait, ``REL::A::B::axis`` pins a relationship
    axis, ``EVT_X: null`` forces non-occurrence, ``CHN_X: null`` severs,
    ``OBJ_X: null`` disables."""

    assignments: dict[str, Optional[float | bool]] = Field(default_factory=dict)
    channel_severances: list[str] = Field(default_factory=list)
    event_invalidations: list[str] = Field(default_factory=list)

    def variables(self) -> dict[str, object]:
        merged: dict[str, object] = dict(self.assignments)
        for cid in self.channel_severances:
            merged.setdefault(cid, None)
        for eid in self.event_invalidations:
            merged.setdefault(eid, None)
        return merged

    def is_empty(self) -> bool:
        return not self.variables()


class ObservationQuery(BaseModel):
    kind: Literal["observation"] = "observation"
    focal_ids: list[str]
    anchor_fabula: int
    hop_limit: Optional[int] = None


class InterventionQuery(BaseModel):
    kind: Literal["intervention"] = "intervention"
    focal_ids: list[str]
    anchor_fabula: int
    hop_limit: Optional[int] = None
    interventions: InterventionSpec = Field(default_factory=InterventionSpec)
    target_ids: list[str] = Field(default_factory=list)


class CounterfactualQuery(BaseModel):
    kind: Literal["counterfactual"] = "counterfactual"
    focal_ids: list[str]
    anchor_fabula: int
    hop_limit: Optional[int] = None
    interventions: InterventionSpec = Field(default_factory=InterventionSpec)
    target_ids: list[str] = Field(default_factory=list)
    evidence_node_ids: list[str] = Field(default_factory=list)

AnyQuery = ObservationQuery | InterventionQuery | CounterfactualQuery


class Mutation(BaseModel):
    node_id: str
    trait: str
    old: float
    new: float
    impact: float
    at_fabula: int
    counterpart_id: Optional[str] = None
    edges: list[str] = Field(default_factory=list)


class BlockedImpulse(BaseModel):
    source_id: str
    target_id: str
    trait: Optional[str] = None
    reason: Literal[
        "inertia", "affordance", "spatial", "cycle",
        "noisy_or_absorbed", "blocked_by_intervention",
    ]
    impact: Optional[float] = None
    counterpart_id: Optional[str] = None


class HiddenDelta(BaseModel):
    node_id: str
    trait: str
    prior: float
    posterior: float
    delta: float
    counterpart_id: Optional[str] = None


class CausalPhysicsResult(BaseModel):
    mutations: list[Mutation] = Field(default_factory=list)
    blocked: list[BlockedImpulse] = Field(default_factory=list)
    hidden_deltas: list[HiddenDelta] = Field(default_factory=list)
    intervened_nodes: list[str] = Field(default_factory=list)
    rule1_vacuous_assignments: list[str] = Field(default_factory=list)
    rule3_pruned_interventions: list[str] = Field(default_factory=list)
    rule2_redundant_evidence: list[str] = Field(default_factory=list)
    noisy_or_probabilities: dict[str, float] = Field(default_factory=dict)
    pruned_beliefs_count: int = 0
    pruned_utterance_event_ids: list[str] = Field(default_factory=list)
    disabled_channel_ids: list[str] = Field(default_factory=list)


def result_json(result: CausalPhysicsResult) -> str:
    """Canonical JSON text for a result (stable key order, 2-space indent)."""
    return json.dumps(result.model_dump(mode="json"), indent=2, sort_keys=True)


def _edge_key(edge: CausalEdge) -> str:
    return f"{edge.source_id}|{edge.target_id}|{edge.causality_type}|{edge.trait_target or ''}"


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def _sign(x: float) -> float:
    return math.copysign(1.0, x) if x else 0.0


# -- surgery -------------------------------------------------------------------


class DoReport(BaseModel):
    intervened_nodes: list[str] = Field(default_factory=list)
    pruned_beliefs_count: int = 0
    pruned_utterance_event_ids: list[str] = Field(default_factory=list)
    disabled_channel_ids: list[str] = Field(default_factory=list)


def _parse_axis_var(var: str) -> Optional[tuple[str, str, str]]:
    if var.startswith("REL::"):
        parts = var.split("::")
        if len(parts) == 4:
            return parts[1], parts[2], parts[3]
    return None


def apply_do(sandbox: Sandbox, spec: InterventionSpec) -> DoReport:
    """Pin assigned values and cut the structure that would overwrite them.

    Trait and axis pins sever their inbound delta-carrying edges (sibling
    traits stay live).  Event pins sever the event's inbound causal edges and
    set its activation.  Channel severance also invalidates every utterance
    the channel carried.  Beliefs citing a severed channel or an invalidated
    event are dropped with counts reported.
    """
    report = DoReport()
    touched: set[str] = set()
    dead_events: set[str] = set()
    dead_channels: set[str] = set()

    def cut_edges(predicate) -> None:
        keep: list[CausalEdge] = []
        for edge in sandbox.causal_edges:
            if predicate(edge):
                _remove_graph_edge(sandbox, edge)
            else:
                keep.append(edge)
        sandbox.causal_edges[:] = keep

    for var, value in spec.variables().items():
        axis_key = _parse_axis_var(var)
        if axis_key is not None:
            src, tgt, axis = axis_key
            if src not in sandbox.traits:
                raise UnknownNodeError(src)
            state = sandbox.axis_state(src, tgt, axis)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise QueryError(f"axis assignment {var!r} needs a numeric value")
            state.value = _clamp(float(value), -1.0, 1.0)
            cut_edges(lambda e, s=src, t=tgt, a=axis: (
                e.causality_type == "mutation_social" and e.target_id == s
                and e.rel_counterpart_id == t and e.trait_target == a))
            touched.add(src)
            continue

        if "." in var and family_of(var.split(".", 1)[0]) == "entity":
            entity_id, trait = var.split(".", 1)
            state = sandbox.trait_state(entity_id, trait)  # raises on unknown
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise QueryError(f"trait assignment {var!r} needs a numeric value")
            state.value = _clamp(float(value), 0.0, 1.0)
            sandbox.pinned_traits[(entity_id, trait)] = state.value
            cut_edges(lambda e, n=entity_id, t=trait: (
                e.target_id == n and e.trait_target == t
                and e.causality_type in ("mutation", "ambient_propagation")))
            touched.add(entity_id)
            continue

        family = family_of(var)
        if family == "world_trait":
            if var not in sandbox.world_traits:
                raise UnknownNodeError(var)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise QueryError(f"world trait assignment {var!r} needs a numeric value")
            sandbox.world_traits[var].value = _clamp(float(value), 0.0, 1.0)
            cut_edges(lambda e, n=var: e.target_id == n)
            touched.add(var)
        elif family == "event":
            if var not in sandbox.events:
                raise UnknownNodeError(var)
            cut_edges(lambda e, n=var: e.target_id == n)
            if value is None or value is False:
                sandbox.activation[var] = 0.0
                sandbox.invalidated_events.add(var)
                dead_events.add(var)
            else:
                sandbox.activation[var] = 1.0
                sandbox.invalidated_events.discard(var)
            touched.add(var)
        elif family == "channel":
            if var not in sandbox.channels:
                raise UnknownNodeError(var)
            if value is not None:
                raise QueryError(f"channel {var!r} only supports severance (null)")
            sandbox.disabled_channels.add(var)
            dead_channels.add(var)
            touched.add(var)
        elif family == "object":
            if var not in sandbox.objects:
                raise UnknownNodeError(var)
            if value is not None:
                raise QueryError(f"object {var!r} only supports disabling (null)")
            sandbox.disabled_objects.add(var)
            touched.add(var)
        else:
            raise UnknownNodeError(var)

    # A severed channel silences every utterance it carried.
    for cid in sorted(dead_channels):
        for eid, evt in sorted(sandbox.events.items()):
            if evt.via_channel_id == cid and eid not in sandbox.invalidated_events:
                sandbox.activation[eid] = 0.0
                sandbox.invalidated_events.add(eid)
                report.pruned_utterance_event_ids.append(eid)

    # Provenance pruning: beliefs citing severed channels or dead events.
    dead_for_beliefs = dead_events | set(report.pruned_utterance_event_ids)
    for entity_id in sorted(sandbox.beliefs):
        kept: list[Belief] = []
        for belief in sandbox.beliefs[entity_id]:
            cite_channel = belief.acquired_via_channel_id
            cite_event = belief.acquired_via_event_id
            if (cite_channel and cite_channel in dead_channels) or (
                    cite_event and cite_event in dead_for_beliefs):
                report.pruned_beliefs_count += 1
            else:
                kept.append(belief)
        sandbox.beliefs[entity_id] = kept

    report.intervened_nodes = sorted(touched)
    report.disabled_channel_ids = sorted(dead_channels)
    report.pruned_utterance_event_ids.sort()
    return report


def _remove_graph_edge(sandbox: Sandbox, edge: CausalEdge) -> None:
    g = sandbox.graph
    if not g.has_edge(edge.source_id, edge.target_id):
        return
    for key, data in list(g[edge.source_id][edge.target_id].items()):
        if data.get("kind") == "causal" and data.get("data") is edge:
            g.remove_edge(edge.source_id, edge.target_id, key=key)
            return


# -- abduction -------------------------------------------------------------------


def blend(prior: float, inertia: float, evidence: float, precision: float,
          legacy: bool = False) -> float:
    """Precision-weighted update of a prior toward observed evidence."""
    if legacy:
        return prior + (1.0 - inertia) * (evidence - prior)
    denom = inertia + precision
    if denom <= 0.0:
        return prior
    return (inertia * prior + precision * evidence) / denom


def abduce(
    sandbox: Sandbox,
    evidence: Mapping[str, Mapping[str, float]],
    axis_evidence: Mapping[tuple[str, str, str], float] | None = None,
    belief_evidence: Mapping[str, Sequence[Belief]] | None = None,
    settings: PhysicsSettings | None = None,
) -> list[HiddenDelta]:
    """Rectify sandbox latents toward observed evidence.

    Per trait: posterior = (inertia * prior + precision * observed) /
    (inertia + precision); the legacy mode is the convex pull
    prior + (1 - inertia) * (observed - prior).  The same blend runs per
    relationship axis.  Observed beliefs absent from the sandbox are
    reinstated only when their provenance channel is alive and gives the
    holder intelligibility at or above the world threshold.
    """
    cfg = settings or PhysicsSettings()
    deltas: list[HiddenDelta] = []

    for entity_id in sorted(evidence):
        if entity_id not in sandbox.traits:
            raise UnknownNodeError(entity_id)
        for trait in sorted(evidence[entity_id]):
            observed = evidence[entity_id][trait]
            store = sandbox.traits[entity_id]
            if trait not in store:
                store[trait] = TraitState(value=0.0, inertia=0.5)
            state = store[trait]
            posterior = blend(state.value, state.inertia, observed,
                              cfg.evidence_precision, cfg.legacy_belief_blend)
            posterior = _clamp(posterior, 0.0, 1.0)
            deltas.append(HiddenDelta(
                node_id=entity_id, trait=trait,
                prior=state.value, posterior=posterior,
                delta=posterior - state.value,
            ))
            state.value = posterior

    for (src, tgt, axis) in sorted(axis_evidence or {}):
        observed = (axis_evidence or {})[(src, tgt, axis)]
        state = sandbox.axis_state(src, tgt, axis)
        posterior = _clamp(
            blend(state.value, state.inertia, observed,
                  cfg.evidence_precision, cfg.legacy_belief_blend),
            -1.0, 1.0)
        deltas.append(HiddenDelta(
            node_id=src, trait=axis, counterpart_id=tgt,
            prior=state.value, posterior=posterior, delta=posterior - state.value,
        ))
        state.value = posterior

    for holder in sorted(belief_evidence or {}):
        if holder not in sandbox.beliefs:
            continue
        present = {(b.target_id, b.perceived_state) for b in sandbox.beliefs[holder]}
        for belief in (belief_evidence or {})[holder]:
            if (belief.target_id, belief.perceived_state) in present:
                continue
            if _belief_plausible(sandbox, holder, belief):
                sandbox.beliefs[holder].append(belief)

    return deltas


def _belief_plausible(sandbox: Sandbox, holder: str, belief: Belief) -> bool:
    cid = belief.acquired_via_channel_id
    if belief.acquired_via_event_id and belief.acquired_via_event_id in sandbox.invalidated_events:
        return False
    if not cid:
        return True
    if cid in sandbox.disabled_channels:
        return False
    channel = sandbox.channels.get(cid)
    if channel is None:
        return True  # provenance outside the slice: nothing to test against
    if holder in channel.intelligibility:
        level = channel.intelligibility[holder]
    else:
        level = 1.0 if holder in channel.participant_ids else 0.0
    return level >= sandbox.intelligibility_threshold


# -- propagation -------------------------------------------------------------------


def _logistic(x: float) -> float:
    if x >= 0:
        z = math.exp(-x)
        return 1.0 / (1.0 + z)
    z = math.exp(x)
    return z / (1.0 + z)


def _effective_weight(edge: CausalEdge, trait: Optional[str],
                      attenuation: float) -> float:
    w = edge_weight(edge)
    if trait and edge.mechanism:
        admissible = MECHANISM_TRAIT_MAP.get(trait)
        if admissible is not None and edge.mechanism not in admissible:
            w *= attenuation
    return w


def _source_active(sandbox: Sandbox, edge: CausalEdge) -> bool:
    fam = family_of(edge.source_id)
    if fam == "event":
        return sandbox.event_active(edge.source_id)
    if fam == "object":
        return edge.source_id not in sandbox.disabled_objects
    return True  # locations and world traits are standing sources


def _ambient_value(sandbox: Sandbox, location_id: str, trait: Optional[str]) -> float:
    bundle = sandbox.ambient.get(location_id, {})
    if trait and trait in bundle:
        return bundle[trait]
    if bundle:
        return max(bundle.values())
    return 0.0


def _spatially_blocked(sandbox: Sandbox, edge: CausalEdge) -> bool:
    src_loc = sandbox.location_of(edge.source_id)
    tgt_loc = sandbox.location_of(edge.target_id)
    if not src_loc or not tgt_loc or src_loc == tgt_loc:
        return False
    return not sandbox.reachable(src_loc, tgt_loc)


def propagate(
    sandbox: Sandbox,
    settings: PhysicsSettings | None = None,
    rng: random.Random | None = None,
    ambient_only: bool = False,
) -> tuple[list[Mutation], list[BlockedImpulse], dict[str, float]]:
    """Run impulses through the sandbox in causal order.

    Strongly connected components are condensed; edges inside a cycle are
    blocked with reason ``cycle``.  Event activation flows along
    chain_reaction edges (an event with every chain source dead goes dead);
    trait impulses aggregate per target and face the inertia gate or, in
    noisy-OR mode, the logistic aggregate.  With `ambient_only`, only
    standing ambient edges fire (pure observation).
    """
    cfg = settings or PhysicsSettings()
    rng = rng or random.Random(0)
    mutations: list[Mutation] = []
    blocked: list[BlockedImpulse] = []
    noisy_probs: dict[str, float] = {}

    edges = list(sandbox.causal_edges)
    if ambient_only:
        edges = [e for e in edges if e.causality_type == "ambient_propagation"]

    flow = nx.MultiDiGraph()
    for edge in edges:
        flow.add_node(edge.source_id)
        flow.add_node(edge.target_id)
        flow.add_edge(edge.source_id, edge.target_id, data=edge)

    # Condense cycles; intra-component edges are refused outright.
    components = list(nx.strongly_connected_components(flow))
    comp_of: dict[str, int] = {}
    for idx, members in enumerate(components):
        for node in members:
            comp_of[node] = idx
    cyclic_edges: set[int] = set()
    live_edges: list[CausalEdge] = []
    for edge in edges:
        same = comp_of[edge.source_id] == comp_of[edge.target_id]
        self_loop = edge.source_id == edge.target_id
        in_cycle = self_loop or (same and len(components[comp_of[edge.source_id]]) > 1)
        if in_cycle:
            cyclic_edges.add(id(edge))
            blocked.append(BlockedImpulse(
                source_id=edge.source_id, target_id=edge.target_id,
                trait=edge.trait_target, reason="cycle"))
        else:
            live_edges.append(edge)

    condensed = nx.DiGraph()
    condensed.add_nodes_from(range(len(components)))
    for edge in live_edges:
        a, b = comp_of[edge.source_id], comp_of[edge.target_id]
        if a != b:
            condensed.add_edge(a, b)
    order: list[str] = []
    for comp_idx in nx.topological_sort(condensed):
        order.extend(sorted(components[comp_idx]))

    inbound: dict[str, list[CausalEdge]] = {}
    for edge in live_edges:
        inbound.setdefault(edge.target_id, []).append(edge)

    for node_id in order:
        family = family_of(node_id)
        node_edges = inbound.get(node_id, [])
        if not node_edges:
            continue

        if family == "event":
            _process_event_target(sandbox, node_id, node_edges, blocked)
            continue

        if family == "world_trait":
            state = sandbox.world_traits.get(node_id)
            if state is None:
                continue
            groups = {None: [e for e in node_edges if e.causality_type == "mutation"]}
            for _, group in sorted(groups.items(), key=lambda kv: str(kv[0])):
                if group:
                    _apply_trait_group(
                        sandbox, cfg, rng, node_id, "value", state, group,
                        mutations, blocked, noisy_probs, clamp_lo=0.0, clamp_hi=1.0)
            continue

        if family != "entity":
            continue

        by_trait: dict[str, list[CausalEdge]] = {}
        by_axis: dict[tuple[str, str], list[CausalEdge]] = {}
        for edge in node_edges:
            if edge.causality_type == "mutation_social":
                if edge.trait_target and edge.rel_counterpart_id:
                    by_axis.setdefault((edge.trait_target, edge.rel_counterpart_id), []).append(edge)
            elif edge.causality_type in ("mutation", "ambient_propagation"):
                if edge.trait_target:
                    by_trait.setdefault(edge.trait_target, []).append(edge)

        for trait in sorted(by_trait):
            if (node_id, trait) in sandbox.pinned_traits:
                continue  # surgery severed these upstream; defensive
            store = sandbox.traits.get(node_id, {})
            if trait not in store:
                continue
            _apply_trait_group(
                sandbox, cfg, rng, node_id, trait, store[trait], by_trait[trait],
                mutations, blocked, noisy_probs, clamp_lo=0.0, clamp_hi=1.0)

        for (axis, counterpart) in sorted(by_axis):
            state = sandbox.axis_state(node_id, counterpart, axis)
            _apply_trait_group(
                sandbox, cfg, rng, node_id, axis, state, by_axis[(axis, counterpart)],
                mutations, blocked, noisy_probs,
                clamp_lo=-1.0, clamp_hi=1.0, counterpart_id=counterpart)

    if cfg.baseline_drift_rho > 0.0:
        for mutation in mutations:
            pull = (1.0 - _inertia_of(sandbox, mutation)) * cfg.baseline_drift_rho
            mutation.new = mutation.new - (mutation.new - mutation.old) * pull

    mutations.sort(key=lambda m: (m.node_id, m.trait, m.counterpart_id or ""))
    blocked.sort(key=lambda b: (b.source_id, b.target_id, b.trait or "", b.reason))
    return mutations, blocked, noisy_probs


def _inertia_of(sandbox: Sandbox, mutation: Mutation) -> float:
    if mutation.counterpart_id:
        return sandbox.axis_state(mutation.node_id, mutation.counterpart_id, mutation.trait).inertia
    if mutation.node_id in sandbox.world_traits:
        return sandbox.world_traits[mutation.node_id].inertia
    store = sandbox.traits.get(mutation.node_id, {})
    if mutation.trait in store:
        return store[mutation.trait].inertia
    return 0.5


def _process_event_target(sandbox: Sandbox, event_id: str,
                          node_edges: list[CausalEdge],
                          blocked: list[BlockedImpulse]) -> None:
    if event_id in sandbox.invalidated_events:
        return
    chain = [e for e in node_edges if e.causality_type == "chain_reaction"]
    gates = [e for e in node_edges if e.causality_type == "affordance_gate"]

    for gate in gates:
        if gate.source_id in sandbox.disabled_objects:
            sandbox.activation[event_id] = 0.0
            sandbox.invalidated_events.add(event_id)
            blocked.append(BlockedImpulse(
                source_id=gate.source_id, target_id=event_id, reason="affordance"))
            return

    if chain:
        live = [e for e in chain if sandbox.event_active(e.source_id)]
        if not live:
            sandbox.activation[event_id] = 0.0
            sandbox.invalidated_events.add(event_id)
            for edge in chain:
                blocked.append(BlockedImpulse(
                    source_id=edge.source_id, target_id=event_id,
                    reason="blocked_by_intervention"))


def _apply_trait_group(
    sandbox: Sandbox,
    cfg: PhysicsSettings,
    rng: random.Random,
    node_id: str,
    trait: str,
    state,
    group: list[CausalEdge],
    mutations: list[Mutation],
    blocked: list[BlockedImpulse],
    noisy_probs: dict[str, float],
    clamp_lo: float,
    clamp_hi: float,
    counterpart_id: Optional[str] = None,
) -> None:
    impulses: list[tuple[CausalEdge, float, float]] = []  # (edge, impulse, weight)
    for edge in group:
        if not _source_active(sandbox, edge):
            if family_of(edge.source_id) == "event":
                blocked.append(BlockedImpulse(
                    source_id=edge.source_id, target_id=node_id, trait=trait,
                    reason="blocked_by_intervention", impact=0.0,
                    counterpart_id=counterpart_id))
            continue
        if _spatially_blocked(sandbox, edge):
            blocked.append(BlockedImpulse(
                source_id=edge.source_id, target_id=node_id, trait=trait,
                reason="spatial", counterpart_id=counterpart_id))
            continue
        w = _effective_weight(edge, trait if counterpart_id is None else None,
                              cfg.mechanism_mismatch_attenuation)
        if w <= 0.0:
            continue
        if edge.causality_type == "ambient_propagation":
            source_value = _ambient_value(sandbox, edge.source_id, edge.trait_target)
            impulse = (source_value - state.value) * w
        elif edge.trait_delta is not None:
            impulse = edge.trait_delta * w
        else:
            impulse = (1.0 - state.value) * w
        impulses.append((edge, impulse, w))

    if not impulses:
        return

    total_w = sum(w for _, _, w in impulses)
    avg_impact = sum(i for _, i, _ in impulses) / max(1.0, total_w)
    inertia = state.inertia
    at_fabula = sandbox.anchor_fabula + max(e.propagation_delay for e, _, _ in impulses)

    if cfg.noisy_or:
        survive = 1.0
        for _, impulse, _ in impulses:
            p_i = _logistic(cfg.noisy_or_beta * (abs(impulse) - inertia))
            survive *= (1.0 - p_i)
        p_fire = 1.0 - survive
        key = f"{node_id}.{trait}" if counterpart_id is None else f"{node_id}->{counterpart_id}.{trait}"
        noisy_probs[key] = p_fire
        fires = (rng.random() < p_fire) if cfg.distribution_execution else (
            p_fire > cfg.noisy_or_threshold)
        if fires and avg_impact != 0.0:
            old = state.value
            state.value = _clamp(old + avg_impact, clamp_lo, clamp_hi)
            mutations.append(Mutation(
                node_id=node_id, trait=trait, old=old, new=state.value,
                impact=avg_impact, at_fabula=at_fabula, counterpart_id=counterpart_id,
                edges=[_edge_key(e) for e, _, _ in impulses]))
        else:
            for edge, impulse, _ in impulses:
                blocked.append(BlockedImpulse(
                    source_id=edge.source_id, target_id=node_id, trait=trait,
                    reason="noisy_or_absorbed", impact=avg_impact,
                    counterpart_id=counterpart_id))
        return

    if abs(avg_impact) > inertia + cfg.epsilon:
        delta = avg_impact - _sign(avg_impact) * inertia
        old = state.value
        state.value = _clamp(old + delta, clamp_lo, clamp_hi)
        mutations.append(Mutation(
            node_id=node_id, trait=trait, old=old, new=state.value,
            impact=avg_impact, at_fabula=at_fabula, counterpart_id=counterpart_id,
            edges=[_edge_key(e) for e, _, _ in impulses]))
    else:
        for edge, impulse, _ in impulses:
            blocked.append(BlockedImpulse(
                source_id=edge.source_id, target_id=node_id, trait=trait,
                reason="inertia", impact=avg_impact, counterpart_id=counterpart_id))


# -- rung dispatch -------------------------------------------------------------------


def _slice_for_query(world: WorldState, query: AnyQuery,
                     settings: PhysicsSettings) -> EgoPayload:
    hops = query.hop_limit if query.hop_limit is not None else settings.hop_limit
    seeds = list(query.focal_ids)
    explicit_targets: set[str] = set()
    if isinstance(query, (InterventionQuery, CounterfactualQuery)):
        for var in query.interventions.variables():
            head = var.split(".", 1)[0]
            if head.startswith("REL::"):
                head = head.split("::")[1]
            if world.has_node(head):
                seeds.append(head)
                if family_of(head) == "event":
                    explicit_targets.add(head)
        for tid in query.target_ids:
            head = tid.split(".", 1)[0]
            if world.has_node(head):
                seeds.append(head)
                if family_of(head) == "event":
                    explicit_targets.add(head)
        if isinstance(query, CounterfactualQuery):
            seeds.extend(query.evidence_node_ids)
    deduped = list(dict.fromkeys(seeds))
    return slice_ego_graph(world, deduped, query.anchor_fabula, hops,
                           query_target_ids=explicit_targets)


def _counterfactual_evidence(world: WorldState, node_ids: Sequence[str]):
    """Observed terminal values for evidence nodes: per-trait actuals,
    outgoing relationship axes, and terminal belief sets."""
    t_end = terminal_fabula(world)
    trait_ev: dict[str, dict[str, float]] = {}
    axis_ev: dict[tuple[str, str, str], float] = {}
    belief_ev: dict[str, list[Belief]] = {}
    for node_id in node_ids:
        if family_of(node_id) != "entity":
            raise QueryError(f"evidence node {node_id!r} is not an entity")
        snap = reconstruct_entity(world, node_id, t_end)
        trait_ev[node_id] = {name: tv.value for name, tv in snap.traits.items()}
        belief_ev[node_id] = list(snap.beliefs)
        for rel in world.social_topology:
            if rel.source_id == node_id:
                for axis, metric in rel.metrics.items():
                    axis_ev[(rel.source_id, rel.target_id, axis)] = metric.value
    return trait_ev, axis_ev, belief_ev


def execute(
    world: WorldState,
    query: AnyQuery,
    settings: PhysicsSettings | None = None,
    seed: Optional[int] = None,
) -> CausalPhysicsResult:
    """Answer a query at one of the three rungs.

    observation: slice + standing ambient propagation only.
    intervention: preflight, surgery, full propagation.
    counterfactual: preflight, abduction toward terminal evidence, surgery,
    full propagation.  Under prune preflight, flagged assignments are
    removed before surgery; if none survive, the engine short-circuits with
    an empty mutation set.
    """
    cfg = settings or PhysicsSettings()
    rng = random.Random(seed if seed is not None else 0)
    result = CausalPhysicsResult()

    if isinstance(query, ObservationQuery):
        payload = _slice_for_query(world, query, cfg)
        sandbox = create_sandbox(payload, query_type="observation")
        mutations, blocked, probs = propagate(sandbox, cfg, rng, ambient_only=True)
        result.mutations = mutations
        result.blocked = blocked
        result.noisy_or_probabilities = probs
        return result

    if not isinstance(query, (InterventionQuery, CounterfactualQuery)):
        raise QueryError(f"unsupported query type {type(query).__name__}")

    spec = query.interventions
    if cfg.preflight_mode != "off":
        evidence_ids = (query.evidence_node_ids
                        if isinstance(query, CounterfactualQuery) else [])
        flags = preflight(
            world,
            interventions=spec.variables(),
            evidence_node_ids=evidence_ids,
            target_ids=query.target_ids,
            anchor_fabula=query.anchor_fabula,
            mode=cfg.preflight_mode,
            allow_unobserved_confounders=cfg.allow_unobserved_confounders,
        )
        result.rule1_vacuous_assignments = sorted(flags.rule1_vacuous)
        result.rule3_pruned_interventions = sorted(flags.rule3_pruned_interventions)
        result.rule2_redundant_evidence = sorted(flags.rule2_redundant_evidence)
        if cfg.preflight_mode == "prune":
            dropped = set(flags.rule1_vacuous) | set(flags.rule3_pruned_interventions)
            kept = {var: value for var, value in spec.variables().items()
                    if var not in dropped}
            spec = InterventionSpec(assignments=kept)
            if query.interventions.variables() and not kept:
                # Nothing survives surgery screening: short-circuit.
                return result

    payload = _slice_for_query(world, query, cfg)
    sandbox = create_sandbox(payload, query_type=query.kind)

    if isinstance(query, CounterfactualQuery) and query.evidence_node_ids:
        evidence_ids = list(query.evidence_node_ids)
        if cfg.preflight_mode == "prune" and result.rule2_redundant_evidence:
            redundant = set(result.rule2_redundant_evidence)
            evidence_ids = [e for e in evidence_ids if e not in redundant]
        trait_ev, axis_ev, belief_ev = _counterfactual_evidence(world, evidence_ids)
        trait_ev = {k: v for k, v in trait_ev.items() if k in sandbox.traits}
        axis_ev = {k: v for k, v in axis_ev.items() if k[0] in sandbox.traits}
        belief_ev = {k: v for k, v in belief_ev.items() if k in sandbox.beliefs}
        result.hidden_deltas = abduce(sandbox, trait_ev, axis_ev, belief_ev, cfg)

    do_report = apply_do(sandbox, spec)
    result.intervened_nodes = do_report.intervened_nodes
    result.pruned_beliefs_count = do_report.pruned_beliefs_count
    result.pruned_utterance_event_ids = do_report.pruned_utterance_event_ids
    result.disabled_channel_ids = do_report.disabled_channel_ids

    mutations, blocked, probs = propagate(sandbox, cfg, rng)
    result.mutations = mutations
    result.blocked = blocked
    result.noisy_or_probabilities = probs
    result.hidden_deltas.sort(key=lambda d: (d.node_id, d.trait, d.counterpart_id or ""))
    return result


# -- materialization -------------------------------------------------------------------


def materialize_result_world(world: WorldState, query: AnyQuery,
                             result: CausalPhysicsResult) -> WorldState:
    """Fold a result back into a full world value.

    Invalidated events (and the causal edges touching them) are removed with
    syuzhet order re-compacted; severed channels terminate at the anchor;
    trait mutations and abduction shifts land as timeline deltas; axis
    mutations rewrite the social topology; pruned beliefs disappear from
    baselines and timelines.
    """
    anchor = getattr(query, "anchor_fabula", 0)
    dead_events: set[str] = set(result.pruned_utterance_event_ids)
    if isinstance(query, (InterventionQuery, CounterfactualQuery)):
        for var, value in query.interventions.variables().items():
            if family_of(var) == "event" and (value is None or value is False):
                dead_events.add(var)
    # An event-targeted block for these reasons is only ever emitted when the
    # event itself deactivated, so the cascade's casualties fall out too.
    for b in result.blocked:
        if (family_of(b.target_id) == "event"
                and b.reason in ("affordance", "blocked_by_intervention")):
            dead_events.add(b.target_id)
    dead_channels = set(result.disabled_channel_ids)

    events = [e for e in world.events if e.id not in dead_events]
    events.sort(key=lambda e: e.syuzhet_index)
    reindexed = [e.model_copy(update={
        "syuzhet_index": idx,
        "referenced_event_ids": [r for r in e.referenced_event_ids if r not in dead_events],
    }) for idx, e in enumerate(events)]

    causal = [e for e in world.causal_topology
              if e.source_id not in dead_events and e.target_id not in dead_events]

    channels = [
        c.model_copy(update={"terminated_at_fabula": anchor}) if c.id in dead_channels else c
        for c in world.channels
    ]

    per_entity_values: dict[str, dict[int, dict[str, float]]] = {}
    axis_updates: dict[tuple[str, str, str], float] = {}
    world_trait_updates: dict[str, list[tuple[int, float]]] = {}
    for mutation in result.mutations:
        if mutation.counterpart_id:
            axis_updates[(mutation.node_id, mutation.counterpart_id, mutation.trait)] = mutation.new
        elif family_of(mutation.node_id) == "world_trait":
            world_trait_updates.setdefault(mutation.node_id, []).append(
                (mutation.at_fabula, mutation.new))
        else:
            per_entity_values.setdefault(mutation.node_id, {}).setdefault(
                mutation.at_fabula, {})[mutation.trait] = mutation.new
    for hidden in result.hidden_deltas:
        if hidden.counterpart_id:
            axis_updates[(hidden.node_id, hidden.counterpart_id, hidden.trait)] = hidden.posterior
        elif hidden.delta != 0.0:
            per_entity_values.setdefault(hidden.node_id, {}).setdefault(
                anchor, {})[hidden.trait] = hidden.posterior

    def scrub_beliefs(beliefs: list[Belief]) -> list[Belief]:
        return [b for b in beliefs
                if not (b.acquired_via_channel_id and b.acquired_via_channel_id in dead_channels)
                and not (b.acquired_via_event_id and b.acquired_via_event_id in dead_events)
                and b.target_id not in dead_events]

    entities = []
    for ent in world.entities:
        timeline = [
            d.model_copy(update={"beliefs_added": scrub_beliefs(d.beliefs_added)})
            for d in ent.state_timeline
        ]
        for at_fabula, values in sorted(per_entity_values.get(ent.id, {}).items()):
            delta = StateDelta(fabula_time=at_fabula, trait_values=dict(sorted(values.items())))
            pos = len(timeline)
            for i, existing in enumerate(timeline):
                if existing.fabula_time > at_fabula:
                    pos = i
                    break
            timeline.insert(pos, delta)
        entities.append(ent.model_copy(update={
            "beliefs": scrub_beliefs(ent.beliefs),
            "state_timeline": timeline,
        }))

    social = []
    for rel in world.social_topology:
        metrics = dict(rel.metrics)
        dirty = False
        for axis in list(metrics):
            key = (rel.source_id, rel.target_id, axis)
            if key in axis_updates:
                metrics[axis] = metrics[axis].model_copy(update={
                    "value": axis_updates[key], "last_updated_fabula": anchor})
                dirty = True
        social.append(rel.model_copy(update={"metrics": metrics}) if dirty else rel)

    world_traits = []
    for wt in world.world_traits:
        if wt.id in world_trait_updates:
            extra = [WorldTraitDelta(fabula_time=t, value=v)
                     for t, v in sorted(world_trait_updates[wt.id])]
            timeline = sorted([*wt.state_timeline, *extra], key=lambda d: d.fabula_time)
            world_traits.append(wt.model_copy(update={"state_timeline": timeline}))
        else:
            world_traits.append(wt)

    return world.model_copy(update={
        "entities": entities,
        "events": reindexed,
        "channels": channels,
        "causal_topology": causal,
        "social_topology": social,
        "world_traits": world_traits,
    })
