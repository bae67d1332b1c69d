"""Causal diagrams, multi-world shadowing, d-separation, and query preflight.

The diagram is a trait-grained directed graph distilled from a world's
causal topology: entity traits become variables (``ENT_X.trait``), events
and world traits are variables under their own ids, observed relationship
axes become synthetic ``REL::src::tgt::axis`` nodes parented by both
endpoint entities and their triggering events, and utterances are routed
speaker -> event -> channel -> addressees with standing channel/participant
edges in both directions (those two-cycles are condensed before any
separation test).

Multi-world shadowing gives each variable one copy per distinct projection
of the intervention set onto its mutilated-graph ancestry, so worlds share
every variable the surgery cannot reach.  Three preflight rules read the
structure: rule 1 flags assignments already observed, rule 2 flags evidence
d-separated from the query targets, rule 3 flags interventions with no
directed path to any target after surgery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import networkx as nx

from .errors import QueryError, UnknownNodeError
from .world_model import WorldState, family_of, reconstruct_entity

__all__ = [
    "CausalDiagram",
    "AmwnGraph",
    "PreflightReport",
    "build_causal_diagram",
    "build_amwn",
    "is_d_separated",
    "preflight",
]


def trait_var(entity_id: str, trait: str) -> str:
    return f"{entity_id}.{trait}"


def rel_var(source_id: str, target_id: str, axis: str) -> str:
    return f"REL::{source_id}::{target_id}::{axis}"


@dataclass
class CausalDiagram:
    """Directed graph over variables.  May contain routing two-cycles; those
    are condensed to component nodes for separation queries."""

    graph: nx.DiGraph
    trait_vars: dict[str, list[str]] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, str]],
                   nodes: Iterable[str] = ()) -> "CausalDiagram":
        g = nx.DiGraph()
        g.add_nodes_from(nodes)
        g.add_edges_from(edges)
        return cls(graph=g)

    def variables(self) -> set[str]:
        return set(self.graph.nodes)

    def has_variable(self, var: str) -> bool:
        return var in self.graph

    def mutilated(self, pinned: Iterable[str]) -> nx.DiGraph:
        """Copy with all inbound edges to pinned variables removed."""
        g = self.graph.copy()
        for var in pinned:
            if var not in g:
                raise UnknownNodeError(var)
            g.remove_edges_from(list(g.in_edges(var)))
        return g

    def expand_targets(self, target_ids: Sequence[str]) -> set[str]:
        """Entity targets widen to their trait variables; everything else
        must already name a diagram variable."""
        out: set[str] = set()
        for tid in target_ids:
            if tid in self.trait_vars:
                out.update(v for v in self.trait_vars[tid] if v in self.graph)
                if tid in self.graph:
                    out.add(tid)
            elif tid in self.graph:
                out.add(tid)
            else:
                raise UnknownNodeError(tid)
        return out


def build_causal_diagram(world: WorldState,
                         allow_unobserved_confounders: bool = False) -> CausalDiagram:
    """Distill a world into a trait-grained causal diagram.

    With no social or channel content the result is the causal topology
    verbatim (modality endpoints mapped onto variables, nothing added).
    Setting `allow_unobserved_confounders` injects a latent parent
    ``U_a__b`` for every pair of variables sharing an observed parent.
    """
    g = nx.DiGraph()
    trait_vars: dict[str, list[str]] = {}

    for ent in world.entities:
        names = set(ent.traits)
        for delta in ent.state_timeline:
            names.update(delta.trait_values)
            names.update(delta.trait_inertias)
        trait_vars[ent.id] = sorted(trait_var(ent.id, n) for n in names)
        g.add_nodes_from(trait_vars[ent.id])
    for wt in world.world_traits:
        g.add_node(wt.id)
    for evt in world.events:
        g.add_node(evt.id)

    def target_variable(edge_target: str, trait: Optional[str]) -> str:
        fam = family_of(edge_target)
        if fam == "entity" and trait:
            var = trait_var(edge_target, trait)
            g.add_node(var)
            if var not in trait_vars.setdefault(edge_target, []):
                trait_vars[edge_target].append(var)
                trait_vars[edge_target].sort()
            return var
        return edge_target

    for edge in world.causal_topology:
        kind = edge.causality_type
        if kind == "chain_reaction":
            g.add_edge(edge.source_id, edge.target_id)
        elif kind == "mutation":
            g.add_edge(edge.source_id, target_variable(edge.target_id, edge.trait_target))
        elif kind == "mutation_social":
            if edge.rel_counterpart_id and edge.trait_target:
                rel = rel_var(edge.target_id, edge.rel_counterpart_id, edge.trait_target)
                g.add_edge(edge.source_id, rel)
                g.add_edge(edge.target_id, rel)
                g.add_edge(edge.rel_counterpart_id, rel)
        elif kind == "affordance_gate":
            g.add_edge(edge.source_id, edge.target_id)
        elif kind == "ambient_propagation":
            g.add_edge(edge.source_id, target_variable(edge.target_id, edge.trait_target))

    # Observed relationship axes become synthetic nodes even without triggers.
    for rel in world.social_topology:
        for axis, metric in rel.metrics.items():
            if metric.observed:
                node = rel_var(rel.source_id, rel.target_id, axis)
                g.add_edge(rel.source_id, node)
                g.add_edge(rel.target_id, node)

    # Utterance routing + standing channel membership.
    for evt in world.events:
        if evt.event_type != "utterance" or not evt.via_channel_id:
            continue
        if evt.speaker_id:
            g.add_edge(evt.speaker_id, evt.id)
        g.add_edge(evt.id, evt.via_channel_id)
        for addressee in evt.addressee_ids:
            g.add_edge(evt.via_channel_id, addressee)
    for channel in world.channels:
        if not any(e.via_channel_id == channel.id for e in world.events):
            continue
        for member in channel.participant_ids:
            g.add_edge(member, channel.id)
            g.add_edge(channel.id, member)

    if allow_unobserved_confounders:
        observed = list(g.nodes)
        for parent in observed:
            kids = sorted(g.successors(parent))
            for i, a in enumerate(kids):
                for b in kids[i + 1:]:
                    latent = f"U_{a}__{b}"
                    g.add_edge(latent, a)
                    g.add_edge(latent, b)

    return CausalDiagram(graph=g, trait_vars=trait_vars)


# -- multi-world shadowing ---------------------------------------------------

Context = frozenset  # of (variable, value) pairs


@dataclass
class AmwnGraph:
    """One node per (variable, projected intervention context); worlds share
    nodes whose projections agree."""

    graph: nx.DiGraph
    worlds: list[dict[str, object]]
    node_of: dict[tuple[int, str], tuple[str, Context]]

    def resolve(self, world_index: int, variable: str) -> tuple[str, Context]:
        try:
            return self.node_of[(world_index, variable)]
        except KeyError:
            raise UnknownNodeError(f"world {world_index}: {variable}") from None

    def node_count(self) -> int:
        return self.graph.number_of_nodes()


def build_amwn(diagram: CausalDiagram,
               worlds: Sequence[Mapping[str, object]]) -> AmwnGraph:
    """Shadow the diagram across intervention worlds.

    The factual (empty-intervention) world is always world 0; it is
    prepended when the caller omits it.  A variable's copy in world w is
    keyed by the intervention assignments that fall inside its ancestry
    (itself included) in the w-mutilated graph, values compared exactly.
    Evidence never enters contexts.
    """
    world_list: list[dict[str, object]] = [dict(w) for w in worlds]
    if not world_list or world_list[0]:
        world_list.insert(0, {})
    for assignments in world_list:
        for var in assignments:
            if not diagram.has_variable(var):
                raise UnknownNodeError(var)

    g = nx.DiGraph()
    node_of: dict[tuple[int, str], tuple[str, Context]] = {}
    for idx, assignments in enumerate(world_list):
        mutilated = diagram.mutilated(assignments.keys())
        contexts: dict[str, Context] = {}
        for var in mutilated.nodes:
            ancestry = nx.ancestors(mutilated, var) | {var}
            contexts[var] = frozenset(
                (pinned, value) for pinned, value in assignments.items() if pinned in ancestry
            )
        for var in mutilated.nodes:
            key = (var, contexts[var])
            g.add_node(key)
            node_of[(idx, var)] = key
        for src, dst in mutilated.edges:
            g.add_edge((src, contexts[src]), (dst, contexts[dst]))

    return AmwnGraph(graph=g, worlds=world_list, node_of=node_of)


# -- d-separation ------------------------------------------------------------


def _as_dag(graph) -> tuple[nx.DiGraph, dict]:
    """Condense any cycles (routing two-cycles and authored loops) so the
    separation test runs on a DAG.  Returns (dag, node -> component key)."""
    if isinstance(graph, CausalDiagram):
        g = graph.graph
    elif isinstance(graph, AmwnGraph):
        g = graph.graph
    elif isinstance(graph, nx.DiGraph):
        g = graph
    else:
        raise TypeError(f"not a separable graph: {type(graph).__name__}")
    if nx.is_directed_acyclic_graph(g):
        return g, {n: n for n in g.nodes}
    condensed = nx.condensation(g)
    mapping = {node: comp for node, comp in condensed.graph["mapping"].items()}
    return condensed, mapping


def is_d_separated(graph, y: Iterable, x: Iterable, z: Iterable = ()) -> bool:
    """True when every path between X and Y is blocked given Z.

    Uses the ancestral-pruning reduction: restrict to the ancestral closure
    of X | Y | Z, delete the outgoing edges of Z, and test undirected
    reachability.  X, Y, Z must be disjoint; unknown nodes raise.
    """
    dag, mapping = _as_dag(graph)
    xs, ys, zs = set(x), set(y), set(z)
    if xs & ys or xs & zs or ys & zs:
        raise QueryError("d-separation sets must be disjoint")
    for node in xs | ys | zs:
        if node not in mapping:
            raise UnknownNodeError(str(node))
    cx = {mapping[n] for n in xs}
    cy = {mapping[n] for n in ys}
    cz = {mapping[n] for n in zs}
    # Conditioning and query sets can land in one component once condensed.
    if cx & cy:
        return False

    keep = cx | cy | cz
    closure = set(keep)
    for node in keep:
        closure |= nx.ancestors(dag, node)
    sub = dag.subgraph(closure).copy()
    for node in cz:
        sub.remove_edges_from(list(sub.out_edges(node)))

    undirected = sub.to_undirected(as_view=False)
    seen = set(cx)
    stack = list(cx)
    while stack:
        node = stack.pop()
        if node in cy:
            return False
        for neighbor in undirected.neighbors(node):
            if neighbor not in seen:
                seen.add(neighbor)
                stack.append(neighbor)
    return True


# -- preflight ----------------------------------------------------------------


@dataclass
class PreflightReport:
    mode: str
    rule1_vacuous: list[str] = field(default_factory=list)
    rule2_redundant_evidence: list[str] = field(default_factory=list)
    rule3_pruned_interventions: list[str] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not (self.rule1_vacuous or self.rule2_redundant_evidence
                    or self.rule3_pruned_interventions)


def _observed_value(world: WorldState, var: str, anchor: int) -> object:
    """Factual value of a variable at the anchor, or a sentinel for
    variables with no settled observation."""
    if "." in var and family_of(var.split(".", 1)[0]) == "entity":
        entity_id, trait = var.split(".", 1)
        snap = reconstruct_entity(world, entity_id, anchor)
        if trait in snap.traits:
            return snap.traits[trait].value
        return _NO_OBSERVATION
    fam = family_of(var)
    if fam == "event":
        # Authored events occurred; "occurred" is the observed state.
        return True if world.has_node(var) else _NO_OBSERVATION
    if fam == "channel":
        channel = world.node(var)
        dead = channel.terminated_at_fabula is not None and channel.terminated_at_fabula <= anchor
        return None if dead else _NO_OBSERVATION  # None mirrors a severance assignment
    return _NO_OBSERVATION


_NO_OBSERVATION = object()


def preflight(
    world: WorldState,
    *,
    interventions: Mapping[str, object],
    evidence_node_ids: Sequence[str] = (),
    target_ids: Sequence[str] = (),
    anchor_fabula: Optional[int] = None,
    mode: str = "advisory",
    allow_unobserved_confounders: bool = False,
) -> PreflightReport:
    """Run the three screening rules against a proposed query.

    Rule 1 (consistency): an assignment equal to the observed factual value
    is vacuous.  Rule 2 (independence): an evidence node d-separated from
    every target given the remaining evidence adds nothing.  Rule 3
    (exclusion): an intervention with no directed path to any target in the
    mutilated graph cannot move the answer.  Advisory mode only reports;
    prune mode is enforced by the executor.
    """
    if mode not in ("advisory", "prune"):
        raise QueryError(f"unknown preflight mode {mode!r}")
    diagram = build_causal_diagram(world, allow_unobserved_confounders)
    anchor = anchor_fabula if anchor_fabula is not None else 0
    report = PreflightReport(mode=mode)

    for var in interventions:
        if not diagram.has_variable(var):
            raise UnknownNodeError(var)

    # Rule 1: assignment already holds in the observed world.
    for var, value in interventions.items():
        observed = _observed_value(world, var, anchor)
        if observed is not _NO_OBSERVATION and observed == value:
            report.rule1_vacuous.append(var)

    targets = diagram.expand_targets(list(target_ids)) if target_ids else set()

    # Rule 3: no directed path from the pinned variable to any target.
    if targets:
        mutilated = diagram.mutilated(interventions.keys())
        for var in interventions:
            reach = nx.descendants(mutilated, var) | {var}
            if not (reach & targets):
                report.rule3_pruned_interventions.append(var)

    # Rule 2: evidence screened off from all targets by the rest of it.
    if evidence_node_ids and targets:
        amwn = build_amwn(diagram, [dict(interventions)])
        query_world = len(amwn.worlds) - 1  # 0 when no interventions, else 1
        evidence_vars: dict[str, list[str]] = {}
        for node_id in evidence_node_ids:
            evidence_vars[node_id] = [
                v for v in diagram.expand_targets([node_id]) if v in diagram.graph
            ]
        target_nodes = {amwn.resolve(query_world, v) for v in targets}
        for node_id in evidence_node_ids:
            own = evidence_vars[node_id]
            if not own:
                continue
            rest: set = set()
            for other_id in evidence_node_ids:
                if other_id != node_id:
                    rest.update(amwn.resolve(0, v) for v in evidence_vars[other_id])
            own_nodes = {amwn.resolve(0, v) for v in own}
            own_nodes -= rest
            effective_targets = target_nodes - own_nodes - rest
            if not effective_targets:
                continue
            if is_d_separated(amwn, effective_targets, own_nodes, rest):
                report.rule2_redundant_evidence.append(node_id)

    return report
