"""Audience-state scoring over a telling: how a reveal order plays.

Every scorer takes the world, the focal cast, and an anchor — a syuzhet
position splitting events into revealed (index <= anchor) and withheld.
Scores land in [0, 1].

mystery      hidden causal mass behind what the audience has already seen
dramatic_irony  what the audience knows that on-stage characters don't
suspense     unresolved threat/hope imbalance weighted by stakes and nearness
surprise     divergence between the audience's implied trait posterior and
             the eventual truth, plus reorder shock (anachrony)
emotion      closeness of an entity's trait profile to a named affect shape
"""

from __future__ import annotations

import math
import os
import statistics
from dataclasses import dataclass, field, fields
from typing import Iterable, Literal, Mapping, Optional, Sequence

from pydantic import BaseModel, Field

from .errors import QueryError, UnknownNodeError
from .world_model import (
    EventNode,
    WorldState,
    edge_weight,
    family_of,
    reconstruct_entity,
    terminal_actual,
    terminal_fabula,
)

__all__ = [
    "ScorerSettings",
    "ScoreReport",
    "HARM_SALIENCE",
    "HARM_SATURATION",
    "TRAIT_SALIENCE",
    "EFFECT_TRAITS",
    "event_harm_kind",
    "score_mystery",
    "score_dramatic_irony",
    "score_suspense",
    "score_surprise",
    "score_emotion",
    "score_all",
    "beta_surprise_cell",
    "binary_kl",
    "threat_hope_masses",
    "trait_kl_magnitudes",
    "sample_trajectory",
    "evenly_spaced_anchors",
    "SCORE_NAMES",
]

ENV_PREFIX = "DIRECTIVE_ASSEMBLY_"

HARM_SALIENCE: dict[str, float] = {
    "existential": 1.00,
    "physical": 0.85,
    "betrayal": 0.75,
    "psychological": 0.70,
    "emotional": 0.65,
    "social": 0.55,
    "epistemic": 0.45,
}

HARM_SATURATION: dict[str, float] = {
    "existential": 4.0,
    "physical": 3.0,
    "betrayal": 2.5,
    "psychological": 2.0,
    "emotional": 2.0,
    "social": 1.5,
    "epistemic": 1.5,
}

# Traits whose reversals land hardest sit in a high-salience band; everything
# else shares one default.
TRAIT_SALIENCE: dict[str, float] = {
    "ambition": 1.00,
    "vengeance": 0.95,
    "guilt": 0.90,
    "despair": 0.90,
    "love": 0.90,
    "loyalty": 0.85,
    "courage": 0.85,
}

EFFECT_TRAITS: dict[str, tuple[frozenset[str], frozenset[str]]] = {
    "grief": (
        frozenset({"despair", "shame", "longing", "grief", "anguish", "mourning"}),
        frozenset({"hope", "joy", "contentment", "satisfaction"}),
    ),
    "rage": (
        frozenset({"rage", "anger", "fury", "vengeance", "hatred"}),
        frozenset({"calm", "serenity", "patience", "forgiveness"}),
    ),
    "joy": (
        frozenset({"joy", "hope", "contentment", "delight", "satisfaction"}),
        frozenset({"despair", "sorrow", "grief", "misery"}),
    ),
    "regret": (
        frozenset({"regret", "remorse", "guilt", "shame"}),
        frozenset({"pride", "satisfaction", "contentment"}),
    ),
    "love": (
        frozenset({"love", "affection", "devotion", "longing", "tenderness"}),
        frozenset({"hatred", "contempt", "indifference"}),
    ),
    "fear": (
        frozenset({"fear", "dread", "terror", "paranoia", "anxiety"}),
        frozenset({"courage", "calm", "confidence"}),
    ),
}

SCORE_NAMES = (
    "mystery", "dramatic_irony", "suspense", "surprise",
    "emotion_grief", "emotion_rage", "emotion_joy",
    "emotion_regret", "emotion_love", "emotion_fear",
)


@dataclass
class ScorerSettings:
    """Tunables for the scorer family.  Every scalar field can be overridden
    through the environment as ``DIRECTIVE_ASSEMBLY_<FIELD_NAME_UPPER>``."""

    mystery_path_decay_depth: int = 4
    mystery_proximity_tau_syuzhet: float = 8.0
    irony_surface_k: float = 1.0
    irony_false_belief_mult: float = 1.5
    irony_action_alpha: float = 0.15
    irony_action_weight_cap: float = 3.0
    irony_aggregator_beta: float = 0.6
    irony_proximity_tau_syuzhet: float = 6.0
    irony_proximity_floor: float = 0.4
    suspense_stakes_k: float = 2.0
    suspense_proximity_tau_fabula_gaps: float = 6.0
    suspense_proximity_tau_spatial: float = 4.0
    suspense_persistence_alpha: float = 0.10
    suspense_persistence_cap: float = 1.5
    suspense_hostile_affinity: float = -0.2
    suspense_ally_affinity: float = 0.2
    surprise_trait_kl_weight: float = 0.7
    surprise_anachrony_weight: float = 0.3
    surprise_default_trait_salience: float = 0.55
    surprise_source_edge_weight: float = 0.4
    surprise_prior_pseudocount: float = 2.0
    harm_salience: dict[str, float] = field(default_factory=lambda: dict(HARM_SALIENCE))
    harm_saturation: dict[str, float] = field(default_factory=lambda: dict(HARM_SATURATION))
    trait_salience: dict[str, float] = field(default_factory=lambda: dict(TRAIT_SALIENCE))
    effect_traits: dict[str, tuple[frozenset[str], frozenset[str]]] = field(
        default_factory=lambda: dict(EFFECT_TRAITS))

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> "ScorerSettings":
        env = os.environ if environ is None else environ
        kwargs = {}
        for spec in fields(cls):
            if spec.type not in ("int", "float", int, float):
                continue
            raw = env.get(ENV_PREFIX + spec.name.upper())
            if raw is None:
                continue
            caster = int if spec.type in ("int", int) else float
            try:
                kwargs[spec.name] = caster(raw)
            except ValueError as exc:
                raise QueryError(
                    f"bad value for {ENV_PREFIX}{spec.name.upper()}: {raw!r}") from exc
        return cls(**kwargs)

    def salience_of(self, kind: str) -> float:
        return self.harm_salience.get(kind, self.harm_salience["epistemic"])

    def saturation_of(self, kind: str) -> float:
        return self.harm_saturation.get(kind, self.suspense_stakes_k)


class ScoreReport(BaseModel):
    anchor_syuzhet: Optional[int] = None
    focal_ids: list[str] = Field(default_factory=list)
    scores: dict[str, float] = Field(default_factory=dict)


# -- shared lenses -------------------------------------------------------------------


def _revealed(world: WorldState, t_s: Optional[int]) -> list[EventNode]:
    if t_s is None:
        return []
    return [e for e in world.events if e.syuzhet_index <= t_s]


def _fabula_frontier(revealed: Sequence[EventNode]) -> Optional[int]:
    return max((e.fabula_time for e in revealed), default=None)


def event_harm_kind(world: WorldState, event_id: str,
                    settings: ScorerSettings | None = None) -> str:
    """Harm register of an event: the highest-salience kind named by the
    mechanisms on its incident causal edges; bare events read as physical."""
    cfg = settings or ScorerSettings()
    kinds = []
    for edge in world.causal_topology:
        if event_id in (edge.source_id, edge.target_id) and edge.mechanism:
            if edge.mechanism in cfg.harm_salience:
                kinds.append(edge.mechanism)
    if not kinds:
        return "physical"
    return max(kinds, key=lambda k: cfg.harm_salience[k])


def _reverse_adjacency(world: WorldState) -> dict[str, list]:
    rev: dict[str, list] = {}
    for edge in world.causal_topology:
        rev.setdefault(edge.target_id, []).append(edge)
    return rev


def _event_ancestors(world: WorldState, start_id: str,
                     max_depth: Optional[int] = None) -> set[str]:
    rev = _reverse_adjacency(world)
    seen = {start_id}
    frontier = [start_id]
    out: set[str] = set()
    depth = 0
    while frontier and (max_depth is None or depth < max_depth):
        depth += 1
        nxt = []
        for node in frontier:
            for edge in rev.get(node, []):
                src = edge.source_id
                if src in seen:
                    continue
                seen.add(src)
                nxt.append(src)
                if family_of(src) == "event":
                    out.add(src)
        frontier = nxt
    return out


def _spatial_hops(world: WorldState, a: str, b: str) -> Optional[int]:
    # Physical nearness ignores locks: a bolted door is still next door.
    if a == b:
        return 0
    adj: dict[str, set[str]] = {}
    for edge in world.spatial_topology:
        adj.setdefault(edge.source_id, set()).add(edge.target_id)
        adj.setdefault(edge.target_id, set()).add(edge.source_id)
    frontier = {a}
    seen = {a}
    hops = 0
    while frontier:
        hops += 1
        nxt = set()
        for node in frontier:
            for other in adj.get(node, ()):  # noqa: B007
                if other == b:
                    return hops
                if other not in seen:
                    seen.add(other)
                    nxt.add(other)
        frontier = nxt
    return None


# -- mystery -------------------------------------------------------------------


def score_mystery(world: WorldState, focal_ids: Sequence[str], t_s: Optional[int],
                  settings: ScorerSettings | None = None) -> float:
    """Fraction of causal mass behind the revealed surface that is still
    withheld.

    Effects are the revealed events touching the focal cast, plus the focal
    entities themselves.  Each effect pulls in its event ancestors within the
    decay depth, weighted by harm salience times the best path product of
    edge weights, times how recently the effect surfaced.  The score is
    hidden ancestor mass over total ancestor mass.
    """
    cfg = settings or ScorerSettings()
    if t_s is None:
        return 0.0
    focals = set(focal_ids)
    revealed = _revealed(world, t_s)
    syuzhet_of = {e.id: e.syuzhet_index for e in world.events}

    effects: list[tuple[str, float]] = []
    for event in revealed:
        if focals & set(event.participant_ids):
            rho = math.exp(-(t_s - event.syuzhet_index) / cfg.mystery_proximity_tau_syuzhet)
            effects.append((event.id, rho))
    for focal in focal_ids:
        if world.has_node(focal):
            effects.append((focal, 1.0))

    rev = _reverse_adjacency(world)
    hidden_mass = 0.0
    total_mass = 0.0
    for effect_id, rho in effects:
        best = _best_path_products(rev, effect_id, cfg.mystery_path_decay_depth)
        for ancestor, product in best.items():
            if family_of(ancestor) != "event" or ancestor == effect_id:
                continue
            kind = event_harm_kind(world, ancestor, cfg)
            mass = cfg.salience_of(kind) * product * rho
            total_mass += mass
            if syuzhet_of.get(ancestor, 10**9) > t_s:
                hidden_mass += mass
    if total_mass <= 0.0:
        return 0.0
    return hidden_mass / total_mass


def _best_path_products(rev: Mapping[str, list], start: str,
                        max_depth: int) -> dict[str, float]:
    best: dict[str, float] = {start: 1.0}
    frontier = {start: 1.0}
    for _ in range(max_depth):
        nxt: dict[str, float] = {}
        for node, product in frontier.items():
            for edge in rev.get(node, []):
                candidate = product * edge_weight(edge)
                if candidate > best.get(edge.source_id, 0.0):
                    best[edge.source_id] = candidate
                    nxt[edge.source_id] = candidate
        if not nxt:
            break
        frontier = nxt
    best.pop(start, None)
    return best


# -- dramatic irony -------------------------------------------------------------------


def _knowledge_set(world: WorldState, character_id: str, t_s: int,
                   revealed: Sequence[EventNode], frontier: Optional[int]) -> set[str]:
    known: set[str] = set()
    horizon = frontier if frontier is not None else -1
    for event in revealed:
        if character_id in event.participant_ids and event.fabula_time <= horizon:
            known.add(event.id)
        if (event.event_type == "utterance"
                and (event.speaker_id == character_id
                     or character_id in event.addressee_ids)):
            known.update(event.referenced_event_ids)
    snap = reconstruct_entity(world, character_id, horizon if horizon >= 0 else 0)
    threshold = world.intelligibility_threshold
    for belief in snap.beliefs:
        if family_of(belief.target_id) != "event":
            continue
        cid = belief.acquired_via_channel_id
        if cid:
            channel = next((c for c in world.channels if c.id == cid), None)
            if channel is not None:
                level = channel.intelligibility.get(
                    character_id,
                    1.0 if character_id in channel.participant_ids else 0.0)
                if level < threshold:
                    continue
                if (channel.terminated_at_fabula is not None
                        and channel.terminated_at_fabula <= belief.established_at_fabula):
                    continue
        known.add(belief.target_id)
    return known


def score_dramatic_irony(world: WorldState, focal_ids: Sequence[str],
                         t_s: Optional[int],
                         settings: ScorerSettings | None = None) -> float:
    """Audience-over-character knowledge gap, weighted by how consequential
    the unknown events are and how soon the character is due on stage."""
    cfg = settings or ScorerSettings()
    if t_s is None:
        return 0.0
    revealed = _revealed(world, t_s)
    if not revealed:
        return 0.0
    frontier = _fabula_frontier(revealed)
    later = sorted((e for e in world.events if e.syuzhet_index > t_s),
                   key=lambda e: e.syuzhet_index)

    surface_mass = sum(
        e.weight * cfg.salience_of(event_harm_kind(world, e.id, cfg))
        for e in revealed)
    denom = surface_mass + cfg.irony_surface_k
    if denom <= 0.0:
        return 0.0

    per_character: list[float] = []
    for character in focal_ids:
        if not world.has_node(character):
            raise UnknownNodeError(character)
        known = _knowledge_set(world, character, t_s, revealed, frontier)
        snap = reconstruct_entity(world, character,
                                  frontier if frontier is not None else 0)
        believed_entities = {b.target_id for b in snap.beliefs
                             if family_of(b.target_id) == "entity"}
        gap = [e for e in revealed if e.id not in known
               and character not in e.participant_ids]
        gap_mass = 0.0
        for event in gap:
            phi = (cfg.irony_false_belief_mult
                   if believed_entities & set(event.actor_ids) else 1.0)
            witness_delta = None
            for upcoming in later:
                involved = (character in upcoming.actor_ids
                            or character in upcoming.target_ids
                            or character in upcoming.addressee_ids)
                if involved and upcoming.fabula_time >= event.fabula_time:
                    witness_delta = upcoming.syuzhet_index - t_s
                    break
            if witness_delta is None:
                rho = cfg.irony_proximity_floor
            else:
                rho = max(cfg.irony_proximity_floor,
                          math.exp(-witness_delta / cfg.irony_proximity_tau_syuzhet))
            kind = event_harm_kind(world, event.id, cfg)
            gap_mass += event.weight * cfg.salience_of(kind) * phi * rho
        acted = sum(1 for e in revealed if character in e.actor_ids)
        amplifier = min(cfg.irony_action_weight_cap,
                        1.0 + cfg.irony_action_alpha * acted)
        per_character.append(amplifier * gap_mass / denom)

    if not per_character:
        return 0.0
    beta = cfg.irony_aggregator_beta
    combined = beta * max(per_character) + (1 - beta) * (
        sum(per_character) / len(per_character))
    return min(1.0, combined)


# -- suspense -------------------------------------------------------------------


def _event_probability(world: WorldState, event_id: str) -> float:
    weights = [edge_weight(e) for e in world.causal_topology
               if e.target_id == event_id]
    return max(weights) if weights else 0.5


def _bucket_for(world: WorldState, event: EventNode, focal: str,
                cfg: ScorerSettings) -> Optional[str]:
    if focal not in event.actor_ids and focal not in event.target_ids:
        return None
    others = [a for a in event.actor_ids if a != focal]
    affinities = []
    for other in others:
        for rel in world.social_topology:
            if rel.source_id == other and rel.target_id == focal:
                metric = rel.metrics.get("affinity")
                if metric is not None:
                    affinities.append(metric.value)
    if affinities:
        worst = min(affinities)
        if worst <= cfg.suspense_hostile_affinity:
            return "threat"
        if worst >= cfg.suspense_ally_affinity:
            return "hope"
    if focal in event.actor_ids:
        return "hope"
    return "threat"


def _median_fabula_gap(world: WorldState) -> float:
    times = sorted({e.fabula_time for e in world.events})
    if len(times) < 2:
        return 1.0
    gaps = [b - a for a, b in zip(times, times[1:])]
    return float(statistics.median(gaps)) or 1.0


def beta_surprise_cell(prior_threat: float, prior_hope: float,
                       outcomes: Sequence[tuple[float, bool, float]]) -> float:
    """Normalized expected posterior-mean variance for one focal/kind cell.

    ``outcomes`` holds (mass, lands_threat, proximity_weight) per withheld
    event.  The audience's threat belief is Beta(1 + prior_threat,
    1 + prior_hope); each outcome shifts the mean; the spread of those
    shifts, proximity-weighted, is normalized by the worst case where the
    whole withheld mass lands on a single side.
    """
    a0, b0 = 1.0 + prior_threat, 1.0 + prior_hope
    mu0 = a0 / (a0 + b0)
    rho_total = sum(rho for _, _, rho in outcomes)
    if rho_total <= 0.0:
        return 0.0
    spread = 0.0
    for mass, lands_threat, rho in outcomes:
        if lands_threat:
            mu = (a0 + mass) / (a0 + b0 + mass)
        else:
            mu = a0 / (a0 + b0 + mass)
        spread += (rho / rho_total) * (mu - mu0) ** 2
    total_mass = sum(mass for mass, _, _ in outcomes)
    mu_all_threat = (a0 + total_mass) / (a0 + b0 + total_mass)
    mu_all_hope = a0 / (a0 + b0 + total_mass)
    worst = max((mu_all_threat - mu0) ** 2, (mu_all_hope - mu0) ** 2)
    if worst <= 0.0:
        return 0.0
    return min(1.0, spread / worst)


def _suspense_cells(world: WorldState, focal_ids: Sequence[str], t_s: int,
                    cfg: ScorerSettings) -> dict[tuple[str, str], dict]:
    revealed = _revealed(world, t_s)
    f_now = _fabula_frontier(revealed) or 0
    tau_t = _median_fabula_gap(world) * cfg.suspense_proximity_tau_fabula_gaps
    revealed_ids = {e.id for e in revealed}

    def proximity(event: EventNode, focal: str) -> float:
        dt = max(0, event.fabula_time - f_now)
        time_term = math.exp(-dt / tau_t) if tau_t > 0 else 1.0
        snap = reconstruct_entity(world, focal, f_now)
        here = snap.location_id
        there = event.location_id
        if not here or not there:
            return time_term
        hops = _spatial_hops(world, here, there)
        if hops is None:
            return 0.0
        return time_term * math.exp(-hops / cfg.suspense_proximity_tau_spatial)

    def persistence(event: EventNode) -> float:
        ancestors = _event_ancestors(world, event.id)
        seen = len(ancestors & revealed_ids)
        return min(cfg.suspense_persistence_cap,
                   1.0 + cfg.suspense_persistence_alpha * seen)

    cells: dict[tuple[str, str], dict] = {}
    for focal in focal_ids:
        if not world.has_node(focal):
            raise UnknownNodeError(focal)
        for event in world.events:
            bucket = _bucket_for(world, event, focal, cfg)
            if bucket is None:
                continue
            kind = event_harm_kind(world, event.id, cfg)
            cell = cells.setdefault((focal, kind), {
                "prior_threat": 0.0, "prior_hope": 0.0,
                "outcomes": [], "full_mass": 0.0, "buckets": set()})
            p_e = _event_probability(world, event.id)
            pi = persistence(event)
            base = cfg.salience_of(kind) * p_e * pi
            if event.syuzhet_index <= t_s:
                cell["prior_threat" if bucket == "threat" else "prior_hope"] += base
            else:
                rho = proximity(event, focal)
                cell["outcomes"].append((base, bucket == "threat", rho))
                cell["full_mass"] += base * rho
                cell["buckets"].add(bucket)
    return cells


def threat_hope_masses(world: WorldState, focal_ids: Sequence[str], t_s: int,
                       settings: ScorerSettings | None = None
                       ) -> dict[str, dict[str, dict[str, float]]]:
    """Per focal, per harm kind: withheld threat vs hope mass (proximity
    weighted) — the raw table behind the suspense score."""
    cfg = settings or ScorerSettings()
    table: dict[str, dict[str, dict[str, float]]] = {}
    for (focal, kind), cell in sorted(_suspense_cells(world, focal_ids, t_s, cfg).items()):
        tallies = {"threat": 0.0, "hope": 0.0}
        for (base, lands_threat, rho) in cell["outcomes"]:
            tallies["threat" if lands_threat else "hope"] += base * rho
        if tallies["threat"] or tallies["hope"]:
            table.setdefault(focal, {})[kind] = tallies
    return table


def score_suspense(world: WorldState, focal_ids: Sequence[str], t_s: Optional[int],
                   settings: ScorerSettings | None = None,
                   mode: Literal["efk", "classic"] = "efk") -> float:
    """Mass of unresolved, proximate, two-sided outcomes still ahead.

    The expected-fate-knowledge mode tracks a Beta posterior over
    threat-vs-hope per focal and harm kind; a cell only counts when the
    withheld events could still swing it both ways.  The classic mode is the
    threat/hope balance of pooled withheld mass.  Either way: nothing left
    unrevealed means nothing to dread.
    """
    cfg = settings or ScorerSettings()
    if t_s is None:
        return 0.0
    unrevealed = [e for e in world.events if e.syuzhet_index > t_s]
    if not unrevealed:
        return 0.0

    cells = _suspense_cells(world, focal_ids, t_s, cfg)

    if mode == "efk":
        numer = 0.0
        denom = 0.0
        for (focal, kind), cell in sorted(cells.items()):
            if cell["buckets"] != {"threat", "hope"}:
                continue
            value = beta_surprise_cell(cell["prior_threat"], cell["prior_hope"],
                                       cell["outcomes"])
            if value <= 0.0 and not cell["outcomes"]:
                continue
            salience = cfg.salience_of(kind)
            saturation = cfg.saturation_of(kind)
            t_mass = cell["full_mass"]
            stakes = t_mass / (t_mass + saturation) if t_mass > 0 else 0.0
            if stakes <= 0.0:
                continue
            numer += salience * stakes * value
            denom += salience * stakes
        if denom > 0.0:
            return numer / denom
        # No two-sided cell: fall through to the classic balance.

    by_kind: dict[str, dict[str, float]] = {}
    for (focal, kind), cell in cells.items():
        tallies = by_kind.setdefault(kind, {"threat": 0.0, "hope": 0.0})
        for (base, lands_threat, rho) in cell["outcomes"]:
            tallies["threat" if lands_threat else "hope"] += base * rho
    best = 0.0
    for kind, tallies in by_kind.items():
        total = tallies["threat"] + tallies["hope"]
        if total <= 0.0:
            continue
        balance = 1.0 - abs(tallies["threat"] - tallies["hope"]) / total
        saturation = cfg.saturation_of(kind)
        stakes = total / (total + saturation)
        best = max(best, cfg.salience_of(kind) * balance * stakes)
    return best


# -- surprise -------------------------------------------------------------------


def binary_kl(p: float, q: float) -> float:
    p = min(0.99, max(0.01, p))
    q = min(0.99, max(0.01, q))
    return p * math.log(p / q) + (1 - p) * math.log((1 - p) / (1 - q))


def _trait_posterior(world: WorldState, focal: str, trait: str, t_s: int,
                     cfg: ScorerSettings) -> float:
    """Audience's implied estimate of where the trait ends up, given the
    causal activity revealed so far."""
    p_true = terminal_actual(world, focal, trait)
    others = []
    for entity in world.entities:
        if entity.id == focal:
            continue
        try:
            others.append(terminal_actual(world, entity.id, trait))
        except UnknownNodeError:
            continue
    seed_mean = (sum(others) / len(others)) if len(others) >= 2 else 0.5
    s = cfg.surprise_prior_pseudocount
    alpha, beta = s * seed_mean, s * (1.0 - seed_mean)

    revealed = _revealed(world, t_s)
    frontier = _fabula_frontier(revealed)
    events_by_id = {e.id: e for e in world.events}
    for edge in world.causal_topology:
        source_event = events_by_id.get(edge.source_id)
        if source_event is not None:
            if source_event.syuzhet_index > t_s:
                continue
        elif frontier is None or edge.fabula_time > frontier:
            continue
        w = 0.0
        if edge.target_id == focal:
            w = edge_weight(edge)
        elif (edge.rel_counterpart_id == focal
              or edge.source_id == focal
              or (source_event is not None and focal in source_event.actor_ids)):
            w = edge_weight(edge) * cfg.surprise_source_edge_weight
        if w <= 0.0:
            continue
        alpha += w * p_true
        beta += w * (1.0 - p_true)
    return min(0.99, max(0.01, alpha / (alpha + beta)))


def _anachrony(events: list[EventNode]) -> float:
    if len(events) <= 1:
        return 0.0
    by_fabula = sorted(events, key=lambda e: (e.fabula_time, e.syuzhet_index))
    by_syuzhet = sorted(events, key=lambda e: e.syuzhet_index)
    fab_rank = {e.id: i for i, e in enumerate(by_fabula)}
    n = len(events)
    total = sum(abs(fab_rank[e.id] - i) for i, e in enumerate(by_syuzhet))
    return total / (n * (n - 1))


def score_surprise(world: WorldState, focal_ids: Sequence[str], t_s: Optional[int],
                   settings: ScorerSettings | None = None,
                   mode: Literal["cumulative", "local"] = "cumulative",
                   prev_t_s: Optional[int] = None) -> float:
    """How far the audience's implied trait beliefs sit from the truth.

    Cumulative mode measures divergence between the posterior at the anchor
    and the terminal actuals — it can only shrink as evidence accumulates.
    Local mode measures the jolt between consecutive anchors.  Both blend in
    anachrony: normalized rank disagreement between telling order and story
    order over the focal cast's revealed events.
    """
    cfg = settings or ScorerSettings()
    if t_s is None:
        return 0.0
    per_focal: list[float] = []
    for focal in focal_ids:
        if not world.has_node(focal):
            raise UnknownNodeError(focal)
        snap = reconstruct_entity(world, focal, terminal_fabula(world))
        traits = sorted(snap.traits)
        if traits:
            weighted = 0.0
            weight_sum = 0.0
            for trait in traits:
                salience = cfg.trait_salience.get(
                    trait, cfg.surprise_default_trait_salience)
                if mode == "cumulative":
                    p_true = terminal_actual(world, focal, trait)
                    q = _trait_posterior(world, focal, trait, t_s, cfg)
                    kl = binary_kl(p_true, q)
                else:
                    prev = prev_t_s if prev_t_s is not None else t_s - 1
                    q_now = _trait_posterior(world, focal, trait, t_s, cfg)
                    q_prev = _trait_posterior(world, focal, trait, prev, cfg)
                    kl = binary_kl(q_now, q_prev)
                weighted += salience * (1.0 - math.exp(-kl))
                weight_sum += salience
            trait_term = weighted / weight_sum if weight_sum else 0.0
        else:
            trait_term = 0.0

        if mode == "cumulative":
            relevant = [e for e in _revealed(world, t_s)
                        if focal in e.participant_ids]
        else:
            prev = prev_t_s if prev_t_s is not None else t_s - 1
            relevant = [e for e in world.events
                        if prev < e.syuzhet_index <= t_s
                        and focal in e.participant_ids]
        anachrony = _anachrony(relevant)
        per_focal.append(cfg.surprise_trait_kl_weight * trait_term
                         + cfg.surprise_anachrony_weight * anachrony)
    if not per_focal:
        return 0.0
    return sum(per_focal) / len(per_focal)


def trait_kl_magnitudes(world: WorldState, focal_ids: Sequence[str], t_s: int,
                        settings: ScorerSettings | None = None
                        ) -> dict[str, dict[str, float]]:
    """Per focal, per trait: divergence between the anchored audience
    posterior and the terminal actual."""
    cfg = settings or ScorerSettings()
    out: dict[str, dict[str, float]] = {}
    for focal in focal_ids:
        if not world.has_node(focal):
            raise UnknownNodeError(focal)
        snap = reconstruct_entity(world, focal, terminal_fabula(world))
        for trait in sorted(snap.traits):
            p_true = terminal_actual(world, focal, trait)
            q = _trait_posterior(world, focal, trait, t_s, cfg)
            out.setdefault(focal, {})[trait] = binary_kl(p_true, q)
    return out


# -- emotion -------------------------------------------------------------------


def score_emotion(world: WorldState, focal_id: str, effect: str,
                  settings: ScorerSettings | None = None,
                  anchor_fabula: Optional[int] = None) -> float:
    """Proximity of an entity's trait profile to a named affect shape:
    supporting traits count as-is, inhibiting traits inverted, averaged over
    whichever of the shape's traits the entity actually carries.  An entity
    with none of them offers no resistance — that reads as 1.0."""
    cfg = settings or ScorerSettings()
    if effect not in cfg.effect_traits:
        raise QueryError(f"unknown affect shape {effect!r}")
    supporting, inhibiting = cfg.effect_traits[effect]
    at = anchor_fabula if anchor_fabula is not None else terminal_fabula(world)
    snap = reconstruct_entity(world, focal_id, at)
    carried = (supporting | inhibiting) & set(snap.traits)
    if not carried:
        return 1.0
    total = 0.0
    for trait in carried:
        value = snap.traits[trait].value
        total += value if trait in supporting else (1.0 - value)
    return total / len(carried)


# -- bundles -------------------------------------------------------------------


def score_all(world: WorldState, focal_ids: Sequence[str], t_s: Optional[int],
              settings: ScorerSettings | None = None) -> dict[str, float]:
    cfg = settings or ScorerSettings()
    revealed = _revealed(world, t_s)
    frontier = _fabula_frontier(revealed)
    scores = {
        "mystery": score_mystery(world, focal_ids, t_s, cfg),
        "dramatic_irony": score_dramatic_irony(world, focal_ids, t_s, cfg),
        "suspense": score_suspense(world, focal_ids, t_s, cfg),
        "surprise": score_surprise(world, focal_ids, t_s, cfg),
    }
    for effect in sorted(EFFECT_TRAITS):
        values = [score_emotion(world, focal, effect, cfg, anchor_fabula=frontier)
                  for focal in focal_ids if world.has_node(focal)]
        scores[f"emotion_{effect}"] = (sum(values) / len(values)) if values else 0.0
    return scores


def evenly_spaced_anchors(world: WorldState, n: int) -> list[int]:
    """n syuzhet anchors from the first reveal to the last, endpoints kept."""
    if not world.events or n <= 0:
        return []
    hi = max(e.syuzhet_index for e in world.events)
    lo = min(e.syuzhet_index for e in world.events)
    if n == 1:
        return [hi]
    span = hi - lo
    return sorted({lo + round(i * span / (n - 1)) for i in range(n)})


def sample_trajectory(world: WorldState, focal_ids: Sequence[str],
                      anchors: Iterable[int],
                      settings: ScorerSettings | None = None) -> list[ScoreReport]:
    cfg = settings or ScorerSettings()
    reports = []
    for anchor in anchors:
        reports.append(ScoreReport(
            anchor_syuzhet=anchor,
            focal_ids=list(focal_ids),
            scores=score_all(world, focal_ids, anchor, cfg),
        ))
    return reports
