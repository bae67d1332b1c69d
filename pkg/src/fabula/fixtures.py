"""Shipped storyworlds used by the demos, the test suite, and the CLI.

The flagship is a reduced Macbeth: fourteen events at a fabula spacing of
100, told in medias res — the telling opens on the discovery of Duncan's
body, flashes back through prophecy and murder, and withholds Lady Macbeth's
persuasion and the framing of the servants until after the discovery has
landed.  That reveal order gives the fixture a mystery trajectory that only
drains as the telling advances.
"""

from __future__ import annotations

from .world_model import (
    Affordance,
    AmbientVector,
    AxisMetric,
    Belief,
    CausalEdge,
    Channel,
    Entity,
    EventNode,
    GlobalTrait,
    Location,
    ObjectNode,
    RelationshipEdge,
    SpatialEdge,
    StateDelta,
    TraitVector,
    WorldState,
    WorldTraitDelta,
)

__all__ = ["macbeth_world", "linear_telling_world", "three_cause_discovery_world"]


def macbeth_world() -> WorldState:
    entities = [
        Entity(
            id="ENT_MACBETH",
            location_id="LOC_INVERNESS_CASTLE",
            traits={
                "ambition": TraitVector(value=0.7, inertia=0.5, evidence_strength="strong"),
                "courage": TraitVector(value=0.85, inertia=0.7, evidence_strength="strong"),
                "guilt": TraitVector(value=0.1, inertia=0.25),
                "paranoia": TraitVector(value=0.2, inertia=0.5),
            },
            beliefs=[
                Belief(target_id="ENT_WITCHES", perceived_state="true prophets",
                       confidence=0.9, inertia=0.5, established_at_fabula=100,
                       acquired_via_event_id="EVT_WITCHES_PROPHESY",
                       acquired_via_channel_id="CHN_HEATH_PROPHECY"),
            ],
            state_timeline=[
                StateDelta(fabula_time=200, trait_values={"ambition": 0.85}),
                StateDelta(fabula_time=500, trait_values={"guilt": 0.7},
                           trait_inertias={"guilt": 0.4}),
                StateDelta(fabula_time=1200, trait_values={"paranoia": 0.6}),
            ],
        ),
        Entity(
            id="ENT_LADY_MACBETH",
            location_id="LOC_INVERNESS_CASTLE",
            traits={
                "resolve": TraitVector(value=0.9, inertia=0.6, evidence_strength="strong"),
                "ruthlessness": TraitVector(value=0.8, inertia=0.6),
            },
            beliefs=[
                Belief(target_id="ENT_MACBETH", perceived_state="worthy king",
                       confidence=0.8, inertia=0.6, established_at_fabula=300),
            ],
            state_timeline=[
                StateDelta(fabula_time=1000, trait_values={"resolve": 0.4}),
                StateDelta(fabula_time=1300, trait_values={"resolve": 0.15}),
            ],
        ),
        Entity(
            id="ENT_DUNCAN",
            location_id="LOC_FORRES_COURT",
            traits={"kindness": TraitVector(value=0.9, inertia=0.7, evidence_strength="strong")},
            state_timeline=[
                StateDelta(fabula_time=400, location_id="LOC_INVERNESS_CASTLE"),
                StateDelta(fabula_time=500, status="dead"),
            ],
        ),
        Entity(
            id="ENT_BANQUO",
            location_id="LOC_INVERNESS_CASTLE",
            traits={
                "suspicion": TraitVector(value=0.3, inertia=0.5),
                "loyalty": TraitVector(value=0.8, inertia=0.6),
            },
            beliefs=[
                Belief(target_id="EVT_DUNCAN_MURDER", perceived_state="macbeth guilty",
                       confidence=0.7, inertia=0.5, established_at_fabula=1000,
                       acquired_via_event_id="EVT_BANQUO_SUSPECTS"),
            ],
            state_timeline=[
                StateDelta(fabula_time=1000, trait_values={"suspicion": 0.7}),
                StateDelta(fabula_time=1100, status="dead"),
            ],
        ),
        Entity(
            id="ENT_MACDUFF",
            location_id="LOC_FORRES_COURT",
            traits={
                "grief": TraitVector(value=0.0, inertia=0.3),
                "vengeance": TraitVector(value=0.1, inertia=0.4),
            },
            state_timeline=[
                StateDelta(fabula_time=1300, trait_values={"grief": 0.8}),
                StateDelta(fabula_time=1400, trait_values={"vengeance": 0.9}),
            ],
        ),
        Entity(
            id="ENT_MALCOLM",
            location_id="LOC_INVERNESS_CASTLE",
            traits={"caution": TraitVector(value=0.6, inertia=0.5)},
            beliefs=[
                Belief(target_id="ENT_MACBETH", perceived_state="usurper",
                       confidence=0.6, inertia=0.5, established_at_fabula=800),
            ],
            state_timeline=[
                StateDelta(fabula_time=800, location_id="LOC_FORRES_COURT"),
            ],
        ),
        Entity(
            id="ENT_WITCHES",
            location_id="LOC_HEATH",
            traits={"supernatural_power": TraitVector(value=0.95, inertia=0.9,
                                                      evidence_strength="strong")},
        ),
    ]

    # Telling order: open on the discovered body, flash back, then march to
    # the slaughter.  Persuasion (s7) and framing (s6) surface only after the
    # discovery has been sitting with the audience.
    events = [
        EventNode(id="EVT_DUNCAN_DISCOVERED_MURDERED", event_type="discovery",
                  actor_ids=["ENT_MACDUFF"], target_ids=["ENT_DUNCAN"],
                  location_id="LOC_INVERNESS_CASTLE", fabula_time=700,
                  syuzhet_index=0, weight=1.2),
        EventNode(id="EVT_WITCHES_PROPHESY", event_type="utterance",
                  actor_ids=["ENT_WITCHES"], location_id="LOC_HEATH",
                  fabula_time=100, syuzhet_index=1, weight=1.1,
                  speaker_id="ENT_WITCHES",
                  addressee_ids=["ENT_MACBETH", "ENT_BANQUO"],
                  via_channel_id="CHN_HEATH_PROPHECY",
                  content="all hail, king hereafter"),
        EventNode(id="EVT_MACBETH_CONSIDERS", event_type="state_change",
                  actor_ids=["ENT_MACBETH"], location_id="LOC_INVERNESS_CASTLE",
                  fabula_time=200, syuzhet_index=2),
        EventNode(id="EVT_DUNCAN_ARRIVES", event_type="movement",
                  actor_ids=["ENT_DUNCAN"], location_id="LOC_INVERNESS_CASTLE",
                  fabula_time=400, syuzhet_index=3),
        EventNode(id="EVT_DUNCAN_MURDER", event_type="violence",
                  actor_ids=["ENT_MACBETH"], target_ids=["ENT_DUNCAN"],
                  location_id="LOC_INVERNESS_CASTLE", fabula_time=500,
                  syuzhet_index=4, weight=1.5),
        EventNode(id="EVT_MALCOLM_FLEES", event_type="movement",
                  actor_ids=["ENT_MALCOLM"], location_id="LOC_INVERNESS_CASTLE",
                  fabula_time=800, syuzhet_index=5),
        EventNode(id="EVT_SERVANTS_FRAMED", event_type="action",
                  actor_ids=["ENT_LADY_MACBETH"],
                  location_id="LOC_INVERNESS_CASTLE", fabula_time=600,
                  syuzhet_index=6),
        EventNode(id="EVT_LADY_MACBETH_PERSUADES", event_type="utterance",
                  actor_ids=["ENT_LADY_MACBETH"], target_ids=["ENT_MACBETH"],
                  location_id="LOC_INVERNESS_CASTLE", fabula_time=300,
                  syuzhet_index=7, weight=1.2,
                  speaker_id="ENT_LADY_MACBETH", addressee_ids=["ENT_MACBETH"],
                  via_channel_id="CHN_CASTLE_CONFIDENCE",
                  content="screw your courage to the sticking-place"),
        EventNode(id="EVT_MACBETH_CROWNED", event_type="ritual",
                  actor_ids=["ENT_MACBETH"], location_id="LOC_FORRES_COURT",
                  fabula_time=900, syuzhet_index=8),
        EventNode(id="EVT_BANQUO_SUSPECTS", event_type="perception",
                  actor_ids=["ENT_BANQUO"], target_ids=["ENT_MACBETH"],
                  location_id="LOC_FORRES_COURT", fabula_time=1000,
                  syuzhet_index=9),
        EventNode(id="EVT_BANQUO_MURDERED", event_type="violence",
                  actor_ids=["ENT_MACBETH"], target_ids=["ENT_BANQUO"],
                  location_id="LOC_FORRES_COURT", fabula_time=1100,
                  syuzhet_index=10, weight=1.3),
        EventNode(id="EVT_BANQUO_GHOST_APPEARS", event_type="perception",
                  actor_ids=["ENT_MACBETH"], target_ids=["ENT_BANQUO"],
                  location_id="LOC_FORRES_COURT", fabula_time=1200,
                  syuzhet_index=11),
        EventNode(id="EVT_MACDUFF_FAMILY_SLAUGHTERED", event_type="violence",
                  actor_ids=["ENT_MACBETH"], target_ids=["ENT_MACDUFF"],
                  location_id="LOC_FORRES_COURT", fabula_time=1300,
                  syuzhet_index=12, weight=1.4),
        EventNode(id="EVT_MACDUFF_VOWS_REVENGE", event_type="utterance",
                  actor_ids=["ENT_MACDUFF"], location_id="LOC_FORRES_COURT",
                  fabula_time=1400, syuzhet_index=13,
                  speaker_id="ENT_MACDUFF", addressee_ids=["ENT_MALCOLM"],
                  via_channel_id="CHN_EXILE_PACT",
                  referenced_event_ids=["EVT_MACDUFF_FAMILY_SLAUGHTERED"],
                  content="front to front bring thou this fiend"),
    ]

    locations = [
        Location(id="LOC_HEATH",
                 ambient_state={"supernatural": AmbientVector(value=0.9, volatility=0.2)}),
        Location(id="LOC_INVERNESS_CASTLE",
                 ambient_state={"tension": AmbientVector(value=0.6, volatility=0.4)}),
        Location(id="LOC_FORRES_COURT",
                 ambient_state={"order": AmbientVector(value=0.5)}),
        Location(id="LOC_DUNGEON",
                 ambient_state={"darkness": AmbientVector(value=0.8)}),
    ]

    objects = [
        ObjectNode(id="OBJ_BLOODY_DAGGERS", location_id="LOC_INVERNESS_CASTLE",
                   owner_id="ENT_MACBETH", properties={"state": "bloodied"},
                   affordances=[Affordance(action="violence", target_type="entity",
                                           required_trait="ambition")]),
        ObjectNode(id="OBJ_DUNGEON_KEY", location_id="LOC_INVERNESS_CASTLE",
                   properties={"metal": "iron"}),
    ]

    channels = [
        Channel(id="CHN_HEATH_PROPHECY", medium="speech",
                participant_ids=["ENT_WITCHES", "ENT_MACBETH", "ENT_BANQUO"],
                intelligibility={"ENT_WITCHES": 1.0, "ENT_MACBETH": 0.9,
                                 "ENT_BANQUO": 0.8}),
        Channel(id="CHN_CASTLE_CONFIDENCE", medium="speech",
                participant_ids=["ENT_LADY_MACBETH", "ENT_MACBETH"],
                intelligibility={"ENT_LADY_MACBETH": 1.0, "ENT_MACBETH": 1.0}),
        Channel(id="CHN_EXILE_PACT", medium="speech",
                participant_ids=["ENT_MACDUFF", "ENT_MALCOLM"],
                intelligibility={"ENT_MACDUFF": 1.0, "ENT_MALCOLM": 1.0},
                established_at_fabula=1300),
    ]

    world_traits = [
        GlobalTrait(id="WORLD_TYRANNY", value=0.2, inertia=0.6,
                    state_timeline=[WorldTraitDelta(fabula_time=900, value=0.7)]),
    ]

    causal = [
        CausalEdge(source_id="EVT_WITCHES_PROPHESY", target_id="ENT_MACBETH",
                   causality_type="mutation", trait_target="ambition",
                   trait_delta=0.3, mechanism="supernatural",
                   evidence_strength="strong", causal_force=9.0,
                   fabula_time=100),
        CausalEdge(source_id="EVT_WITCHES_PROPHESY", target_id="EVT_MACBETH_CONSIDERS",
                   causality_type="chain_reaction", mechanism="psychological",
                   evidence_strength="moderate", causal_force=7.0,
                   fabula_time=100),
        CausalEdge(source_id="EVT_LADY_MACBETH_PERSUADES", target_id="EVT_DUNCAN_MURDER",
                   causality_type="chain_reaction", mechanism="psychological",
                   evidence_strength="strong", causal_force=8.0,
                   fabula_time=300),
        CausalEdge(source_id="OBJ_BLOODY_DAGGERS", target_id="EVT_DUNCAN_MURDER",
                   causality_type="affordance_gate", mechanism="physical",
                   evidence_strength="moderate", causal_force=6.0,
                   fabula_time=500),
        CausalEdge(source_id="LOC_INVERNESS_CASTLE", target_id="EVT_DUNCAN_MURDER",
                   causality_type="ambient_propagation",
                   evidence_strength="moderate", causal_force=5.0,
                   fabula_time=500),
        CausalEdge(source_id="EVT_DUNCAN_MURDER", target_id="ENT_MACBETH",
                   causality_type="mutation", trait_target="guilt",
                   trait_delta=0.6, mechanism="moral",
                   evidence_strength="strong", causal_force=10.0,
                   fabula_time=500, propagation_delay=100),
        CausalEdge(source_id="EVT_DUNCAN_MURDER", target_id="EVT_SERVANTS_FRAMED",
                   causality_type="chain_reaction", mechanism="physical",
                   evidence_strength="moderate", causal_force=7.0,
                   fabula_time=500),
        CausalEdge(source_id="EVT_DUNCAN_MURDER",
                   target_id="EVT_DUNCAN_DISCOVERED_MURDERED",
                   causality_type="chain_reaction", mechanism="physical",
                   evidence_strength="strong", causal_force=8.0,
                   fabula_time=500),
        CausalEdge(source_id="EVT_SERVANTS_FRAMED",
                   target_id="EVT_DUNCAN_DISCOVERED_MURDERED",
                   causality_type="chain_reaction", mechanism="epistemic",
                   evidence_strength="moderate", causal_force=6.0,
                   fabula_time=600),
        CausalEdge(source_id="EVT_DUNCAN_MURDER", target_id="EVT_MALCOLM_FLEES",
                   causality_type="chain_reaction", mechanism="physical",
                   evidence_strength="strong", causal_force=7.0,
                   fabula_time=500),
        CausalEdge(source_id="EVT_DUNCAN_MURDER", target_id="EVT_MACBETH_CROWNED",
                   causality_type="chain_reaction", mechanism="social",
                   evidence_strength="moderate", causal_force=6.0,
                   fabula_time=500),
        CausalEdge(source_id="EVT_LADY_MACBETH_PERSUADES", target_id="ENT_LADY_MACBETH",
                   causality_type="mutation_social", trait_target="power_dynamic",
                   rel_counterpart_id="ENT_MACBETH", trait_delta=0.4,
                   mechanism="social", evidence_strength="moderate",
                   causal_force=7.0, fabula_time=300),
        CausalEdge(source_id="EVT_BANQUO_GHOST_APPEARS", target_id="ENT_MACBETH",
                   causality_type="mutation_social", trait_target="fear",
                   rel_counterpart_id="ENT_BANQUO", trait_delta=0.5,
                   mechanism="supernatural", evidence_strength="moderate",
                   causal_force=6.0, fabula_time=1200),
        CausalEdge(source_id="EVT_BANQUO_MURDERED", target_id="EVT_BANQUO_GHOST_APPEARS",
                   causality_type="chain_reaction", mechanism="supernatural",
                   evidence_strength="moderate", causal_force=6.0,
                   fabula_time=1100),
        CausalEdge(source_id="EVT_MACBETH_CROWNED", target_id="EVT_BANQUO_SUSPECTS",
                   causality_type="chain_reaction", mechanism="epistemic",
                   evidence_strength="moderate", causal_force=6.0,
                   fabula_time=900),
        CausalEdge(source_id="EVT_BANQUO_SUSPECTS", target_id="EVT_BANQUO_MURDERED",
                   causality_type="chain_reaction", mechanism="psychological",
                   evidence_strength="moderate", causal_force=7.0,
                   fabula_time=1000),
        CausalEdge(source_id="EVT_MACBETH_CROWNED",
                   target_id="EVT_MACDUFF_FAMILY_SLAUGHTERED",
                   causality_type="chain_reaction", mechanism="physical",
                   evidence_strength="moderate", causal_force=5.0,
                   fabula_time=900),
        CausalEdge(source_id="EVT_MACDUFF_FAMILY_SLAUGHTERED", target_id="ENT_MACDUFF",
                   causality_type="mutation", trait_target="grief",
                   trait_delta=0.9, mechanism="physical",
                   evidence_strength="strong", causal_force=10.0,
                   fabula_time=1300),
        CausalEdge(source_id="EVT_MACDUFF_FAMILY_SLAUGHTERED", target_id="ENT_MACDUFF",
                   causality_type="mutation", trait_target="vengeance",
                   trait_delta=0.85, mechanism="psychological",
                   evidence_strength="strong", causal_force=9.0,
                   fabula_time=1300),
        CausalEdge(source_id="EVT_MACDUFF_FAMILY_SLAUGHTERED",
                   target_id="EVT_MACDUFF_VOWS_REVENGE",
                   causality_type="chain_reaction", mechanism="psychological",
                   evidence_strength="strong", causal_force=8.0,
                   fabula_time=1300),
        CausalEdge(source_id="EVT_MACBETH_CROWNED", target_id="WORLD_TYRANNY",
                   causality_type="mutation", trait_target="value",
                   trait_delta=0.5, mechanism="social",
                   evidence_strength="moderate", causal_force=7.0,
                   fabula_time=900),
        CausalEdge(source_id="LOC_HEATH", target_id="ENT_MACBETH",
                   causality_type="ambient_propagation", trait_target="paranoia",
                   evidence_strength="weak", causal_force=4.0,
                   fabula_time=100),
        CausalEdge(source_id="LOC_INVERNESS_CASTLE", target_id="ENT_LADY_MACBETH",
                   causality_type="ambient_propagation", trait_target="resolve",
                   evidence_strength="weak", causal_force=3.0,
                   fabula_time=300),
    ]

    social = [
        RelationshipEdge(source_id="ENT_LADY_MACBETH", target_id="ENT_MACBETH",
                         metrics={"power_dynamic": AxisMetric(value=0.3, inertia=0.5,
                                                              observed=True),
                                  "affinity": AxisMetric(value=0.7, inertia=0.6,
                                                         observed=False)}),
        RelationshipEdge(source_id="ENT_MACBETH", target_id="ENT_BANQUO",
                         metrics={"fear": AxisMetric(value=0.1, inertia=0.4,
                                                     observed=True),
                                  "affinity": AxisMetric(value=-0.3, inertia=0.5,
                                                         observed=False)}),
        RelationshipEdge(source_id="ENT_MACBETH", target_id="ENT_MACDUFF",
                         metrics={"affinity": AxisMetric(value=-0.6, inertia=0.5,
                                                         observed=False)}),
        RelationshipEdge(source_id="ENT_MACDUFF", target_id="ENT_MACBETH",
                         metrics={"affinity": AxisMetric(value=-0.7, inertia=0.5,
                                                         observed=False)}),
        RelationshipEdge(source_id="ENT_BANQUO", target_id="ENT_MACBETH",
                         metrics={"affinity": AxisMetric(value=0.4, inertia=0.5,
                                                         observed=False)}),
    ]

    spatial = [
        SpatialEdge(source_id="LOC_HEATH", target_id="LOC_INVERNESS_CASTLE"),
        SpatialEdge(source_id="LOC_INVERNESS_CASTLE", target_id="LOC_FORRES_COURT"),
        SpatialEdge(source_id="LOC_INVERNESS_CASTLE", target_id="LOC_DUNGEON",
                    is_locked=True, barrier_item_id="OBJ_DUNGEON_KEY"),
    ]

    return WorldState(
        world_id="factual",
        fabula_time_spacing=100,
        entities=entities,
        events=events,
        locations=locations,
        objects=objects,
        channels=channels,
        world_traits=world_traits,
        causal_topology=causal,
        social_topology=social,
        spatial_topology=spatial,
    )


def linear_telling_world() -> WorldState:
    """Six events told exactly in story order; zero reorder shock by
    construction."""
    entity = Entity(
        id="ENT_PILGRIM",
        location_id="LOC_ROAD",
        traits={
            "resolve": TraitVector(value=0.5, inertia=0.4),
            "hope": TraitVector(value=0.6, inertia=0.5),
        },
        state_timeline=[StateDelta(fabula_time=600, trait_values={"resolve": 0.8})],
    )
    companion = Entity(
        id="ENT_COMPANION",
        location_id="LOC_ROAD",
        traits={"resolve": TraitVector(value=0.45, inertia=0.5)},
    )
    stranger = Entity(
        id="ENT_STRANGER",
        location_id="LOC_ROAD",
        traits={"resolve": TraitVector(value=0.55, inertia=0.5)},
    )
    events = [
        EventNode(id=f"EVT_STEP_{i}", actor_ids=["ENT_PILGRIM"],
                  location_id="LOC_ROAD", fabula_time=(i + 1) * 100,
                  syuzhet_index=i)
        for i in range(6)
    ]
    causal = [
        CausalEdge(source_id="EVT_STEP_2", target_id="ENT_PILGRIM",
                   causality_type="mutation", trait_target="resolve",
                   trait_delta=0.4, evidence_strength="moderate",
                   causal_force=8.0, fabula_time=300),
        CausalEdge(source_id="EVT_STEP_4", target_id="ENT_PILGRIM",
                   causality_type="mutation", trait_target="resolve",
                   trait_delta=0.2, evidence_strength="weak",
                   causal_force=6.0, fabula_time=500),
    ]
    return WorldState(
        entities=[entity, companion, stranger],
        events=events,
        locations=[Location(id="LOC_ROAD")],
        causal_topology=causal,
    )


def three_cause_discovery_world() -> WorldState:
    """Minimal mystery shape: one revealed discovery fed by three
    equally-weighted causes, two of them still withheld."""
    entity = Entity(id="ENT_WITNESS", location_id="LOC_SCENE",
                    traits={"curiosity": TraitVector(value=0.5, inertia=0.5)})
    events = [
        EventNode(id="EVT_CAUSE_KNOWN", actor_ids=["ENT_WITNESS"],
                  location_id="LOC_SCENE", fabula_time=100, syuzhet_index=0),
        EventNode(id="EVT_BODY_FOUND", actor_ids=["ENT_WITNESS"],
                  location_id="LOC_SCENE", fabula_time=400, syuzhet_index=1),
        EventNode(id="EVT_CAUSE_VEILED_A", actor_ids=["ENT_WITNESS"],
                  location_id="LOC_SCENE", fabula_time=200, syuzhet_index=2),
        EventNode(id="EVT_CAUSE_VEILED_B", actor_ids=["ENT_WITNESS"],
                  location_id="LOC_SCENE", fabula_time=300, syuzhet_index=3),
    ]
    causal = [
        CausalEdge(source_id=src, target_id="EVT_BODY_FOUND",
                   causality_type="chain_reaction", mechanism="physical",
                   evidence_strength="moderate", causal_force=8.0,
                   fabula_time=ft)
        for src, ft in (("EVT_CAUSE_KNOWN", 100),
                        ("EVT_CAUSE_VEILED_A", 200),
                        ("EVT_CAUSE_VEILED_B", 300))
    ]
    return WorldState(
        entities=[entity],
        events=events,
        locations=[Location(id="LOC_SCENE")],
        causal_topology=causal,
    )
