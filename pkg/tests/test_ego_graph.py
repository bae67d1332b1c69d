"""Neighborhood slicing and sandbox isolation."""

import math

import pytest

from fabula import (
    UnknownNodeError,
    create_sandbox,
    slice_ego_graph,
)


def ids(payload):
    return payload.node_ids()


def test_hop_zero_is_just_the_focals_plus_world_traits(macbeth):
    payload = slice_ego_graph(macbeth, ["ENT_DUNCAN"], 1400, hop_limit=0)
    assert set(payload.entities) == {"ENT_DUNCAN"}
    assert not payload.events and not payload.locations
    assert "WORLD_TYRANNY" in payload.world_traits  # always rides along


def test_hop_sets_grow_monotonically(macbeth):
    sizes = [len(ids(slice_ego_graph(macbeth, ["ENT_DUNCAN"], 1400, hop_limit=k)))
             for k in range(5)]
    assert sizes == sorted(sizes)
    assert sizes[0] < sizes[2]


def test_one_hop_reaches_direct_neighbors_only(macbeth):
    payload = slice_ego_graph(macbeth, ["ENT_DUNCAN"], 1400, hop_limit=1)
    assert "EVT_DUNCAN_MURDER" in payload.events  # target of the deed
    assert "ENT_MACBETH" not in payload.entities    # two hops, via the event
    two = slice_ego_graph(macbeth, ["ENT_DUNCAN"], 1400, hop_limit=2)
    assert "ENT_MACBETH" in two.entities


def test_future_events_are_invisible(macbeth):
    payload = slice_ego_graph(macbeth, ["ENT_MACBETH"], 450, hop_limit=6)
    assert "EVT_DUNCAN_MURDER" not in payload.events
    assert all(evt.fabula_time <= 450 for evt in payload.events.values())


def test_query_targets_pierce_the_anchor(macbeth):
    payload = slice_ego_graph(macbeth, ["ENT_MACBETH"], 450, hop_limit=6,
                              query_target_ids=["EVT_DUNCAN_MURDER"])
    assert "EVT_DUNCAN_MURDER" in payload.events
    # only the named target gets through, not the whole future
    assert "EVT_MACBETH_CROWNED" not in payload.events


def test_entities_arrive_as_anchor_snapshots(macbeth):
    early = slice_ego_graph(macbeth, ["ENT_MACBETH"], 100, hop_limit=1)
    late = slice_ego_graph(macbeth, ["ENT_MACBETH"], 1400, hop_limit=1)
    assert early.entities["ENT_MACBETH"].traits["ambition"].value == 0.7
    assert late.entities["ENT_MACBETH"].traits["ambition"].value == 0.85
    assert late.entities["ENT_MACBETH"].traits["guilt"].value == 0.7


def test_world_traits_reconstructed_at_anchor(macbeth):
    before = slice_ego_graph(macbeth, ["ENT_WITCHES"], 100, hop_limit=0)
    after = slice_ego_graph(macbeth, ["ENT_WITCHES"], 1000, hop_limit=0)
    assert before.world_traits["WORLD_TYRANNY"].value == 0.2
    assert after.world_traits["WORLD_TYRANNY"].value == 0.7


def test_edges_need_both_endpoints(macbeth):
    payload = slice_ego_graph(macbeth, ["ENT_DUNCAN"], 1400, hop_limit=1)
    present = ids(payload)
    for edge in payload.causal_edges + payload.social_edges + payload.spatial_edges:
        assert edge.source_id in present and edge.target_id in present


def test_channels_link_participants_once_established(macbeth):
    early = slice_ego_graph(macbeth, ["ENT_MACDUFF"], 400, hop_limit=1)
    assert "CHN_EXILE_PACT" not in early.channels  # established at 1300
    late = slice_ego_graph(macbeth, ["ENT_MACDUFF"], 1400, hop_limit=1)
    assert "CHN_EXILE_PACT" in late.channels
    assert "ENT_MALCOLM" in late.entities  # one hop across the channel


def test_unknown_focal_or_target_raises(macbeth):
    with pytest.raises(UnknownNodeError):
        slice_ego_graph(macbeth, ["ENT_NOBODY"], 100)
    with pytest.raises(UnknownNodeError):
        slice_ego_graph(macbeth, ["ENT_MACBETH"], 100,
                        query_target_ids=["EVT_NOTHING"])


# -- sandboxes ---------------------------------------------------------------

def payload_for(world, *focals, anchor=1400, hops=6):
    return slice_ego_graph(world, list(focals), anchor, hop_limit=hops)


def test_sandbox_does_not_alias_the_world(macbeth):
    payload = payload_for(macbeth, "ENT_MACBETH")
    box = create_sandbox(payload)
    box.traits["ENT_MACBETH"]["guilt"].value = 999.0
    box.ambient.get("LOC_INVERNESS_CASTLE", {})["menace"] = 999.0
    fresh = payload_for(macbeth, "ENT_MACBETH")
    assert fresh.entities["ENT_MACBETH"].traits["guilt"].value == 0.7


def test_sandbox_activation_and_invalidation(macbeth):
    box = create_sandbox(payload_for(macbeth, "ENT_MACBETH"))
    assert all(v == 1.0 for v in box.activation.values())
    assert box.event_active("EVT_DUNCAN_MURDER")
    box.invalidated_events.add("EVT_DUNCAN_MURDER")
    assert not box.event_active("EVT_DUNCAN_MURDER")
    box.activation["EVT_MACBETH_CROWNED"] = 0.0
    assert not box.event_active("EVT_MACBETH_CROWNED")


def test_sandbox_spatial_hops_respect_locks(macbeth):
    box = create_sandbox(payload_for(macbeth, "ENT_MACBETH"))
    castle, dungeon = "LOC_INVERNESS_CASTLE", "LOC_DUNGEON"
    assert box.spatial_hops(castle, dungeon) == 1.0
    assert box.spatial_hops(castle, dungeon, unlocked_only=True) == math.inf
    assert not box.reachable(castle, dungeon)
    assert box.reachable("LOC_HEATH", "LOC_FORRES_COURT")
    assert box.spatial_hops("LOC_HEATH", "LOC_FORRES_COURT") == 2.0
    assert box.spatial_hops(castle, castle) == 0.0


def test_sandbox_axis_state_defaults(macbeth):
    box = create_sandbox(payload_for(macbeth, "ENT_MACBETH"))
    covered = box.axis_state("ENT_LADY_MACBETH", "ENT_MACBETH", "power_dynamic")
    assert covered.value != 0.0
    blank = box.axis_state("ENT_MACBETH", "ENT_DUNCAN", "trust")
    assert blank.value == 0.0 and blank.inertia == 0.5


def test_sandbox_graph_carries_families_and_channel_edges(macbeth):
    box = create_sandbox(payload_for(macbeth, "ENT_MACBETH"))
    assert box.graph.nodes["ENT_MACBETH"]["family"] == "entity"
    assert box.graph.nodes["EVT_DUNCAN_MURDER"]["family"] == "event"
    kinds = {d.get("kind") for _, _, d in
             box.graph.edges("CHN_CASTLE_CONFIDENCE", data=True)}
    assert "communicating_with" in kinds


def test_sandbox_flags_eavesdroppers_above_threshold(macbeth):
    payload = payload_for(macbeth, "ENT_MACBETH")
    tapped = payload.channels["CHN_CASTLE_CONFIDENCE"].model_copy(update={
        "intelligibility": {"ENT_LADY_MACBETH": 1.0, "ENT_MACBETH": 1.0,
                            "ENT_BANQUO": 0.9, "ENT_DUNCAN": 0.2},
    })
    payload.channels["CHN_CASTLE_CONFIDENCE"] = tapped
    box = create_sandbox(payload)
    listeners = {t for _, t, d in box.graph.out_edges("CHN_CASTLE_CONFIDENCE", data=True)
                 if d.get("kind") == "eavesdropped_by"}
    assert listeners == {"ENT_BANQUO"}  # 0.2 falls below the 0.5 threshold
