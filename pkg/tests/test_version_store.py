"""Version tree: row lifecycle, branch tagging, guards, persistence, diffs."""

import random

import pytest

from fabula import (
    UnknownNodeError,
    VersionGraphError,
    VersionStore,
    check_tree,
    diff_worlds,
    linear_telling_world,
    macbeth_world,
)
from fabula.version_store import _edge_keys, _families


def tweaked(world, value):
    """Copy of `world` with one baseline trait nudged, so blobs differ."""
    ent = world.entities[0]
    name = sorted(ent.traits)[0]
    traits = dict(ent.traits)
    traits[name] = traits[name].model_copy(update={"value": value})
    bumped = ent.model_copy(update={"traits": traits})
    return world.model_copy(update={"entities": [bumped] + list(world.entities[1:])})


@pytest.fixture
def base():
    return linear_telling_world()


# -- create ---------------------------------------------------------------

def test_root_creation_defaults_factual(base):
    store = VersionStore()
    row = store.create_version(base, source="ingestion")
    assert row.id == "v0001"
    assert row.ancestor_id is None
    assert row.world_id == "factual"
    assert row.source == "ingestion"
    assert store.active_id == row.id
    assert len(row.world_ref) == 64  # sha256 hex


def test_second_root_rejected(base):
    store = VersionStore()
    store.create_version(base)
    with pytest.raises(VersionGraphError):
        store.create_version(base)


def test_unknown_parent_rejected(base):
    store = VersionStore()
    store.create_version(base)
    with pytest.raises(UnknownNodeError):
        store.create_version(base, parent_id="v9999")


def test_invalid_world_rejected(base):
    broken = base.model_copy(update={"entities": base.entities + [base.entities[0]]})
    store = VersionStore()
    with pytest.raises(Exception) as exc:
        store.create_version(broken)
    assert "duplicate" in str(exc.value)


def test_branch_policy_inheritance(base):
    store = VersionStore()
    root = store.create_version(base)
    shadow = store.create_version(tweaked(base, 0.11), parent_id=root.id,
                                  branch_policy="shadow")
    assert shadow.world_id == "shadow"
    # auto inherits the parent's tag ...
    child = store.create_version(tweaked(base, 0.12), parent_id=shadow.id)
    assert child.world_id == "shadow"
    # ... unless the run was counterfactual in origin, which always shadows
    cf = store.create_version(tweaked(base, 0.13), parent_id=root.id,
                              counterfactual_origin=True)
    assert cf.world_id == "shadow"
    # mainline pins factual even under a shadow parent
    pinned = store.create_version(tweaked(base, 0.14), parent_id=shadow.id,
                                  branch_policy="mainline")
    assert pinned.world_id == "factual"


def test_stored_world_carries_branch_tag(base):
    store = VersionStore()
    root = store.create_version(base)
    shadow = store.create_version(tweaked(base, 0.11), parent_id=root.id,
                                  branch_policy="shadow")
    assert store.world(shadow.id).world_id == "shadow"
    assert store.world(root.id).world_id == "factual"


def test_identical_worlds_share_blob(base):
    store = VersionStore()
    root = store.create_version(base)
    again = store.create_version(base, parent_id=root.id)
    assert again.world_ref == root.world_ref


# -- promote ---------------------------------------------------------------

def test_promote_copies_onto_nearest_factual_ancestor(base):
    store = VersionStore()
    root = store.create_version(base)
    s1 = store.create_version(tweaked(base, 0.2), parent_id=root.id,
                              branch_policy="shadow")
    s2 = store.create_version(tweaked(base, 0.3), parent_id=s1.id)
    promoted = store.promote_branch(s2.id)
    assert promoted.world_id == "factual"
    assert promoted.source == "promotion"
    assert promoted.ancestor_id == root.id
    assert store.world(promoted.id).world_id == "factual"
    # promoted content matches the shadow world, modulo the branch tag
    diff = diff_worlds(store.world(s2.id), store.world(promoted.id))
    assert diff.world_id_change == ["shadow", "factual"]
    assert not diff.trait_changes and not diff.nodes_changed
    assert store.active_id == promoted.id


def test_promote_factual_row_is_a_conflict(base):
    store = VersionStore()
    root = store.create_version(base)
    with pytest.raises(VersionGraphError):
        store.promote_branch(root.id)


def test_promote_without_factual_ancestor_is_a_conflict(base):
    store = VersionStore()
    root = store.create_version(base, branch_policy="shadow")
    with pytest.raises(VersionGraphError):
        store.promote_branch(root.id)


# -- reparent / delete -------------------------------------------------------

def test_reparent_moves_subtree(base):
    store = VersionStore()
    root = store.create_version(base)
    a = store.create_version(tweaked(base, 0.2), parent_id=root.id)
    b = store.create_version(tweaked(base, 0.3), parent_id=root.id)
    moved = store.reparent(b.id, a.id)
    assert moved.ancestor_id == a.id
    store.check_invariants()


def test_reparent_guards(base):
    store = VersionStore()
    root = store.create_version(base)
    a = store.create_version(tweaked(base, 0.2), parent_id=root.id)
    b = store.create_version(tweaked(base, 0.3), parent_id=a.id)
    with pytest.raises(VersionGraphError):
        store.reparent(a.id, None)  # second root
    with pytest.raises(VersionGraphError):
        store.reparent(a.id, b.id)  # cycle via own descendant
    with pytest.raises(VersionGraphError):
        store.reparent(a.id, a.id)  # self-cycle
    with pytest.raises(UnknownNodeError):
        store.reparent(a.id, "v9999")


def test_delete_reparents_children(base):
    store = VersionStore()
    root = store.create_version(base)
    mid = store.create_version(tweaked(base, 0.2), parent_id=root.id)
    leaf = store.create_version(tweaked(base, 0.3), parent_id=mid.id)
    store.delete_version(mid.id)
    assert store.row(leaf.id).ancestor_id == root.id
    assert mid.id not in {r.id for r in store.rows()}
    store.check_invariants()


def test_delete_root_with_many_children_is_a_conflict(base):
    store = VersionStore()
    root = store.create_version(base)
    store.create_version(tweaked(base, 0.2), parent_id=root.id)
    store.create_version(tweaked(base, 0.3), parent_id=root.id)
    with pytest.raises(VersionGraphError):
        store.delete_version(root.id)


def test_delete_root_with_single_child_promotes_child_to_root(base):
    store = VersionStore()
    root = store.create_version(base)
    only = store.create_version(tweaked(base, 0.2), parent_id=root.id)
    store.delete_version(root.id)
    assert store.row(only.id).ancestor_id is None
    store.check_invariants()


def test_delete_active_falls_back_to_ancestor(base):
    store = VersionStore()
    root = store.create_version(base)
    leaf = store.create_version(tweaked(base, 0.2), parent_id=root.id)
    assert store.active_id == leaf.id
    store.delete_version(leaf.id)
    assert store.active_id == root.id


# -- persistence -------------------------------------------------------------

def test_directory_store_reloads(base, tmp_path):
    store = VersionStore(tmp_path)
    root = store.create_version(base, source="ingestion")
    shadow = store.create_version(tweaked(base, 0.2), parent_id=root.id,
                                  branch_policy="shadow", source="pipeline_run")
    store.set_active(root.id)

    reopened = VersionStore(tmp_path)
    assert [r.model_dump() for r in reopened.rows()] == [r.model_dump() for r in store.rows()]
    assert reopened.active_id == root.id
    assert diff_worlds(reopened.world(shadow.id), store.world(shadow.id)).is_empty
    # and it keeps counting from where it left off
    more = reopened.create_version(tweaked(base, 0.4), parent_id=root.id)
    assert more.id == "v0003"


# -- diff ---------------------------------------------------------------------

def test_diff_of_identical_worlds_is_empty(base):
    assert diff_worlds(base, base).is_empty


def test_diff_is_antisymmetric():
    a = macbeth_world()
    b = linear_telling_world()
    fwd, rev = diff_worlds(a, b), diff_worlds(b, a)
    assert fwd.nodes_added == rev.nodes_removed
    assert fwd.nodes_removed == rev.nodes_added
    assert fwd.edges_added == rev.edges_removed
    assert fwd.edges_removed == rev.edges_added


def test_diff_tracks_trait_baseline_change(base):
    after = tweaked(base, 0.42)
    diff = diff_worlds(base, after)
    (change,) = diff.trait_changes
    ent = base.entities[0]
    name = sorted(ent.traits)[0]
    assert change.entity_id == ent.id
    assert change.trait == name
    assert change.old == ent.traits[name].value
    assert change.new == 0.42


def test_diff_membership_algebra():
    a = macbeth_world()
    pruned = a.model_copy(update={
        "events": [e for e in a.events if e.id != "EVT_MACDUFF_VOWS_REVENGE"],
        "causal_topology": [e for e in a.causal_topology
                            if "EVT_MACDUFF_VOWS_REVENGE" not in (e.source_id, e.target_id)],
    })
    diff = diff_worlds(a, pruned)
    for family, ids in _families(a).items():
        got = (set(ids) - set(diff.nodes_removed.get(family, []))) \
            | set(diff.nodes_added.get(family, []))
        assert got == set(_families(pruned)[family])
    for topo, keys in _edge_keys(a).items():
        got = (keys - set(diff.edges_removed.get(topo, []))) \
            | set(diff.edges_added.get(topo, []))
        assert got == _edge_keys(pruned)[topo]


# -- random-op soak -----------------------------------------------------------

def test_thousand_random_ops_keep_the_tree_sound(base):
    rng = random.Random(0xFAB)
    store = VersionStore()
    store.create_version(base, source="ingestion")
    variants = [tweaked(base, round(0.05 * k, 2)) for k in range(1, 19)]
    attempted = 0
    while attempted < 1000:
        attempted += 1
        ids = [r.id for r in store.rows()]
        op = rng.choice(["create", "create", "create", "promote",
                         "reparent", "delete", "activate"])
        try:
            if op == "create":
                store.create_version(
                    rng.choice(variants),
                    parent_id=rng.choice(ids),
                    branch_policy=rng.choice(["auto", "mainline", "shadow"]),
                    counterfactual_origin=rng.random() < 0.25,
                )
            elif op == "promote":
                shadows = [r.id for r in store.rows() if r.world_id == "shadow"]
                if shadows:
                    store.promote_branch(rng.choice(shadows))
            elif op == "reparent":
                store.reparent(rng.choice(ids), rng.choice(ids + [None]))
            elif op == "delete":
                if len(ids) > 1:
                    store.delete_version(rng.choice(ids))
            else:
                store.set_active(rng.choice(ids))
        except VersionGraphError:
            pass  # guarded ops may legitimately refuse
        store.check_invariants()
        rows = {r.id: r for r in store.rows()}
        check_tree(rows)
        if store.active_id is not None:
            assert store.active_id in rows
    assert len(store.rows()) >= 1
