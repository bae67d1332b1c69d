"""Walk the three query rungs over the bundled Macbeth world.

Rung 1 just watches the ambient weather.  Rung 2 erases the murder with a
do() and prints the cascade of beats that never happen.  Rung 3 severs the
prophecy channel and back-infers what Macbeth's hidden state must have been
for the terminal evidence to still hold.
"""

from fabula import (
    CounterfactualQuery,
    InterventionQuery,
    InterventionSpec,
    ObservationQuery,
    PhysicsSettings,
    diff_worlds,
    execute,
    macbeth_world,
    materialize_result_world,
)


def show(result, title):
    print(f"\n== {title} ==")
    for m in result.mutations:
        arrow = f"{m.old:.3f} -> {m.new:.3f}"
        rel = f" (toward {m.counterpart_id})" if m.counterpart_id else ""
        print(f"  mutate {m.node_id}.{m.trait}{rel}: {arrow}  impact={m.impact:.3f}")
    for b in result.blocked:
        trait = f".{b.trait}" if b.trait else ""
        print(f"  blocked {b.source_id} -> {b.target_id}{trait}  [{b.reason}]")
    for h in result.hidden_deltas:
        if abs(h.delta) > 1e-9:
            print(f"  abduced {h.node_id}.{h.trait}: {h.prior:.3f} -> {h.posterior:.3f}")


def main():
    world = macbeth_world()
    physics = PhysicsSettings()

    observe = ObservationQuery(focal_ids=["ENT_MACBETH"], anchor_fabula=600)
    show(execute(world, observe, physics), "observation @ fabula 600")

    undo_murder = InterventionQuery(
        focal_ids=["ENT_MACBETH", "ENT_MACDUFF"],
        anchor_fabula=1400,
        hop_limit=6,
        interventions=InterventionSpec(assignments={"EVT_DUNCAN_MURDER": False}),
    )
    result = execute(world, undo_murder, physics)
    show(result, "do(murder never happens) @ fabula 1400")

    spared = materialize_result_world(world, undo_murder, result)
    diff = diff_worlds(world, spared)
    print("\nbeats erased from the telling:")
    for eid in diff.nodes_removed.get("events", []):
        print(f"  - {eid}")

    unsay_prophecy = CounterfactualQuery(
        focal_ids=["ENT_MACBETH"],
        anchor_fabula=200,
        evidence_node_ids=["ENT_MACBETH", "ENT_LADY_MACBETH"],
        interventions=InterventionSpec(channel_severances=["CHN_HEATH_PROPHECY"]),
    )
    result = execute(world, unsay_prophecy, physics)
    show(result, "counterfactual: the witches never reach him")
    print(f"  utterances pruned: {result.pruned_utterance_event_ids}")
    print(f"  beliefs dropped:   {result.pruned_beliefs_count}")


if __name__ == "__main__":
    main()
