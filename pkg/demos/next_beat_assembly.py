"""Rank three possible next beats for the Macbeth world, assemble a brief
for the winner, then show the conformance audit catching a cheat."""

from fabula import (
    CandidateEventSpec,
    CausalEdge,
    Directive,
    EventNode,
    StateDelta,
    assemble_brief,
    check_conformance,
    evaluate_candidates,
    macbeth_world,
)

world = macbeth_world()

confession = CandidateEventSpec(
    event=EventNode(
        id="EVT_MACBETH_CONFESSES", event_type="utterance",
        actor_ids=["ENT_MACBETH"], location_id="LOC_FORRES_COURT",
        fabula_time=1500, syuzhet_index=14,
        speaker_id="ENT_MACBETH", addressee_ids=["ENT_MALCOLM"],
        via_channel_id="CHN_EXILE_PACT"),
    edges=[CausalEdge(
        source_id="EVT_MACBETH_CONFESSES", target_id="ENT_MACBETH",
        causality_type="mutation", trait_target="guilt", trait_delta=0.25,
        mechanism="moral", evidence_strength="strong", causal_force=9.0,
        fabula_time=1500)],
)
duel = CandidateEventSpec(
    event=EventNode(
        id="EVT_FINAL_DUEL", event_type="violence",
        actor_ids=["ENT_MACDUFF"], target_ids=["ENT_MACBETH"],
        location_id="LOC_FORRES_COURT", fabula_time=1500, syuzhet_index=14,
        weight=1.5),
    edges=[CausalEdge(
        source_id="EVT_FINAL_DUEL", target_id="ENT_MACBETH",
        causality_type="mutation", trait_target="paranoia", trait_delta=0.3,
        mechanism="physical", evidence_strength="strong", causal_force=9.0,
        fabula_time=1500)],
)
dungeon_vigil = CandidateEventSpec(
    event=EventNode(
        id="EVT_DUNGEON_VIGIL", event_type="ritual",
        actor_ids=["ENT_MALCOLM"], location_id="LOC_DUNGEON",
        fabula_time=1500, syuzhet_index=14),
    edges=[CausalEdge(
        source_id="EVT_DUNGEON_VIGIL", target_id="ENT_MALCOLM",
        causality_type="mutation", trait_target="caution", trait_delta=0.2,
        mechanism="psychological", evidence_strength="moderate",
        causal_force=7.0, fabula_time=1500)],
)

directive = Directive(
    mode="maximize",
    weights={"emotion_regret": 1.0, "mystery": 0.5},
    focal_ids=["ENT_MACBETH"],
    must_not_learn=[("ENT_MALCOLM", "EVT_SERVANTS_FRAMED")],
)

evaluations = evaluate_candidates(world, directive,
                                  [confession, duel, dungeon_vigil])
print("ranking:")
for ev in evaluations:
    if ev.feasible:
        print(f"  {ev.candidate_id}: objective {ev.objective:.4f}")
    else:
        reason = next(g.detail for g in ev.gates if not g.passed)
        print(f"  {ev.candidate_id}: infeasible ({reason})")

winner = evaluations[0]
brief = assemble_brief(world, confession, winner.result, directive,
                       candidate_world=winner.world)
print(f"\nbrief: must stage {brief.must_event_ids}")
for env in brief.envelopes:
    who = f"{env.node_id}.{env.trait}"
    if env.counterpart_id:
        who += f"->{env.counterpart_id}"
    print(f"  envelope {who}: [{env.low:.3f}, {env.high:.3f}]")

print("\nwinner audits clean:", check_conformance(brief, world, winner.world).ok)

# A revision that quietly maxes out Macbeth's guilt breaks its envelope.
cheat = winner.world.model_copy(update={
    "entities": [
        e.model_copy(update={"state_timeline": [
            *e.state_timeline,
            StateDelta(fabula_time=1600, trait_values={"guilt": 1.0}),
        ]}) if e.id == "ENT_MACBETH" else e
        for e in winner.world.entities
    ],
})
report = check_conformance(brief, world, cheat)
print("cheat flagged:", not report.ok, "->", report.envelope_violations)
