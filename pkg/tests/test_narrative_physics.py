"""Audience-state scorers: exact hand-derived values on small worlds, shape
and monotonicity properties on the shipped fixtures."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from fabula.errors import QueryError, UnknownNodeError
from fabula.fixtures import (
    linear_telling_world,
    macbeth_world,
    three_cause_discovery_world,
)
from fabula.narrative_physics import (
    HARM_SALIENCE,
    SCORE_NAMES,
    ScoreReport,
    ScorerSettings,
    beta_surprise_cell,
    binary_kl,
    evenly_spaced_anchors,
    event_harm_kind,
    sample_trajectory,
    score_all,
    score_dramatic_irony,
    score_emotion,
    score_mystery,
    score_surprise,
    score_suspense,
    threat_hope_masses,
    trait_kl_magnitudes,
)
from fabula.world_model import (
    AxisMetric,
    Belief,
    CausalEdge,
    Entity,
    EventNode,
    Location,
    RelationshipEdge,
    SpatialEdge,
    TraitVector,
    WorldState,
)

MACBETH_CAST = [
    "ENT_MACBETH", "ENT_LADY_MACBETH", "ENT_DUNCAN", "ENT_BANQUO",
    "ENT_MACDUFF", "ENT_MALCOLM", "ENT_WITCHES",
]


# -- settings -------------------------------------------------------------------


def test_settings_env_overrides():
    cfg = ScorerSettings.from_env({
        "DIRECTIVE_ASSEMBLY_SUSPENSE_STAKES_K": "3.5",
        "DIRECTIVE_ASSEMBLY_MYSTERY_PATH_DECAY_DEPTH": "6",
    })
    assert cfg.suspense_stakes_k == 3.5
    assert cfg.mystery_path_decay_depth == 6
    assert isinstance(cfg.mystery_path_decay_depth, int)
    # Untouched fields keep their defaults.
    assert cfg.irony_surface_k == ScorerSettings().irony_surface_k


def test_settings_env_empty_is_defaults():
    assert ScorerSettings.from_env({}) == ScorerSettings()


def test_settings_env_bad_value_rejected():
    with pytest.raises(QueryError):
        ScorerSettings.from_env({"DIRECTIVE_ASSEMBLY_IRONY_SURFACE_K": "plenty"})


def test_settings_env_reads_process_environment(monkeypatch):
    monkeypatch.setenv("DIRECTIVE_ASSEMBLY_SURPRISE_ANACHRONY_WEIGHT", "0.0")
    assert ScorerSettings.from_env().surprise_anachrony_weight == 0.0


def test_settings_mapping_fields_not_env_tunable():
    cfg = ScorerSettings.from_env({"DIRECTIVE_ASSEMBLY_HARM_SALIENCE": "{}"})
    assert cfg.harm_salience == HARM_SALIENCE


def test_settings_fallback_lookups():
    cfg = ScorerSettings()
    assert cfg.salience_of("no_such_kind") == HARM_SALIENCE["epistemic"]
    assert cfg.saturation_of("no_such_kind") == cfg.suspense_stakes_k
    assert cfg.salience_of("existential") == 1.0


# -- harm register -------------------------------------------------------------------


def test_event_harm_kind_picks_most_salient_mechanism():
    world = macbeth_world()
    # Murder sits on physical, psychological, social and moral edges; the
    # moral tag is not a harm register and physical outranks the rest.
    assert event_harm_kind(world, "EVT_DUNCAN_MURDER") == "physical"
    assert event_harm_kind(world, "EVT_LADY_MACBETH_PERSUADES") == "psychological"


def test_event_harm_kind_defaults_to_physical():
    world = linear_telling_world()
    assert event_harm_kind(world, "EVT_STEP_0") == "physical"
    assert event_harm_kind(world, "EVT_STEP_2") == "physical"  # untagged edge


# -- mystery -------------------------------------------------------------------


def test_mystery_without_anchor_is_zero():
    assert score_mystery(macbeth_world(), ["ENT_MACBETH"], None) == 0.0


def test_mystery_two_of_three_causes_withheld():
    world = three_cause_discovery_world()
    value = score_mystery(world, ["ENT_WITNESS"], 1)
    assert value == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_mystery_three_cause_full_reveal_sweep():
    world = three_cause_discovery_world()
    # anchor 0: the discovery itself is unrevealed, so no ancestor mass at
    # all; anchors 2 and 3 peel the veiled causes off one at a time.
    assert score_mystery(world, ["ENT_WITNESS"], 0) == 0.0
    assert score_mystery(world, ["ENT_WITNESS"], 2) == pytest.approx(1.0 / 3.0, abs=1e-9)
    assert score_mystery(world, ["ENT_WITNESS"], 3) == 0.0


def _duncan_mystery_oracle(t_s: int) -> float:
    """Independent recomputation of the victim-focused trajectory.

    Three revealed events ever touch the victim: the discovery (told
    first), the arrival (index 3) and the murder (index 4).  Ancestor mass
    within the decay depth, by harm register:

      discovery <- murder (0.85 * 0.6), framing (0.85 * 0.3),
                   persuasion via murder (0.70 * 0.36)
      murder    <- persuasion (0.70 * 0.6)
    """
    anc_discovery = {4: 0.85 * 0.6, 6: 0.85 * 0.3, 7: 0.70 * (0.6 * 0.6)}
    anc_murder = {7: 0.70 * 0.6}
    hidden = total = 0.0
    for effect_index, ancestors in ((0, anc_discovery), (4, anc_murder)):
        if effect_index > t_s:
            continue
        rho = math.exp(-(t_s - effect_index) / 8.0)
        for ancestor_index, mass in ancestors.items():
            total += mass * rho
            if ancestor_index > t_s:
                hidden += mass * rho
    return hidden / total if total else 0.0


def test_mystery_victim_trajectory_matches_oracle():
    world = macbeth_world()
    for t_s in range(14):
        got = score_mystery(world, ["ENT_DUNCAN"], t_s)
        assert got == pytest.approx(_duncan_mystery_oracle(t_s), abs=1e-9), t_s


def test_mystery_victim_trajectory_shape():
    world = macbeth_world()
    values = [score_mystery(world, ["ENT_DUNCAN"], t) for t in range(14)]
    assert values[:4] == [1.0, 1.0, 1.0, 1.0]
    assert values[7:] == [0.0] * 7
    for earlier, later in zip(values, values[1:]):
        assert later <= earlier + 1e-12


def test_mystery_decay_depth_setting_bites():
    world = macbeth_world()
    shallow = score_mystery(world, ["ENT_DUNCAN"], 4,
                            ScorerSettings(mystery_path_decay_depth=1))
    # Depth 1 cannot see the persuasion behind the discovered body.
    e = math.exp(-0.5)
    expected = (0.85 * 0.3 * e + 0.70 * 0.6) / ((0.85 * 0.9) * e + 0.70 * 0.6)
    assert shallow == pytest.approx(expected, abs=1e-9)
    assert shallow != pytest.approx(score_mystery(world, ["ENT_DUNCAN"], 4))


# -- dramatic irony -------------------------------------------------------------------


def _scheme_world(*, witness_scene: bool = True, victim_speaks: bool = False,
                  victim_belief: bool = False) -> WorldState:
    victim_beliefs = []
    if victim_belief:
        victim_beliefs.append(Belief(
            target_id="ENT_SCHEMER", perceived_state="loyal friend",
            confidence=0.9, inertia=0.5, established_at_fabula=50))
    events = [
        EventNode(id="EVT_PLOT_HATCHED", actor_ids=["ENT_SCHEMER"],
                  location_id="LOC_HALL", fabula_time=100, syuzhet_index=0,
                  weight=1.0),
    ]
    if victim_speaks:
        events.append(EventNode(
            id="EVT_VICTIM_SPEECH", actor_ids=["ENT_VICTIM"],
            location_id="LOC_HALL", fabula_time=150, syuzhet_index=1,
            weight=1.0))
    if witness_scene:
        events.append(EventNode(
            id="EVT_SHARED_TOAST", actor_ids=["ENT_VICTIM", "ENT_SCHEMER"],
            location_id="LOC_HALL", fabula_time=200,
            syuzhet_index=len(events), weight=1.0))
    return WorldState(
        entities=[
            Entity(id="ENT_VICTIM", location_id="LOC_HALL",
                   beliefs=victim_beliefs),
            Entity(id="ENT_SCHEMER", location_id="LOC_HALL"),
        ],
        events=events,
        locations=[Location(id="LOC_HALL")],
    )


def test_irony_without_anchor_or_reveals_is_zero():
    world = _scheme_world()
    assert score_dramatic_irony(world, ["ENT_VICTIM"], None) == 0.0
    assert score_dramatic_irony(world, ["ENT_VICTIM"], -1) == 0.0


def test_irony_single_gap_exact():
    world = _scheme_world()
    got = score_dramatic_irony(world, ["ENT_VICTIM"], 0)
    # One revealed plot the victim is oblivious to, witnessed one step later.
    rho = math.exp(-1.0 / 6.0)
    expected = (1.0 * 0.85 * 1.0 * rho) / (0.85 + 1.0)
    assert got == pytest.approx(expected, abs=1e-12)


def test_irony_proximity_floor_without_upcoming_witness():
    world = _scheme_world(witness_scene=False)
    got = score_dramatic_irony(world, ["ENT_VICTIM"], 0)
    assert got == pytest.approx((0.85 * 0.4) / 1.85, abs=1e-12)
    raised_floor = score_dramatic_irony(
        world, ["ENT_VICTIM"], 0, ScorerSettings(irony_proximity_floor=0.8))
    assert raised_floor == pytest.approx(2.0 * got, abs=1e-12)


def test_irony_false_belief_multiplier():
    plain = score_dramatic_irony(_scheme_world(), ["ENT_VICTIM"], 0)
    deceived = score_dramatic_irony(
        _scheme_world(victim_belief=True), ["ENT_VICTIM"], 0)
    assert deceived == pytest.approx(1.5 * plain, abs=1e-12)


def test_irony_acting_amplifier_and_participation_knowledge():
    world = _scheme_world(victim_speaks=True)
    got = score_dramatic_irony(world, ["ENT_VICTIM"], 1)
    # The victim's own speech is known, not a gap; having acted once, the
    # remaining gap is amplified 1.15x over a doubled surface.
    rho = math.exp(-1.0 / 6.0)
    expected = 1.15 * (0.85 * rho) / (2.0 * 0.85 + 1.0)
    assert got == pytest.approx(expected, abs=1e-12)


def test_irony_blend_of_worst_and_mean():
    world = _scheme_world()
    victim_only = score_dramatic_irony(world, ["ENT_VICTIM"], 0)
    both = score_dramatic_irony(world, ["ENT_VICTIM", "ENT_SCHEMER"], 0)
    assert both == pytest.approx(0.6 * victim_only + 0.4 * victim_only / 2.0,
                                 abs=1e-12)


def test_irony_beliefs_close_the_gap():
    world = macbeth_world()
    with_belief = score_dramatic_irony(world, ["ENT_BANQUO"], 10)
    stripped = world.model_copy(update={"entities": [
        e.model_copy(update={"beliefs": []}) if e.id == "ENT_BANQUO" else e
        for e in world.entities
    ]})
    without = score_dramatic_irony(stripped, ["ENT_BANQUO"], 10)
    assert without > with_belief


def test_irony_utterance_references_inform_addressees():
    world = macbeth_world()
    informed = score_dramatic_irony(world, ["ENT_MALCOLM"], 13)
    muted = world.model_copy(update={"events": [
        e.model_copy(update={"referenced_event_ids": []})
        if e.id == "EVT_MACDUFF_VOWS_REVENGE" else e
        for e in world.events
    ]})
    assert score_dramatic_irony(muted, ["ENT_MALCOLM"], 13) > informed


def test_irony_unknown_focal_rejected():
    with pytest.raises(UnknownNodeError):
        score_dramatic_irony(macbeth_world(), ["ENT_NOBODY"], 4)


# -- suspense -------------------------------------------------------------------


def _siege_world(*, rescue: bool = True) -> WorldState:
    """One revealed warning, one looming ambush, optionally one looming
    rescue — all in the same keep, no causal edges."""
    events = [
        EventNode(id="EVT_WARNING", actor_ids=["ENT_HERO"],
                  location_id="LOC_KEEP", fabula_time=100, syuzhet_index=0),
        EventNode(id="EVT_AMBUSH", actor_ids=["ENT_VILLAIN"],
                  target_ids=["ENT_HERO"], location_id="LOC_KEEP",
                  fabula_time=200, syuzhet_index=1),
    ]
    if rescue:
        events.append(EventNode(
            id="EVT_RESCUE", actor_ids=["ENT_ALLY"], target_ids=["ENT_HERO"],
            location_id="LOC_KEEP", fabula_time=300, syuzhet_index=2))
    return WorldState(
        entities=[
            Entity(id="ENT_HERO", location_id="LOC_KEEP"),
            Entity(id="ENT_VILLAIN", location_id="LOC_KEEP"),
            Entity(id="ENT_ALLY", location_id="LOC_KEEP"),
        ],
        events=events,
        locations=[Location(id="LOC_KEEP")],
        social_topology=[
            RelationshipEdge(source_id="ENT_VILLAIN", target_id="ENT_HERO",
                             metrics={"affinity": AxisMetric(value=-0.5,
                                                             inertia=0.5)}),
            RelationshipEdge(source_id="ENT_ALLY", target_id="ENT_HERO",
                             metrics={"affinity": AxisMetric(value=0.5,
                                                             inertia=0.5)}),
        ],
    )


def _siege_cell():
    # Hand-derived cell contents at anchor 0: the revealed warning banks
    # hope mass 0.85 * 0.5; ambush and rescue wait at fabula distance 100
    # and 200 against a time constant of 6 median gaps (600).
    base = 0.85 * 0.5
    return base, [(base, True, math.exp(-100 / 600.0)),
                  (base, False, math.exp(-200 / 600.0))]


def test_suspense_without_anchor_is_zero():
    assert score_suspense(_siege_world(), ["ENT_HERO"], None) == 0.0


def test_suspense_terminal_anchor_is_zero_everywhere():
    for world, focals, last in (
            (macbeth_world(), MACBETH_CAST, 13),
            (linear_telling_world(), ["ENT_PILGRIM"], 5),
            (three_cause_discovery_world(), ["ENT_WITNESS"], 3)):
        assert score_suspense(world, focals, last) == 0.0


def test_suspense_single_cell_equals_fate_spread():
    prior_hope, outcomes = _siege_cell()
    got = score_suspense(_siege_world(), ["ENT_HERO"], 0)
    # One bilateral cell: the kind weights cancel and the score is the
    # normalized Beta posterior spread itself.
    assert got == beta_surprise_cell(0.0, prior_hope, outcomes)
    assert 0.0 < got <= 1.0


def test_suspense_classic_balance_exact():
    prior_hope, outcomes = _siege_cell()
    threat = outcomes[0][0] * outcomes[0][2]
    hope = outcomes[1][0] * outcomes[1][2]
    got = score_suspense(_siege_world(), ["ENT_HERO"], 0, mode="classic")
    balance = 1.0 - abs(threat - hope) / (threat + hope)
    stakes = (threat + hope) / (threat + hope + 3.0)
    assert got == pytest.approx(0.85 * balance * stakes, abs=1e-12)
    assert got != pytest.approx(score_suspense(_siege_world(), ["ENT_HERO"], 0))


def test_suspense_one_sided_future_reads_flat():
    world = _siege_world(rescue=False)
    assert score_suspense(world, ["ENT_HERO"], 0) == 0.0
    masses = threat_hope_masses(world, ["ENT_HERO"], 0)
    assert masses["ENT_HERO"]["physical"]["hope"] == 0.0
    assert masses["ENT_HERO"]["physical"]["threat"] > 0.0


def test_threat_hope_masses_exact():
    _, outcomes = _siege_cell()
    masses = threat_hope_masses(_siege_world(), ["ENT_HERO"], 0)
    assert set(masses) == {"ENT_HERO"}
    cell = masses["ENT_HERO"]["physical"]
    assert cell["threat"] == pytest.approx(outcomes[0][0] * outcomes[0][2], abs=1e-12)
    assert cell["hope"] == pytest.approx(outcomes[1][0] * outcomes[1][2], abs=1e-12)


def test_suspense_cell_probability_persistence_and_reach():
    # A foreshadowed strike: its cause is already on stage, so persistence
    # ticks up, and the inbound edge sets the event probability.
    def build(hero_loc: str, connected: bool = True) -> WorldState:
        spatial = [SpatialEdge(source_id="LOC_GATE", target_id="LOC_KEEP",
                               is_locked=True)]
        if connected:
            spatial.append(SpatialEdge(source_id="LOC_KEEP",
                                       target_id="LOC_TOWER"))
        return WorldState(
            entities=[Entity(id="ENT_HERO", location_id=hero_loc),
                      Entity(id="ENT_VILLAIN", location_id="LOC_TOWER")],
            events=[
                EventNode(id="EVT_OMEN", actor_ids=["ENT_VILLAIN"],
                          location_id="LOC_TOWER", fabula_time=100,
                          syuzhet_index=0),
                EventNode(id="EVT_STRIKE", actor_ids=["ENT_VILLAIN"],
                          target_ids=["ENT_HERO"], location_id="LOC_TOWER",
                          fabula_time=200, syuzhet_index=1),
            ],
            locations=[Location(id="LOC_GATE"), Location(id="LOC_KEEP"),
                       Location(id="LOC_TOWER")],
            causal_topology=[CausalEdge(
                source_id="EVT_OMEN", target_id="EVT_STRIKE",
                causality_type="chain_reaction", mechanism="physical",
                evidence_strength="moderate", causal_force=8.0,
                fabula_time=100)],
            spatial_topology=spatial,
            social_topology=[RelationshipEdge(
                source_id="ENT_VILLAIN", target_id="ENT_HERO",
                metrics={"affinity": AxisMetric(value=-0.5, inertia=0.5)})],
        )

    base = 0.85 * 0.4 * 1.1  # salience * inbound weight * one-seen-cause bump
    # Two rooms away through a locked gate: locks don't stretch distance.
    rho = math.exp(-100 / 600.0) * math.exp(-2 / 4.0)
    cell = threat_hope_masses(build("LOC_GATE"), ["ENT_HERO"], 0)
    assert cell["ENT_HERO"]["physical"]["threat"] == pytest.approx(base * rho,
                                                                   abs=1e-12)
    # Unreachable danger exerts no pull at all.
    assert threat_hope_masses(build("LOC_GATE", connected=False),
                              ["ENT_HERO"], 0) == {}


def test_suspense_unknown_focal_rejected():
    with pytest.raises(UnknownNodeError):
        score_suspense(macbeth_world(), ["ENT_NOBODY"], 4)


def _beta_cell_oracle(prior_threat, prior_hope, outcomes):
    a0 = 1 + Fraction(prior_threat)
    b0 = 1 + Fraction(prior_hope)
    mu0 = a0 / (a0 + b0)
    rho_total = sum((Fraction(r) for _, _, r in outcomes), Fraction(0))
    if rho_total <= 0:
        return 0.0
    spread = Fraction(0)
    for mass, lands_threat, rho in outcomes:
        m = Fraction(mass)
        mu = (a0 + m) / (a0 + b0 + m) if lands_threat else a0 / (a0 + b0 + m)
        spread += (Fraction(rho) / rho_total) * (mu - mu0) ** 2
    total = sum((Fraction(m) for m, _, _ in outcomes), Fraction(0))
    worst = max(((a0 + total) / (a0 + b0 + total) - mu0) ** 2,
                (a0 / (a0 + b0 + total) - mu0) ** 2)
    if worst <= 0:
        return 0.0
    return float(min(Fraction(1), spread / worst))


def test_beta_cell_degenerate_inputs():
    assert beta_surprise_cell(1.0, 1.0, []) == 0.0
    assert beta_surprise_cell(1.0, 1.0, [(0.5, True, 0.0)]) == 0.0


def test_beta_cell_seeded_sweep_against_exact_arithmetic():
    rng = random.Random(0xBE7A)
    checked = 0
    for _ in range(130):
        prior_t = rng.uniform(0.0, 4.0)
        prior_h = rng.uniform(0.0, 4.0)
        outcomes = [(rng.uniform(0.01, 2.5), rng.random() < 0.5,
                     rng.uniform(0.0, 1.0))
                    for _ in range(rng.randint(1, 5))]
        got = beta_surprise_cell(prior_t, prior_h, outcomes)
        assert abs(got - _beta_cell_oracle(prior_t, prior_h, outcomes)) <= 1e-9
        assert 0.0 <= got <= 1.0
        checked += 1
    assert checked >= 100


@given(
    prior_t=st.floats(0.0, 5.0, allow_nan=False),
    prior_h=st.floats(0.0, 5.0, allow_nan=False),
    outcomes=st.lists(
        st.tuples(st.floats(0.01, 3.0, allow_nan=False), st.booleans(),
                  st.floats(0.0, 1.0, allow_nan=False)),
        max_size=6),
)
@hyp_settings(deadline=None)
def test_beta_cell_bounded_and_exact(prior_t, prior_h, outcomes):
    got = beta_surprise_cell(prior_t, prior_h, outcomes)
    assert 0.0 <= got <= 1.0
    assert abs(got - _beta_cell_oracle(prior_t, prior_h, outcomes)) <= 1e-9


# -- surprise -------------------------------------------------------------------


def _solo_world(*, edge: bool = False, order: str = "straight") -> WorldState:
    """One self-narrating entity, two scenes, optionally one revealed cause;
    ``order`` flips the telling against story time."""
    straight = order == "straight"
    events = [
        EventNode(id="EVT_OPENING", actor_ids=["ENT_SOLO"],
                  location_id="LOC_DEN", fabula_time=100,
                  syuzhet_index=0 if straight else 1),
        EventNode(id="EVT_CLOSING", actor_ids=["ENT_SOLO"],
                  location_id="LOC_DEN", fabula_time=200,
                  syuzhet_index=1 if straight else 0),
    ]
    causal = []
    if edge:
        causal.append(CausalEdge(
            source_id="EVT_CLOSING", target_id="ENT_SOLO",
            causality_type="mutation", trait_target="wit", trait_delta=0.1,
            evidence_strength="moderate", causal_force=8.0, fabula_time=200))
    return WorldState(
        entities=[Entity(id="ENT_SOLO", location_id="LOC_DEN",
                         traits={"wit": TraitVector(value=0.8, inertia=0.5)})],
        events=events,
        locations=[Location(id="LOC_DEN")],
        causal_topology=causal,
    )


def test_surprise_without_anchor_is_zero():
    assert score_surprise(macbeth_world(), ["ENT_MACBETH"], None) == 0.0


def test_surprise_cumulative_exact_and_shrinking():
    world = _solo_world(edge=True)
    # Before the cause is told the audience sits at the 0.5 seed; after,
    # the revealed edge pulls the implied estimate toward the truth.
    early = score_surprise(world, ["ENT_SOLO"], 0)
    late = score_surprise(world, ["ENT_SOLO"], 1)
    kl_early = binary_kl(0.8, 0.5)
    q_late = (1.0 + 0.4 * 0.8) / (2.0 + 0.4)
    kl_late = binary_kl(0.8, q_late)
    assert early == pytest.approx(0.7 * (1.0 - math.exp(-kl_early)), abs=1e-12)
    assert late == pytest.approx(0.7 * (1.0 - math.exp(-kl_late)), abs=1e-12)
    assert late < early


def test_surprise_anachrony_component_exact():
    # A trait-less narrator isolates the reorder term.
    bare = Entity(id="ENT_SOLO", location_id="LOC_DEN")
    for order, expected in (("straight", 0.0), ("flipped", 0.3)):
        world = _solo_world(order=order).model_copy(update={"entities": [bare]})
        assert score_surprise(world, ["ENT_SOLO"], 1) == pytest.approx(
            expected, abs=1e-12)


def test_surprise_partial_flashback_anachrony():
    bare = Entity(id="ENT_SOLO", location_id="LOC_DEN")
    events = [
        EventNode(id="EVT_LATE", actor_ids=["ENT_SOLO"], location_id="LOC_DEN",
                  fabula_time=300, syuzhet_index=0),
        EventNode(id="EVT_FIRST", actor_ids=["ENT_SOLO"], location_id="LOC_DEN",
                  fabula_time=100, syuzhet_index=1),
        EventNode(id="EVT_MIDDLE", actor_ids=["ENT_SOLO"], location_id="LOC_DEN",
                  fabula_time=200, syuzhet_index=2),
    ]
    world = WorldState(entities=[bare], events=events,
                       locations=[Location(id="LOC_DEN")])
    # Rank displacement 2 + 1 + 1 over n(n-1) = 6.
    assert score_surprise(world, ["ENT_SOLO"], 2) == pytest.approx(
        0.3 * (4.0 / 6.0), abs=1e-12)


def test_surprise_linear_telling_has_no_reorder_shock():
    world = linear_telling_world()
    cfg = ScorerSettings(surprise_trait_kl_weight=0.0)
    for t_s in range(6):
        assert score_surprise(world, ["ENT_PILGRIM"], t_s, cfg) == 0.0


def test_surprise_local_mode():
    world = _solo_world(edge=True)
    assert score_surprise(world, ["ENT_SOLO"], 1, mode="local",
                          prev_t_s=1) == 0.0
    jolt = score_surprise(world, ["ENT_SOLO"], 1, mode="local", prev_t_s=0)
    q0 = 0.5
    q1 = (1.0 + 0.4 * 0.8) / (2.0 + 0.4)
    # One event falls in the window and it is told in order: no anachrony.
    assert jolt == pytest.approx(0.7 * (1.0 - math.exp(-binary_kl(q1, q0))),
                                 abs=1e-12)


def test_surprise_unknown_focal_rejected():
    with pytest.raises(UnknownNodeError):
        score_surprise(macbeth_world(), ["ENT_NOBODY"], 4)


def test_trait_divergence_table_non_increasing_everywhere():
    for world, focals in ((macbeth_world(), MACBETH_CAST),
                          (linear_telling_world(),
                           ["ENT_PILGRIM", "ENT_COMPANION", "ENT_STRANGER"])):
        last_anchor = max(e.syuzhet_index for e in world.events)
        previous = None
        for t_s in range(last_anchor + 1):
            table = trait_kl_magnitudes(world, focals, t_s)
            for focal, traits in table.items():
                for trait, kl in traits.items():
                    assert kl >= 0.0
                    if previous is not None:
                        assert kl <= previous[focal][trait] + 1e-12
            previous = table


def test_binary_kl_clamps_and_zeroes():
    assert binary_kl(0.3, 0.3) == 0.0
    assert binary_kl(0.0, 0.5) == binary_kl(0.01, 0.5)
    assert binary_kl(1.0, 0.5) == binary_kl(0.99, 0.5)
    assert binary_kl(0.8, 0.2) > 0.0


@given(p=st.floats(0.0, 1.0, allow_nan=False), q=st.floats(0.0, 1.0, allow_nan=False))
@hyp_settings(deadline=None)
def test_binary_kl_non_negative(p, q):
    assert binary_kl(p, q) >= 0.0


# -- emotion -------------------------------------------------------------------


def test_emotion_no_carried_traits_reads_full():
    assert score_emotion(macbeth_world(), "ENT_DUNCAN", "grief") == 1.0


def test_emotion_supporting_traits_read_directly():
    world = macbeth_world()
    assert score_emotion(world, "ENT_MACDUFF", "grief") == pytest.approx(0.8)
    assert score_emotion(world, "ENT_MACDUFF", "rage") == pytest.approx(0.9)


def test_emotion_inhibiting_traits_invert():
    world = macbeth_world()
    # Terminal usurper: paranoia 0.6 supports fear, courage 0.85 resists it.
    assert score_emotion(world, "ENT_MACBETH", "fear") == pytest.approx(
        (0.6 + (1.0 - 0.85)) / 2.0)
    assert score_emotion(world, "ENT_MACDUFF", "joy") == pytest.approx(
        1.0 - 0.8)


def test_emotion_respects_anchor():
    world = macbeth_world()
    assert score_emotion(world, "ENT_MACBETH", "regret",
                         anchor_fabula=400) == pytest.approx(0.1)
    assert score_emotion(world, "ENT_MACBETH", "regret") == pytest.approx(0.7)


def test_emotion_unknown_shape_rejected():
    with pytest.raises(QueryError):
        score_emotion(macbeth_world(), "ENT_MACBETH", "melancholy")


def test_emotion_unknown_entity_rejected():
    with pytest.raises(UnknownNodeError):
        score_emotion(macbeth_world(), "ENT_NOBODY", "grief")


# -- bundle -------------------------------------------------------------------


def test_score_all_names_and_bounds():
    report = score_all(macbeth_world(), ["ENT_MACBETH", "ENT_MACDUFF"], 6,
                       ScorerSettings())
    assert set(report) == set(SCORE_NAMES)
    assert all(0.0 <= v <= 1.0 for v in report.values())


def test_score_all_matches_single_scorers():
    world = macbeth_world()
    focals = ["ENT_DUNCAN"]
    report = score_all(world, focals, 4)
    assert report["mystery"] == score_mystery(world, focals, 4)
    assert report["suspense"] == score_suspense(world, focals, 4)
    assert report["surprise"] == score_surprise(world, focals, 4)
    assert report["dramatic_irony"] == score_dramatic_irony(world, focals, 4)


def test_score_all_averages_emotions_at_the_reveal_frontier():
    world = macbeth_world()
    report = score_all(world, ["ENT_MACDUFF", "ENT_DUNCAN"], 13)
    assert report["emotion_grief"] == pytest.approx((0.8 + 1.0) / 2.0)
    assert report["emotion_rage"] == pytest.approx((0.9 + 1.0) / 2.0)


def test_score_all_without_anchor():
    report = score_all(macbeth_world(), ["ENT_MACBETH"], None)
    for name in ("mystery", "dramatic_irony", "suspense", "surprise"):
        assert report[name] == 0.0


@given(
    t_s=st.integers(min_value=-1, max_value=20),
    focals=st.lists(st.sampled_from(MACBETH_CAST), min_size=1, max_size=3,
                    unique=True),
)
@hyp_settings(deadline=None, max_examples=60)
def test_score_all_bounded_for_any_anchor(t_s, focals):
    report = score_all(macbeth_world(), focals, t_s)
    assert set(report) == set(SCORE_NAMES)
    for name, value in report.items():
        assert 0.0 <= value <= 1.0, (name, value)


def test_evenly_spaced_anchor_grid():
    world = macbeth_world()
    assert evenly_spaced_anchors(world, 12) == [0, 1, 2, 4, 5, 6, 7, 8, 9,
                                                11, 12, 13]
    assert evenly_spaced_anchors(world, 1) == [13]
    assert evenly_spaced_anchors(world, 0) == []
    assert evenly_spaced_anchors(WorldState(), 4) == []
    assert evenly_spaced_anchors(linear_telling_world(), 3) == [0, 2, 5]


def test_sample_trajectory_reports():
    world = macbeth_world()
    anchors = evenly_spaced_anchors(world, 12)
    reports = sample_trajectory(world, ["ENT_DUNCAN"], anchors)
    assert [r.anchor_syuzhet for r in reports] == anchors
    assert all(isinstance(r, ScoreReport) for r in reports)
    mystery = [r.scores["mystery"] for r in reports]
    assert mystery[:3] == [1.0, 1.0, 1.0]
    assert mystery[-6:] == [0.0] * 6
    for report, anchor in zip(reports, anchors):
        assert report.scores == score_all(world, ["ENT_DUNCAN"], anchor)
