import pytest

from fabula import (
    CausalEdge,
    Entity,
    EventNode,
    Location,
    TraitVector,
    WorldState,
    linear_telling_world,
    macbeth_world,
    three_cause_discovery_world,
)


def gate_world(inertia: float = 0.7, delta: float = 0.4,
               force: float = 10.0, strength: str = "moderate",
               trait: str = "resolve", mechanism: str = "",
               value: float = 0.2) -> WorldState:
    """One event nudging one trait: the minimal propagation-gate shape."""
    return WorldState(
        entities=[
            Entity(id="ENT_HERO", location_id="LOC_HALL",
                   traits={trait: TraitVector(value=value, inertia=inertia)}),
        ],
        events=[
            EventNode(id="EVT_SHOCK", actor_ids=["ENT_HERO"],
                      location_id="LOC_HALL", fabula_time=100, syuzhet_index=0),
        ],
        locations=[Location(id="LOC_HALL")],
        causal_topology=[
            CausalEdge(source_id="EVT_SHOCK", target_id="ENT_HERO",
                       causality_type="mutation", trait_target=trait,
                       trait_delta=delta, evidence_strength=strength,
                       causal_force=force, mechanism=mechanism,
                       fabula_time=100),
        ],
    )


@pytest.fixture
def macbeth() -> WorldState:
    return macbeth_world()


@pytest.fixture
def linear() -> WorldState:
    return linear_telling_world()


@pytest.fixture
def three_cause() -> WorldState:
    return three_cause_discovery_world()
