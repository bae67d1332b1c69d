"""fabula — versioned storyworld graphs with causal and affective physics.

Stories live as typed graphs (entities, events, locations, objects,
channels, world traits, plus causal/social/spatial edge layers).  Two
engines run over them: a three-rung causal engine (observe, intervene,
counterfactual with abduction) and a set of closed-form reader-affect
scorers.  Directive assembly sits on top, ranking candidate next beats and
emitting typed creative briefs.  Snapshots version into a one-root tree
with shadow branches for counterfactual worlds.
"""

from .amwn import (
    AmwnGraph,
    CausalDiagram,
    PreflightReport,
    build_amwn,
    build_causal_diagram,
    is_d_separated,
    preflight,
)
from .causal_physics import (
    MECHANISM_TRAIT_MAP,
    BlockedImpulse,
    CausalPhysicsResult,
    CounterfactualQuery,
    HiddenDelta,
    InterventionQuery,
    InterventionSpec,
    Mutation,
    ObservationQuery,
    PhysicsSettings,
    abduce,
    apply_do,
    blend,
    execute,
    materialize_result_world,
    propagate,
    result_json,
)
from .directive_assembly import (
    CandidateEvaluation,
    CandidateEventSpec,
    ConformanceReport,
    CreativeBrief,
    Directive,
    GateCheck,
    TraitEnvelope,
    assemble_brief,
    check_conformance,
    evaluate_candidates,
)
from .ego_graph import EgoPayload, Sandbox, TraitState, create_sandbox, slice_ego_graph
from .errors import (
    FabulaError,
    InvalidWorldError,
    QueryError,
    UnknownNodeError,
    VersionGraphError,
)
from .fixtures import linear_telling_world, macbeth_world, three_cause_discovery_world
from .narrative_physics import (
    EFFECT_TRAITS,
    HARM_SALIENCE,
    SCORE_NAMES,
    ScoreReport,
    ScorerSettings,
    beta_surprise_cell,
    binary_kl,
    evenly_spaced_anchors,
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
from .version_store import (
    TraitChange,
    VersionRow,
    VersionStore,
    WorldDiff,
    check_tree,
    diff_worlds,
)
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
    ValidationReport,
    WorldState,
    WorldTraitDelta,
    canonical_world_json,
    dump_world,
    edge_weight,
    family_of,
    load_world,
    reconstruct_entity,
    reconstruct_world_trait,
    terminal_actual,
    terminal_fabula,
    validate_world,
)

__version__ = "0.1.0"
