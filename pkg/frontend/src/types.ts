// Mirrors of the JSON payloads the HTTP API serves. Only the fields the
// workspace actually reads are declared; extra fields pass through untouched.

export interface VersionRow {
  id: string;
  ancestor_id: string | null;
  world_id: "factual" | "shadow";
  source: "ingestion" | "manual_edit" | "pipeline_run" | "promotion";
  created_at: string;
  world_ref: string;
}

export interface VersionListing {
  project_id: string;
  active_id: string | null;
  versions: VersionRow[];
}

export interface Mutation {
  node_id: string;
  trait: string;
  old: number;
  new: number;
  impact: number;
  at_fabula: number;
  counterpart_id: string | null;
}

export interface BlockedImpulse {
  source_id: string;
  target_id: string;
  trait: string | null;
  reason: string;
  impact: number | null;
}

export interface HiddenDelta {
  node_id: string;
  trait: string;
  prior: number;
  posterior: number;
  delta: number;
  counterpart_id: string | null;
}

export interface QueryResult {
  mutations: Mutation[];
  blocked: BlockedImpulse[];
  hidden_deltas: HiddenDelta[];
  intervened_nodes: string[];
  rule1_vacuous_assignments: string[];
  rule2_redundant_evidence: string[];
  rule3_pruned_interventions: string[];
}

export interface TraitVector {
  value: number;
  inertia: number;
}

export interface EntityPayload {
  id: string;
  traits: Record<string, TraitVector>;
  location_id: string | null;
  status: string;
}

export interface EventPayload {
  id: string;
  event_type: string;
  actor_ids: string[];
  target_ids: string[];
  location_id: string | null;
  fabula_time: number;
  syuzhet_index: number;
  weight: number;
}

export interface CausalEdgePayload {
  source_id: string;
  target_id: string;
  causality_type: string;
  trait_target: string | null;
}

export interface WorldPayload {
  world_id: "factual" | "shadow";
  entities: EntityPayload[];
  events: EventPayload[];
  locations: { id: string }[];
  causal_topology: CausalEdgePayload[];
}

export interface ScorePoint {
  anchor_syuzhet: number;
  scores: Record<string, number>;
}

export interface ScoreTrajectory {
  version_id: string;
  focal_ids: string[];
  anchors: number[];
  trajectory: ScorePoint[];
}

export interface WorldDiffPayload {
  nodes_added: Record<string, string[]>;
  nodes_removed: Record<string, string[]>;
  nodes_changed: Record<string, string[]>;
  edges_added: Record<string, string[]>;
  edges_removed: Record<string, string[]>;
  trait_changes: unknown[];
  world_id_change: [string, string] | null;
}
