// Wire types for the explanation service. These mirror the JSON the server
// actually sends; the client never invents fields and never computes verdicts.

export type Cell = [number, number]; // [row, col]

export interface MapEntry {
  map_id: string;
  title: string;
  variants: string[];
  default_variant: string;
}

export interface MapCatalog {
  v: number;
  maps: MapEntry[];
}

export interface SessionConfig {
  budget: number;
  walk_length: number;
  kappa: number;
  threshold: number;
  obs_tp: number;
  obs_fp: number;
  prior: number;
}

export interface HazardState {
  pos: Cell;
  alive: boolean;
  name: string;
}

// Per-step trajectory annotation. `agent` is always present; the rest depends
// on the map family (sokoban exposes box/switch_on, key-quest a hazard).
export interface PlanState {
  agent: Cell;
  box?: Cell;
  switch_on?: boolean;
  hazard?: HazardState;
}

export interface ConceptInfo {
  name: string;
  description: string;
}

export interface MissingPreconditionPayload {
  v: number;
  kind: "missing-precondition";
  concept: string;
  fail_action: string;
  fail_index: number;
  confidence: number;
  samples_used: number;
  threshold_met: boolean;
  trace?: number[]; // present on fresh responses, stripped from stored history
  rivals?: RivalEntry[];
}

export interface RivalEntry {
  concept: string;
  posterior: number;
  eliminated_at: number | null;
}

export interface CostEntryPayload {
  step: number;
  action: string;
  concepts: string[];
  min_cost: number;
  confidence: number;
}

export interface CostAbstractionPayload {
  v: number;
  kind: "cost-abstraction";
  entries: CostEntryPayload[];
  total_abstract_cost: number;
  plan_cost: number;
  foil_cost: number;
  threshold_met: boolean;
}

export interface FoilPreferredPayload {
  v: number;
  kind: "foil-preferred";
  plan_cost: number;
  foil_cost: number;
  threshold_met: boolean;
}

export interface VocabularyInsufficientPayload {
  v: number;
  kind: "vocabulary-insufficient";
  phase: string;
  samples_used: number;
  threshold_met: boolean;
}

export type ExplanationPayload =
  | MissingPreconditionPayload
  | CostAbstractionPayload
  | FoilPreferredPayload
  | VocabularyInsufficientPayload;

export interface HistoryEntry {
  foil: string[];
  explanation: ExplanationPayload;
  rendered_text: string;
}

export interface SessionPayload {
  v: number;
  session_id: string;
  map_id: string;
  variant: string;
  seed: number;
  config: SessionConfig;
  vocabulary: string[];
  obs: { tp: number[]; fp: number[] } | null;
  plan: string[];
  plan_cost: number;
  history: HistoryEntry[];
  grid: string[];
  plan_states: PlanState[];
  vocabulary_info: ConceptInfo[];
}

export interface FoilResponse {
  v: number;
  explanation: ExplanationPayload;
  rendered_text: string;
  confidence: number | null;
  trace: number[] | null;
}

export interface ApiErrorBody {
  detail: unknown;
}
