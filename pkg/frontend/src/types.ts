// Payload shapes for the /api endpoints. The UI never computes any of
// these numbers itself; everything here arrives from the service.

export const METRIC_NAMES = [
  "coverage",
  "confidence",
  "interest",
  "surprise",
  "rule_difference",
] as const;

export type MetricName = (typeof METRIC_NAMES)[number];

export interface MetricSpec {
  name: string;
  maximize: boolean;
}

export type Code = number | string;

export interface RunConfig {
  dataset: string;
  population_size: number | null;
  generations: number;
  crossover_rate: number;
  mutation_rate: number;
  metrics: MetricSpec[];
  schema: { pattern: (Code | null)[]; class_code: Code | null } | null;
  agents: { risk_takers: number; imitators: number; cautious: number };
  rng_seed: number;
  train_fraction: number;
  match_threshold: number;
  strict_match_threshold: boolean;
  tks_count_matches: boolean;
  classify_with_all_rules: boolean;
  test_on_train: boolean;
  dks_capacity: number | null;
}

export interface FieldError {
  field: string;
  message: string;
}

export interface CodeInfo {
  code: Code;
  display: string;
  instances?: number;
}

export interface AttributeInfo {
  name: string;
  kind: string;
  codes: CodeInfo[];
}

export interface DatasetInfo {
  name: string;
  instances: number;
  population_default: number;
  attributes: AttributeInfo[];
  class_attribute: { name: string; codes: CodeInfo[] };
}

export interface FrontRule {
  rule_id: number;
  rule: string;
  metrics: Record<string, number>;
}

// /front adds the rendered If-Then text
export interface FrontEntry extends FrontRule {
  text: string;
}

export interface RunHandle {
  run_id: string;
  state: string;
  dataset: string;
  progress: { generations_done: number; generations_total: number };
  latest_front: FrontRule[];
  error: string | null;
}

export interface GenerationEvent {
  generation: number;
  front_size: number;
  rks_size: number;
  front: FrontRule[];
  top_rules: string[];
  elapsed_ms: number;
}

export interface RunSummary {
  run_id: string;
  dataset: string;
  generations_run: number;
  stopped_early: boolean;
  rks_count: number;
  hks_count: number;
  front_size: number;
  accuracy: number;
  train_accuracy: number;
  eval_mode: string;
  elapsed_ms: number;
}

export interface TerminalEvent {
  state: string;
  summary?: RunSummary;
  error?: string;
}

export type StreamEvent =
  | { event: "generation"; data: GenerationEvent }
  | { event: "terminal"; data: TerminalEvent };
