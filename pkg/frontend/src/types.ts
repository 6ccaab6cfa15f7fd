// Service payload shapes. Mirrors the JSON the API returns; the UI never
// computes numbers of its own beyond percentage formatting.

export interface Weights {
  accuracy: number;
  size: number;
  complexity: number;
}

export interface WeightProposal {
  kind: 'weight_proposal';
  weights: Weights;
  justification: string;
  provenance: 'llm' | 'fallback';
  samples_used: number;
  per_metric_stddev: Record<string, number>;
  clamped: boolean;
}

export interface LeaderboardRow {
  arm: number;
  id: string;
  estimated_value: number;
  accuracy: number;
  pulls: number;
  size_mb: number;
  complexity_mmac: number;
}

export interface ExperimentRecord {
  id: string;
  status: 'pending' | 'running' | 'done' | 'failed';
  progress: number;
  pulls_completed: number;
  pulls_budget: number;
  repetitions_done: number;
  repetitions: number;
  leaderboard: LeaderboardRow[];
  eval_savings: number | null;
  compute_savings_mmac: number | null;
  report: Record<string, unknown> | null;
  error: string | null;
}

export interface ExperimentRequest {
  pool_ref: string;
  trace_ref: string;
  strategy: string;
  budget: number;
  weights: Weights;
  seed: number;
  epsilon: number;
  repetitions: number;
}

export interface FixtureMeta {
  name: string;
  kind: 'pool' | 'trace';
  sha256: string;
}
