import { escapeHtml, formatWeight } from './format.js';
import type { ExperimentRequest, Weights, WeightProposal } from './types.js';

// Weight sliders move in steps of 0.01 and display two decimals; the values
// they hold are posted to the service verbatim.
export const SLIDER_STEP = 0.01;

export interface StagingState {
  prompt: string;
  weights: Weights;
  justification: string;
  provenance: string;
  poolRef: string;
  traceRef: string;
  strategy: string;
  budget: number;
  seed: number;
  epsilon: number;
  repetitions: number;
}

export function initialStagingState(): StagingState {
  return {
    prompt: '',
    weights: { accuracy: 0.34, size: 0.33, complexity: 0.33 },
    justification: '',
    provenance: '',
    poolRef: '',
    traceRef: '',
    strategy: 'thompson',
    budget: 2000,
    seed: 0,
    epsilon: 0.1,
    repetitions: 1,
  };
}

export function applyProposal(state: StagingState, proposal: WeightProposal): StagingState {
  return {
    ...state,
    weights: { ...proposal.weights },
    justification: proposal.justification,
    provenance: proposal.provenance,
  };
}

export function setWeight(state: StagingState, metric: keyof Weights, value: number): StagingState {
  return { ...state, weights: { ...state.weights, [metric]: value } };
}

export interface Validation {
  ok: boolean;
  message: string;
}

export function validateStaging(state: StagingState): Validation {
  const { accuracy, size, complexity } = state.weights;
  if (accuracy === 0 && size === 0 && complexity === 0) {
    return { ok: false, message: 'at least one weight must be above zero' };
  }
  for (const [name, v] of Object.entries(state.weights)) {
    if (!(v >= 0 && v <= 1)) return { ok: false, message: `${name} weight must be in [0, 1]` };
  }
  if (!Number.isInteger(state.budget) || state.budget < 0) {
    return { ok: false, message: 'budget must be a nonnegative integer' };
  }
  if (!Number.isInteger(state.repetitions) || state.repetitions < 1) {
    return { ok: false, message: 'repetitions must be a positive integer' };
  }
  if (!state.poolRef || !state.traceRef) {
    return { ok: false, message: 'choose a pool fixture and a trace fixture' };
  }
  return { ok: true, message: '' };
}

// The POST body: slider values pass through untouched.
export function buildExperimentRequest(state: StagingState): ExperimentRequest {
  return {
    pool_ref: state.poolRef,
    trace_ref: state.traceRef,
    strategy: state.strategy,
    budget: state.budget,
    weights: {
      accuracy: state.weights.accuracy,
      size: state.weights.size,
      complexity: state.weights.complexity,
    },
    seed: state.seed,
    epsilon: state.epsilon,
    repetitions: state.repetitions,
  };
}

export function renderWeightSliders(weights: Weights): string {
  const rows = (Object.keys(weights) as (keyof Weights)[])
    .map((metric) => {
      const value = weights[metric];
      return `
      <label class="slider-row" data-metric="${metric}">
        <span class="slider-name">${metric}</span>
        <input type="range" min="0" max="1" step="${SLIDER_STEP}" value="${value}"
               data-weight="${metric}" />
        <span class="slider-value" data-value-for="${metric}">${formatWeight(value)}</span>
      </label>`;
    })
    .join('');
  return `<div class="sliders">${rows}</div>`;
}

export function renderJustification(state: StagingState): string {
  if (!state.justification) return '<p class="muted">No proposal yet.</p>';
  const tag = state.provenance ? ` <span class="tag">${escapeHtml(state.provenance)}</span>` : '';
  return `<p class="justification">${escapeHtml(state.justification)}${tag}</p>`;
}

export function renderValidation(validation: Validation): string {
  return validation.ok ? '' : `<p class="error">${escapeHtml(validation.message)}</p>`;
}
