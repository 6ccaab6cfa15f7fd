// DOM glue: hash routing, event wiring, the polling loop. All rendering and
// payload construction lives in the pure modules next door.
import { ApiClient } from './api.js';
import {
  nextProgress,
  POLL_INTERVAL_MS,
  renderAnalysis,
} from './analysis.js';
import {
  applyProposal,
  buildExperimentRequest,
  initialStagingState,
  renderJustification,
  renderValidation,
  renderWeightSliders,
  setWeight,
  validateStaging,
  type StagingState,
} from './staging.js';
import type { Weights } from './types.js';

const api = new ApiClient();
let staging: StagingState = initialStagingState();
let pollTimer: number | undefined;
let shownProgress = 0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function readForm(): void {
  staging = {
    ...staging,
    prompt: el<HTMLTextAreaElement>('prompt').value,
    poolRef: el<HTMLSelectElement>('pool-ref').value,
    traceRef: el<HTMLSelectElement>('trace-ref').value,
    strategy: el<HTMLSelectElement>('strategy').value,
    budget: Number(el<HTMLInputElement>('budget').value),
    seed: Number(el<HTMLInputElement>('seed').value),
    epsilon: Number(el<HTMLInputElement>('epsilon').value),
    repetitions: Number(el<HTMLInputElement>('repetitions').value),
  };
}

function renderStaging(): void {
  el('sliders-host').innerHTML = renderWeightSliders(staging.weights);
  el('justification-host').innerHTML = renderJustification(staging);
  const validation = validateStaging(staging);
  el('validation-host').innerHTML = renderValidation(validation);
  el<HTMLButtonElement>('run-button').disabled = !validation.ok;
  for (const input of el('sliders-host').querySelectorAll<HTMLInputElement>('input[data-weight]')) {
    input.addEventListener('input', () => {
      const metric = input.dataset.weight as keyof Weights;
      staging = setWeight(staging, metric, Number(input.value));
      const readout = el('sliders-host').querySelector(`[data-value-for="${metric}"]`);
      if (readout) readout.textContent = Number(input.value).toFixed(2);
      const check = validateStaging(staging);
      el('validation-host').innerHTML = renderValidation(check);
      el<HTMLButtonElement>('run-button').disabled = !check.ok;
    });
  }
}

async function loadFixtures(): Promise<void> {
  const { fixtures } = await api.listFixtures();
  const pools = fixtures.filter((f) => f.kind === 'pool');
  const traces = fixtures.filter((f) => f.kind === 'trace');
  el<HTMLSelectElement>('pool-ref').innerHTML = pools
    .map((f) => `<option value="${f.name}">${f.name}</option>`)
    .join('');
  el<HTMLSelectElement>('trace-ref').innerHTML = traces
    .map((f) => `<option value="${f.name}">${f.name}</option>`)
    .join('');
}

async function onReason(): Promise<void> {
  readForm();
  if (!staging.prompt) {
    el('validation-host').innerHTML = renderValidation({ ok: false, message: 'enter a use-case description first' });
    return;
  }
  el<HTMLButtonElement>('reason-button').disabled = true;
  try {
    const proposal = await api.proposeWeights(staging.prompt);
    staging = applyProposal(staging, proposal);
    renderStaging();
  } catch (error) {
    el('validation-host').innerHTML = renderValidation({ ok: false, message: String(error) });
  } finally {
    el<HTMLButtonElement>('reason-button').disabled = false;
  }
}

async function onRun(): Promise<void> {
  readForm();
  const validation = validateStaging(staging);
  if (!validation.ok) {
    el('validation-host').innerHTML = renderValidation(validation);
    return;
  }
  try {
    const id = await api.createExperiment(buildExperimentRequest(staging));
    window.location.hash = `#/experiments/${id}`;
  } catch (error) {
    el('validation-host').innerHTML = renderValidation({ ok: false, message: String(error) });
  }
}

function stopPolling(): void {
  if (pollTimer !== undefined) {
    window.clearTimeout(pollTimer);
    pollTimer = undefined;
  }
}

async function pollOnce(id: string): Promise<void> {
  try {
    const record = await api.getExperiment(id);
    shownProgress = nextProgress(shownProgress, record.progress);
    el('analysis-host').innerHTML = renderAnalysis(record, shownProgress);
    if (record.status === 'done' || record.status === 'failed') {
      stopPolling();
      return;
    }
  } catch (error) {
    el('analysis-host').innerHTML = `<p class="error">${String(error)}</p>`;
  }
  pollTimer = window.setTimeout(() => void pollOnce(id), POLL_INTERVAL_MS);
}

function route(): void {
  stopPolling();
  const match = window.location.hash.match(/^#\/experiments\/([A-Za-z0-9_-]+)$/);
  const onAnalysis = match !== null;
  el('staging-view').hidden = onAnalysis;
  el('analysis-view').hidden = !onAnalysis;
  if (match) {
    shownProgress = 0;
    el('experiment-id').textContent = match[1];
    void pollOnce(match[1]);
  }
}

export function start(): void {
  el('reason-button').addEventListener('click', () => void onReason());
  el('run-button').addEventListener('click', () => void onRun());
  window.addEventListener('hashchange', route);
  renderStaging();
  void loadFixtures();
  route();
}

start();
