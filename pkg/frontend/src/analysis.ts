import { escapeHtml, formatPercent, raw } from './format.js';
import type { ExperimentRecord } from './types.js';

// Polling cadence for the analysis view; one request in flight at a time.
export const POLL_INTERVAL_MS = 500;

// Progress never goes backwards on screen even if polls race.
export function nextProgress(previous: number, incoming: number): number {
  return Math.max(previous, incoming);
}

export function renderProgress(record: ExperimentRecord, shownProgress: number): string {
  const pct = formatPercent(shownProgress);
  return `
  <div class="progress-row">
    <div class="progress-track"><div class="progress-fill" style="width: ${pct}"></div></div>
    <span class="progress-label">${pct} (${raw(record.pulls_completed)} / ${raw(record.pulls_budget)} evaluations,
      repetition ${raw(record.repetitions_done)} of ${raw(record.repetitions)})</span>
  </div>`;
}

export function renderLeaderboard(record: ExperimentRecord): string {
  if (record.leaderboard.length === 0) {
    return '<p class="muted">No completed repetition yet.</p>';
  }
  const rows = record.leaderboard
    .map(
      (row, index) => `
    <tr>
      <td>${index + 1}</td>
      <td>${escapeHtml(row.id)}</td>
      <td>${raw(row.estimated_value)}</td>
      <td>${raw(row.accuracy)}</td>
      <td>${raw(row.size_mb)}</td>
      <td>${raw(row.complexity_mmac)}</td>
      <td>${raw(row.pulls)}</td>
    </tr>`
    )
    .join('');
  return `
  <table class="leaderboard">
    <thead>
      <tr><th>rank</th><th>model</th><th>estimated value</th><th>accuracy</th>
          <th>size (MB)</th><th>complexity (MMAC)</th><th>evaluations</th></tr>
    </thead>
    <tbody>${rows}</tbody>
  </table>`;
}

export function renderPullBars(record: ExperimentRecord): string {
  if (record.leaderboard.length === 0) return '';
  const byArm = [...record.leaderboard].sort((a, b) => a.arm - b.arm);
  const maxPulls = Math.max(...byArm.map((r) => r.pulls), 1);
  const bars = byArm
    .map(
      (row) => `
    <div class="bar-row">
      <span class="bar-label">${escapeHtml(row.id)}</span>
      <div class="bar" style="width: ${formatPercent(row.pulls / maxPulls)}"></div>
      <span class="bar-count">${raw(row.pulls)}</span>
    </div>`
    )
    .join('');
  return `<div class="pull-bars">${bars}</div>`;
}

export function renderSavings(record: ExperimentRecord): string {
  if (record.eval_savings === null || record.compute_savings_mmac === null) {
    return '<p class="muted">Savings appear after the first repetition.</p>';
  }
  return `
  <div class="savings">
    <div class="saving"><span class="saving-number">${formatPercent(record.eval_savings)}</span>
      of evaluations avoided vs brute force</div>
    <div class="saving"><span class="saving-number">${formatPercent(record.compute_savings_mmac)}</span>
      of MMAC compute avoided vs brute force</div>
  </div>`;
}

export function renderAnalysis(record: ExperimentRecord, shownProgress: number): string {
  if (record.status === 'failed') {
    return `<p class="error">Experiment failed: ${escapeHtml(record.error ?? 'unknown error')}</p>`;
  }
  return `
  <section>${renderProgress(record, shownProgress)}</section>
  <section><h3>Top models</h3>${renderLeaderboard(record)}</section>
  <section><h3>Evaluations per model</h3>${renderPullBars(record)}</section>
  <section><h3>Computational savings</h3>${renderSavings(record)}</section>`;
}
