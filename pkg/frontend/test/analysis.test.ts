import { describe, expect, it } from 'vitest';

import {
  nextProgress,
  renderAnalysis,
  renderLeaderboard,
  renderPullBars,
  renderSavings,
} from '../src/analysis.js';
import type { ExperimentRecord } from '../src/types.js';

const record: ExperimentRecord = {
  id: 'abc123',
  status: 'done',
  progress: 1,
  pulls_completed: 180,
  pulls_budget: 180,
  repetitions_done: 3,
  repetitions: 3,
  leaderboard: [
    { arm: 2, id: 'm002', estimated_value: 0.730093636, accuracy: 0.41, pulls: 94, size_mb: 88.25, complexity_mmac: 1234.5 },
    { arm: 0, id: 'm000', estimated_value: 0.61, accuracy: 0.3, pulls: 56, size_mb: 300.5, complexity_mmac: 9000 },
    { arm: 1, id: 'm001', estimated_value: 0.42, accuracy: 0.22, pulls: 30, size_mb: 22, complexity_mmac: 229 },
  ],
  eval_savings: 0.859154,
  compute_savings_mmac: 0.912345,
  report: null,
  error: null,
};

describe('leaderboard rendering', () => {
  it('keeps rows in payload (ranking) order', () => {
    const html = renderLeaderboard(record);
    const first = html.indexOf('m002');
    const second = html.indexOf('m000');
    const third = html.indexOf('m001');
    expect(first).toBeGreaterThan(-1);
    expect(first).toBeLessThan(second);
    expect(second).toBeLessThan(third);
  });

  it('shows the payload numbers untouched', () => {
    const html = renderLeaderboard(record);
    expect(html).toContain('0.730093636');
    expect(html).toContain('88.25');
    expect(html).toContain('1234.5');
    expect(html).toContain('>94<');
  });
});

describe('pull bars', () => {
  it('orders bars by arm index and shows raw counts', () => {
    const html = renderPullBars(record);
    expect(html.indexOf('m000')).toBeLessThan(html.indexOf('m001'));
    expect(html.indexOf('m001')).toBeLessThan(html.indexOf('m002'));
    expect(html).toContain('>56<');
  });
});

describe('savings rendering', () => {
  it('formats the documented example as 85.9%', () => {
    const html = renderSavings(record);
    expect(html).toContain('85.9%');
    expect(html).toContain('91.2%');
  });

  it('handles records before the first repetition', () => {
    const html = renderSavings({ ...record, eval_savings: null, compute_savings_mmac: null });
    expect(html).toContain('after the first repetition');
  });
});

describe('analysis view', () => {
  it('surfaces failure text', () => {
    const html = renderAnalysis({ ...record, status: 'failed', error: 'trace miss for (m, s)' }, 0.4);
    expect(html).toContain('Experiment failed');
    expect(html).toContain('trace miss');
  });

  it('renders all sections for a finished record', () => {
    const html = renderAnalysis(record, 1);
    expect(html).toContain('Top models');
    expect(html).toContain('Evaluations per model');
    expect(html).toContain('Computational savings');
    expect(html).toContain('100.0%');
  });
});

describe('progress monotonicity guard', () => {
  it('never moves backwards across polls', () => {
    let shown = 0;
    for (const incoming of [0.1, 0.4, 0.35, 0.4, 0.9, 0.85, 1.0]) {
      const next = nextProgress(shown, incoming);
      expect(next).toBeGreaterThanOrEqual(shown);
      shown = next;
    }
    expect(shown).toBe(1.0);
  });
});
