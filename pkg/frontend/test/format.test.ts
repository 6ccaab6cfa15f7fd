import { describe, expect, it } from 'vitest';

import { escapeHtml, formatPercent, formatWeight, raw } from '../src/format.js';

describe('formatPercent', () => {
  it('renders the documented savings example with one decimal', () => {
    expect(formatPercent(0.859154)).toBe('85.9%');
  });

  it('covers the edges', () => {
    expect(formatPercent(0)).toBe('0.0%');
    expect(formatPercent(1)).toBe('100.0%');
    expect(formatPercent(0.5)).toBe('50.0%');
  });
});

describe('formatWeight', () => {
  it('shows two decimals as the sliders do', () => {
    expect(formatWeight(0.63)).toBe('0.63');
    expect(formatWeight(0.5)).toBe('0.50');
  });
});

describe('raw', () => {
  it('passes payload numbers through unchanged', () => {
    expect(raw(0.730093636)).toBe('0.730093636');
    expect(raw(14200)).toBe('14200');
  });
});

describe('escapeHtml', () => {
  it('neutralizes markup in service-provided text', () => {
    expect(escapeHtml('<b>&"')).toBe('&lt;b&gt;&amp;&quot;');
  });
});
