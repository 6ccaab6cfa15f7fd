// The only numeric transformation the UI performs: percentage rendering.
// Everything else is displayed exactly as the payload carries it.

export function formatPercent(fraction: number): string {
  return `${(fraction * 100).toFixed(1)}%`;
}

export function formatWeight(value: number): string {
  return value.toFixed(2);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

// payload numbers pass through String() untouched so the DOM shows exactly
// what the service sent
export function raw(value: number): string {
  return String(value);
}
