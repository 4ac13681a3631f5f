// @vitest-environment jsdom
import { beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiClient } from './api.js';
import { ConsoleApp } from './app.js';
import { applyConnection, applyRefresh, applySelect } from './state.js';
import type { QueueEntry } from './types.js';

function entry(id: string, probability: number, extra: Partial<QueueEntry> = {}): QueueEntry {
  return {
    alert_id: id,
    tenant: 't0',
    category: `cat-${id}`,
    entities: ['host-1'],
    created_at: 1000,
    enqueued_at: 1000,
    raw_probability: probability,
    threat_score: Math.round(probability * 100) / 10,
    top_features: [
      { name: 'tenant_category_investigation_rate_1d', contribution: 0.4, direction: 'increases' },
      { name: 'entity_investigation_rate_7d', contribution: -0.1, direction: 'decreases' },
    ],
    sampled_for_review: false,
    model_version: 1,
    ...extra,
  };
}

function makeApp() {
  const root = document.createElement('div');
  document.body.appendChild(root);
  const api = new ApiClient('http://svc', undefined, vi.fn());
  const app = new ConsoleApp(root, api, () => 1030);
  return { root, app, api };
}

beforeEach(() => {
  document.body.innerHTML = '';
});

describe('queue table rendering', () => {
  it('renders rows in the exact order held in state (server order)', () => {
    const { root, app } = makeApp();
    app.state = applyRefresh(app.state, [entry('b', 0.92), entry('a', 0.5)]);
    app.render();
    const categories = [...root.querySelectorAll('.queue-row .category')].map(
      (el) => el.textContent,
    );
    expect(categories).toEqual(['cat-b', 'cat-a']);
  });

  it('renders threat score 9.2 as a "9.2" badge', () => {
    const { root, app } = makeApp();
    app.state = applyRefresh(app.state, [entry('a', 0.92)]);
    app.render();
    expect(root.querySelector('.badge')?.textContent).toBe('9.2');
  });

  it('flags sampled rows', () => {
    const { root, app } = makeApp();
    app.state = applyRefresh(app.state, [entry('a', 0.05, { sampled_for_review: true })]);
    app.render();
    expect(root.querySelector('.sampled-flag')).not.toBeNull();
  });

  it('shows the stale banner while disconnected', () => {
    const { root, app } = makeApp();
    app.state = applyConnection(app.state, false);
    app.render();
    expect(root.querySelector('[data-testid="stale-banner"]')).not.toBeNull();
    app.state = applyConnection(app.state, true);
    app.render();
    expect(root.querySelector('[data-testid="stale-banner"]')).toBeNull();
  });
});

describe('detail pane', () => {
  it('shows impact bars sorted by magnitude with entities listed', () => {
    const { root, app } = makeApp();
    app.state = applyRefresh(app.state, [entry('a', 0.92)]);
    app.state = applySelect(app.state, 'a');
    app.render();
    const rows = [...root.querySelectorAll('[data-testid="impact-row"]')];
    expect(rows).toHaveLength(2);
    expect(rows[0]?.textContent).toContain('tenant_category_investigation_rate_1d');
    expect(root.querySelector('.entities')?.textContent).toContain('host-1');
    expect(root.querySelector('[data-testid="detail-badge"]')?.textContent).toBe('9.2');
  });

  it('notes when no feature dominates (all-zero contributions)', () => {
    const { root, app } = makeApp();
    const zero = entry('a', 0.92, {
      top_features: [
        { name: 'x', contribution: 0, direction: 'increases' },
        { name: 'y', contribution: 0, direction: 'increases' },
      ],
    });
    app.state = applyRefresh(app.state, [zero]);
    app.state = applySelect(app.state, 'a');
    app.render();
    expect(root.querySelector('[data-testid="no-dominant"]')).not.toBeNull();
  });

  it('falls back to score-only when attribution is absent', () => {
    const { root, app } = makeApp();
    app.state = applyRefresh(app.state, [entry('a', 0.92, { top_features: [] })]);
    app.state = applySelect(app.state, 'a');
    app.render();
    expect(root.querySelector('[data-testid="impacts"]')?.textContent).toContain(
      'score only',
    );
  });
});

describe('action form', () => {
  function selected() {
    const { root, app } = makeApp();
    app.state = applyRefresh(app.state, [entry('a', 0.92)]);
    app.state = applySelect(app.state, 'a');
    app.render();
    return { root, app };
  }

  it('submit starts disabled and enables once an action is chosen', () => {
    const { root, app } = selected();
    const submit = () =>
      root.querySelector('[data-testid="submit-action"]') as HTMLButtonElement;
    expect(submit().disabled).toBe(true);
    app.setAction('investigate');
    expect(submit().disabled).toBe(false);
  });

  it('close stays disabled until a label is picked', () => {
    const { root, app } = selected();
    const submit = () =>
      root.querySelector('[data-testid="submit-action"]') as HTMLButtonElement;
    app.setAction('close');
    expect(submit().disabled).toBe(true);
    app.setLabel('benign');
    expect(submit().disabled).toBe(false);
  });

  it('successful submit removes the row', async () => {
    const { root, app } = selected();
    vi.spyOn(app['api'], 'submitResolution').mockResolvedValue({ status: 'resolved' });
    app.setAction('investigate');
    app.setLabel('malicious');
    await app.submit();
    expect(root.querySelectorAll('.queue-row')).toHaveLength(0);
  });

  it('conflict refreshes the row away and toasts', async () => {
    const { root, app } = selected();
    const { ConflictError } = await import('./api.js');
    vi.spyOn(app['api'], 'submitResolution').mockRejectedValue(new ConflictError('a'));
    app.setAction('investigate');
    await app.submit();
    expect(root.querySelectorAll('.queue-row')).toHaveLength(0);
    expect(root.querySelector('.toast')?.textContent).toContain('already resolved');
  });

  it('other failures keep the row and toast the error', async () => {
    const { root, app } = selected();
    vi.spyOn(app['api'], 'submitResolution').mockRejectedValue(new Error('boom'));
    app.setAction('investigate');
    await app.submit();
    expect(root.querySelectorAll('.queue-row')).toHaveLength(1);
    expect(root.querySelector('.toast')?.textContent).toContain('failed');
  });
});
