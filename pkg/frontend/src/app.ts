// DOM wiring for the analyst console: a live queue table, a detail pane
// with the score and its top feature impacts, and the action form that
// feeds analyst decisions back to the service.

import { ApiClient, ConflictError } from './api.js';
import { badgeClass, formatAge, impactBars, scoreBadge } from './format.js';
import { SseClient } from './sse.js';
import {
  ActionFormState,
  applyConnection,
  applyRefresh,
  applySelect,
  applyStreamEvent,
  canSubmit,
  emptyForm,
  initialState,
  QueueState,
  toResolutionBody,
} from './state.js';
import type { QueueEntry, StreamEvent } from './types.js';

export class ConsoleApp {
  state: QueueState = initialState();
  form: ActionFormState = emptyForm();
  private sse: SseClient | null = null;
  private refreshTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private now: () => number = () => Date.now() / 1000,
  ) {}

  async start(): Promise<void> {
    this.render();
    await this.refresh();
    this.sse = new SseClient(
      this.api.streamUrl(),
      {
        onEvent: (data) => this.onStreamEvent(JSON.parse(data) as StreamEvent),
        onStatus: (connected) => {
          this.state = applyConnection(this.state, connected);
          if (connected) void this.refresh();
          this.render();
        },
      },
      this.api.streamHeaders(),
    );
    this.sse.start();
  }

  stop(): void {
    this.sse?.stop();
  }

  async refresh(): Promise<void> {
    const rows = await this.api.getQueue();
    this.state = applyRefresh(this.state, rows);
    this.render();
  }

  private scheduleReconcile(): void {
    // stream events mutate local state immediately; a trailing refresh
    // keeps the server authoritative without hammering it
    if (this.refreshTimer) clearTimeout(this.refreshTimer);
    this.refreshTimer = setTimeout(() => void this.refresh(), 400);
  }

  onStreamEvent(event: StreamEvent): void {
    this.state = applyStreamEvent(this.state, event);
    this.render();
    this.scheduleReconcile();
  }

  select(alertId: string | null): void {
    this.state = applySelect(this.state, alertId);
    this.form = emptyForm();
    this.render();
  }

  setAction(action: ActionFormState['action']): void {
    this.form = { ...this.form, action };
    this.render();
  }

  setLabel(label: ActionFormState['label']): void {
    this.form = { ...this.form, label };
    this.render();
  }

  async submit(): Promise<void> {
    const alertId = this.state.selected;
    if (!alertId || !canSubmit(this.form)) return;
    const body = toResolutionBody(this.form);
    this.form = { ...this.form, submitting: true };
    this.render();
    let message: string | null = null;
    try {
      await this.api.submitResolution(alertId, body);
      this.state = applyStreamEvent(this.state, { type: 'removed', alert_id: alertId });
      this.form = emptyForm();
    } catch (error) {
      if (error instanceof ConflictError) {
        // already resolved elsewhere: the server state wins
        this.state = applyStreamEvent(this.state, { type: 'removed', alert_id: alertId });
        this.form = emptyForm();
        message = 'Alert was already resolved';
      } else {
        this.form = { ...this.form, submitting: false };
        message = `Action failed: ${String(error)}`;
      }
    }
    this.render();
    if (message) this.toast(message);
    this.scheduleReconcile();
  }

  toast(message: string): void {
    const el = this.root.querySelector('.toast');
    if (el) {
      el.textContent = message;
      el.classList.add('visible');
      setTimeout(() => el.classList.remove('visible'), 4000);
    }
  }

  selectedEntry(): QueueEntry | null {
    return this.state.rows.find((r) => r.alert_id === this.state.selected) ?? null;
  }

  render(): void {
    const banner = this.state.connected
      ? ''
      : '<div class="banner" data-testid="stale-banner">Connection lost, data may be stale. Reconnecting...</div>';
    const rows = this.state.rows
      .map((entry) => {
        const selected = entry.alert_id === this.state.selected ? ' selected' : '';
        const sampled = entry.sampled_for_review
          ? '<span class="sampled-flag" title="sampled for review">review</span>'
          : '';
        return `
          <tr class="queue-row${selected}" data-alert-id="${entry.alert_id}">
            <td><span class="badge ${badgeClass(entry.threat_score)}">${scoreBadge(entry.threat_score)}</span></td>
            <td class="category">${escapeHtml(entry.category)}</td>
            <td>${escapeHtml(entry.tenant)}</td>
            <td>${formatAge(entry.created_at, this.now())}</td>
            <td>${sampled}</td>
          </tr>`;
      })
      .join('');
    const table = `
      <table class="queue" data-testid="queue-table">
        <thead><tr><th>Score</th><th>Category</th><th>Tenant</th><th>Age</th><th></th></tr></thead>
        <tbody>${rows}</tbody>
      </table>`;
    this.root.innerHTML = `
      ${banner}
      <div class="layout">
        <section class="queue-pane">
          <h2>Alert queue (${this.state.rows.length})</h2>
          ${table}
        </section>
        <section class="detail-pane" data-testid="detail-pane">
          ${this.renderDetail()}
        </section>
      </div>
      <div class="toast"></div>`;
    this.bind();
  }

  private renderDetail(): string {
    const entry = this.selectedEntry();
    if (!entry) return '<p class="hint">Select an alert to triage it.</p>';
    const bars = impactBars(entry.top_features);
    let explanation: string;
    if (entry.top_features.length === 0) {
      explanation = '<p class="hint">No attribution available; score only.</p>';
    } else if (bars.length === 0) {
      explanation = '<p class="hint" data-testid="no-dominant">No dominant feature.</p>';
    } else {
      explanation = bars
        .map(
          (bar) => `
            <div class="impact-row" data-testid="impact-row">
              <span class="impact-name">${escapeHtml(bar.name)}</span>
              <div class="impact-bar ${bar.direction}" style="width:${bar.widthPercent.toFixed(0)}%"></div>
              <span class="impact-value">${bar.contribution >= 0 ? '+' : ''}${bar.contribution.toFixed(3)}</span>
            </div>`,
        )
        .join('');
    }
    const entities = entry.entities.length
      ? entry.entities.map((e) => `<li>${escapeHtml(e)}</li>`).join('')
      : '<li class="hint">none</li>';
    const disabled = canSubmit(this.form) ? '' : 'disabled';
    const checked = (value: string, current: string | null) =>
      value === current ? 'checked' : '';
    return `
      <h2>
        <span class="badge ${badgeClass(entry.threat_score)}" data-testid="detail-badge">${scoreBadge(entry.threat_score)}</span>
        ${escapeHtml(entry.category)}
        ${entry.sampled_for_review ? '<span class="sampled-flag">sampled for review</span>' : ''}
      </h2>
      <div class="impacts" data-testid="impacts">${explanation}</div>
      <h3>Entities</h3>
      <ul class="entities">${entities}</ul>
      <form class="action-form" data-testid="action-form">
        <fieldset>
          <label><input type="radio" name="action" value="investigate" ${checked('investigate', this.form.action)}> Investigate</label>
          <label><input type="radio" name="action" value="close" ${checked('close', this.form.action)}> Close</label>
        </fieldset>
        <fieldset>
          <label><input type="radio" name="label" value="malicious" ${checked('malicious', this.form.label)}> Malicious</label>
          <label><input type="radio" name="label" value="benign" ${checked('benign', this.form.label)}> Benign</label>
        </fieldset>
        <button type="submit" data-testid="submit-action" ${disabled}>Submit</button>
      </form>`;
  }

  private bind(): void {
    this.root.querySelectorAll('.queue-row').forEach((row) => {
      row.addEventListener('click', () => {
        this.select((row as HTMLElement).dataset['alertId'] ?? null);
      });
    });
    this.root.querySelectorAll('input[name="action"]').forEach((input) => {
      input.addEventListener('change', () => {
        this.setAction((input as HTMLInputElement).value as ActionFormState['action']);
      });
    });
    this.root.querySelectorAll('input[name="label"]').forEach((input) => {
      input.addEventListener('change', () => {
        this.setLabel((input as HTMLInputElement).value as ActionFormState['label']);
      });
    });
    const form = this.root.querySelector('.action-form');
    form?.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.submit();
    });
  }
}

function escapeHtml(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;');
}
