// Queue view state. Rows keep the server's priority order: probability
// descending, enqueue time ascending on ties, unscored entries first,
// alert id as the final tie-break. Stream events splice rows in and out
// using that same total order, and a full refresh from GET /v1/queue
// always wins over locally accumulated state.

import type { ActionChoice, LabelChoice, QueueEntry, StreamEvent } from './types.js';

export function serverOrder(a: QueueEntry, b: QueueEntry): number {
  const aUnscored = a.raw_probability === null ? 0 : 1;
  const bUnscored = b.raw_probability === null ? 0 : 1;
  if (aUnscored !== bUnscored) return aUnscored - bUnscored;
  const aProb = a.raw_probability ?? 0;
  const bProb = b.raw_probability ?? 0;
  if (aProb !== bProb) return bProb - aProb;
  if (a.enqueued_at !== b.enqueued_at) return a.enqueued_at - b.enqueued_at;
  return a.alert_id < b.alert_id ? -1 : a.alert_id > b.alert_id ? 1 : 0;
}

export interface QueueState {
  rows: QueueEntry[];
  connected: boolean;
  selected: string | null;
}

export function initialState(): QueueState {
  return { rows: [], connected: false, selected: null };
}

export function applyRefresh(state: QueueState, rows: QueueEntry[]): QueueState {
  const selected = rows.some((r) => r.alert_id === state.selected)
    ? state.selected
    : null;
  return { ...state, rows, selected };
}

export function applyStreamEvent(state: QueueState, event: StreamEvent): QueueState {
  if (event.type === 'enqueued') {
    const without = state.rows.filter((r) => r.alert_id !== event.entry.alert_id);
    const index = without.findIndex((row) => serverOrder(event.entry, row) < 0);
    const rows = [...without];
    rows.splice(index === -1 ? rows.length : index, 0, event.entry);
    return { ...state, rows };
  }
  if (event.type === 'removed' || event.type === 'closed') {
    const rows = state.rows.filter((r) => r.alert_id !== event.alert_id);
    const selected = state.selected === event.alert_id ? null : state.selected;
    return { ...state, rows, selected };
  }
  return state;
}

export function applyConnection(state: QueueState, connected: boolean): QueueState {
  return { ...state, connected };
}

export function applySelect(state: QueueState, alertId: string | null): QueueState {
  return { ...state, selected: alertId };
}

// -- action form ------------------------------------------------------- //

export interface ActionFormState {
  action: ActionChoice | null;
  label: LabelChoice | null;
  submitting: boolean;
}

export function emptyForm(): ActionFormState {
  return { action: null, label: null, submitting: false };
}

export function canSubmit(form: ActionFormState): boolean {
  if (form.submitting || form.action === null) return false;
  if (form.action === 'close' && form.label === null) return false; // close needs a label
  return true;
}

export function toResolutionBody(form: ActionFormState) {
  if (!canSubmit(form)) throw new Error('form is not submittable');
  return {
    action: form.action === 'investigate' ? 'investigated' : 'not_investigated',
    ...(form.label ? { label: form.label } : {}),
  } as const;
}
