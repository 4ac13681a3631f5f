// Payload shapes of the triage service /v1 API.

export interface TopFeature {
  name: string;
  contribution: number;
  direction: 'increases' | 'decreases';
}

export interface QueueEntry {
  alert_id: string;
  tenant: string;
  category: string;
  entities: string[];
  created_at: number;
  enqueued_at: number;
  raw_probability: number | null;
  threat_score: number | null;
  top_features: TopFeature[];
  sampled_for_review: boolean;
  model_version: number;
}

export interface Disposition {
  alert_id: string;
  disposition: 'queued' | 'auto_closed' | 'failed_open';
  raw_probability: number | null;
  threat_score: number | null;
  sampled_for_review: boolean;
  model_version: number;
}

export interface AlertStatus {
  alert_id: string;
  status: 'queued' | 'auto_closed' | 'resolved';
  entry: QueueEntry | null;
}

export interface Metrics {
  scored_total: number;
  auto_closed_total: number;
  sampled_total: number;
  failed_open_total: number;
  alert_reduction: number;
  sampled_fnr: number | null;
  queue_depth: number;
  close_threshold: number;
  model_version: number;
  watermark: number | null;
  p50_ms: number;
  p95_ms: number;
  p99_ms: number;
}

export type StreamEvent =
  | { type: 'enqueued'; entry: QueueEntry }
  | { type: 'removed'; alert_id: string }
  | { type: 'closed'; alert_id: string };

export type ActionChoice = 'investigate' | 'close';
export type LabelChoice = 'malicious' | 'benign';

export interface ResolutionBody {
  action: 'investigated' | 'not_investigated';
  label?: LabelChoice;
  analyst_id?: string;
}
