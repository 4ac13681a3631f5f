// Thin typed client for the triage service. The server is the source of
// truth: nothing here recomputes scores or reorders what it returns.

import type { AlertStatus, Metrics, QueueEntry, ResolutionBody } from './types.js';

export class ConflictError extends Error {
  constructor(public alertId: string) {
    super(`alert ${alertId} already resolved`);
  }
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private token?: string,
    private fetchFn: typeof fetch = fetch,
  ) {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers['Content-Type'] = 'application/json';
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    return headers;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (response.status === 409) {
      throw new ConflictError(path.split('/')[3] ?? '');
    }
    if (!response.ok) {
      throw new ApiError(response.status, `${init?.method ?? 'GET'} ${path} -> ${response.status}`);
    }
    return (await response.json()) as T;
  }

  getQueue(tenant?: string, limit?: number): Promise<QueueEntry[]> {
    const params = new URLSearchParams();
    if (tenant) params.set('tenant', tenant);
    if (limit) params.set('limit', String(limit));
    const qs = params.toString();
    return this.request(`/v1/queue${qs ? `?${qs}` : ''}`, { headers: this.headers() });
  }

  getAlert(alertId: string): Promise<AlertStatus> {
    return this.request(`/v1/alerts/${encodeURIComponent(alertId)}`, {
      headers: this.headers(),
    });
  }

  getMetrics(): Promise<Metrics> {
    return this.request('/v1/metrics', { headers: this.headers() });
  }

  submitResolution(alertId: string, body: ResolutionBody): Promise<{ status: string }> {
    return this.request(`/v1/alerts/${encodeURIComponent(alertId)}/resolution`, {
      method: 'POST',
      headers: this.headers(true),
      body: JSON.stringify(body),
    });
  }

  streamUrl(): string {
    return `${this.baseUrl}/v1/queue/stream`;
  }

  streamHeaders(): Record<string, string> {
    return this.headers();
  }
}
