// Server-sent-events client over fetch streaming, with automatic
// reconnection. Works in browsers and in node (no EventSource needed).

export interface SseHandlers {
  onEvent: (data: string) => void;
  onStatus?: (connected: boolean) => void;
}

export function parseSseChunk(buffer: string): { events: string[]; rest: string } {
  // Events are separated by a blank line; comment lines start with ':'.
  const events: string[] = [];
  const parts = buffer.split('\n\n');
  const rest = parts.pop() ?? '';
  for (const block of parts) {
    const dataLines = block
      .split('\n')
      .filter((line) => line.startsWith('data:'))
      .map((line) => line.slice(5).trimStart());
    if (dataLines.length > 0) events.push(dataLines.join('\n'));
  }
  return { events, rest };
}

export class SseClient {
  private stopped = false;
  private backoffMs = 500;

  constructor(
    private url: string,
    private handlers: SseHandlers,
    private headers: Record<string, string> = {},
    private fetchFn: typeof fetch = fetch,
  ) {}

  start(): void {
    void this.loop();
  }

  stop(): void {
    this.stopped = true;
  }

  private async loop(): Promise<void> {
    while (!this.stopped) {
      try {
        const response = await this.fetchFn(this.url, {
          headers: { ...this.headers, Accept: 'text/event-stream' },
        });
        if (!response.ok || !response.body) {
          throw new Error(`stream request failed: ${response.status}`);
        }
        this.handlers.onStatus?.(true);
        this.backoffMs = 500;
        const reader = response.body.getReader();
        const decoder = new TextDecoder();
        let buffer = '';
        for (;;) {
          const { done, value } = await reader.read();
          if (done || this.stopped) break;
          buffer += decoder.decode(value, { stream: true });
          const { events, rest } = parseSseChunk(buffer);
          buffer = rest;
          for (const data of events) this.handlers.onEvent(data);
        }
      } catch {
        // fall through to reconnect
      }
      if (this.stopped) return;
      this.handlers.onStatus?.(false);
      await new Promise((resolve) => setTimeout(resolve, this.backoffMs));
      this.backoffMs = Math.min(this.backoffMs * 2, 10_000);
    }
  }
}
