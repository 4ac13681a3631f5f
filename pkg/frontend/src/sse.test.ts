import { describe, expect, it } from 'vitest';

import { parseSseChunk, SseClient } from './sse.js';

describe('parseSseChunk', () => {
  it('extracts data events and keeps the unterminated tail', () => {
    const { events, rest } = parseSseChunk(
      ': connected\n\ndata: {"a":1}\n\ndata: {"b":2}\n\ndata: {"c"',
    );
    expect(events).toEqual(['{"a":1}', '{"b":2}']);
    expect(rest).toBe('data: {"c"');
  });

  it('ignores comment-only blocks (heartbeats)', () => {
    const { events } = parseSseChunk(': keep-alive\n\n: keep-alive\n\n');
    expect(events).toEqual([]);
  });

  it('joins multi-line data fields', () => {
    const { events } = parseSseChunk('data: line1\ndata: line2\n\n');
    expect(events).toEqual(['line1\nline2']);
  });
});

function streamResponse(chunks: string[], hang = true): Response {
  const encoder = new TextEncoder();
  const body = new ReadableStream<Uint8Array>({
    start(controller) {
      for (const chunk of chunks) controller.enqueue(encoder.encode(chunk));
      if (!hang) controller.close();
    },
  });
  return new Response(body, {
    status: 200,
    headers: { 'Content-Type': 'text/event-stream' },
  });
}

describe('SseClient', () => {
  it('delivers events and reports connection status', async () => {
    const events: string[] = [];
    const statuses: boolean[] = [];
    const client = new SseClient(
      'http://test/stream',
      {
        onEvent: (data) => events.push(data),
        onStatus: (connected) => statuses.push(connected),
      },
      {},
      async () => streamResponse([': connected\n\n', 'data: {"x":1}\n\n']),
    );
    client.start();
    await new Promise((resolve) => setTimeout(resolve, 100));
    client.stop();
    expect(events).toEqual(['{"x":1}']);
    expect(statuses[0]).toBe(true);
  });

  it('reconnects after a dropped stream and flags staleness in between', async () => {
    let call = 0;
    const statuses: boolean[] = [];
    const events: string[] = [];
    const client = new SseClient(
      'http://test/stream',
      {
        onEvent: (data) => events.push(data),
        onStatus: (connected) => statuses.push(connected),
      },
      {},
      async () => {
        call += 1;
        if (call === 1) return streamResponse([': connected\n\n'], false); // closes
        return streamResponse(['data: {"after":"reconnect"}\n\n']);
      },
    );
    client.start();
    await new Promise((resolve) => setTimeout(resolve, 900));
    client.stop();
    expect(call).toBeGreaterThanOrEqual(2);
    expect(statuses).toContain(false);
    expect(events).toEqual(['{"after":"reconnect"}']);
  });
});
