// Event stream client: newline-delimited records over WebSocket with
// cursor-based resume and automatic retry.

import type { EventRecord } from './types.js';
import type { Cursor } from './viewmodel.js';

export function eventsUrl(base: string, cursor?: Cursor): string {
  const ws = base.replace(/^http/, 'ws').replace(/\/$/, '');
  if (!cursor || cursor.seq < 0) return `${ws}/api/events`;
  return `${ws}/api/events?after_tick=${cursor.tick}&after_seq=${cursor.seq}`;
}

export function parseRecordLine(line: string): EventRecord | null {
  const trimmed = line.trim();
  if (!trimmed) return null;
  try {
    const doc = JSON.parse(trimmed);
    if (typeof doc.tick === 'number' && typeof doc.seq === 'number' && doc.kind) {
      return doc as EventRecord;
    }
  } catch {
    // malformed stream line: drop it, the cursor keeps us consistent
  }
  return null;
}

export interface StreamHandlers {
  onRecord: (record: EventRecord) => void;
  onStatus?: (status: 'connected' | 'retrying') => void;
  cursor: () => Cursor;
}

export class EventStream {
  private socket: WebSocket | null = null;
  private closed = false;
  private retryMs = 500;

  constructor(private base: string, private handlers: StreamHandlers) {}

  connect(): void {
    if (this.closed) return;
    const socket = new WebSocket(eventsUrl(this.base, this.handlers.cursor()));
    this.socket = socket;
    socket.onopen = () => {
      this.retryMs = 500;
      this.handlers.onStatus?.('connected');
    };
    socket.onmessage = (event) => {
      const record = parseRecordLine(String(event.data));
      if (record) this.handlers.onRecord(record);
    };
    socket.onclose = () => this.scheduleRetry();
    socket.onerror = () => socket.close();
  }

  private scheduleRetry(): void {
    if (this.closed) return;
    this.handlers.onStatus?.('retrying');
    setTimeout(() => this.connect(), this.retryMs);
    this.retryMs = Math.min(this.retryMs * 2, 8000);
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
