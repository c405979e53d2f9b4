// Thin REST client for the gateway; 4xx bodies are surfaced verbatim.

import type { StateSnapshot } from './types.js';

export class GatewayError extends Error {
  constructor(public status: number, public body: string) {
    super(`${status}: ${body}`);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const reply = await fetch(`${base}${path}`, init);
  const text = await reply.text();
  if (!reply.ok) throw new GatewayError(reply.status, text);
  return JSON.parse(text) as T;
}

export interface MissionSubmission {
  text?: string;
  origin?: string;
  destination?: string;
  objective?: string;
}

export function submitMission(base: string, mission: MissionSubmission):
    Promise<{ mission_id: string; status: string }> {
  return request(base, '/api/missions', {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(mission),
  });
}

export interface DisturbanceSubmission {
  kind: 'EdgeClosure' | 'VehicleFailure' | 'DelayFactor';
  target: string;
  duration?: number;
  factor?: number;
}

export function injectDisturbance(base: string, disturbance: DisturbanceSubmission):
    Promise<{ scheduled: Record<string, unknown> }> {
  return request(base, '/api/disturbances', {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(disturbance),
  });
}

export function fetchState(base: string): Promise<StateSnapshot> {
  return request(base, '/api/state');
}

export function fetchMetrics(base: string): Promise<Record<string, unknown>> {
  return request(base, '/api/metrics');
}
