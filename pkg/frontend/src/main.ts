// Console bootstrap: seed from /api/state, then follow /api/events.

import { fetchState, injectDisturbance, submitMission, GatewayError } from './api.js';
import { EventStream } from './stream.js';
import {
  renderHolarchy,
  renderMap,
  renderMetrics,
  renderMissions,
  renderPlans,
  renderTimeline,
  type Selection,
} from './render.js';
import { ViewModel } from './viewmodel.js';

const base = location.origin;
const vm = new ViewModel();
let layer: 'ground' | 'air' | 'both' = 'both';
let selected: Selection | null = null;
let renderQueued = false;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function scheduleRender(): void {
  if (renderQueued) return;
  renderQueued = true;
  requestAnimationFrame(() => {
    renderQueued = false;
    el<HTMLElement>('tick').textContent = `tick ${vm.tick}`;
    renderMap(el('map') as unknown as SVGSVGElement, vm, layer, selected, (s) => {
      selected = s;
      el<HTMLElement>('selection').textContent = `${s.kind}: ${s.id}`;
      scheduleRender();
    });
    renderMissions(el('missions'), vm);
    renderHolarchy(el('holarchy'), vm);
    renderPlans(el('plans'), vm);
    renderTimeline(el('timeline'), vm);
    renderMetrics(el('metrics'), vm);
  });
}

function flash(message: string, isError = false): void {
  const banner = el<HTMLElement>('banner');
  banner.textContent = message;
  banner.className = isError ? 'banner error' : 'banner';
  if (message) setTimeout(() => { banner.textContent = ''; banner.className = 'banner'; }, 6000);
}

async function boot(): Promise<void> {
  const snapshot = await fetchState(base);
  vm.seed(snapshot);
  scheduleRender();

  const stream = new EventStream(base, {
    cursor: () => vm.cursor,
    onRecord: (record) => {
      if (vm.apply(record)) scheduleRender();
    },
    onStatus: (status) => {
      el<HTMLElement>('link').textContent = status === 'connected' ? 'live' : 'reconnecting…';
      el<HTMLElement>('link').className = status === 'connected' ? 'ok' : 'warn';
    },
  });
  stream.connect();

  el<HTMLFormElement>('mission-form').addEventListener('submit', async (event) => {
    event.preventDefault();
    const text = el<HTMLInputElement>('mission-text').value.trim();
    const origin = el<HTMLInputElement>('mission-origin').value.trim();
    const destination = el<HTMLInputElement>('mission-destination').value.trim();
    const objective = el<HTMLSelectElement>('mission-objective').value;
    try {
      const body = text ? { text } : { origin, destination, objective };
      const reply = await submitMission(base, body);
      flash(`mission ${reply.mission_id} accepted`);
    } catch (error) {
      flash(error instanceof GatewayError ? error.body : String(error), true);
    }
  });

  el<HTMLButtonElement>('disturb-close').addEventListener('click', async () => {
    if (!selected) { flash('select an edge or vehicle on the map first', true); return; }
    const duration = Number(el<HTMLInputElement>('disturb-duration').value) || 0;
    try {
      if (selected.kind === 'edge') {
        await injectDisturbance(base, { kind: 'EdgeClosure', target: selected.id, duration });
        flash(`closing ${selected.id} for ${duration || '∞'} ticks`);
      } else {
        await injectDisturbance(base, { kind: 'VehicleFailure', target: selected.id });
        flash(`failing vehicle ${selected.id}`);
      }
    } catch (error) {
      flash(error instanceof GatewayError ? error.body : String(error), true);
    }
  });

  for (const which of ['ground', 'air', 'both'] as const) {
    el<HTMLButtonElement>(`layer-${which}`).addEventListener('click', () => {
      layer = which;
      scheduleRender();
    });
  }
}

boot().catch((error) => flash(`gateway unreachable: ${error}`, true));
