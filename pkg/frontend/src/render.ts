// DOM/SVG rendering. Everything drawn here comes straight out of the view
// model; no simulation state lives in the DOM.

import { alongEdge, isAirNode, makeProjection, planRows } from './layout.js';
import type { ViewModel } from './viewmodel.js';

const MODE_COLOR: Record<string, string> = {
  Drive: '#4878cf', Fly: '#9b59b6', Transfer: '#7f8c8d',
};
const PHASE_COLOR: Record<string, string> = {
  received: '#7f8c8d', planning: '#eec643', active: '#5aa7ff',
  completed: '#2bbf6a', failed: '#ff4d4f',
};

export interface Selection {
  kind: 'edge' | 'vehicle';
  id: string;
}

export function renderMap(svg: SVGSVGElement, vm: ViewModel, layer: 'ground' | 'air' | 'both',
                          selected: Selection | null,
                          onSelect: (s: Selection) => void): void {
  const width = svg.clientWidth || 640;
  const height = svg.clientHeight || 420;
  const project = makeProjection(vm.world, width, height);
  svg.innerHTML = '';
  const nodeById = new Map(vm.world.nodes.map((n) => [n.id, n]));
  const visible = (air: boolean) =>
    layer === 'both' || (layer === 'air') === air;

  for (const edge of vm.world.edges) {
    const a = nodeById.get(edge.from);
    const b = nodeById.get(edge.to);
    if (!a || !b) continue;
    const air = edge.mode === 'Fly' || (isAirNode(a) && isAirNode(b));
    if (edge.mode !== 'Transfer' && !visible(air)) continue;
    const line = document.createElementNS('http://www.w3.org/2000/svg', 'line');
    line.setAttribute('x1', String(project.x(a.pos[0])));
    line.setAttribute('y1', String(project.y(a.pos[1])));
    line.setAttribute('x2', String(project.x(b.pos[0])));
    line.setAttribute('y2', String(project.y(b.pos[1])));
    const closed = vm.closedEdges.has(edge.id);
    line.setAttribute('stroke', closed ? '#ff4d4f' : MODE_COLOR[edge.mode] ?? '#999');
    line.setAttribute('stroke-width', selected?.kind === 'edge' && selected.id === edge.id ? '5' : '2.5');
    if (closed || edge.mode === 'Transfer') line.setAttribute('stroke-dasharray', '6 4');
    line.setAttribute('data-edge', edge.id);
    line.style.cursor = 'pointer';
    line.addEventListener('click', () => onSelect({ kind: 'edge', id: edge.id }));
    const title = document.createElementNS('http://www.w3.org/2000/svg', 'title');
    title.textContent = `${edge.id} (${edge.mode}${closed ? ', closed' : ''})`;
    line.appendChild(title);
    svg.appendChild(line);
  }

  for (const node of vm.world.nodes) {
    if (!visible(isAirNode(node)) && node.kind !== 'TransferPad') continue;
    const g = document.createElementNS('http://www.w3.org/2000/svg', 'circle');
    g.setAttribute('cx', String(project.x(node.pos[0])));
    g.setAttribute('cy', String(project.y(node.pos[1])));
    g.setAttribute('r', node.kind === 'TransferPad' ? '7' : '5');
    g.setAttribute('fill', node.kind === 'TransferPad' ? '#eec643'
      : isAirNode(node) ? '#9b59b6' : '#4878cf');
    const label = document.createElementNS('http://www.w3.org/2000/svg', 'text');
    label.setAttribute('x', String(project.x(node.pos[0]) + 8));
    label.setAttribute('y', String(project.y(node.pos[1]) - 6));
    label.setAttribute('class', 'node-label');
    label.textContent = node.id;
    svg.appendChild(g);
    svg.appendChild(label);
  }

  for (const vehicle of vm.vehicles.values()) {
    const air = vehicle.class === 'UAV';
    if (!visible(air)) continue;
    let wx: number | null = null;
    let wy: number | null = null;
    if (vehicle.at && nodeById.has(vehicle.at)) {
      const node = nodeById.get(vehicle.at)!;
      [wx, wy] = [node.pos[0], node.pos[1]];
    } else if (vehicle.edge) {
      const edge = vm.world.edges.find((e) => e.id === vehicle.edge);
      const a = edge && nodeById.get(edge.from);
      const b = edge && nodeById.get(edge.to);
      if (a && b) {
        [wx, wy] = alongEdge([a.pos[0], a.pos[1]], [b.pos[0], b.pos[1]], vehicle.progress);
      }
    }
    if (wx === null || wy === null) continue;
    const marker = document.createElementNS('http://www.w3.org/2000/svg', 'rect');
    marker.setAttribute('x', String(project.x(wx) - 6));
    marker.setAttribute('y', String(project.y(wy!) - 6));
    marker.setAttribute('width', '12');
    marker.setAttribute('height', '12');
    marker.setAttribute('rx', air ? '6' : '2');
    marker.setAttribute('fill', vehicle.health === 'Failed' ? '#ff4d4f'
      : vehicle.assigned_task ? '#2bbf6a' : '#a9b2cc');
    marker.setAttribute('stroke', selected?.kind === 'vehicle' && selected.id === vehicle.id
      ? '#fff' : 'none');
    marker.style.cursor = 'pointer';
    marker.addEventListener('click', () => onSelect({ kind: 'vehicle', id: vehicle.id }));
    const title = document.createElementNS('http://www.w3.org/2000/svg', 'title');
    title.textContent = `${vehicle.id} (${vehicle.class}, ${vehicle.health})`;
    marker.appendChild(title);
    svg.appendChild(marker);
  }
}

export function renderMissions(container: HTMLElement, vm: ViewModel): void {
  container.innerHTML = '';
  const cards = [...vm.missions.values()].sort(
    (a, b) => (a.mission_id < b.mission_id ? -1 : 1));
  for (const card of cards) {
    const div = document.createElement('div');
    div.className = 'card';
    div.style.borderLeft = `4px solid ${PHASE_COLOR[card.phase] ?? '#999'}`;
    const legs = card.legKinds.filter((k) => k !== 'Transfer');
    div.innerHTML = `
      <div class="card-title">${card.mission_id}
        <span class="phase" data-phase="${card.phase}">${card.phase}</span></div>
      <div class="muted">${card.origin ?? '?'} &rarr; ${card.destination ?? '?'}</div>
      <div class="legs">${legs.map((k) => `<span class="leg leg-${k.toLowerCase()}">${k}</span>`).join(' ')}</div>
      ${card.promised_time ? `<div class="muted">promised ${card.promised_time} ticks` +
        (card.actual_time ? `, actual ${card.actual_time}` : '') + '</div>' : ''}
      ${card.note ? `<div class="muted">${card.note}</div>` : ''}`;
    container.appendChild(div);
  }
}

export function renderHolarchy(container: HTMLElement, vm: ViewModel): void {
  container.innerHTML = '';
  const roots = [...vm.holons.values()].filter(
    (h) => !h.parent || !vm.holons.has(h.parent));
  const build = (id: string, depth: number): void => {
    const holon = vm.holons.get(id);
    if (!holon) return;
    const row = document.createElement('div');
    row.className = 'tree-row';
    row.style.paddingLeft = `${depth * 14}px`;
    row.innerHTML = `<span class="role role-${holon.role.toLowerCase()}">${holon.role}</span>
      ${holon.id} <span class="muted">${holon.status}</span>`;
    container.appendChild(row);
    for (const child of [...holon.children].sort()) build(child, depth + 1);
  };
  for (const root of roots.sort((a, b) => (a.id < b.id ? -1 : 1))) build(root.id, 0);
}

export function renderPlans(container: HTMLElement, vm: ViewModel): void {
  container.innerHTML = '';
  const tops = [...vm.plans.values()].filter((p) => p.parent_task === null)
    .sort((a, b) => (a.plan_id < b.plan_id ? -1 : 1));
  for (const top of tops) {
    for (const row of planRows(top.plan_id, vm.plans, vm.tasks)) {
      const div = document.createElement('div');
      div.className = `tree-row status-${row.status.toLowerCase()}`;
      div.style.paddingLeft = `${row.depth * 14}px`;
      div.textContent = `${row.label} — ${row.status}`;
      container.appendChild(div);
    }
  }
}

export function renderTimeline(container: HTMLElement, vm: ViewModel, limit = 40): void {
  container.innerHTML = '';
  for (const entry of vm.timeline.slice(-limit).reverse()) {
    const div = document.createElement('div');
    div.className = `timeline-entry flavor-${entry.flavor}`;
    div.textContent = `t${entry.tick} ${entry.mission_id ? `[${entry.mission_id}] ` : ''}${entry.label}`;
    container.appendChild(div);
  }
}

export function renderMetrics(container: HTMLElement, vm: ViewModel): void {
  container.innerHTML = '';
  const fields: Array<[string, string]> = [
    ['missions_done', 'done'], ['missions_failed', 'failed'],
    ['completion_rate', 'completion'], ['response_time_mean', 'response µ'],
    ['utilization_mean', 'utilization µ'], ['adaptability_mean', 'adaptability µ'],
    ['throughput_per_1k', 'per 1k ticks'], ['satisfaction_mean', 'satisfaction µ'],
  ];
  for (const [key, label] of fields) {
    const value = vm.metrics[key];
    if (value === undefined) continue;
    const tile = document.createElement('div');
    tile.className = 'tile';
    const shown = typeof value === 'number' && !Number.isInteger(value)
      ? (value as number).toFixed(3) : String(value);
    tile.innerHTML = `<div class="tile-value">${shown}</div><div class="muted">${label}</div>`;
    container.appendChild(tile);
  }
}
