// Pure layout math: map projection and plan-tree rows.

import type { NodeDoc, WorldLayout } from './types.js';

export interface Projection {
  x: (wx: number) => number;
  y: (wy: number) => number;
}

/** Fit world x/y coordinates into a padded viewport, preserving aspect. */
export function makeProjection(world: WorldLayout, width: number, height: number,
                               pad = 30): Projection {
  const xs = world.nodes.map((n) => n.pos[0]);
  const ys = world.nodes.map((n) => n.pos[1]);
  const minX = Math.min(...xs, 0);
  const maxX = Math.max(...xs, 1);
  const minY = Math.min(...ys, 0);
  const maxY = Math.max(...ys, 1);
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const scale = Math.min((width - 2 * pad) / spanX, (height - 2 * pad) / spanY);
  return {
    x: (wx) => pad + (wx - minX) * scale,
    y: (wy) => height - pad - (wy - minY) * scale,
  };
}

export function isAirNode(node: NodeDoc): boolean {
  return node.kind === 'AirWaypoint' || node.pos[2] > 0;
}

/** Position along an edge for a progress fraction in [0, 1]. */
export function alongEdge(a: [number, number], b: [number, number],
                          progress: number): [number, number] {
  const t = Math.max(0, Math.min(1, progress));
  return [a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t];
}

export interface TreeRow {
  id: string;
  label: string;
  depth: number;
  status: string;
}

interface PlanLike {
  plan_id: string;
  tasks: string[];
  status: string;
  parent_task: string | null;
}

interface TaskLike {
  task_id: string;
  kind: string;
  status: string;
  assigned_resource: string | null;
}

/** Flatten a plan tree into indented rows for rendering. */
export function planRows(planId: string,
                         plans: Map<string, PlanLike>,
                         tasks: Map<string, TaskLike>,
                         depth = 0): TreeRow[] {
  const plan = plans.get(planId);
  if (!plan) return [];
  const rows: TreeRow[] = [{
    id: plan.plan_id, label: plan.plan_id, depth, status: plan.status,
  }];
  for (const taskId of plan.tasks) {
    const task = tasks.get(taskId);
    if (!task) continue;
    const resource = task.assigned_resource ? ` @${task.assigned_resource}` : '';
    rows.push({
      id: task.task_id,
      label: `${task.task_id} [${task.kind}]${resource}`,
      depth: depth + 1,
      status: task.status,
    });
    const sub = [...plans.values()].find((p) => p.parent_task === taskId);
    if (sub) rows.push(...planRows(sub.plan_id, plans, tasks, depth + 2));
  }
  return rows;
}
