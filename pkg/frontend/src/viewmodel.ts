// Pure view-model reducer: every rendered fact derives from received
// records. The console performs no simulation of its own; replaying the
// same records through a fresh view model reproduces the identical state,
// which is what makes reload-plus-cursor-resync safe.

import type {
  EventRecord,
  HolonView,
  MissionCard,
  StateSnapshot,
  TaskView,
  TimelineEntry,
  VehicleView,
  WorldLayout,
} from './types.js';

export interface Cursor {
  tick: number;
  seq: number;
}

export class ViewModel {
  cursor: Cursor = { tick: -1, seq: -1 };
  world: WorldLayout = { nodes: [], edges: [] };
  scenario = '';
  governance = '';
  vehicles = new Map<string, VehicleView>();
  holons = new Map<string, HolonView>();
  tasks = new Map<string, TaskView>();
  plans = new Map<string, { plan_id: string; mission_id: string; parent_task: string | null; tasks: string[]; status: string }>();
  missions = new Map<string, MissionCard>();
  closedEdges = new Set<string>();
  timeline: TimelineEntry[] = [];
  metrics: Record<string, unknown> = {};
  tick = 0;

  seed(snapshot: StateSnapshot): void {
    this.world = snapshot.world;
    this.scenario = snapshot.scenario;
    this.governance = snapshot.governance;
    this.tick = snapshot.tick;
    for (const vehicle of snapshot.vehicles) this.vehicles.set(vehicle.id, { ...vehicle });
    for (const holon of snapshot.holons) this.holons.set(holon.id, { ...holon });
    for (const [edge, open] of Object.entries(snapshot.edges)) {
      if (!open) this.closedEdges.add(edge);
    }
    for (const plan of snapshot.plans) this.registerPlanTree(plan);
  }

  private registerPlanTree(tree: Record<string, any>): void {
    this.plans.set(tree.plan_id, {
      plan_id: tree.plan_id,
      mission_id: tree.mission_id,
      parent_task: tree.parent_task ?? null,
      tasks: tree.tasks.map((t: Record<string, any>) => t.task_id),
      status: tree.status,
    });
    for (const task of tree.tasks) {
      this.tasks.set(task.task_id, {
        task_id: task.task_id,
        kind: task.kind,
        status: task.status,
        assigned_resource: task.assigned_resource ?? null,
        route: task.route ?? [],
        mission_id: task.mission_id,
        plan_id: task.parent_plan ?? tree.plan_id,
      });
      if (task.sub_plan && typeof task.sub_plan === 'object') {
        this.registerPlanTree(task.sub_plan);
      }
    }
  }

  /** Apply one record; stale or duplicate records (per cursor) are ignored. */
  apply(record: EventRecord): boolean {
    if (record.tick < this.cursor.tick ||
        (record.tick === this.cursor.tick && record.seq <= this.cursor.seq)) {
      return false;
    }
    this.cursor = { tick: record.tick, seq: record.seq };
    this.tick = Math.max(this.tick, record.tick);
    const body = record.body;
    switch (record.kind) {
      case 'MessageSent':
        if (body.kind === 'status_update' && body.payload?.id) {
          this.applyVehicle(body.payload);
        }
        break;
      case 'StateChanged':
        this.applyStateChange(record.tick, body);
        break;
      case 'PlanCreated':
        this.plans.set(body.plan_id, {
          plan_id: body.plan_id,
          mission_id: body.mission_id,
          parent_task: body.parent_task ?? null,
          tasks: [...body.tasks],
          status: body.status ?? 'Pending',
        });
        break;
      case 'TaskStatusChanged':
        this.applyTask(record.tick, body);
        break;
      case 'DisturbanceApplied':
        if (body.kind === 'EdgeClosure') this.closedEdges.add(body.target);
        if (body.kind === 'VehicleFailure') {
          const vehicle = this.vehicles.get(body.target);
          if (vehicle) vehicle.health = 'Failed';
        }
        this.push(record.tick, body.mission_id ?? '', `${body.kind} on ${body.target}`,
                  'disturbance');
        break;
      case 'MetricSample':
        this.metrics = { ...body };
        break;
      default:
        break;
    }
    return true;
  }

  applyAll(records: EventRecord[]): number {
    let applied = 0;
    for (const record of records) if (this.apply(record)) applied += 1;
    return applied;
  }

  private applyVehicle(payload: Record<string, any>): void {
    const previous = this.vehicles.get(payload.id);
    this.vehicles.set(payload.id, {
      id: payload.id,
      class: payload.class ?? previous?.class ?? 'UGV',
      at: payload.at ?? null,
      edge: payload.edge ?? null,
      progress: payload.progress ?? 0,
      energy: payload.energy ?? previous?.energy ?? 0,
      assigned_task: payload.assigned_task ?? null,
      health: payload.health ?? 'OK',
      available: payload.available,
    });
  }

  private applyStateChange(tick: number, body: Record<string, any>): void {
    const change = body.change;
    const entity = body.entity as string;
    switch (change) {
      case 'spawned':
        this.holons.set(entity, {
          id: entity, role: body.role, parent: body.parent ?? null,
          children: [], status: 'Idle', capabilities: body.capabilities ?? [],
        });
        if (body.parent && this.holons.has(body.parent)) {
          const parent = this.holons.get(body.parent)!;
          if (!parent.children.includes(entity)) parent.children.push(entity);
        }
        break;
      case 'status': {
        const holon = this.holons.get(entity);
        if (holon) holon.status = body.status;
        break;
      }
      case 'mission_received':
        this.missions.set(entity, {
          mission_id: entity, origin: body.origin, destination: body.destination,
          phase: 'received', legKinds: [],
        });
        this.push(tick, entity, `request ${body.origin} -> ${body.destination}`, 'info');
        break;
      case 'plan_activated': {
        const card = this.card(body.mission_id);
        card.phase = 'active';
        card.promised_time = body.promised_time;
        this.push(tick, body.mission_id, 'plan activated', 'progress');
        break;
      }
      case 'leg_award': {
        const card = this.card(body.mission_id);
        const task = this.tasks.get(body.task_id);
        if (task) task.assigned_resource = body.resource ?? null;
        this.push(tick, body.mission_id,
                  `${body.replan ? 'replan ' : ''}award ${body.task_id} -> ${body.resource}`,
                  body.replan ? 'replan' : 'progress');
        if (card.phase === 'received') card.phase = 'planning';
        break;
      }
      case 'plan_repaired': {
        const plan = this.plans.get(entity);
        if (plan) plan.tasks = [...body.new_tasks ? this.mergeRepairedTasks(plan.tasks, body) : plan.tasks];
        this.push(tick, body.mission_id, `plan repaired (${body.reason ?? 'disturbance'})`,
                  'replan');
        break;
      }
      case 'plan_status': {
        const plan = this.plans.get(entity);
        if (plan) plan.status = body.status;
        break;
      }
      case 'mission_completed': {
        const card = this.card(entity);
        card.phase = 'completed';
        card.actual_time = body.actual_time;
        this.push(tick, entity, `completed in ${body.actual_time} ticks`, 'done');
        break;
      }
      case 'mission_failed': {
        const card = this.card(entity);
        card.phase = 'failed';
        card.note = body.reason;
        this.push(tick, entity, `failed: ${body.reason}`, 'failed');
        break;
      }
      case 'disturbance_expired':
        if (body.kind === 'EdgeClosure') this.closedEdges.delete(entity);
        break;
      default:
        break;
    }
  }

  private mergeRepairedTasks(existing: string[], body: Record<string, any>): string[] {
    const dropped = new Set<string>(body.dropped ?? []);
    const kept = existing.filter((t) => !dropped.has(t));
    for (const t of body.new_tasks as string[]) if (!kept.includes(t)) kept.push(t);
    return kept;
  }

  private applyTask(tick: number, body: Record<string, any>): void {
    const existing = this.tasks.get(body.task_id);
    this.tasks.set(body.task_id, {
      task_id: body.task_id,
      kind: body.kind,
      status: body.status,
      assigned_resource: body.assigned_resource ?? existing?.assigned_resource ?? null,
      route: body.route ?? existing?.route ?? [],
      mission_id: body.mission_id,
      plan_id: body.plan_id,
    });
    if (!body.created && !body.task_id.includes('.')) {
      const flavor = body.status === 'Done' ? 'done'
        : body.status === 'Failed' ? 'failed' : 'progress';
      this.push(tick, body.mission_id, `${body.task_id} ${body.status}`, flavor);
    }
    const card = this.missions.get(body.mission_id);
    if (card) {
      card.legKinds = this.legKinds(body.mission_id);
      if (card.phase === 'received') card.phase = 'planning';
    }
  }

  /** Locomotion kinds of the mission's top-level plan, in task order. */
  legKinds(missionId: string): string[] {
    const top = [...this.plans.values()].find(
      (p) => p.mission_id === missionId && p.parent_task === null);
    if (!top) return [];
    const kinds: string[] = [];
    for (const taskId of top.tasks) {
      const task = this.tasks.get(taskId);
      if (!task) continue;
      if (task.kind === 'Composite') {
        // Mode stays recoverable from the route's edges.
        const edge = this.world.edges.find((e) => e.id === task.route[0]);
        kinds.push(edge ? edge.mode : 'Drive');
      } else {
        kinds.push(task.kind);
      }
    }
    return kinds;
  }

  private card(missionId: string): MissionCard {
    let card = this.missions.get(missionId);
    if (!card) {
      card = { mission_id: missionId, phase: 'received', legKinds: [] };
      this.missions.set(missionId, card);
    }
    return card;
  }

  private push(tick: number, missionId: string, label: string,
               flavor: TimelineEntry['flavor']): void {
    this.timeline.push({ tick, mission_id: missionId, label, flavor });
  }

  /** Canonical digest of everything rendered; equal digests = equal views. */
  digest(): string {
    const sortEntries = <T>(map: Map<string, T>) =>
      [...map.entries()].sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0));
    return JSON.stringify({
      cursor: this.cursor,
      tick: this.tick,
      vehicles: sortEntries(this.vehicles),
      holons: sortEntries(this.holons),
      tasks: sortEntries(this.tasks),
      plans: sortEntries(this.plans),
      missions: sortEntries(this.missions),
      closedEdges: [...this.closedEdges].sort(),
      timeline: this.timeline,
      metrics: this.metrics,
    });
  }
}
