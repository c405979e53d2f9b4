// Wire types mirrored from the gateway's event-log and snapshot formats.

export type EventKind =
  | 'MessageSent'
  | 'MessageDelivered'
  | 'StateChanged'
  | 'DisturbanceApplied'
  | 'PlanCreated'
  | 'TaskStatusChanged'
  | 'MetricSample';

export interface EventRecord {
  tick: number;
  seq: number;
  kind: EventKind;
  body: Record<string, any>;
}

export interface NodeDoc {
  id: string;
  pos: [number, number, number];
  kind: 'GroundJunction' | 'AirWaypoint' | 'TransferPad';
}

export interface EdgeDoc {
  id: string;
  from: string;
  to: string;
  mode: 'Drive' | 'Fly' | 'Transfer';
  base_time: number;
  cost: number;
}

export interface WorldLayout {
  nodes: NodeDoc[];
  edges: EdgeDoc[];
}

export interface VehicleView {
  id: string;
  class: 'UGV' | 'UAV';
  at: string | null;
  edge: string | null;
  progress: number;
  energy: number;
  assigned_task: string | null;
  health: 'OK' | 'Failed';
  available?: boolean;
}

export interface TaskView {
  task_id: string;
  kind: string;
  status: string;
  assigned_resource: string | null;
  route: string[];
  mission_id: string;
  plan_id: string;
}

export interface PlanTree {
  plan_id: string;
  mission_id: string;
  status: string;
  parent_task: string | null;
  tasks: Array<Record<string, any>>;
}

export interface HolonView {
  id: string;
  role: string;
  parent: string | null;
  children: string[];
  status: string;
  capabilities: string[];
}

export interface StateSnapshot {
  tick: number;
  scenario: string;
  governance: string;
  holons: HolonView[];
  vehicles: VehicleView[];
  plans: PlanTree[];
  edges: Record<string, boolean>;
  world: WorldLayout;
  passengers: Record<string, { mode: string; node: string | null; vehicle: string | null }>;
  missions: Record<string, string>;
}

export interface TimelineEntry {
  tick: number;
  mission_id: string;
  label: string;
  flavor: 'info' | 'progress' | 'done' | 'failed' | 'replan' | 'disturbance';
}

export interface MissionCard {
  mission_id: string;
  origin?: string;
  destination?: string;
  phase: string; // received | planning | active | completed | failed
  plan_id?: string;
  legKinds: string[];
  promised_time?: number;
  actual_time?: number;
  note?: string;
}
