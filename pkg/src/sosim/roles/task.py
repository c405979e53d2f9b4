"""Task holon: executes one journey segment and adapts to live conditions.

A locomotion task claims its awarded vehicle (capacity one: a vehicle
serves a single active leaf task), repositions it empty to the leg origin
if needed, expands into a micro sub-plan, and walks the vehicle edge by
edge with the passenger aboard. Closed edges and failed vehicles raise an
escalation to the planner; a traversal in progress on an edge that closes
is aborted back to the edge's start node so closed edges are never
traversed. Transfer tasks carry no vehicle and simply wait out the pad
handover time.
"""

from __future__ import annotations

from ..kernel import Behavior, Envelope, HolonContext
from ..plans import Status, TaskKind
from ..routing import NoRoute, expand_task, shortest_multimodal_path
from ..world import EnergyExhausted, Health, NodeKind, VEHICLE_MODE, advance, begin_edge
from ..plans import Objective


class TaskExecutor(Behavior):
    def __init__(self, task_id: str) -> None:
        self.task_id = task_id
        self.phase = "idle"  # idle|claim|pickup|execute|transfer|done|failed
        self.pickup: list[str] = []
        self.micro_ids: list[str] = []
        self.micro_index = 0
        self.wait = 0

    def on_message(self, ctx: HolonContext, envelope: Envelope) -> None:
        if envelope.kind == "start" and self.phase == "idle":
            self._start(ctx)

    def on_tick(self, ctx: HolonContext) -> None:
        if self.phase == "claim":
            self._claim_tick(ctx)
        elif self.phase == "pickup":
            self._pickup_tick(ctx)
        elif self.phase == "execute":
            self._execute_tick(ctx)
        elif self.phase == "transfer":
            self._transfer_tick(ctx)

    # -- startup --------------------------------------------------------

    def _start(self, ctx: HolonContext) -> None:
        task = ctx.env.store.tasks[self.task_id]
        if task.kind is TaskKind.TRANSFER:
            edge = ctx.env.world.edges[task.route[0]]
            if not edge.open:
                self._escalate(ctx, "transfer pad closed", edge.src)
                return
            ctx.env.store.set_task_status(self.task_id, Status.ACTIVE)
            self.wait = edge.effective_time
            ctx.env.set_passenger(task.mission_id, mode="pad", node=edge.src)
            self.phase = "transfer"
            return
        if task.assigned_resource is None:
            self._escalate(ctx, "no resource assigned", self._leg_origin(ctx))
            return
        ctx.env.vehicle_queue.setdefault(task.assigned_resource, []).append(self.task_id)
        self.phase = "claim"

    def _leg_origin(self, ctx: HolonContext) -> str:
        task = ctx.env.store.tasks[self.task_id]
        return ctx.env.world.edges[task.route[0]].src

    # -- vehicle claim ----------------------------------------------------

    def _claim_tick(self, ctx: HolonContext) -> None:
        env = ctx.env
        task = env.store.tasks[self.task_id]
        vehicle = env.vehicles.get(task.assigned_resource)
        if vehicle is None or vehicle.health is not Health.OK:
            self._escalate(ctx, "ResourceLost", self._leg_origin(ctx))
            return
        queue = env.vehicle_queue.get(vehicle.id, [])
        if not (queue and queue[0] == self.task_id
                and vehicle.assigned_task is None and vehicle.at_node is not None):
            return
        queue.pop(0)
        vehicle.assigned_task = self.task_id
        env.mark_vehicle_busy(vehicle.id, True)
        origin = self._leg_origin(ctx)
        if vehicle.at_node != origin:
            mode = VEHICLE_MODE[vehicle.vclass]
            try:
                self.pickup = shortest_multimodal_path(
                    env.world, vehicle.at_node, origin, Objective.FASTEST_TIME,
                    allowed_modes=(mode,))
            except NoRoute:
                self._escalate(ctx, "pickup unreachable", origin)
                return
        sub, micro = expand_task(env.world, task)
        env.store.add_plan(sub, promised_time=sum(m.est_time for m in micro),
                           promised_cost=sum(m.est_cost for m in micro))
        for m in micro:
            env.store.add_task(m)
        task.sub_plan = sub.plan_id
        task.kind = TaskKind.COMPOSITE  # a task with a sub-plan is composite
        self.micro_ids = [m.task_id for m in micro]
        env.store.set_task_status(self.task_id, Status.ACTIVE)
        env.store.set_plan_status(sub.plan_id, Status.ACTIVE)
        if self.pickup:
            self.phase = "pickup"
            self._pickup_tick(ctx)
        else:
            self._board(ctx)
            self.phase = "execute"
            self._execute_tick(ctx)

    def _board(self, ctx: HolonContext) -> None:
        task = ctx.env.store.tasks[self.task_id]
        ctx.env.set_passenger(task.mission_id, mode="vehicle",
                              vehicle=task.assigned_resource)

    # -- movement ---------------------------------------------------------

    def _pickup_tick(self, ctx: HolonContext) -> None:
        env = ctx.env
        task = env.store.tasks[self.task_id]
        vehicle = env.vehicles[task.assigned_resource]
        if vehicle.health is not Health.OK:
            self._escalate(ctx, "ResourceLost", self._leg_origin(ctx))
            return
        if vehicle.edge is not None and not env.world.edges[vehicle.edge].open:
            self._abort_traversal(ctx, vehicle)
            self._escalate(ctx, "pickup edge closed", self._leg_origin(ctx))
            return
        if vehicle.edge is None:
            if not self.pickup:
                return
            edge = env.world.edges[self.pickup[0]]
            if not edge.open:
                self._escalate(ctx, "pickup edge closed", self._leg_origin(ctx))
                return
            begin_edge(env.world, vehicle, edge.id)
        if not self._advance(ctx, vehicle, self._leg_origin(ctx)):
            return
        if vehicle.at_node is not None and self.pickup:
            if vehicle.at_node == env.world.edges[self.pickup[0]].dst:
                self.pickup.pop(0)
            if not self.pickup:
                self._board(ctx)
                self.phase = "execute"

    def _execute_tick(self, ctx: HolonContext) -> None:
        env = ctx.env
        task = env.store.tasks[self.task_id]
        vehicle = env.vehicles[task.assigned_resource]
        if vehicle.health is not Health.OK:
            self._escalate(ctx, "ResourceLost", self._passenger_node(ctx, vehicle))
            return
        micro = env.store.tasks[self.micro_ids[self.micro_index]]
        edge = env.world.edges[micro.route[0]]
        if vehicle.edge is not None and not env.world.edges[vehicle.edge].open:
            self._abort_traversal(ctx, vehicle)
            self._escalate(ctx, "edge closed under traversal", vehicle.at_node)
            return
        if vehicle.edge is None:
            if not edge.open:
                self._escalate(ctx, "edge closed ahead", vehicle.at_node)
                return
            begin_edge(env.world, vehicle, edge.id)
            env.store.set_task_status(micro.task_id, Status.ACTIVE)
        if not self._advance(ctx, vehicle, self._passenger_node(ctx, vehicle)):
            return
        if vehicle.at_node == edge.dst:
            env.store.set_task_status(micro.task_id, Status.DONE)
            self.micro_index += 1
            if self.micro_index >= len(self.micro_ids):
                self._complete_leg(ctx, task, vehicle)

    def _transfer_tick(self, ctx: HolonContext) -> None:
        env = ctx.env
        task = env.store.tasks[self.task_id]
        edge = env.world.edges[task.route[0]]
        if not edge.open:
            self._escalate(ctx, "transfer pad closed", edge.src)
            return
        self.wait -= 1
        if self.wait > 0:
            return
        kind = env.world.nodes[edge.dst].kind
        env.set_passenger(task.mission_id,
                          mode="pad" if kind is NodeKind.TRANSFER_PAD else "node",
                          node=edge.dst)
        env.store.set_task_status(self.task_id, Status.DONE)
        self.phase = "done"
        ctx.send(ctx.descriptor.parent, "task_done", {
            "task_id": self.task_id, "at": edge.dst, "cost": task.est_cost,
        }, correlation_id=task.mission_id)

    # -- helpers ------------------------------------------------------------

    def _advance(self, ctx: HolonContext, vehicle, passenger_node: str | None) -> bool:
        try:
            advance(ctx.env.world, vehicle, 1, ctx.env.options.energy_rate)
            return True
        except EnergyExhausted:
            self._escalate(ctx, "ResourceLost: energy exhausted", passenger_node)
            return False

    @staticmethod
    def _abort_traversal(ctx: HolonContext, vehicle) -> None:
        edge = ctx.env.world.edges[vehicle.edge]
        vehicle.at_node = edge.src
        vehicle.edge = None
        vehicle.edge_ticks = 0

    def _passenger_node(self, ctx: HolonContext, vehicle) -> str:
        if vehicle.at_node is not None:
            return vehicle.at_node
        return ctx.env.world.edges[vehicle.edge].src

    def _complete_leg(self, ctx: HolonContext, task, vehicle) -> None:
        env = ctx.env
        node = vehicle.at_node
        kind = env.world.nodes[node].kind
        env.set_passenger(task.mission_id,
                          mode="pad" if kind is NodeKind.TRANSFER_PAD else "node",
                          node=node)
        self._release(ctx, vehicle)
        env.store.set_plan_status(task.sub_plan, Status.DONE)
        env.store.set_task_status(self.task_id, Status.DONE)
        self.phase = "done"
        ctx.send(ctx.descriptor.parent, "task_done", {
            "task_id": self.task_id, "at": node, "cost": task.est_cost,
        }, correlation_id=task.mission_id)

    def _release(self, ctx: HolonContext, vehicle) -> None:
        if vehicle.assigned_task == self.task_id:
            vehicle.assigned_task = None
            ctx.env.mark_vehicle_busy(vehicle.id, False)

    def _escalate(self, ctx: HolonContext, reason: str, at_node: str | None) -> None:
        env = ctx.env
        task = env.store.tasks[self.task_id]
        vehicle = env.vehicles.get(task.assigned_resource or "")
        if vehicle is not None:
            queue = env.vehicle_queue.get(vehicle.id, [])
            if self.task_id in queue:
                queue.remove(self.task_id)
            self._release(ctx, vehicle)
        for mid in self.micro_ids[self.micro_index:]:
            if env.store.tasks[mid].status in (Status.PENDING, Status.ACTIVE):
                env.store.set_task_status(mid, Status.FAILED, superseded=True)
        if task.sub_plan and env.store.plans[task.sub_plan].status in (Status.PENDING,
                                                                       Status.ACTIVE):
            env.store.set_plan_status(task.sub_plan, Status.FAILED, reason=reason)
        if task.status in (Status.PENDING, Status.ACTIVE):
            env.store.set_task_status(self.task_id, Status.FAILED, reason=reason)
        if at_node is not None:
            env.set_passenger(task.mission_id, mode="node", node=at_node)
        self.phase = "failed"
        ctx.send(ctx.descriptor.parent, "escalate", {
            "task_id": self.task_id, "reason": reason, "at_node": at_node,
        }, correlation_id=task.mission_id)
