"""Problem data and the fuel/emission routing model.

A fleet of identical vehicles leaves a warehouse, serves every customer
inside its time window and returns to the warehouse (modelled as a second
depot node so routes are simple paths).  Driving edge (i, j) with payload
f at average speed v costs

    (c_f + e) * alpha_ij * d_ij * w       # hauling the empty vehicle
  + (c_f + e) * alpha_ij * f    * d_ij    # hauling the payload
  + (c_f + e) * d_ij * beta * v**2        # speed-dependent losses

where c_f and e are the unit costs of fuel and of emitted gas, w is the
vehicle tare weight and d_ij the edge length.  The physical fuel burned on
the edge, alpha_ij*(w+f)*d_ij + beta*v**2*d_ij, is tracked alongside the
money total, and reported emissions are an affine function of it.

Speeds are regulated by time of day: each speed level owns a clock bracket
and an edge is driven entirely at the average speed of the level whose
bracket contains the departure time from the edge's tail node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

EPS = 1e-9

DEPOT = 0


class ModelError(ValueError):
    """Malformed instance data or a structurally invalid solution."""


@dataclass(frozen=True)
class SpeedLevel:
    """A regulated speed range valid during one time-of-day bracket."""

    id: int
    lower: float
    avg: float
    upper: float
    bracket_start: float
    bracket_end: float

    def contains(self, t: float) -> bool:
        """Whether clock time t falls inside this level's bracket."""
        return self.bracket_start <= t < self.bracket_end


@dataclass(frozen=True)
class Node:
    """A customer or depot vertex with demand, service time and window."""

    id: int
    x: float
    y: float
    demand: float
    service: float
    tw_open: float
    tw_close: float


@dataclass(frozen=True)
class Visit:
    """One stop on a route; speed_level is the level id of the edge
    arriving at this node (meaningless for the leading depot visit)."""

    node: int
    speed_level: int


@dataclass
class Solution:
    """Routes, one per dispatched vehicle.  Every route must start at the
    start depot (node 0) and end at the end depot (node n+1)."""

    routes: list[list[Visit]]

    def customers(self) -> list[int]:
        """All customer ids in visiting order, across routes."""
        out = []
        for route in self.routes:
            out.extend(v.node for v in route[1:-1])
        return out


@dataclass
class Instance:
    """Immutable problem data; safe to share across solver runs.

    Node 0 and node n+1 are the same physical warehouse split into a start
    and an end depot.  alpha is a full per-edge coefficient matrix (use
    broadcast_alpha to expand a scalar).  emission_params are the (slope,
    intercept) of the fuel-to-emission map; the intercept is charged once
    per dispatched route when reporting emissions.
    """

    nodes: list[Node]
    distances: list[list[float]]
    fleet_size: int
    vehicle_weight: float
    capacity: float
    fuel_cost: float
    emission_cost: float
    alpha: list[list[float]]
    beta: float
    speed_levels: list[SpeedLevel]
    emission_params: tuple[float, float] = (1.0, 0.0)

    def __post_init__(self):
        self.n = len(self.nodes) - 2
        self._levels = {lv.id: lv for lv in self.speed_levels}
        self._brackets = sorted(self.speed_levels, key=lambda lv: lv.bracket_start)
        self.validate()

    @property
    def end_depot(self) -> int:
        return self.n + 1

    @property
    def unit_cost(self) -> float:
        """Combined money cost of one fuel unit's consumption."""
        return self.fuel_cost + self.emission_cost

    @property
    def horizon(self) -> float:
        return self._brackets[-1].bracket_end

    def level(self, level_id: int) -> SpeedLevel:
        try:
            return self._levels[level_id]
        except KeyError:
            raise ModelError(f"unknown speed level id {level_id}") from None

    def level_at(self, t: float) -> SpeedLevel | None:
        """The unique level whose bracket contains clock time t, if any."""
        for lv in self._brackets:
            if lv.bracket_start <= t < lv.bracket_end:
                return lv
        return None

    def validate(self) -> None:
        """Raise ModelError on the first violated instance invariant."""
        n = self.n
        if n < 0:
            raise ModelError("instance needs at least the two depot nodes")
        for idx, node in enumerate(self.nodes):
            if node.id != idx:
                raise ModelError(f"node at position {idx} has id {node.id}")
            if node.demand < 0 or node.service < 0:
                raise ModelError(f"node {idx}: negative demand or service")
            if node.tw_open > node.tw_close:
                raise ModelError(f"node {idx}: window opens after it closes")
        for depot in (0, n + 1):
            d = self.nodes[depot]
            if d.demand != 0 or d.service != 0:
                raise ModelError(f"depot node {depot} must have zero demand and service")
        start, end = self.nodes[0], self.nodes[n + 1]
        if (start.x, start.y) != (end.x, end.y):
            raise ModelError("start and end depot must share coordinates")
        size = n + 2
        if len(self.distances) != size or any(len(row) != size for row in self.distances):
            raise ModelError("distance matrix shape must be (n+2) x (n+2)")
        for i in range(size):
            if self.distances[i][i] != 0:
                raise ModelError(f"distance diagonal must be zero (row {i})")
            for j in range(size):
                if self.distances[i][j] < 0:
                    raise ModelError(f"negative distance on edge ({i}, {j})")
        for j in range(size):
            if self.distances[0][j] != self.distances[n + 1][j] or \
                    self.distances[j][0] != self.distances[j][n + 1]:
                raise ModelError("depot rows/columns of the distance matrix must match")
        if self.fleet_size < 1:
            raise ModelError("fleet_size must be at least 1")
        if self.capacity <= 0 or self.vehicle_weight <= 0:
            raise ModelError("capacity and vehicle_weight must be positive")
        if self.beta <= 0:
            raise ModelError("beta must be positive")
        if len(self.alpha) != size or any(len(row) != size for row in self.alpha):
            raise ModelError("alpha matrix shape must be (n+2) x (n+2)")
        for i in range(size):
            for j in range(size):
                if i != j and self.alpha[i][j] <= 0:
                    raise ModelError(f"alpha must be positive on edge ({i}, {j})")
        if not self.speed_levels:
            raise ModelError("at least one speed level is required")
        if len(self._levels) != len(self.speed_levels):
            raise ModelError("speed level ids must be unique")
        for lv in self.speed_levels:
            if not (0 < lv.lower <= lv.avg <= lv.upper):
                raise ModelError(f"level {lv.id}: need 0 < lower <= avg <= upper")
            if lv.bracket_start >= lv.bracket_end:
                raise ModelError(f"level {lv.id}: empty time bracket")
        if abs(self._brackets[0].bracket_start) > EPS:
            raise ModelError("speed brackets must start at time 0")
        for a, b in zip(self._brackets, self._brackets[1:]):
            if abs(a.bracket_end - b.bracket_start) > EPS:
                raise ModelError(
                    f"speed brackets of levels {a.id} and {b.id} leave a gap or overlap")


def broadcast_alpha(value: float, size: int) -> list[list[float]]:
    """Expand a scalar edge coefficient to a full matrix (zero diagonal)."""
    return [[0.0 if i == j else value for j in range(size)] for i in range(size)]


def euclidean_distances(nodes: list[Node]) -> list[list[float]]:
    """Full distance matrix from node coordinates."""
    size = len(nodes)
    dist = [[0.0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            d = math.hypot(nodes[i].x - nodes[j].x, nodes[i].y - nodes[j].y)
            dist[i][j] = dist[j][i] = d
    return dist


# ---------------------------------------------------------------------------
# Objective
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Money cost split into its three components, plus fuel and emission.

    total == tare_term + payload_term + speed_term.  fuel_proxy is the
    physical fuel figure the money terms price; emission applies the
    instance's affine fuel-to-emission map (intercept once per route).
    """

    tare_term: float
    payload_term: float
    speed_term: float
    total: float
    fuel_proxy: float
    emission: float


ZERO_BREAKDOWN = ObjectiveBreakdown(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def edge_cost(inst: Instance, i: int, j: int, load: float,
              level: SpeedLevel | int) -> ObjectiveBreakdown:
    """Cost of driving edge (i, j) at `level` carrying `load`.

    The emission figure uses only the slope of the fuel-to-emission map;
    the per-route intercept belongs to whole-solution evaluation.
    """
    size = len(inst.nodes)
    if not (0 <= i < size) or not (0 <= j < size):
        raise ModelError(f"invalid node id on edge ({i}, {j})")
    if i == j:
        raise ModelError(f"self-edge ({i}, {j}) is not allowed")
    if isinstance(level, int):
        level = inst.level(level)
    elif level.id not in inst._levels:
        raise ModelError(f"unknown speed level id {level.id}")
    d = inst.distances[i][j]
    a = inst.alpha[i][j]
    unit = inst.unit_cost
    tare = unit * a * d * inst.vehicle_weight
    payload = unit * a * load * d
    speed = unit * d * inst.beta * level.avg ** 2
    fuel = a * (inst.vehicle_weight + load) * d + inst.beta * level.avg ** 2 * d
    slope, _ = inst.emission_params
    return ObjectiveBreakdown(tare, payload, speed, tare + payload + speed,
                              fuel, slope * fuel)


# ---------------------------------------------------------------------------
# Route timing
# ---------------------------------------------------------------------------

@dataclass
class RouteTiming:
    """Clock times for each visit of one route and the payload per edge.

    loads[e] rides the edge from visit e to visit e+1; it is the demand of
    everything still to be delivered after leaving visit e.
    """

    nodes: list[int]
    arrival: list[float]
    service_start: list[float]
    departure: list[float]
    loads: list[float]


def _require_route_shape(inst: Instance, route: list[Visit]) -> None:
    if len(route) < 2 or route[0].node != DEPOT or route[-1].node != inst.end_depot:
        raise ModelError("route must run from the start depot to the end depot")


def simulate_route(inst: Instance, route: list[Visit],
                   depart_time: float = 0.0) -> RouteTiming:
    """Timing and edge loads for one route, using the visits' own levels.

    The depot departure time is taken as given (not clamped to the depot
    window); arriving early at a customer means waiting until its window
    opens.  Feasibility is judged separately by check_feasibility.
    """
    _require_route_shape(inst, route)
    nodes = [v.node for v in route]
    arrival = [depart_time]
    service_start = [depart_time]
    departure = [depart_time + inst.nodes[DEPOT].service]
    for k in range(1, len(route)):
        visit = route[k]
        node = inst.nodes[visit.node]
        lv = inst.level(visit.speed_level)
        travel = inst.distances[nodes[k - 1]][visit.node] / lv.avg
        arr = departure[-1] + travel
        start = max(arr, node.tw_open)
        arrival.append(arr)
        service_start.append(start)
        departure.append(start + node.service)
    loads = [0.0] * (len(route) - 1)
    downstream = 0.0
    for e in range(len(route) - 2, -1, -1):
        downstream += inst.nodes[nodes[e + 1]].demand
        loads[e] = downstream
    return RouteTiming(nodes, arrival, service_start, departure, loads)


def route_from_nodes(inst: Instance, customers: list[int],
                     depart_time: float = 0.0) -> list[Visit]:
    """Build a depot-to-depot visit list over `customers`, assigning each
    edge the speed level of the bracket containing its departure time.

    Past the last bracket there is no valid level; the last level is used
    as a stand-in and the feasibility checker will flag the route.
    """
    seq = [DEPOT] + list(customers) + [inst.end_depot]
    visits = [Visit(DEPOT, 0)]
    t = depart_time + inst.nodes[DEPOT].service
    for k in range(1, len(seq)):
        lv = inst.level_at(t) or inst._brackets[-1]
        node = inst.nodes[seq[k]]
        arr = t + inst.distances[seq[k - 1]][seq[k]] / lv.avg
        t = max(arr, node.tw_open) + node.service
        visits.append(Visit(seq[k], lv.id))
    # the leading depot visit mirrors the first edge's level
    visits[0] = Visit(DEPOT, visits[1].speed_level)
    return visits


def solution_from_routes(inst: Instance, routes: list[list[int]],
                         depart_time: float = 0.0) -> Solution:
    """Solution over customer-id routes with bracket-derived speed levels."""
    return Solution([route_from_nodes(inst, r, depart_time) for r in routes])


# ---------------------------------------------------------------------------
# Feasibility
# ---------------------------------------------------------------------------

#: violation families reported by the checker
CAPACITY = "capacity"        # route demand exceeds vehicle capacity
ASSIGNMENT = "assignment"    # customer served zero or several times
STRUCTURE = "structure"      # malformed routes / too many vehicles
TIME_WINDOW = "time_window"  # service starts outside a node's window
TIMING = "timing"            # declared times inconsistent with travel
FLOW = "flow"                # declared loads do not balance demands
LOAD = "load"                # declared load outside its edge bounds
SPEED = "speed"              # edge level is not the departure bracket's


@dataclass(frozen=True)
class Violation:
    constraint: str
    route: int | None
    node: int | None
    excess: float
    message: str

    def __str__(self):
        return self.message


@dataclass
class FeasibilityReport:
    """All constraint violations of a solution, plus edge diagnostics.

    straddled_edges lists (route, tail, head) edges whose departure and
    arrival fall in different speed brackets; edges travel entirely at the
    departure bracket's speed, so this is informational, not a violation.
    """

    violations: list[Violation] = field(default_factory=list)
    straddled_edges: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def families(self) -> set[str]:
        return {v.constraint for v in self.violations}

    def __str__(self):
        if self.ok:
            return "feasible"
        return "\n".join(v.message for v in self.violations)


def _structure_violations(inst: Instance, sol: Solution) -> tuple[list[Violation], set[int]]:
    """Structural problems and the indices of routes too broken to time."""
    out: list[Violation] = []
    bad: set[int] = set()
    size = len(inst.nodes)
    if len(sol.routes) > inst.fleet_size:
        out.append(Violation(STRUCTURE, None, None,
                             len(sol.routes) - inst.fleet_size,
                             f"{len(sol.routes)} routes exceed fleet of {inst.fleet_size}"))
    for r, route in enumerate(sol.routes):
        if len(route) < 2 or route[0].node != DEPOT or route[-1].node != inst.end_depot:
            out.append(Violation(STRUCTURE, r, None, 0.0,
                                 f"route {r} must run depot 0 -> depot {inst.end_depot}"))
            bad.add(r)
            continue
        for v in route:
            if not (0 <= v.node < size):
                out.append(Violation(STRUCTURE, r, v.node, 0.0,
                                     f"route {r}: unknown node id {v.node}"))
                bad.add(r)
        for v in route[1:-1]:
            if v.node in (DEPOT, inst.end_depot):
                out.append(Violation(STRUCTURE, r, v.node, 0.0,
                                     f"route {r}: depot {v.node} visited mid-route"))
                bad.add(r)
        for a, b in zip(route, route[1:]):
            if a.node == b.node:
                out.append(Violation(STRUCTURE, r, a.node, 0.0,
                                     f"route {r}: node {a.node} repeated back to back"))
                bad.add(r)
        for v in route[1:]:
            if v.speed_level not in inst._levels:
                out.append(Violation(STRUCTURE, r, v.node, 0.0,
                                     f"route {r}: unknown speed level id {v.speed_level}"))
                bad.add(r)
    return out, bad


def check_feasibility(inst: Instance, sol: Solution,
                      depart_time: float = 0.0) -> FeasibilityReport:
    """Check every model constraint on a decoded solution.

    Times and loads are derived by simulate_route, under which the load
    bounds can only fail together with a capacity excess; such implied
    findings are folded into the capacity violation.  An empty report
    means the solution is feasible.
    """
    report = FeasibilityReport()
    structural, bad = _structure_violations(inst, sol)
    report.violations.extend(structural)

    counts: dict[int, int] = {c: 0 for c in range(1, inst.n + 1)}
    for r, route in enumerate(sol.routes):
        if r in bad:
            continue
        for v in route[1:-1]:
            counts[v.node] = counts.get(v.node, 0) + 1
    for c in range(1, inst.n + 1):
        if counts.get(c, 0) != 1:
            report.violations.append(Violation(
                ASSIGNMENT, None, c, abs(counts.get(c, 0) - 1),
                f"customer {c} served {counts.get(c, 0)} times"))

    for r, route in enumerate(sol.routes):
        if r in bad:
            continue
        timing = simulate_route(inst, route, depart_time)
        total_demand = timing.loads[0]
        if total_demand > inst.capacity + EPS:
            report.violations.append(Violation(
                CAPACITY, r, None, total_demand - inst.capacity,
                f"route {r} demand {total_demand:g} exceeds capacity "
                f"{inst.capacity:g} by {total_demand - inst.capacity:g}"))
        for k, visit in enumerate(route):
            node = inst.nodes[visit.node]
            start = timing.service_start[k]
            if start > node.tw_close + EPS:
                report.violations.append(Violation(
                    TIME_WINDOW, r, visit.node, start - node.tw_close,
                    f"route {r} node {visit.node}: service at {start:g} is "
                    f"{start - node.tw_close:g} past window close {node.tw_close:g}"))
            elif start < node.tw_open - EPS:
                # only the unclamped depot departure can start early
                report.violations.append(Violation(
                    TIME_WINDOW, r, visit.node, node.tw_open - start,
                    f"route {r} node {visit.node}: service at {start:g} is "
                    f"before window open {node.tw_open:g}"))
        for k in range(1, len(route)):
            tail, head = route[k - 1].node, route[k].node
            dep = timing.departure[k - 1]
            required = inst.level_at(dep)
            if required is None:
                report.violations.append(Violation(
                    SPEED, r, head, 0.0,
                    f"route {r} edge ({tail}, {head}): no speed bracket covers "
                    f"departure time {dep:g}"))
            elif route[k].speed_level != required.id:
                report.violations.append(Violation(
                    SPEED, r, head, 0.0,
                    f"route {r} edge ({tail}, {head}): level {route[k].speed_level} "
                    f"assigned but departure {dep:g} falls in level {required.id}"))
            arrived = inst.level_at(timing.arrival[k])
            if required is not None and arrived is not required:
                report.straddled_edges.append((r, tail, head))
        capacity_ok = total_demand <= inst.capacity + EPS
        report.violations.extend(
            verify_route_timing(inst, route, timing, depart_time,
                                check_load_bounds=capacity_ok))
    return report


def verify_route_timing(inst: Instance, route: list[Visit], timing: RouteTiming,
                        depart_time: float = 0.0, *,
                        check_load_bounds: bool = True) -> list[Violation]:
    """Validate declared times and loads against the route's physics.

    Checks (a) every service starts no earlier than travel from the
    previous departure allows, at the visit's own speed level, (b) the
    load dropped at each customer equals its demand, and (c) each used
    edge's load lies between the head's demand and capacity minus the
    tail's demand.  Useful for auditing externally supplied timings;
    simulate_route output always passes.
    """
    _require_route_shape(inst, route)
    out: list[Violation] = []
    for k in range(len(route)):
        node = inst.nodes[route[k].node]
        if timing.service_start[k] < timing.arrival[k] - EPS:
            out.append(Violation(
                TIMING, None, route[k].node,
                timing.arrival[k] - timing.service_start[k],
                f"node {route[k].node}: service starts before arrival"))
        expected_dep = timing.service_start[k] + node.service
        if abs(timing.departure[k] - expected_dep) > EPS:
            out.append(Violation(
                TIMING, None, route[k].node,
                abs(timing.departure[k] - expected_dep),
                f"node {route[k].node}: departure is not service start plus service"))
    for k in range(1, len(route)):
        tail, head = route[k - 1].node, route[k].node
        lv = inst.level(route[k].speed_level)
        earliest = timing.departure[k - 1] + inst.distances[tail][head] / lv.avg
        if timing.service_start[k] < earliest - EPS:
            out.append(Violation(
                TIMING, None, head, earliest - timing.service_start[k],
                f"edge ({tail}, {head}): service at {head} starts "
                f"{earliest - timing.service_start[k]:g} too early for the travel time"))
    for k in range(1, len(route) - 1):
        node = inst.nodes[route[k].node]
        dropped = timing.loads[k - 1] - timing.loads[k]
        if abs(dropped - node.demand) > EPS:
            out.append(Violation(
                FLOW, None, route[k].node, abs(dropped - node.demand),
                f"node {route[k].node}: load drops by {dropped:g}, demand is "
                f"{node.demand:g}"))
    if check_load_bounds:
        for e in range(len(route) - 1):
            tail, head = route[e].node, route[e + 1].node
            lo = inst.nodes[head].demand
            hi = inst.capacity - inst.nodes[tail].demand
            f_e = timing.loads[e]
            if f_e < lo - EPS:
                out.append(Violation(
                    LOAD, None, head, lo - f_e,
                    f"edge ({tail}, {head}): load {f_e:g} below the head demand {lo:g}"))
            elif f_e > hi + EPS:
                out.append(Violation(
                    LOAD, None, head, f_e - hi,
                    f"edge ({tail}, {head}): load {f_e:g} above bound {hi:g}"))
    return out


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate(inst: Instance, sol: Solution,
             depart_time: float = 0.0) -> ObjectiveBreakdown:
    """Objective of a solution: edge costs summed over all used edges.

    Defined for infeasible solutions too (pair with check_feasibility);
    only structural malformation raises.  Per-term sums use math.fsum so
    the result does not depend on route order.
    """
    structural, _ = _structure_violations(inst, sol)
    if structural:
        raise ModelError("; ".join(v.message for v in structural))
    tares: list[float] = []
    payloads: list[float] = []
    speeds: list[float] = []
    fuels: list[float] = []
    used_routes = 0
    for route in sol.routes:
        if len(route) > 2:
            used_routes += 1
        timing = simulate_route(inst, route, depart_time)
        for e in range(len(route) - 1):
            b = edge_cost(inst, route[e].node, route[e + 1].node,
                          timing.loads[e], route[e + 1].speed_level)
            tares.append(b.tare_term)
            payloads.append(b.payload_term)
            speeds.append(b.speed_term)
            fuels.append(b.fuel_proxy)
    tare = math.fsum(tares)
    payload = math.fsum(payloads)
    speed = math.fsum(speeds)
    fuel = math.fsum(fuels)
    slope, intercept = inst.emission_params
    return ObjectiveBreakdown(tare, payload, speed, tare + payload + speed,
                              fuel, slope * fuel + intercept * used_routes)
