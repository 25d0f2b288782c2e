"""Exhaustive exact solver and MILP text export.

solve_exact runs a depth-first enumeration of all ways to order and split
the customers into at most fleet_size routes, with capacity, time-window
and partial-cost pruning.  It is the optimality oracle for small
instances; the proven flag records whether the search finished inside its
time budget.

export_milp writes the full linearized mixed-integer model in LP text
format so any off-the-shelf solver can be pointed at an instance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .model import (EPS, Instance, ObjectiveBreakdown, Solution, evaluate,
                    solution_from_routes)


@dataclass
class ExactResult:
    """Search outcome.  status is one of "optimal", "incumbent" (budget hit
    with a feasible solution in hand), "infeasible" (proven empty feasible
    set) or "unknown" (budget hit before finding anything)."""

    status: str
    optimum: ObjectiveBreakdown | None
    solution: Solution | None
    nodes_explored: int
    proven: bool


class _Stop(Exception):
    pass


def _seed_incumbent(inst: Instance, depart_time: float):
    """Cheap feasible warm start (deadline-ordered first-fit) so a
    truncated search still returns a best-so-far; pruning only, never
    part of the enumeration."""
    from .sa import _greedy_split, _score_route

    order = sorted(range(1, inst.n + 1), key=lambda c: inst.nodes[c].tw_close)
    routes = _greedy_split(inst, order, depart_time)
    if len(routes) > inst.fleet_size:
        return None
    scores = [_score_route(inst, tuple(r), depart_time) for r in routes]
    if not all(ok for ok, _ in scores):
        return None
    return routes, sum(cost for _, cost in scores)


def solve_exact(inst: Instance, time_budget: float = 1800.0,
                depart_time: float = 0.0) -> ExactResult:
    """Enumerate routes depth-first and return the best solution found.

    Branches extend the current route customer by customer (ascending id)
    or close it and open the next one; vehicles are identical, so new
    routes are only started on a customer id above the previous route's
    first customer.  A branch dies when it exceeds the capacity, misses a
    time window at the earliest possible arrival, runs past the speed
    brackets, or already costs at least as much as the incumbent.
    """
    deadline = time.perf_counter() + time_budget
    nodes = inst.nodes
    dist = inst.distances
    alpha = inst.alpha
    unit = inst.unit_cost
    tare_w = inst.vehicle_weight
    beta = inst.beta
    cap = inst.capacity
    end = inst.end_depot
    fleet = inst.fleet_size
    t0 = depart_time + nodes[0].service

    best_cost = float("inf")
    best_routes: list[list[int]] | None = None
    explored = 0
    done: list[list[int]] = []
    cur: list[int] = []

    depot_ok = nodes[0].tw_open - EPS <= depart_time <= nodes[0].tw_close + EPS

    def try_step(frm: int, clock: float, path_cost: float, c: int):
        """Append customer c after frm; None when the window is missed."""
        lv = inst.level_at(clock)
        if lv is None:
            return None
        d = dist[frm][c]
        node = nodes[c]
        start = max(clock + d / lv.avg, node.tw_open)
        if start > node.tw_close + EPS:
            return None
        new_path = path_cost + unit * alpha[frm][c] * d
        delta = (unit * alpha[frm][c] * d * tare_w
                 + unit * d * beta * lv.avg * lv.avg
                 + node.demand * new_path)
        return start + node.service, new_path, delta

    def close_total(tail: int, clock: float, cost: float):
        """Total cost after returning to the end depot, or None."""
        lv = inst.level_at(clock)
        if lv is None:
            return None
        d = dist[tail][end]
        start = max(clock + d / lv.avg, nodes[end].tw_open)
        if start > nodes[end].tw_close + EPS:
            return None
        return cost + unit * alpha[tail][end] * d * tare_w \
            + unit * d * beta * lv.avg * lv.avg

    def open_new(remaining: list[int], min_first: int, base_cost: float):
        for idx, c in enumerate(remaining):
            if c <= min_first:
                continue
            if nodes[c].demand > cap + EPS:
                continue
            step = try_step(0, t0, 0.0, c)
            if step is None:
                continue
            clock, path_cost, delta = step
            cost = base_cost + delta
            if cost >= best_cost:
                continue
            cur.append(c)
            dfs(remaining[:idx] + remaining[idx + 1:], c, clock, path_cost,
                nodes[c].demand, cost, c)
            cur.pop()

    def dfs(remaining, tail, clock, path_cost, demand, cost, first):
        nonlocal best_cost, best_routes, explored
        explored += 1
        if not explored & 1023 and time.perf_counter() > deadline:
            raise _Stop
        # fill the current route first; closing it comes last
        for idx, c in enumerate(remaining):
            node = nodes[c]
            if demand + node.demand > cap + EPS:
                continue
            step = try_step(tail, clock, path_cost, c)
            if step is None:
                continue
            nclock, npath, delta = step
            ncost = cost + delta
            if ncost >= best_cost:
                continue
            cur.append(c)
            dfs(remaining[:idx] + remaining[idx + 1:], c, nclock, npath,
                demand + node.demand, ncost, first)
            cur.pop()
        closed = close_total(tail, clock, cost)
        if closed is not None and closed < best_cost:
            if not remaining:
                best_cost = closed
                best_routes = [r[:] for r in done] + [cur[:]]
            elif len(done) + 2 <= fleet:
                done.append(cur[:])
                saved = cur[:]
                cur.clear()
                open_new(remaining, first, closed)
                cur[:] = saved
                done.pop()

    proven = True
    if depot_ok:
        customers = list(range(1, inst.n + 1))
        if not customers:
            best_cost, best_routes = 0.0, []
        else:
            seed = _seed_incumbent(inst, depart_time)
            if seed is not None:
                best_routes, best_cost = seed
            try:
                open_new(customers, 0, 0.0)
            except _Stop:
                proven = False
    if best_routes is None:
        return ExactResult("infeasible" if proven else "unknown",
                           None, None, explored, proven)
    solution = solution_from_routes(inst, best_routes, depart_time)
    optimum = evaluate(inst, solution, depart_time)
    return ExactResult("optimal" if proven else "incumbent",
                       optimum, solution, explored, proven)


# ---------------------------------------------------------------------------
# MILP export
# ---------------------------------------------------------------------------

def usable_edges(inst: Instance) -> list[tuple[int, int]]:
    """Arcs a route may use: no arc enters the start depot, none leaves
    the end depot, and the depot-to-depot arc is dropped too."""
    end = inst.end_depot
    return [(i, j) for i in range(end) for j in range(1, end + 1)
            if i != j and not (i == 0 and j == end)]


def big_m(inst: Instance, i: int, j: int) -> float:
    """Timing activation constant for arc (i, j): the latest feasible
    departure from i plus the slowest legal travel time, minus the
    earliest service at j, clamped at zero."""
    slowest = min(lv.lower for lv in inst.speed_levels)
    gap = (inst.nodes[i].tw_close + inst.nodes[i].service
           + inst.distances[i][j] / slowest - inst.nodes[j].tw_open)
    return max(0.0, gap)


def _fmt(x: float) -> str:
    return repr(float(x))


def _expr(terms) -> str:
    parts = []
    for coef, name in terms:
        if coef < 0:
            parts.append(f"- {_fmt(-coef)} {name}")
        elif parts:
            parts.append(f"+ {_fmt(coef)} {name}")
        else:
            parts.append(f"{_fmt(coef)} {name}")
    return " ".join(parts)


def _wrap(label: str, body: str, tail: str, width: int = 200) -> list[str]:
    words = body.split(" ")
    lines = [f" {label}: "]
    for word in words:
        if len(lines[-1]) + len(word) > width:
            lines.append("   ")
        lines[-1] += word + " "
    lines[-1] += tail
    return lines


def export_milp(inst: Instance) -> str:
    """Serialize the instance's mixed-integer model as LP format text.

    Binary x_i_j_k picks arc (i, j) for vehicle k, binary z_i_j_r picks
    the speed level driven on the arc, continuous f_i_j carries the
    payload and y_i_k the service start times.  Output ordering is
    deterministic so exports diff cleanly.
    """
    n = inst.n
    k_count = inst.fleet_size
    end = inst.end_depot
    edges = usable_edges(inst)
    vehicles = range(1, k_count + 1)
    levels = inst.speed_levels
    out_of: dict[int, list[int]] = {i: [] for i in range(end + 1)}
    into: dict[int, list[int]] = {i: [] for i in range(end + 1)}
    for i, j in edges:
        out_of[i].append(j)
        into[j].append(i)
    q = [node.demand for node in inst.nodes]
    unit = inst.unit_cost

    lines = [
        "\\ Mixed-integer model for the fuel/emission routing instance",
        f"\\ n={n} customers, k={k_count} vehicles, r={len(levels)} speed levels",
        "\\ Variables: x_i_j_k arc use (binary), z_i_j_r arc speed level (binary),",
        "\\            f_i_j payload carried on the arc, y_i_k service start times.",
        "\\ Usable arcs exclude arcs into the start depot, arcs out of the end",
        "\\ depot, and the direct start-to-end depot arc.",
        "\\ Timing rows use M_ij = max(0, close_i + service_i + d_ij/l - open_j)",
        "\\ with l the slowest lower speed bound over all levels.  The",
        "\\ return-to-depot variant of the same device would use one global",
        "\\ constant L = max of that expression over all arcs; it is implied by",
        "\\ the end-depot window bounds and not emitted as rows.",
        "\\ Speed levels are not tied to clock-time brackets by any row here;",
        "\\ the native feasibility checker enforces the bracket rule instead.",
        "\\ Row counts: cap k, serve n, deg n*k, depart k, arrive k,",
        "\\ twlo/twhi (n+2)*k each, flow n, loadlo/loadhi n*(n+1) each,",
        "\\ speed n*(n+1), time n^2*k.",
        "Minimize",
    ]
    obj = []
    for k in vehicles:
        for i, j in edges:
            obj.append((unit * inst.alpha[i][j] * inst.distances[i][j]
                        * inst.vehicle_weight, f"x_{i}_{j}_{k}"))
    for i, j in edges:
        obj.append((unit * inst.alpha[i][j] * inst.distances[i][j], f"f_{i}_{j}"))
    for i, j in edges:
        for lv in levels:
            obj.append((unit * inst.distances[i][j] * inst.beta * lv.avg ** 2,
                        f"z_{i}_{j}_{lv.id}"))
    lines.extend(_wrap("obj", _expr(obj), ""))
    lines.append("Subject To")

    def row(name, terms, rel, rhs):
        lines.extend(_wrap(name, _expr(terms), f"{rel} {_fmt(rhs)}"))

    for k in vehicles:
        terms = [(q[i], f"x_{i}_{j}_{k}") for i in range(1, n + 1)
                 for j in out_of[i]]
        row(f"cap_{k}", terms, "<=", inst.capacity)
    for i in range(1, n + 1):
        terms = [(1.0, f"x_{i}_{j}_{k}") for k in vehicles for j in out_of[i]]
        row(f"serve_{i}", terms, "=", 1.0)
    for l in range(1, n + 1):
        for k in vehicles:
            terms = [(1.0, f"x_{i}_{l}_{k}") for i in into[l]]
            terms += [(-1.0, f"x_{l}_{j}_{k}") for j in out_of[l]]
            row(f"deg_{l}_{k}", terms, "=", 0.0)
    for k in vehicles:
        row(f"depart_{k}", [(1.0, f"x_0_{j}_{k}") for j in out_of[0]], "=", 1.0)
    for k in vehicles:
        row(f"arrive_{k}", [(1.0, f"x_{i}_{end}_{k}") for i in into[end]], "=", 1.0)
    for i in range(end + 1):
        node = inst.nodes[i]
        for k in vehicles:
            terms = [(node.tw_open, f"x_{i}_{j}_{k}") for j in out_of[i]]
            terms.append((-1.0, f"y_{i}_{k}"))
            row(f"twlo_{i}_{k}", terms, "<=", 0.0)
    for i in range(end + 1):
        node = inst.nodes[i]
        for k in vehicles:
            terms = [(node.tw_close, f"x_{i}_{j}_{k}") for j in out_of[i]]
            terms.append((-1.0, f"y_{i}_{k}"))
            row(f"twhi_{i}_{k}", terms, ">=", 0.0)
    for i in range(1, n + 1):
        terms = [(1.0, f"f_{j}_{i}") for j in into[i]]
        terms += [(-1.0, f"f_{i}_{j}") for j in out_of[i]]
        row(f"flow_{i}", terms, "=", q[i])
    for i, j in edges:
        terms = [(1.0, f"f_{i}_{j}")]
        terms += [(-q[j], f"x_{i}_{j}_{k}") for k in vehicles]
        row(f"loadlo_{i}_{j}", terms, ">=", 0.0)
    for i, j in edges:
        terms = [(1.0, f"f_{i}_{j}")]
        terms += [(-(inst.capacity - q[i]), f"x_{i}_{j}_{k}") for k in vehicles]
        row(f"loadhi_{i}_{j}", terms, "<=", 0.0)
    for i, j in edges:
        terms = [(1.0, f"z_{i}_{j}_{lv.id}") for lv in levels]
        terms += [(-1.0, f"x_{i}_{j}_{k}") for k in vehicles]
        row(f"speed_{i}_{j}", terms, "=", 0.0)
    for i, j in edges:
        if j == end:
            continue
        m = big_m(inst, i, j)
        for k in vehicles:
            terms = [(1.0, f"y_{i}_{k}"), (-1.0, f"y_{j}_{k}")]
            terms += [(inst.distances[i][j] / lv.avg, f"z_{i}_{j}_{lv.id}")
                      for lv in levels]
            terms.append((m, f"x_{i}_{j}_{k}"))
            row(f"time_{i}_{j}_{k}", terms, "<=", m - inst.nodes[i].service)

    lines.append("Bounds")
    for i, j in edges:
        lines.append(f" f_{i}_{j} >= 0")
    for i in range(end + 1):
        for k in vehicles:
            lines.append(f" y_{i}_{k} >= 0")
    lines.append("Binaries")
    for k in vehicles:
        for i, j in edges:
            lines.append(f" x_{i}_{j}_{k}")
    for i, j in edges:
        for lv in levels:
            lines.append(f" z_{i}_{j}_{lv.id}")
    lines.append("End")
    return "\n".join(lines) + "\n"
