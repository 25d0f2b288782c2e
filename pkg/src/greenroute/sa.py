"""Simulated annealing over route plans.

Search state is the set of customer orders per vehicle; speed levels are
never searched because the time-of-day bracket rule pins them once the
order and the departure time are fixed.  Each step draws one of four
mutation kinds (segment mirror, customer relocation, cross-route swap,
in-route swap; an optional fifth relocates a whole segment across
routes), regenerates until a feasible candidate appears, and applies
Metropolis acceptance with geometric cooling.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from typing import NamedTuple

from .model import (EPS, Instance, ObjectiveBreakdown, Solution, evaluate,
                    route_from_nodes, solution_from_routes)

MIRROR, RELOCATE, CROSS_SWAP, IN_SWAP, SEGMENT = 1, 2, 3, 4, 5


@dataclass
class SAConfig:
    """Annealer knobs.  attempts_cap and moves_per_temp default to n + 50
    and n for an n-customer instance when left unset."""

    t_initial: float = 1.0
    t_final: float = 0.001
    cooling: float = 0.97
    attempts_cap: int | None = None
    moves_per_temp: int | None = None
    seed: int | None = None
    normalize_delta: bool = True
    use_segment_move: bool = False

    def __post_init__(self):
        if not 0 < self.t_final < self.t_initial:
            raise ValueError("need 0 < t_final < t_initial")
        if not 0 < self.cooling < 1:
            raise ValueError("cooling factor must be in (0, 1)")
        if self.attempts_cap is not None and self.attempts_cap < 1:
            raise ValueError("attempts_cap must be at least 1")
        if self.moves_per_temp is not None and self.moves_per_temp < 1:
            raise ValueError("moves_per_temp must be at least 1")


@dataclass(frozen=True)
class TraceRow:
    epoch: int
    temperature: float
    current: float
    best: float
    accepted: bool
    kind: int
    candidate: float


@dataclass
class AnnealTrace:
    """One row per candidate actually generated (skipped steps leave no
    row).  current/best are the objective after the acceptance decision."""

    rows: list[TraceRow] = field(default_factory=list)
    initial_objective: float = math.nan

    def best_by_epoch(self) -> list[float]:
        """Best objective at the end of each epoch (carried when idle)."""
        out: list[float] = []
        last = self.initial_objective
        for row in self.rows:
            while len(out) < row.epoch:
                out.append(last)
            last = row.best
        out.append(last)
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "temperature", "current", "best",
                             "accepted", "kind"])
            for r in self.rows:
                writer.writerow([r.epoch, repr(r.temperature), repr(r.current),
                                 repr(r.best), int(r.accepted), r.kind])


@dataclass
class AnnealResult:
    status: str                 # "solved" or "unsolved"
    solution: Solution | None
    objective: ObjectiveBreakdown | None
    trace: AnnealTrace


class NeighborMove(NamedTuple):
    solution: Solution
    kind: int
    noop: bool


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


# ---------------------------------------------------------------------------
# Fast per-route scoring (bracket-rule levels, capacity + window check)
# ---------------------------------------------------------------------------

_INFEASIBLE = (False, math.inf)


def _score_route(inst: Instance, customers: tuple[int, ...],
                 depart_time: float) -> tuple[bool, float]:
    """(feasible, cost) of one route served in the given customer order.

    Mirrors simulate_route/check_feasibility arithmetic exactly so that a
    solution assembled from routes scored feasible here always passes the
    public checker.
    """
    nodes = inst.nodes
    if sum(nodes[c].demand for c in customers) > inst.capacity + EPS:
        return _INFEASIBLE
    dist = inst.distances
    alpha = inst.alpha
    unit = inst.unit_cost
    tare_w = inst.vehicle_weight
    beta = inst.beta
    t = depart_time + nodes[0].service
    prev = 0
    path_cost = 0.0    # unit * alpha * d summed along the path so far
    cost = 0.0
    for c in (*customers, inst.end_depot):
        lv = inst.level_at(t)
        if lv is None:
            return _INFEASIBLE
        d = dist[prev][c]
        ua = unit * alpha[prev][c] * d
        path_cost += ua
        cost += ua * tare_w + unit * d * beta * lv.avg * lv.avg
        node = nodes[c]
        start = max(t + d / lv.avg, node.tw_open)
        if start > node.tw_close + EPS:
            return _INFEASIBLE
        cost += node.demand * path_cost
        t = start + node.service
        prev = c
    return True, cost


def _first_window_violation(inst: Instance, customers: list[int],
                            depart_time: float) -> int | None:
    """Index of the first customer whose window is missed, else None."""
    nodes = inst.nodes
    t = depart_time + nodes[0].service
    prev = 0
    for i, c in enumerate(customers):
        lv = inst.level_at(t)
        if lv is None:
            return i
        node = nodes[c]
        start = max(t + inst.distances[prev][c] / lv.avg, node.tw_open)
        if start > node.tw_close + EPS:
            return i
        t = start + node.service
        prev = c
    return None


# ---------------------------------------------------------------------------
# Initial solution
# ---------------------------------------------------------------------------

def _greedy_split(inst: Instance, perm: list[int],
                  depart_time: float) -> list[list[int]]:
    """Assign each customer, in permutation order, to the first open route
    that can still take it (capacity and window); a new route opens when
    none can.  A customer that misses its window even on a fresh route is
    appended anyway so the caller sees the violation instead of losing
    the customer."""
    t0 = depart_time + inst.nodes[0].service
    routes: list[list[int]] = []
    loads: list[float] = []
    clocks: list[float] = []
    tails: list[int] = []
    for c in perm:
        node = inst.nodes[c]
        placed = None
        for r in range(len(routes)):
            if loads[r] + node.demand > inst.capacity + EPS:
                continue
            lv = inst.level_at(clocks[r])
            if lv is None:
                continue
            start = max(clocks[r] + inst.distances[tails[r]][c] / lv.avg,
                        node.tw_open)
            if start > node.tw_close + EPS:
                continue
            placed = r
            break
        if placed is None:
            routes.append([])
            loads.append(0.0)
            clocks.append(t0)
            tails.append(0)
            placed = len(routes) - 1
        lv = inst.level_at(clocks[placed])
        speed = lv.avg if lv is not None else inst._brackets[-1].avg
        start = max(clocks[placed] + inst.distances[tails[placed]][c] / speed,
                    node.tw_open)
        routes[placed].append(c)
        loads[placed] += node.demand
        clocks[placed] = start + node.service
        tails[placed] = c
    return routes


def _repair_route(inst: Instance, route: list[int], depart_time: float,
                  passes: int) -> None:
    """Rotate window offenders: the first customer reached too late moves
    to the end of its route and its successor moves to the front."""
    for _ in range(max(1, passes)):
        i = _first_window_violation(inst, route, depart_time)
        if i is None:
            return
        offender = route.pop(i)
        if i < len(route):
            route.insert(0, route.pop(i))
        route.append(offender)


def initial_solution(inst: Instance, seed=None, attempts: int | None = None,
                     depart_time: float = 0.0) -> Solution:
    """Random-permutation construction with window repair.

    Customers are shuffled, split greedily (a route closes when the next
    customer would overload it or miss its window), and each route is
    repaired by the offender rotation above (at most n passes per route).
    Fresh permutations are tried until one comes out feasible or the
    attempt budget runs out; then the least-violating attempt is returned
    as a flagged best effort (callers re-check feasibility).  The restart
    permutations alternate uniform shuffles with deadline-sorted orders,
    which rescue tightly windowed instances the rotation repair cycles
    on.  Unused vehicles are kept as empty depot-to-depot routes so later
    moves can dispatch them.
    """
    rng = _rng(seed)
    n = inst.n
    if attempts is None:
        attempts = n + 50
    customers = list(range(1, n + 1))
    best: list[list[int]] | None = None
    best_bad = math.inf
    for attempt in range(max(1, attempts)):
        perm = customers[:]
        if attempt == 1:
            perm.sort(key=lambda c: inst.nodes[c].tw_close)
        elif attempt > 1 and attempt % 2 == 0:
            jitter = {c: rng.gauss(0.0, 1.0) for c in perm}
            perm.sort(key=lambda c: inst.nodes[c].tw_close + jitter[c])
        else:
            rng.shuffle(perm)
        routes = _greedy_split(inst, perm, depart_time)
        if len(routes) > inst.fleet_size:
            continue
        for route in routes:
            _repair_route(inst, route, depart_time, passes=n)
        routes.extend([] for _ in range(inst.fleet_size - len(routes)))
        scores = [_score_route(inst, tuple(r), depart_time) for r in routes]
        if all(ok for ok, _ in scores):
            return solution_from_routes(inst, routes, depart_time)
        bad = sum(1 for ok, _ in scores if not ok)
        if bad < best_bad:
            best, best_bad = routes, bad
    if best is None:
        best = _greedy_split(inst, customers, depart_time)
    return solution_from_routes(inst, best, depart_time)


# ---------------------------------------------------------------------------
# Neighborhood moves
# ---------------------------------------------------------------------------

def mirror_segment(route: list[int], i: int, j: int) -> list[int]:
    """Reverse positions i..j (inclusive) of a customer sequence."""
    out = route[:]
    out[i:j + 1] = reversed(out[i:j + 1])
    return out


def swap_positions(route: list[int], i: int, j: int) -> list[int]:
    """Exchange the customers at positions i and j."""
    out = route[:]
    out[i], out[j] = out[j], out[i]
    return out


def _try_kind(routes: list[list[int]], kind: int,
              rng: random.Random) -> tuple[list[list[int]], list[int]] | None:
    """Apply one mutation kind; None when the kind is degenerate here.

    Returns the new route lists and the indices of the routes touched.
    """
    nonempty = [i for i, r in enumerate(routes) if r]
    if kind == MIRROR:
        eligible = [i for i, r in enumerate(routes) if len(r) >= 2]
        if not eligible:
            return None
        r = rng.choice(eligible)
        a, b = sorted(rng.sample(range(len(routes[r])), 2))
        out = list(routes)
        out[r] = mirror_segment(routes[r], a, b)
        return out, [r]
    if kind == RELOCATE:
        spots = [(i, p) for i in nonempty for p in range(len(routes[i]))]
        if not spots:
            return None
        src, pos = spots[rng.randrange(len(spots))]
        out = [r[:] for r in routes]
        customer = out[src].pop(pos)
        slots = [(i, q) for i in range(len(out)) for q in range(len(out[i]) + 1)
                 if (i, q) != (src, pos)]
        if not slots:
            return None
        dst, q = slots[rng.randrange(len(slots))]
        out[dst].insert(q, customer)
        return out, [src, dst] if src != dst else [src]
    if kind == CROSS_SWAP:
        if len(nonempty) < 2:
            return None
        r1, r2 = rng.sample(nonempty, 2)
        p1 = rng.randrange(len(routes[r1]))
        p2 = rng.randrange(len(routes[r2]))
        out = list(routes)
        out[r1], out[r2] = routes[r1][:], routes[r2][:]
        out[r1][p1], out[r2][p2] = out[r2][p2], out[r1][p1]
        return out, [r1, r2]
    if kind == IN_SWAP:
        eligible = [i for i, r in enumerate(routes) if len(r) >= 2]
        if not eligible:
            return None
        r = rng.choice(eligible)
        a, b = rng.sample(range(len(routes[r])), 2)
        out = list(routes)
        out[r] = swap_positions(routes[r], a, b)
        return out, [r]
    if kind == SEGMENT:
        if len(routes) < 2 or not nonempty:
            return None
        src = rng.choice(nonempty)
        a, b = sorted((rng.randrange(len(routes[src])),
                       rng.randrange(len(routes[src]))))
        others = [i for i in range(len(routes)) if i != src]
        dst = rng.choice(others)
        out = [r[:] for r in routes]
        segment = out[src][a:b + 1]
        del out[src][a:b + 1]
        q = rng.randrange(len(out[dst]) + 1)
        out[dst][q:q] = segment
        return out, [src, dst]
    raise ValueError(f"unknown move kind {kind}")


def _apply_move(routes: list[list[int]], kind: int, rng: random.Random,
                kinds: tuple[int, ...]):
    """Try `kind`, resampling a different kind when degenerate; None after
    four kinds have failed."""
    tried = []
    while True:
        result = _try_kind(routes, kind, rng)
        if result is not None:
            return result[0], kind, result[1]
        tried.append(kind)
        remaining = [k for k in kinds if k not in tried]
        if len(tried) >= 4 or not remaining:
            return None
        kind = rng.choice(remaining)


def neighbor(inst: Instance, sol: Solution, kind: int, seed=None,
             depart_time: float = 0.0) -> NeighborMove:
    """One random mutation of `sol`; speed levels are re-derived from the
    bracket rule on every touched route.  Degenerate kinds are resampled;
    a fully stuck input comes back unchanged with noop set."""
    rng = _rng(seed)
    kinds = (MIRROR, RELOCATE, CROSS_SWAP, IN_SWAP)
    if kind == SEGMENT:
        kinds += (SEGMENT,)
    routes = [[v.node for v in r[1:-1]] for r in sol.routes]
    moved = _apply_move(routes, kind, rng, kinds)
    if moved is None:
        return NeighborMove(sol, kind, True)
    new_routes, applied, changed = moved
    out = list(sol.routes)
    for i in changed:
        out[i] = route_from_nodes(inst, new_routes[i], depart_time)
    return NeighborMove(Solution(out), applied, False)


# ---------------------------------------------------------------------------
# Annealing loop
# ---------------------------------------------------------------------------

def anneal(inst: Instance, cfg: SAConfig | None = None,
           depart_time: float = 0.0) -> AnnealResult:
    """Run the annealer and return the best feasible solution seen.

    Per temperature epoch, moves_per_temp steps each draw a move kind and
    regenerate candidates until one is feasible (at most attempts_cap
    tries, else the step is skipped).  Improvements are always accepted;
    a worsening delta is accepted with probability exp(-delta/T), with
    delta taken relative to the current objective when normalize_delta is
    on.  The temperature then decays by the cooling factor until it drops
    below t_final.  When no feasible start is found the result carries
    status "unsolved" instead of a solution.
    """
    if cfg is None:
        cfg = SAConfig()
    rng = random.Random(cfg.seed)
    n = inst.n
    attempts_cap = cfg.attempts_cap if cfg.attempts_cap is not None else n + 50
    moves_per_temp = cfg.moves_per_temp if cfg.moves_per_temp is not None else max(1, n)
    kinds = (MIRROR, RELOCATE, CROSS_SWAP, IN_SWAP, SEGMENT) \
        if cfg.use_segment_move else (MIRROR, RELOCATE, CROSS_SWAP, IN_SWAP)
    trace = AnnealTrace()

    depot = inst.nodes[0]
    if not depot.tw_open - EPS <= depart_time <= depot.tw_close + EPS:
        return AnnealResult("unsolved", None, None, trace)

    start = initial_solution(inst, rng, attempts=attempts_cap,
                             depart_time=depart_time)
    routes = [tuple(v.node for v in r[1:-1]) for r in start.routes]
    if len(routes) > inst.fleet_size:
        return AnnealResult("unsolved", None, None, trace)
    cache: dict[tuple[int, ...], tuple[bool, float]] = {}

    def score(key: tuple[int, ...]) -> tuple[bool, float]:
        got = cache.get(key)
        if got is None:
            got = _score_route(inst, key, depart_time)
            cache[key] = got
        return got

    scored = [score(r) for r in routes]
    if not all(ok for ok, _ in scored):
        return AnnealResult("unsolved", None, None, trace)
    costs = [c for _, c in scored]
    current = sum(costs)
    trace.initial_objective = current
    best_routes, best_cost = list(routes), current

    temp = cfg.t_initial
    epoch = 0
    while temp >= cfg.t_final:
        for _ in range(moves_per_temp):
            kind = rng.choice(kinds)
            candidate = None
            for _attempt in range(attempts_cap):
                moved = _apply_move([list(r) for r in routes], kind, rng, kinds)
                if moved is None:
                    candidate = (routes, costs, kind, current)
                    break
                new_lists, applied, changed = moved
                feasible = True
                patch = []
                for i in changed:
                    key = tuple(new_lists[i])
                    ok, cost = score(key)
                    if not ok:
                        feasible = False
                        break
                    patch.append((i, key, cost))
                if feasible:
                    new_routes, new_costs = list(routes), costs[:]
                    for i, key, cost in patch:
                        new_routes[i], new_costs[i] = key, cost
                    candidate = (new_routes, new_costs, applied, sum(new_costs))
                    break
            if candidate is None:
                continue    # step skipped: no feasible neighbor in budget
            new_routes, new_costs, applied, cand_total = candidate
            delta = cand_total - current
            if delta <= 0:
                accepted = True
            else:
                scaled = delta / abs(current) \
                    if cfg.normalize_delta and current != 0 else delta
                accepted = rng.random() < math.exp(-scaled / temp)
            if accepted:
                routes, costs, current = new_routes, new_costs, cand_total
                if current < best_cost:
                    best_routes, best_cost = list(routes), current
            trace.rows.append(TraceRow(epoch, temp, current, best_cost,
                                       accepted, applied, cand_total))
        temp *= cfg.cooling
        epoch += 1

    solution = solution_from_routes(inst, [list(r) for r in best_routes],
                                    depart_time)
    return AnnealResult("solved", solution, evaluate(inst, solution, depart_time),
                        trace)
