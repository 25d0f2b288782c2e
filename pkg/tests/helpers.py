"""Shared instance builders for the test suite."""

import random

from greenroute.model import (Instance, Node, SpeedLevel, broadcast_alpha,
                              euclidean_distances, solution_from_routes)


def make_instance(customers, *, depot=(0.0, 0.0), fleet=5, capacity=100.0,
                  vehicle_weight=10.0, fuel_cost=1.0, emission_cost=0.0,
                  alpha=0.001, beta=0.0001, levels=None, horizon=1000.0,
                  distances=None, emission_params=(1.0, 0.0)):
    """Instance from (x, y, demand, service, tw_open, tw_close) tuples."""
    if levels is None:
        levels = [SpeedLevel(1, 60.0, 60.0, 60.0, 0.0, horizon)]
    n = len(customers)
    nodes = [Node(0, depot[0], depot[1], 0.0, 0.0, 0.0, horizon)]
    for i, (x, y, demand, service, tw_open, tw_close) in enumerate(customers):
        nodes.append(Node(i + 1, x, y, demand, service, tw_open, tw_close))
    nodes.append(Node(n + 1, depot[0], depot[1], 0.0, 0.0, 0.0, horizon))
    return Instance(
        nodes=nodes,
        distances=distances if distances is not None else euclidean_distances(nodes),
        fleet_size=fleet,
        vehicle_weight=vehicle_weight,
        capacity=capacity,
        fuel_cost=fuel_cost,
        emission_cost=emission_cost,
        alpha=broadcast_alpha(alpha, n + 2),
        beta=beta,
        speed_levels=levels,
        emission_params=emission_params,
    )


def hand_instance():
    """One customer 100 km out; unit cost scale chosen so the round trip
    with a 5-unit delivery costs exactly 74.5 (37.5 out, 37.0 back)."""
    return make_instance(
        [(100.0, 0.0, 5.0, 0.0, 0.0, 1000.0)],
        fleet=1, capacity=10.0,
        fuel_cost=1.0, emission_cost=0.0,
        alpha=0.001, beta=0.0001,
    )


def random_solution(inst, rng: random.Random):
    """Random partition of the customers into at most fleet_size routes."""
    customers = list(range(1, inst.n + 1))
    rng.shuffle(customers)
    count = rng.randint(1, min(inst.fleet_size, max(1, inst.n)))
    routes = [[] for _ in range(count)]
    for c in customers:
        routes[rng.randrange(count)].append(c)
    return solution_from_routes(inst, routes)
