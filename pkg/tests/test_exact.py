import pytest

from greenroute.exact import solve_exact
from greenroute.instgen import GenSpec, generate
from greenroute.model import check_feasibility, evaluate, solution_from_routes
from greenroute.sa import SAConfig, anneal

from helpers import make_instance

from naive_enum import best_solution


def test_single_customer_is_forced():
    inst = make_instance([(50.0, 0.0, 2.0, 0.0, 0.0, 1000.0)], fleet=1)
    result = solve_exact(inst)
    assert result.status == "optimal" and result.proven
    forced = solution_from_routes(inst, [[1]])
    assert result.optimum.total == evaluate(inst, forced).total
    assert [[v.node for v in r[1:-1]] for r in result.solution.routes] == [[1]]


def test_three_customers_single_vehicle_matches_permutation_minimum():
    customers = [(30.0, 10.0, 1.0, 0.1, 0.0, 1000.0),
                 (10.0, 40.0, 1.0, 0.1, 0.0, 1000.0),
                 (50.0, 50.0, 1.0, 0.1, 0.0, 1000.0)]
    inst = make_instance(customers, fleet=1, capacity=10.0)
    _, oracle = best_solution(inst)
    result = solve_exact(inst)
    assert result.proven
    assert result.optimum.total == oracle.total


def test_matches_naive_enumeration_on_random_instances():
    for seed in range(8):
        inst = generate(GenSpec(customers=5, seed=1000 + seed))
        _, oracle = best_solution(inst)
        result = solve_exact(inst, time_budget=30)
        assert result.proven
        assert oracle is not None
        assert result.optimum.total == oracle.total
        assert check_feasibility(inst, result.solution).ok


def test_proven_optimum_dominates_annealer():
    for seed in range(5):
        inst = generate(GenSpec(customers=7, seed=2000 + seed))
        exact = solve_exact(inst, time_budget=60)
        sa = anneal(inst, SAConfig(seed=seed))
        assert exact.proven and sa.status == "solved"
        assert exact.optimum.total <= sa.objective.total * (1 + 1e-12)


def test_budget_exhaustion_returns_unproven_incumbent():
    inst = generate(GenSpec(customers=18, seed=5))
    result = solve_exact(inst, time_budget=0.05)
    assert not result.proven
    assert result.status == "incumbent"
    assert result.solution is not None
    assert check_feasibility(inst, result.solution).ok


def test_infeasible_instance_is_proven_infeasible():
    inst = make_instance([(60.0, 0.0, 1.0, 0.0, 0.0, 0.5)], fleet=1)
    result = solve_exact(inst)
    assert result.status == "infeasible"
    assert result.proven
    assert result.optimum is None and result.solution is None


def test_no_customers_solves_trivially():
    inst = make_instance([], fleet=1)
    result = solve_exact(inst)
    assert result.status == "optimal"
    assert result.optimum.total == 0.0
    assert result.solution.routes == []


def test_capacity_forces_route_split():
    customers = [(20.0, 0.0, 6.0, 0.0, 0.0, 1000.0),
                 (40.0, 0.0, 6.0, 0.0, 0.0, 1000.0)]
    inst = make_instance(customers, fleet=3, capacity=10.0)
    result = solve_exact(inst)
    assert result.proven
    assert len(result.solution.routes) == 2
