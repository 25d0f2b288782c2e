import dataclasses

import pytest

from greenroute.files import write_instance
from greenroute.instgen import (BRACKET_SWITCH, GenerationError, GenSpec,
                                generate)
from greenroute.model import check_feasibility, solution_from_routes


def test_vehicle_weight_and_capacity_are_ten():
    for seed in (0, 7, 123):
        inst = generate(GenSpec(customers=6, seed=seed))
        assert inst.vehicle_weight == 10.0
        assert inst.capacity == 10.0


def test_speed_levels_sixty_then_fifty():
    inst = generate(GenSpec(customers=4, seed=1))
    assert [lv.avg for lv in inst.speed_levels] == [60.0, 50.0]
    assert inst.speed_levels[0].bracket_start == 0.0
    assert inst.speed_levels[0].bracket_end == BRACKET_SWITCH
    assert inst.speed_levels[1].bracket_end == inst.horizon


def test_same_seed_gives_identical_files(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    write_instance(generate(GenSpec(customers=9, seed=42)), a)
    write_instance(generate(GenSpec(customers=9, seed=42)), b)
    assert a.read_bytes() == b.read_bytes()
    write_instance(generate(GenSpec(customers=9, seed=43)), b)
    assert a.read_bytes() != b.read_bytes()


def test_one_customer_per_vehicle_is_feasible():
    for seed in range(20):
        inst = generate(GenSpec(customers=7, seed=600 + seed))
        solo = dataclasses.replace(inst, fleet_size=inst.n)
        sol = solution_from_routes(solo, [[c] for c in range(1, inst.n + 1)])
        assert check_feasibility(solo, sol).ok, seed


def test_default_fleet_admits_a_feasible_solution():
    from greenroute.sa import initial_solution
    for seed in range(30):
        inst = generate(GenSpec(customers=15, seed=900 + seed))
        sol = initial_solution(inst, seed=0)
        assert check_feasibility(inst, sol).ok, seed


def test_demand_mean_near_range_midpoint():
    total = count = 0
    for seed in range(1000):
        inst = generate(GenSpec(customers=5, seed=seed))
        total += sum(node.demand for node in inst.nodes[1:-1])
        count += inst.n
    mean = total / count
    assert 1.8 <= mean <= 2.2


def test_default_fleet_formula():
    assert GenSpec(customers=5).resolved_fleet() == 2
    assert GenSpec(customers=9).resolved_fleet() == 3
    assert GenSpec(customers=50).resolved_fleet() == 11
    assert GenSpec(customers=5, fleet_size=4).resolved_fleet() == 4


def test_overlarge_area_fails_loudly():
    with pytest.raises(GenerationError):
        generate(GenSpec(customers=3, seed=0, area=3000.0))


def test_undersized_fleet_fails_loudly():
    with pytest.raises(GenerationError):
        generate(GenSpec(customers=20, seed=0, fleet_size=1))


def test_spec_validation():
    with pytest.raises(ValueError):
        GenSpec(customers=0)
    with pytest.raises(ValueError):
        GenSpec(customers=3, horizon=6.0)
    with pytest.raises(ValueError):
        GenSpec(customers=3, demand_range=(3, 1))
