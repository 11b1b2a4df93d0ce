"""End-to-end tests for the clustering -> improvement -> routing pipeline.

Each stage is exercised on small constructed instances whose correct behavior
can be checked by hand, then the full pipeline is pinned on generated
instances with frozen objective values.
"""

import math

import pytest

from truckdrone import Instance, Point2
from truckdrone.core import RECHARGING, REVISITING, evaluate
from truckdrone.pipeline import (PipelineConfig, compare_modes, run_alg1,
                                 run_alg2, run_alg3, run_original, solve)
from truckdrone.bench import GenSpec, generate, tsp_baseline


def cfg(algorithm, mode=RECHARGING):
    return PipelineConfig(algorithm=algorithm, mode=mode)


def close(a, b, tol=1e-12):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)


def drone_visits(plan):
    return sorted(v for t in plan.drone_trips for v in t.visits)


def assert_valid(plan, inst):
    """Re-score the plan (validates ranges) and check every customer is
    served exactly once."""
    obj, tt, _ = evaluate(plan, inst)
    assert close(obj, plan.objective)
    assert close(tt, plan.truck_time)
    flown = drone_visits(plan)
    assert len(flown) == len(set(flown))
    assert plan.truck_served.isdisjoint(flown)
    assert plan.truck_served | set(flown) == set(range(len(inst.customers)))


# ---------------------------------------------------------------------------
# center snapping (first improvement)
# ---------------------------------------------------------------------------

def test_snapped_center_loses_reach():
    # From the continuous center both customers are within drone reach, but
    # snapping the center onto customer 0 stretches the loop to customer 1
    # past the range, so it rides on the truck instead.
    inst = Instance(customers=[Point2(0.0, 0.0), Point2(0.199, 0.0)],
                    drone_bases=[Point2(0.0995, 0.0999)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=0.4)
    plain = run_original(inst, cfg("original"))
    assert plain.truck_nodes == (Point2(0.0995, 0.0),)
    assert plain.truck_served == frozenset()
    assert len(plain.drone_trips) == 2
    assert close(plain.objective, 0.26989868793105304)

    snapped = run_alg1(inst, cfg("alg1"))
    assert snapped.truck_nodes == (0, 1)
    assert snapped.drone_trips == ()
    assert close(snapped.objective, 0.398)
    assert close(snapped.truck_time, 0.398)


def test_lone_companion_picks_cheaper_vehicle():
    # Two customers, one drone midway.  A slow drone loses to the 0.2 long
    # truck out-and-back; a fast one keeps the companion airborne.
    def build(drone_speed):
        return Instance(customers=[Point2(0.0, 0.0), Point2(0.1, 0.0)],
                        drone_bases=[Point2(0.05, 0.0)],
                        truck_speed=1.0, drone_speed=drone_speed,
                        drone_range=1.0)

    slow = run_alg1(build(1.0), cfg("alg1"))
    assert slow.truck_nodes == (0, 1)
    assert slow.drone_trips == ()
    assert close(slow.objective, 0.2)

    fast = run_alg1(build(4.0), cfg("alg1"))
    assert fast.truck_nodes == (0,)
    assert drone_visits(fast) == [1]
    assert close(fast.truck_time, 0.0)
    assert close(fast.objective, 0.0375)


# ---------------------------------------------------------------------------
# center relocation toward the truck centroid (second improvement)
# ---------------------------------------------------------------------------

def _relocation_instance(drone_xy):
    return Instance(customers=[Point2(0.0, 0.0), Point2(0.3, 0.0),
                               Point2(2.0, 0.0)],
                    drone_bases=[Point2(*drone_xy)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=1.3)


def test_center_moves_toward_truck_centroid():
    # A drone sits next to the inner member, so the center may hop onto it
    # and shorten the truck leg from 4.0 to 3.4.
    inst = _relocation_instance((0.31, 0.0))
    before = run_alg1(inst, cfg("alg1"))
    after = run_alg2(inst, cfg("alg2"))
    assert before.truck_nodes == (0, 2)
    assert close(before.truck_time, 4.0)
    assert close(before.objective, 4.305)
    assert after.truck_nodes == (1, 2)
    assert close(after.truck_time, 3.4)
    assert close(after.objective, 3.555)
    assert after.truck_time < before.truck_time


def test_center_stays_without_nearby_drone():
    # Same geometry, but the only drone is too far from the inner member
    # (>= L/4), so the hop is rejected and the plan is unchanged.
    inst = _relocation_instance((-0.05, 0.0))
    before = run_alg1(inst, cfg("alg1"))
    after = run_alg2(inst, cfg("alg2"))
    assert before == after
    assert after.truck_nodes == (0, 2)
    assert close(after.objective, 4.175)


# ---------------------------------------------------------------------------
# cell merging (third improvement)
# ---------------------------------------------------------------------------

def test_merge_collapses_adjacent_cells():
    # A lone far customer forms its own drone-less cell; merging it into the
    # main cell turns a two-stop tour into a single stop with zero truck time.
    inst = Instance(customers=[Point2(0.50, 0.50), Point2(0.52, 0.52),
                               Point2(0.48, 0.52), Point2(0.50, 0.48),
                               Point2(0.80, 0.50)],
                    drone_bases=[Point2(0.50, 0.52), Point2(0.52, 0.50)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=0.8)
    before = run_alg2(inst, cfg("alg2"))
    assert before.truck_nodes == (1, 4)
    assert close(before.truck_time, 0.5614267539047281)
    assert close(before.objective, 0.625568889528459)

    after = run_alg3(inst, cfg("alg3"))
    assert after.truck_nodes == (1,)
    assert close(after.truck_time, 0.0)
    assert close(after.objective, 0.15035668847618203)
    assert drone_visits(after) == [0, 2, 3, 4]
    assert after.objective < before.objective


def test_drone_pooling_dissolves_starved_cell():
    # Two tight customer groups with both drones parked between them: the
    # quarter-range gate leaves both cells drone-less, so the two-stage plan
    # trucks everything.  The merge stage re-homes both drones to the nearer
    # center; the other cell dissolves onto the truck.
    left = [Point2(0.30, 0.50), Point2(0.31, 0.52), Point2(0.29, 0.48)]
    right = [Point2(0.58, 0.50), Point2(0.59, 0.52), Point2(0.57, 0.48)]
    inst = Instance(customers=left + right,
                    drone_bases=[Point2(0.44, 0.50), Point2(0.45, 0.51)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=0.5)
    before = run_alg2(inst, cfg("alg2"))
    assert before.truck_served == frozenset(range(6))
    assert before.drone_trips == ()
    assert close(before.objective, 0.6494427190999915)

    after = run_alg3(inst, cfg("alg3"))
    assert after.truck_served == frozenset({0, 1, 2, 3})
    assert drone_visits(after) == [4, 5]
    assert close(after.truck_time, 0.606149924038586)
    assert close(after.objective, 0.687330263926085)


def test_distant_cells_never_merge():
    # Centers further apart than any feasible drone loop: the merge stage is
    # a no-op and the plan equals the two-stage cover.
    left = [Point2(0.30, 0.50), Point2(0.31, 0.52), Point2(0.29, 0.48)]
    right = [Point2(1.60, 0.50), Point2(1.61, 0.52), Point2(1.59, 0.48)]
    inst = Instance(customers=left + right,
                    drone_bases=[Point2(0.30, 0.49), Point2(1.60, 0.51)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=0.5)
    before = run_alg2(inst, cfg("alg2"))
    after = run_alg3(inst, cfg("alg3"))
    assert before.truck_nodes == after.truck_nodes == (1, 5)
    assert before.truck_served == after.truck_served
    assert close(before.objective, 2.701577287501501)
    assert close(after.objective, 2.701577287501501)


# ---------------------------------------------------------------------------
# degenerate whole-pipeline cases
# ---------------------------------------------------------------------------

def test_unreachable_drones_reduce_to_plain_tsp():
    inst = Instance(customers=[Point2(0.1, 0.1), Point2(0.9, 0.1),
                               Point2(0.9, 0.9), Point2(0.1, 0.9),
                               Point2(0.5, 0.6)],
                    drone_bases=[Point2(8.0, 8.0)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=0.8)
    plan = run_original(inst, cfg("original"))
    assert plan.truck_served == frozenset(range(5))
    assert plan.drone_trips == ()
    assert close(plan.objective, tsp_baseline(inst))
    assert close(plan.objective, 3.4)


def test_single_cluster_has_zero_truck_time():
    inst = Instance(customers=[Point2(0.50, 0.50), Point2(0.53, 0.52),
                               Point2(0.47, 0.49)],
                    drone_bases=[Point2(0.51, 0.50)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=3.0)
    plan = run_original(inst, cfg("original"))
    assert len(plan.truck_nodes) == 1
    assert isinstance(plan.truck_nodes[0], Point2)   # free center, no snap
    assert plan.truck_served == frozenset()
    assert close(plan.truck_time, 0.0)
    assert drone_visits(plan) == [0, 1, 2]
    assert close(plan.objective, 0.07019433716254471)


# ---------------------------------------------------------------------------
# battery-mode comparison
# ---------------------------------------------------------------------------

def test_revisit_chaining_wins_with_far_base():
    # One drone far from the cluster: recharging pays the long base leg per
    # customer, a chained revisit pays it once.
    inst = Instance(customers=[Point2(1.0, 0.0), Point2(1.0, 0.04),
                               Point2(1.0, -0.04)],
                    drone_bases=[Point2(0.3, 0.0)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=3.0)
    recharge = solve(inst, cfg("alg3", RECHARGING))
    revisit = solve(inst, cfg("alg3", REVISITING))
    assert close(recharge.objective, 1.0905709628591622)
    assert close(revisit.objective, 0.41)
    best = compare_modes(inst, cfg("alg3"))
    assert {t.mode for t in best.drone_trips} == {REVISITING}
    assert close(best.objective, revisit.objective)


def test_mode_tie_prefers_recharging():
    # Two single-customer cells: one trip per drone, so both modes price the
    # same plan and the tie goes to recharging.
    inst = Instance(customers=[Point2(0.4, 0.5), Point2(0.6, 0.5)],
                    drone_bases=[Point2(0.41, 0.5), Point2(0.61, 0.5)],
                    truck_speed=1.0, drone_speed=2.0, drone_range=0.8)
    recharge = solve(inst, cfg("alg3", RECHARGING))
    revisit = solve(inst, cfg("alg3", REVISITING))
    assert close(recharge.objective, revisit.objective)
    best = compare_modes(inst, cfg("alg3"))
    assert {t.mode for t in best.drone_trips} == {RECHARGING}


def test_compare_modes_returns_cheaper_plan():
    for seed in range(6):
        inst = generate(GenSpec(n_customers=12, n_drones=8, drone_range=0.8,
                                seed=seed))
        recharge = solve(inst, cfg("alg3", RECHARGING))
        revisit = solve(inst, cfg("alg3", REVISITING))
        best = compare_modes(inst, cfg("alg3"))
        assert best in (recharge, revisit)
        assert best.objective <= min(recharge.objective,
                                     revisit.objective) + 1e-12


# ---------------------------------------------------------------------------
# whole-pipeline validity, determinism, and frozen objectives
# ---------------------------------------------------------------------------

ALGS = ("original", "alg1", "alg2", "alg3")


def test_plans_valid_for_all_algorithms_and_modes():
    for seed in (1, 2, 3):
        inst = generate(GenSpec(n_customers=14, n_drones=10, drone_range=0.8,
                                seed=seed))
        for algorithm in ALGS:
            for mode in (RECHARGING, REVISITING):
                plan = solve(inst, cfg(algorithm, mode))
                assert_valid(plan, inst)
                assert all(t.mode == mode for t in plan.drone_trips)
                if algorithm != "original":
                    assert all(isinstance(s, int) for s in plan.truck_nodes)


def test_solve_is_deterministic():
    inst = generate(GenSpec(n_customers=18, n_drones=12, drone_range=0.8,
                            seed=5))
    for algorithm in ALGS:
        assert solve(inst, cfg(algorithm)) == solve(inst, cfg(algorithm))


def test_generated_instance_objectives_are_stable():
    inst = generate(GenSpec(n_customers=60, n_drones=40, drone_range=0.8,
                            seed=0))
    plain = run_original(inst, cfg("original"))
    assert close(plain.objective, 5.869436259977554, tol=1e-9)
    merged = run_alg3(inst, cfg("alg3"))
    assert close(merged.objective, 4.920384952394058, tol=1e-9)
    assert merged.objective < plain.objective


def test_cluster_first_vs_plain_tsp_win_rate():
    wins = 0
    for seed in range(20):
        inst = generate(GenSpec(n_customers=60, n_drones=40, drone_range=0.8,
                                seed=seed))
        plan = run_original(inst, cfg("original"))
        if plan.objective < tsp_baseline(inst):
            wins += 1
    assert wins == 12


def test_merge_stage_dominates_on_average():
    plain_total = merged_total = 0.0
    for seed in range(20):
        inst = generate(GenSpec(n_customers=60, n_drones=30, drone_range=0.8,
                                rho1=3.0, seed=seed))
        plain_total += run_original(inst, cfg("original")).objective
        merged_total += run_alg3(inst, cfg("alg3")).objective
    assert close(plain_total / 20, 6.07620494619803, tol=1e-9)
    assert close(merged_total / 20, 4.31341919421123, tol=1e-9)
    assert merged_total < plain_total
