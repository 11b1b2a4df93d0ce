"""Exhaustive reference solvers for tiny instances.

``brute_force`` enumerates every truck-stop subset, every customer-to-
(drone, center) assignment (each drone working a single center), and — in
revisiting mode — every way to chain a drone's customers into multi-visit
trips.  Objectives are computed with exactly the same arithmetic as
:func:`truckdrone.core.evaluate`, so a heuristic plan can be compared against
the optimum without floating-point slack.

Four problem variants:

====  =======  ==========  =========================================
name  centers  mode        truck tour
====  =======  ==========  =========================================
I     one      recharging  none (single free stop, time 0)
II    one      revisiting  none
III   many     recharging  optimal tour over chosen customer stops
IV    many     revisiting  optimal tour over chosen customer stops
====  =======  ==========  =========================================
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (RECHARGING, REVISITING, RANGE_TOL, DroneTrip, Instance,
                   Plan, Point2, as_point, dist, last_leg, make_plan,
                   trip_length, _tour_time)
from .tsp import TooLarge, exact_tour

MAX_CUSTOMERS = 7
MAX_DRONES = 5


class Infeasible(ValueError):
    """No feasible solution exists (single-center problems only)."""


@dataclass(frozen=True)
class ExactResult:
    objective: float
    plan: Plan
    nodes_explored: int


def _parse_problem(problem):
    key = str(problem).strip().upper()
    table = {"1": (False, RECHARGING), "I": (False, RECHARGING),
             "2": (False, REVISITING), "II": (False, REVISITING),
             "3": (True, RECHARGING), "III": (True, RECHARGING),
             "4": (True, REVISITING), "IV": (True, REVISITING)}
    if key not in table:
        raise ValueError(f"unknown problem {problem!r}")
    return table[key]


def _partitions(items, cap):
    """All partitions of ``items`` (sorted tuple) into blocks of size <= cap,
    blocks emitted in order of their smallest element."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for r in range(0, min(cap - 1, len(rest)) + 1):
        for combo in itertools.combinations(rest, r):
            block = (first,) + combo
            remaining = tuple(c for c in rest if c not in combo)
            for tail in _partitions(remaining, cap):
                yield [block] + tail


class _Search:
    def __init__(self, inst: Instance, mode: str, max_visits: int):
        self.inst = inst
        self.mode = mode
        self.max_visits = 1 if mode == RECHARGING else max_visits
        self.limit = inst.drone_range + RANGE_TOL
        self.route_memo = {}
        self.nodes = 0

    # -- single trips ------------------------------------------------------

    def _single(self, d: int, p: Point2, c: int) -> DroneTrip:
        return DroneTrip(d, p, (c,), self.mode)

    def feasible(self, d: int, p: Point2, c: int) -> bool:
        return trip_length(self._single(d, p, c), self.inst) <= self.limit

    # -- per-drone service time at a center --------------------------------

    def group(self, d: int, p: Point2, custs):
        """Best (time, trips) for drone ``d`` serving ``custs`` from center
        ``p``; None when infeasible.  Times use the same accumulation order
        as the plan evaluator."""
        if self.mode == RECHARGING:
            order = sorted(custs)
            es = [dist(self.inst.customers[c], self.inst.drone_bases[d]) for c in order]
            hi = max(range(len(order)), key=lambda i: (es[i], -order[i]))
            order = [c for i, c in enumerate(order) if i != hi] + [order[hi]]
            trips = tuple(self._single(d, p, c) for c in order)
            q = sum(trip_length(t, self.inst) for t in trips) / self.inst.drone_speed
            q -= last_leg(trips[-1], self.inst) / self.inst.drone_speed
            return q, trips
        key = (d, p, frozenset(custs))
        hit = self.route_memo.get(key)
        if hit is None:
            hit = self.route_memo[key] = self._best_chaining(d, p, tuple(sorted(custs)))
        return hit

    def _best_chaining(self, d: int, p: Point2, custs):
        inst = self.inst
        best = None
        for blocks in _partitions(custs, self.max_visits):
            per_block = []
            dead = False
            for block in blocks:
                cands = []
                for t in block:
                    visits = tuple(c for c in block if c != t) + (t,)
                    trip = DroneTrip(d, p, visits, self.mode)
                    length = trip_length(trip, inst)
                    if length <= self.limit:
                        cands.append((length, t, trip))
                if not cands:
                    dead = True
                    break
                per_block.append(cands)
            if dead:
                continue
            cheapest = [min(c, key=lambda x: (x[0], x[1]))[2] for c in per_block]
            for b in range(len(blocks)):
                for _, _, final in per_block[b]:
                    trips = tuple(cheapest[i] for i in range(len(blocks)) if i != b)
                    trips += (final,)
                    q = sum(trip_length(t, inst) for t in trips) / inst.drone_speed
                    q -= last_leg(trips[-1], inst) / inst.drone_speed
                    if best is None or q < best[0]:
                        best = (q, trips)
        return best

    # -- objective of a (partial) assignment --------------------------------

    def value(self, truck_time, stop_points, assign):
        """assign: drone -> (stop point, [customers]).  Mirrors the plan
        evaluator: per-center makespan, summed in tour-stop order."""
        qsum = 0.0
        for p in stop_points:
            qp = 0.0
            for d in sorted(assign):
                pd, custs = assign[d]
                if pd != p or not custs:
                    continue
                got = self.group(d, p, custs)
                if got is None:
                    return None
                if got[0] > qp:
                    qp = got[0]
            qsum += qp
        return truck_time + qsum


def _tour_over(inst: Instance, stops):
    pts = [inst.customers[i] for i in stops]
    if len(pts) <= 2:
        order = list(range(len(pts)))
    else:
        order = list(exact_tour(pts).order)
    ordered = [stops[i] for i in order]
    time = _tour_time([inst.customers[i] for i in ordered], inst.truck_speed)
    return ordered, time


def _materialize(search: _Search, stop_points, assign):
    trips = []
    for p in stop_points:
        for d in sorted(assign):
            pd, custs = assign[d]
            if pd == p and custs:
                trips.extend(search.group(d, p, custs)[1])
    return trips


def brute_force(inst: Instance, problem="III", max_visits: int = 3,
                center=None) -> ExactResult:
    """Optimal solution by exhaustive enumeration.  Guarded to at most
    7 customers and 5 drones."""
    multi, mode = _parse_problem(problem)
    if inst.n_customers > MAX_CUSTOMERS or inst.n_drones > MAX_DRONES:
        raise TooLarge(
            f"{inst.n_customers} customers / {inst.n_drones} drones exceeds "
            f"the {MAX_CUSTOMERS}/{MAX_DRONES} enumeration guard")
    if max_visits < 1:
        raise ValueError("max_visits must be at least 1")
    search = _Search(inst, mode, max_visits)
    if multi:
        return _solve_multi(inst, search)
    return _solve_single(inst, search, center)


def _assign_rest(search: _Search, rest, options, truck_time, truck_nodes,
                 stop_points, assign, best):
    """DFS over customers in ``rest``; ``best`` is [value, snapshot]."""
    search.nodes += 1
    value = search.value(truck_time, stop_points, assign)
    if value is None or (best[0] is not None and value > best[0]):
        return
    if not rest:
        if best[0] is None or value < best[0]:
            best[0] = value
            best[1] = (tuple(truck_nodes), tuple(stop_points),
                       {d: (p, tuple(custs)) for d, (p, custs) in assign.items()})
        return
    c, tail = rest[0], rest[1:]
    for p, d in options[c]:
        pd, custs = assign[d]
        if pd is not None and pd != p:
            continue
        assign[d] = (p, custs + [c])
        _assign_rest(search, tail, options, truck_time, truck_nodes,
                     stop_points, assign, best)
        assign[d] = (pd, custs)


def _finish(inst: Instance, search: _Search, best):
    truck_nodes, stop_points, assign = best[1]
    trips = _materialize(search, stop_points, assign)
    plan = make_plan(inst, truck_nodes, trips)
    return ExactResult(plan.objective, plan, search.nodes)


def _solve_multi(inst: Instance, search: _Search) -> ExactResult:
    n = inst.n_customers
    best = [None, None]
    for mask in range(1, 1 << n):
        stops = [i for i in range(n) if mask >> i & 1]
        ordered, truck_time = _tour_over(inst, stops)
        if best[0] is not None and truck_time > best[0]:
            continue
        stop_points = [inst.customers[i] for i in ordered]
        rest = [c for c in range(n) if not mask >> c & 1]
        options = {}
        dead = False
        for c in rest:
            opts = [(p, d) for p in stop_points for d in range(inst.n_drones)
                    if search.feasible(d, p, c)]
            if not opts:
                dead = True
                break
            options[c] = opts
        if dead:
            continue
        assign = {d: (None, []) for d in range(inst.n_drones)}
        _assign_rest(search, rest, options, truck_time, ordered, stop_points,
                     assign, best)
    return _finish(inst, search, best)


def _solve_single(inst: Instance, search: _Search, center) -> ExactResult:
    if center is None:
        cx = sum(p.x for p in inst.customers) / inst.n_customers
        cy = sum(p.y for p in inst.customers) / inst.n_customers
        center = Point2(cx, cy)
    else:
        center = as_point(center)
    stop_points = [center]
    rest = list(range(inst.n_customers))
    options = {}
    for c in rest:
        opts = [(center, d) for d in range(inst.n_drones)
                if search.feasible(d, center, c)]
        if not opts:
            raise Infeasible(
                f"customer {c} is out of drone range from the center")
        options[c] = opts
    best = [None, None]
    assign = {d: (None, []) for d in range(inst.n_drones)}
    _assign_rest(search, rest, options, 0.0, stop_points, stop_points,
                 assign, best)
    if best[0] is None:
        raise Infeasible("no feasible single-center plan")
    return _finish(inst, search, best)


def verify_against_oracle(inst: Instance, problem, heuristic_plan: Plan,
                          max_visits: int = 3, center=None) -> float:
    """Relative gap of a heuristic plan above the enumerated optimum."""
    opt = brute_force(inst, problem, max_visits=max_visits, center=center)
    h = heuristic_plan.objective
    if opt.objective <= 0.0:
        return 0.0 if h <= opt.objective + 1e-12 else float("inf")
    return (h - opt.objective) / opt.objective
