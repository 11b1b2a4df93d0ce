"""Shared data model and objective accounting for truck + crowdsourced-drone delivery.

An :class:`Instance` is a set of customer points and drone base points in the
plane plus vehicle speeds and the drone range.  A :class:`Plan` says which
customers the truck visits directly (each as its own tour stop) and which are
flown to by drones from pickup centers along the truck tour.  The objective is
truck tour time plus, for every pickup center, the drone makespan at that
center (a drone's final trip does not count its last return leg: the truck has
already left, only delivery completion matters).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

RECHARGING = "recharging"
REVISITING = "revisiting"
MODES = (RECHARGING, REVISITING)

#: tolerance used when comparing objective values of candidate solutions
EPSILON = 1e-5
#: hard tolerance on the drone range constraint
RANGE_TOL = 1e-9


class Point2(NamedTuple):
    x: float
    y: float


#: a truck tour stop: a customer index, or a free point (continuous cluster center)
Stop = Union[int, Point2]


class InvalidTrip(ValueError):
    pass


class InvalidPlan(ValueError):
    pass


class RangeViolation(InvalidPlan):
    """A drone trip in the plan exceeds the drone range."""


def dist(a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance between two planar points."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


def as_point(p: Sequence[float]) -> Point2:
    if isinstance(p, Point2):
        # keep coordinates float so JSON output is representation-stable
        if type(p.x) is float and type(p.y) is float:
            return p
        return Point2(float(p.x), float(p.y))
    return Point2(float(p[0]), float(p[1]))


@dataclass(frozen=True)
class Instance:
    """One delivery scenario.

    ``truck_speed``/``drone_speed`` are kept as two separate fields (rather
    than a single ratio) so time formulas read naturally; generators normalise
    truck speed to 1 and set ``drone_speed = rho1``.
    """

    customers: tuple
    drone_bases: tuple
    truck_speed: float = 1.0
    drone_speed: float = 1.0
    drone_range: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "customers", tuple(as_point(c) for c in self.customers))
        object.__setattr__(self, "drone_bases", tuple(as_point(d) for d in self.drone_bases))
        if not self.customers:
            raise ValueError("instance needs at least one customer")
        if not (self.truck_speed > 0 and self.drone_speed > 0):
            raise ValueError("speeds must be positive")
        if self.drone_range < 0:
            raise ValueError("drone range must be non-negative")
        for p in self.customers + self.drone_bases:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise ValueError("coordinates must be finite")

    @property
    def n_customers(self) -> int:
        return len(self.customers)

    @property
    def n_drones(self) -> int:
        return len(self.drone_bases)


@dataclass(frozen=True)
class Params:
    """Experiment-level knobs: speed ratio, drone/customer ratio, comparison epsilon, seed."""

    rho1: float = 2.0
    rho2: float = 1.0
    epsilon: float = EPSILON
    seed: int = 0

    def __post_init__(self):
        if self.rho1 <= 0 or self.rho2 <= 0:
            raise ValueError("ratios must be positive")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class DroneTrip:
    """One sortie: base -> center -> customer(s) -> base.

    In recharging mode a trip has exactly one visit (the drone must return to
    its base after every delivery).  In revisiting mode the drone may bounce
    back to the center between deliveries, so ``visits`` is an ordered tuple.
    """

    drone: int
    center: Point2
    visits: tuple
    mode: str = RECHARGING

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "visits", tuple(int(v) for v in self.visits))
        if not self.visits:
            raise InvalidTrip("trip must visit at least one customer")
        if len(set(self.visits)) != len(self.visits):
            raise InvalidTrip("trip visits must be distinct")
        if self.mode not in MODES:
            raise InvalidTrip(f"unknown mode {self.mode!r}")
        if self.mode == RECHARGING and len(self.visits) != 1:
            raise InvalidTrip("recharging trips serve exactly one customer")


def trip_length(trip: DroneTrip, inst: Instance) -> float:
    """Distance flown: base, center, then each visit with a center bounce
    between consecutive visits, and home from the last customer."""
    base = inst.drone_bases[trip.drone]
    legs = dist(base, trip.center)
    prev = trip.center
    for k, v in enumerate(trip.visits):
        z = inst.customers[v]
        legs += dist(prev, z)
        prev = z
        if k < len(trip.visits) - 1:
            legs += dist(z, trip.center)
            prev = trip.center
    legs += dist(prev, base)
    return legs


def last_leg(trip: DroneTrip, inst: Instance) -> float:
    """Length of the final customer -> base leg (deducted for a drone's last trip)."""
    return dist(inst.customers[trip.visits[-1]], inst.drone_bases[trip.drone])


@dataclass(frozen=True)
class Plan:
    """A full solution.  ``truck_nodes`` is the tour stop sequence; int stops
    are truck-served customers, Point2 stops are free center points."""

    truck_nodes: tuple
    truck_served: frozenset
    drone_trips: tuple
    objective: float
    truck_time: float
    cluster_times: Mapping


def normalize_stop(s) -> Stop:
    """Coerce a tour stop to a plain int customer index or a Point2."""
    if isinstance(s, Point2):
        return as_point(s)
    if not isinstance(s, bool) and hasattr(s, "__index__"):
        return int(s)  # covers numpy integer scalars too
    return as_point(s)


def stop_point(stop: Stop, inst: Instance) -> Point2:
    return inst.customers[stop] if isinstance(stop, int) else as_point(stop)


def _tour_time(points: Sequence[Point2], speed: float) -> float:
    # 0/out-and-back/closed-tour depending on stop count
    if len(points) <= 1:
        return 0.0
    if len(points) == 2:
        return 2.0 * dist(points[0], points[1]) / speed
    total = 0.0
    for a, b in zip(points, points[1:]):
        total += dist(a, b)
    total += dist(points[-1], points[0])
    return total / speed


def _score(inst: Instance, truck_nodes: Sequence[Stop], truck_served: frozenset,
           drone_trips: Sequence[DroneTrip], deduct_last_leg: bool = True):
    stops = []
    int_stops = []
    for s in truck_nodes:
        s = normalize_stop(s)
        if isinstance(s, int):
            if not 0 <= s < inst.n_customers:
                raise InvalidPlan(f"truck stop {s} is not a customer index")
            int_stops.append(s)
        stops.append(s)
    if len(set(int_stops)) != len(int_stops):
        raise InvalidPlan("duplicate customer stop in truck tour")
    pts = [s for s in stops if isinstance(s, Point2)]
    if len(set(pts)) != len(pts):
        raise InvalidPlan("duplicate free stop in truck tour")
    if set(int_stops) != set(truck_served):
        raise InvalidPlan("truck_served must match the customer stops of the tour")

    covered = set(truck_served)
    for trip in drone_trips:
        if not 0 <= trip.drone < inst.n_drones:
            raise InvalidPlan(f"trip references unknown drone {trip.drone}")
        for v in trip.visits:
            if not 0 <= v < inst.n_customers:
                raise InvalidPlan(f"trip visits unknown customer {v}")
            if v in covered:
                raise InvalidPlan(f"customer {v} covered twice")
            covered.add(v)
    missing = set(range(inst.n_customers)) - covered
    if missing:
        raise InvalidPlan(f"customers never served: {sorted(missing)}")

    stop_points = [stop_point(s, inst) for s in stops]
    stop_set = set(stop_points)
    center_of_drone = {}
    for trip in drone_trips:
        if trip.center not in stop_set:
            raise InvalidPlan("trip center is not a truck stop")
        prev = center_of_drone.setdefault(trip.drone, trip.center)
        if prev != trip.center:
            raise InvalidPlan(f"drone {trip.drone} serves more than one center")
        if trip_length(trip, inst) > inst.drone_range + RANGE_TOL:
            raise RangeViolation(
                f"trip {trip.visits} of drone {trip.drone} exceeds range")

    truck_time = _tour_time(stop_points, inst.truck_speed)

    # makespan per center: each drone's total flight time minus the homeward
    # leg of its final trip (delivery completes before the drone lands)
    per_drone: dict = {}
    for trip in drone_trips:
        per_drone.setdefault((trip.center, trip.drone), []).append(trip)
    cluster_times = {p: 0.0 for p in stop_points}
    for (center, drone), trips in per_drone.items():
        q = sum(trip_length(t, inst) for t in trips) / inst.drone_speed
        if deduct_last_leg:
            q -= last_leg(trips[-1], inst) / inst.drone_speed
        if q > cluster_times[center]:
            cluster_times[center] = q
    objective = truck_time + sum(cluster_times.values())
    return objective, truck_time, cluster_times


def make_plan(inst: Instance, truck_nodes: Iterable[Stop],
              drone_trips: Iterable[DroneTrip] = ()) -> Plan:
    """Validate and score a candidate solution, returning an immutable Plan."""
    truck_nodes = tuple(normalize_stop(s) for s in truck_nodes)
    drone_trips = tuple(drone_trips)
    truck_served = frozenset(s for s in truck_nodes if isinstance(s, int))
    objective, truck_time, cluster_times = _score(inst, truck_nodes, truck_served, drone_trips)
    return Plan(truck_nodes, truck_served, drone_trips, objective, truck_time, cluster_times)


def evaluate(plan: Plan, inst: Instance, deduct_last_leg: bool = True):
    """Recompute ``(objective, truck_time, cluster_times)`` for a plan.

    Pure re-validation: raises InvalidPlan/RangeViolation on a broken plan.
    ``deduct_last_leg=False`` scores full round trips (useful for bounds).
    """
    return _score(inst, plan.truck_nodes, plan.truck_served, plan.drone_trips,
                  deduct_last_leg=deduct_last_leg)


def savings(cost_baseline: float, cost_ours: float) -> float:
    """Relative improvement of ``cost_ours`` over a positive baseline cost."""
    if not cost_baseline > 0:
        raise ValueError("baseline cost must be positive")
    return (cost_baseline - cost_ours) / cost_baseline


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------

def instance_to_dict(inst: Instance) -> dict:
    return {
        "customers": [[p.x, p.y] for p in inst.customers],
        "drones": [[p.x, p.y] for p in inst.drone_bases],
        "v_t": inst.truck_speed,
        "v_d": inst.drone_speed,
        "L": inst.drone_range,
    }


def instance_from_dict(data: Mapping) -> Instance:
    try:
        return Instance(
            customers=tuple(as_point(c) for c in data["customers"]),
            drone_bases=tuple(as_point(d) for d in data["drones"]),
            truck_speed=float(data["v_t"]),
            drone_speed=float(data["v_d"]),
            drone_range=float(data["L"]),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed instance data: {exc}") from exc


def instance_to_json(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2, sort_keys=True)


def instance_from_json(text: str) -> Instance:
    return instance_from_dict(json.loads(text))


def plan_to_dict(plan: Plan) -> dict:
    return {
        "truck_nodes": [s if isinstance(s, int) else [s.x, s.y] for s in plan.truck_nodes],
        "truck_served": sorted(plan.truck_served),
        "drone_trips": [
            {"drone": t.drone, "center": [t.center.x, t.center.y],
             "visits": list(t.visits), "mode": t.mode}
            for t in plan.drone_trips
        ],
        "objective": plan.objective,
        "truck_time": plan.truck_time,
        "cluster_times": sorted(([c.x, c.y], q) for c, q in plan.cluster_times.items()),
    }


def plan_from_dict(data: Mapping) -> Plan:
    nodes = tuple(s if isinstance(s, int) else as_point(s) for s in data["truck_nodes"])
    trips = tuple(
        DroneTrip(t["drone"], as_point(t["center"]), tuple(t["visits"]), t["mode"])
        for t in data["drone_trips"]
    )
    return Plan(
        truck_nodes=nodes,
        truck_served=frozenset(data["truck_served"]),
        drone_trips=trips,
        objective=float(data["objective"]),
        truck_time=float(data["truck_time"]),
        cluster_times={as_point(c): float(q) for c, q in data["cluster_times"]},
    )


def plan_to_json(plan: Plan) -> str:
    return json.dumps(plan_to_dict(plan), indent=2, sort_keys=True)


def plan_from_json(text: str) -> Plan:
    return plan_from_dict(json.loads(text))
