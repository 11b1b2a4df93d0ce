"""MILP builders and LP-format text export for the six delivery formulations.

Problems and their variable families (all rows are emitted explicitly so the
file can be handed to any LP-format solver):

* ``I``      one center, recharging: ``x_<drone>_<cust>`` single-visit
  assignment, ``q_<drone>`` drone times, ``Q`` makespan.
* ``II``     one center, revisiting: route variables ``x_<drone>_<k>`` over an
  enumerated feasible-route pool (a route visits up to ``max_visits``
  customers with center bounces in between).
* ``III``    multi-center, recharging: ``x_<drone>_<center>_<cust>``,
  ``z_<drone>_<center>`` drone-to-center use, ``y_<cust>`` truck stops,
  ``gamma_<p>_<q>`` tour arcs, per-center makespans ``Q_<p>`` with the
  last-leg deduction linearized through ``Delta_<drone>_<center>`` and
  ``eta_<drone>_<center>_<cust>`` indicator variables, explicit subset
  tour-connectivity rows, and the tour-or-star switch row.
* ``IV``     multi-center, revisiting: like III but route-indexed
  (``x_<drone>_<center>_<k>`` over per-center route pools).
* ``I_alt``  one center, recharging, as an arc-flow model over node ids
  (0 = center, 1..n = customers, n+1..n+m = drone bases); the base-return
  arc count ``x_<node>_0`` is a general integer.
* ``II_alt`` one center, revisiting, arc-flow over node ids with one copy
  ``k`` per hypothetical trip (|K| = |C|*|D|) and ``Z``/``Y`` product
  linearization variables.

Big-M is ``|C| * (2 + sqrt(2)) / min(v_T, v_D)``, an upper bound on any time
quantity when coordinates live in the unit box.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .core import (REVISITING, Instance, Point2, as_point, dist, last_leg,
                   trip_length)
from .drone_router import Cluster, enumerate_routes
from .tsp import TooLarge

PROBLEMS = ("I", "II", "III", "IV", "I_alt", "II_alt")

_ALIAS = {"1": "I", "2": "II", "3": "III", "4": "IV",
          "I": "I", "II": "II", "III": "III", "IV": "IV",
          "1ALT": "I_alt", "2ALT": "II_alt", "1_ALT": "I_alt",
          "2_ALT": "II_alt", "I_ALT": "I_alt", "II_ALT": "II_alt",
          "IALT": "I_alt", "IIALT": "II_alt"}


def canonical_problem(problem) -> str:
    key = str(problem).strip().upper().replace("-", "_")
    if key not in _ALIAS:
        raise ValueError(f"unknown problem {problem!r}")
    return _ALIAS[key]


def big_m(inst: Instance) -> float:
    return inst.n_customers * (2.0 + math.sqrt(2.0)) / min(inst.truck_speed,
                                                           inst.drone_speed)


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple        # ((coef, var), ...)
    sense: str          # "<=", ">=", "="
    rhs: float


@dataclass
class MilpModel:
    problem: str
    objective: tuple
    constraints: tuple
    binaries: tuple
    integers: tuple
    continuous: tuple
    big_M: float
    max_visits: Optional[int] = None
    routes: tuple = ()   # (var_name, drone, center_label, visits)

    def variable_names(self):
        return tuple(self.binaries) + tuple(self.integers) + tuple(self.continuous)

    def to_lp(self) -> str:
        return write_lp(self)


# ---------------------------------------------------------------------------
# model builder plumbing
# ---------------------------------------------------------------------------

class _Builder:
    def __init__(self, problem: str, M: float):
        self.problem = problem
        self.M = M
        self.objective = []
        self.cons = []
        self.binaries = []
        self.integers = []
        self.continuous = []
        self.routes = []
        self.max_visits = None

    def binary(self, name):
        self.binaries.append(name)
        return name

    def integer(self, name):
        self.integers.append(name)
        return name

    def cont(self, name):
        self.continuous.append(name)
        return name

    def row(self, name, terms, sense, rhs):
        terms = tuple((float(c), v) for c, v in terms if c != 0)
        self.cons.append(Constraint(name, terms, sense, float(rhs)))

    def model(self) -> MilpModel:
        return MilpModel(self.problem, tuple(self.objective), tuple(self.cons),
                         tuple(self.binaries), tuple(self.integers),
                         tuple(self.continuous), self.M, self.max_visits,
                         tuple(self.routes))


def _centroid(inst: Instance) -> Point2:
    n = inst.n_customers
    return Point2(sum(p.x for p in inst.customers) / n,
                  sum(p.y for p in inst.customers) / n)


def _loop_len(inst: Instance, i: int, center: Point2, j: int) -> float:
    base = inst.drone_bases[i]
    return dist(base, center) + dist(center, inst.customers[j]) + \
        dist(inst.customers[j], base)


# ---------------------------------------------------------------------------
# the six formulations
# ---------------------------------------------------------------------------

def _build_I(inst: Instance, center: Point2) -> MilpModel:
    n, m = inst.n_customers, inst.n_drones
    b = _Builder("I", big_m(inst))
    x = [[b.binary(f"x_{i}_{j}") for j in range(n)] for i in range(m)]
    q = [b.cont(f"q_{i}") for i in range(m)]
    Q = b.cont("Q")
    b.objective = [(1.0, Q)]
    for j in range(n):
        b.row(f"assign_{j}", [(1.0, x[i][j]) for i in range(m)], "=", 1.0)
    for i in range(m):
        for j in range(n):
            b.row(f"range_{i}_{j}", [(_loop_len(inst, i, center, j), x[i][j])],
                  "<=", inst.drone_range)
    for i in range(m):
        terms = [(_loop_len(inst, i, center, j) / inst.drone_speed, x[i][j])
                 for j in range(n)]
        b.row(f"time_{i}", terms + [(-1.0, q[i])], "<=", 0.0)
    for i in range(m):
        b.row(f"makespan_{i}", [(1.0, q[i]), (-1.0, Q)], "<=", 0.0)
    return b.model()


def _build_II(inst: Instance, center: Point2, max_visits: int) -> MilpModel:
    n, m = inst.n_customers, inst.n_drones
    b = _Builder("II", big_m(inst))
    b.max_visits = max_visits
    pool = Cluster(inst, center, tuple(range(n)), tuple(range(m)))
    routes = {i: enumerate_routes(pool, center, i, REVISITING, max_visits)
              for i in range(m)}
    x = {}
    for i in range(m):
        for k, trip in enumerate(routes[i]):
            name = b.binary(f"x_{i}_{k}")
            x[i, k] = name
            b.routes.append((name, i, "center", trip.visits))
    q = [b.cont(f"q_{i}") for i in range(m)]
    Q = b.cont("Q")
    b.objective = [(1.0, Q)]
    for j in range(n):
        terms = [(1.0, x[i, k]) for i in range(m)
                 for k, trip in enumerate(routes[i]) if j in trip.visits]
        b.row(f"assign_{j}", terms, "=", 1.0)
    for i in range(m):
        for k, trip in enumerate(routes[i]):
            b.row(f"range_{i}_{k}", [(trip_length(trip, inst), x[i, k])],
                  "<=", inst.drone_range)
    for i in range(m):
        terms = [(trip_length(trip, inst) / inst.drone_speed, x[i, k])
                 for k, trip in enumerate(routes[i])]
        b.row(f"time_{i}", terms + [(-1.0, q[i])], "<=", 0.0)
    for i in range(m):
        b.row(f"makespan_{i}", [(1.0, q[i]), (-1.0, Q)], "<=", 0.0)
    return b.model()


def _tsp_rows(b: _Builder, inst: Instance, y, gamma):
    """Tour rows shared by III and IV: arcs only between truck stops, degree
    matching, subset connectivity, and the tour-or-star switch."""
    n = inst.n_customers
    M = b.M
    for p in range(n):
        for p2 in range(n):
            if p2 == p:
                continue
            b.row(f"edge_{p}_{p2}",
                  [(2.0, gamma[p][p2]), (-1.0, y[p]), (-1.0, y[p2])], "<=", 0.0)
    for p2 in range(n):
        b.row(f"deg_in_{p2}",
              [(1.0, gamma[p][p2]) for p in range(n)] + [(-1.0, y[p2])], "=", 0.0)
    for p in range(n):
        b.row(f"deg_out_{p}",
              [(1.0, gamma[p][p2]) for p2 in range(n)] + [(-1.0, y[p])], "=", 0.0)
    idx = 0
    for s in range(2, n - 1):
        for sub in itertools.combinations(range(n), s):
            terms = [(1.0, gamma[p][p2]) for p in sub for p2 in sub if p2 != p]
            b.row(f"subtour_{idx}", terms, "<=", s - 1)
            idx += 1
    for p in range(n):
        b.row(f"star_{p}",
              [(M, gamma[p][p])] + [(1.0, y[j]) for j in range(n)],
              "<=", M + 1.0)


def _tour_objective(b: _Builder, inst: Instance, gamma, Qp):
    n = inst.n_customers
    obj = []
    for p in range(n):
        for p2 in range(n):
            if p2 == p:
                continue
            obj.append((dist(inst.customers[p], inst.customers[p2]) /
                        inst.truck_speed, gamma[p][p2]))
    obj.extend((1.0, Qp[p]) for p in range(n))
    b.objective = obj


def _build_III(inst: Instance) -> MilpModel:
    n, m = inst.n_customers, inst.n_drones
    b = _Builder("III", big_m(inst))
    M = b.M
    x = [[[b.binary(f"x_{i}_{p}_{j}") for j in range(n)] for p in range(n)]
         for i in range(m)]
    z = [[b.binary(f"z_{i}_{p}") for p in range(n)] for i in range(m)]
    y = [b.binary(f"y_{p}") for p in range(n)]
    gamma = [[b.binary(f"gamma_{p}_{p2}") for p2 in range(n)] for p in range(n)]
    eta = [[[b.binary(f"eta_{i}_{p}_{j}") for j in range(n)] for p in range(n)]
           for i in range(m)]
    q = [[b.cont(f"q_{i}_{p}") for p in range(n)] for i in range(m)]
    Qp = [b.cont(f"Q_{p}") for p in range(n)]
    delta = [[b.cont(f"Delta_{i}_{p}") for p in range(n)] for i in range(m)]
    _tour_objective(b, inst, gamma, Qp)

    loop = [[[_loop_len(inst, i, inst.customers[p], j) for j in range(n)]
             for p in range(n)] for i in range(m)]
    home = [[dist(inst.customers[j], inst.drone_bases[i]) for j in range(n)]
            for i in range(m)]

    b.row("min_truck", [(1.0, y[p]) for p in range(n)], ">=", 1.0)
    for j in range(n):
        terms = [(1.0, x[i][p][j]) for i in range(m) for p in range(n)]
        b.row(f"assign_{j}", terms + [(1.0, y[j])], "=", 1.0)
    for p in range(n):
        b.row(f"center_open_{p}",
              [(1.0, z[i][p]) for i in range(m)] + [(-M, y[p])], "<=", 0.0)
    for i in range(m):
        b.row(f"one_center_{i}", [(1.0, z[i][p]) for p in range(n)], "<=", 1.0)
    for i in range(m):
        for p in range(n):
            b.row(f"use_drone_{i}_{p}",
                  [(1.0, x[i][p][j]) for j in range(n)] + [(-M, z[i][p])],
                  "<=", 0.0)
    for i in range(m):
        for p in range(n):
            for j in range(n):
                b.row(f"range_{i}_{p}_{j}", [(loop[i][p][j], x[i][p][j])],
                      "<=", inst.drone_range)
    for i in range(m):
        for p in range(n):
            terms = [(loop[i][p][j] / inst.drone_speed, x[i][p][j])
                     for j in range(n)]
            b.row(f"time_{i}_{p}", terms + [(M, z[i][p]), (-1.0, q[i][p])],
                  "<=", M)
    for i in range(m):
        for p in range(n):
            b.row(f"makespan_{i}_{p}",
                  [(1.0, q[i][p]), (-1.0 / inst.drone_speed, delta[i][p]),
                   (-1.0, Qp[p])], "<=", 0.0)
    for i in range(m):
        for p in range(n):
            for j in range(n):
                b.row(f"last_lb_{i}_{p}_{j}",
                      [(home[i][j], x[i][p][j]), (-1.0, delta[i][p])], "<=", 0.0)
    for i in range(m):
        for p in range(n):
            for j in range(n):
                b.row(f"last_ub_{i}_{p}_{j}",
                      [(1.0, delta[i][p]), (-home[i][j], x[i][p][j]),
                       (M, eta[i][p][j])], "<=", M)
    for i in range(m):
        for p in range(n):
            b.row(f"last_pick_{i}_{p}",
                  [(1.0, eta[i][p][j]) for j in range(n)] + [(-1.0, z[i][p])],
                  ">=", 0.0)
    for i in range(m):
        for p in range(n):
            for j in range(n):
                b.row(f"last_use_{i}_{p}_{j}",
                      [(1.0, eta[i][p][j]), (-1.0, x[i][p][j])], "<=", 0.0)
    _tsp_rows(b, inst, y, gamma)
    return b.model()


def _build_IV(inst: Instance, max_visits: int) -> MilpModel:
    n, m = inst.n_customers, inst.n_drones
    b = _Builder("IV", big_m(inst))
    b.max_visits = max_visits
    M = b.M

    routes = {}
    for i in range(m):
        for p in range(n):
            pool = Cluster(inst, inst.customers[p],
                           tuple(c for c in range(n) if c != p),
                           tuple(range(m)))
            routes[i, p] = enumerate_routes(pool, inst.customers[p], i,
                                            REVISITING, max_visits)
    x = {}
    for i in range(m):
        for p in range(n):
            for k, trip in enumerate(routes[i, p]):
                name = b.binary(f"x_{i}_{p}_{k}")
                x[i, p, k] = name
                b.routes.append((name, i, p, trip.visits))
    z = [[b.binary(f"z_{i}_{p}") for p in range(n)] for i in range(m)]
    y = [b.binary(f"y_{p}") for p in range(n)]
    gamma = [[b.binary(f"gamma_{p}_{p2}") for p2 in range(n)] for p in range(n)]
    eta = {key: b.binary(f"eta_{key[0]}_{key[1]}_{key[2]}") for key in x}
    q = [[b.cont(f"q_{i}_{p}") for p in range(n)] for i in range(m)]
    Qp = [b.cont(f"Q_{p}") for p in range(n)]
    delta = [[b.cont(f"Delta_{i}_{p}") for p in range(n)] for i in range(m)]
    _tour_objective(b, inst, gamma, Qp)

    b.row("min_truck", [(1.0, y[p]) for p in range(n)], ">=", 1.0)
    for j in range(n):
        terms = [(1.0, x[i, p, k]) for i in range(m) for p in range(n)
                 for k, trip in enumerate(routes[i, p]) if j in trip.visits]
        b.row(f"assign_{j}", terms + [(1.0, y[j])], "=", 1.0)
    for p in range(n):
        b.row(f"center_open_{p}",
              [(1.0, z[i][p]) for i in range(m)] + [(-M, y[p])], "<=", 0.0)
    for i in range(m):
        b.row(f"one_center_{i}", [(1.0, z[i][p]) for p in range(n)], "<=", 1.0)
    for i in range(m):
        for p in range(n):
            terms = [(1.0, x[i, p, k]) for k in range(len(routes[i, p]))]
            b.row(f"use_drone_{i}_{p}", terms + [(-M, z[i][p])], "<=", 0.0)
    for i in range(m):
        for p in range(n):
            terms = [(trip_length(trip, inst) / inst.drone_speed, x[i, p, k])
                     for k, trip in enumerate(routes[i, p])]
            b.row(f"time_{i}_{p}", terms + [(M, z[i][p]), (-1.0, q[i][p])],
                  "<=", M)
    for i in range(m):
        for p in range(n):
            b.row(f"makespan_{i}_{p}",
                  [(1.0, q[i][p]), (-1.0 / inst.drone_speed, delta[i][p]),
                   (-1.0, Qp[p])], "<=", 0.0)
    for i in range(m):
        for p in range(n):
            for k, trip in enumerate(routes[i, p]):
                b.row(f"last_lb_{i}_{p}_{k}",
                      [(last_leg(trip, inst), x[i, p, k]),
                       (-1.0, delta[i][p])], "<=", 0.0)
    for i in range(m):
        for p in range(n):
            for k, trip in enumerate(routes[i, p]):
                b.row(f"last_ub_{i}_{p}_{k}",
                      [(1.0, delta[i][p]), (-last_leg(trip, inst), x[i, p, k]),
                       (M, eta[i, p, k])], "<=", M)
    for i in range(m):
        for p in range(n):
            terms = [(1.0, eta[i, p, k]) for k in range(len(routes[i, p]))]
            b.row(f"last_pick_{i}_{p}", terms + [(-1.0, z[i][p])], ">=", 0.0)
    for i in range(m):
        for p in range(n):
            for k in range(len(routes[i, p])):
                b.row(f"last_use_{i}_{p}_{k}",
                      [(1.0, eta[i, p, k]), (-1.0, x[i, p, k])], "<=", 0.0)
    _tsp_rows(b, inst, y, gamma)
    return b.model()


def _build_I_alt(inst: Instance, center: Point2) -> MilpModel:
    n, m = inst.n_customers, inst.n_drones
    b = _Builder("I_alt", big_m(inst))
    cust = list(range(1, n + 1))            # node ids
    drone = list(range(n + 1, n + 1 + m))
    d0 = {i: dist(inst.drone_bases[i - n - 1], center) for i in drone}
    c0 = {j: dist(center, inst.customers[j - 1]) for j in cust}
    dj = {(j, i): dist(inst.customers[j - 1], inst.drone_bases[i - n - 1])
          for j in cust for i in drone}

    x_ji = {(j, i): b.binary(f"x_{j}_{i}") for j in cust for i in drone}
    x_0j = {j: b.binary(f"x_0_{j}") for j in cust}
    x_0i = {i: b.binary(f"x_0_{i}") for i in drone}
    x_ij = {(i, j): b.binary(f"x_{i}_{j}") for i in drone for j in cust}
    x_i0 = {i: b.integer(f"x_{i}_0") for i in drone}
    q = {i: b.cont(f"q_{i - n - 1}") for i in drone}
    Q = b.cont("Q")
    b.objective = [(1.0, Q)]

    for j in cust:
        b.row(f"dsat_{j}", [(1.0, x_ji[j, i]) for i in drone], "=", 1.0)
    for i in drone:
        b.row(f"nodirect_{i}",
              [(1.0, x_0i[i])] + [(1.0, x_ij[i, j]) for j in cust], "=", 0.0)
    for j in cust:
        b.row(f"csat_{j}", [(1.0, x_0j[j])], "=", 1.0)
    for i in drone:
        b.row(f"dbal_{i}",
              [(1.0, x_i0[i])] + [(-1.0, x_ji[j, i]) for j in cust], "=", 0.0)
    b.row("cbal", [(1.0, x_i0[i]) for i in drone] +
          [(-1.0, x_0j[j]) for j in cust], "=", 0.0)
    for j in cust:
        for i in drone:
            b.row(f"range_{j}_{i}",
                  [(d0[i] + c0[j] + dj[j, i], x_ji[j, i])], "<=",
                  inst.drone_range)
    for i in drone:
        terms = [((d0[i] + c0[j] + dj[j, i]) / inst.drone_speed, x_ji[j, i])
                 for j in cust]
        b.row(f"time_{i}", terms + [(-1.0, q[i])], "<=", 0.0)
    for i in drone:
        b.row(f"makespan_{i}", [(1.0, q[i]), (-1.0, Q)], "<=", 0.0)
    return b.model()


def _build_II_alt(inst: Instance, center: Point2) -> MilpModel:
    n, m = inst.n_customers, inst.n_drones
    b = _Builder("II_alt", big_m(inst))
    cust = list(range(1, n + 1))
    drone = list(range(n + 1, n + 1 + m))
    K = list(range(n * m))
    d0 = {i: dist(inst.drone_bases[i - n - 1], center) for i in drone}
    c0 = {j: dist(center, inst.customers[j - 1]) for j in cust}
    dj = {(j, i): dist(inst.customers[j - 1], inst.drone_bases[i - n - 1])
          for j in cust for i in drone}

    x = {}
    pairs = [(j, i) for j in cust for i in drone]          # customer -> drone
    pairs += [(j, 0) for j in cust]                        # customer -> center
    pairs += [(i, 0) for i in drone]                       # drone -> center
    pairs += [(0, j) for j in cust]                        # center -> customer
    pairs += [(0, i) for i in drone]                       # center -> drone
    pairs += [(i, j) for i in drone for j in cust]         # drone -> customer
    for a, bid in pairs:
        for k in K:
            x[a, bid, k] = b.binary(f"x_{a}_{bid}_{k}")
    Z = {(i, j, k): b.binary(f"Z_{i}_{j}_{k}")
         for i in drone for j in cust for k in K}
    Y = {(i, j, k): b.binary(f"Y_{i}_{j}_{k}")
         for i in drone for j in cust for k in K}
    q = {i: b.cont(f"q_{i - n - 1}") for i in drone}
    Q = b.cont("Q")
    b.objective = [(1.0, Q)]

    for j in cust:
        terms = [(1.0, x[j, i, k]) for i in drone for k in K]
        terms += [(1.0, x[j, 0, k]) for k in K]
        b.row(f"dsat_{j}", terms, "=", 1.0)
    for i in drone:
        terms = [(1.0, x[0, i, k]) for k in K]
        terms += [(1.0, x[i, j, k]) for j in cust for k in K]
        b.row(f"nodirect_{i}", terms, "=", 0.0)
    for j in cust:
        b.row(f"csat_{j}", [(1.0, x[0, j, k]) for k in K], "=", 1.0)
    for k in K:
        terms = [(1.0, x[i, 0, k]) for i in drone]
        terms += [(1.0, x[j, 0, k]) for j in cust]
        terms += [(-1.0, x[0, j, k]) for j in cust]
        b.row(f"tripbal_{k}", terms, "=", 0.0)
    for i in drone:
        terms = [(1.0, x[i, 0, k]) for k in K]
        terms += [(-1.0, x[j, i, k]) for j in cust for k in K]
        b.row(f"dbal_{i}", terms, "=", 0.0)
    terms = [(1.0, x[i, 0, k]) for i in drone for k in K]
    terms += [(1.0, x[j, 0, k]) for j in cust for k in K]
    terms += [(-1.0, x[0, j, k]) for j in cust for k in K]
    terms += [(-1.0, x[0, i, k]) for i in drone for k in K]
    b.row("cbal", terms, "=", 0.0)
    for k in K:
        terms = [(d0[i], x[i, 0, k]) for i in drone]
        for j in cust:
            terms.append((c0[j], x[0, j, k]))
            terms.append((c0[j], x[j, 0, k]))
        terms += [(dj[j, i], x[j, i, k]) for j in cust for i in drone]
        b.row(f"range_{k}", terms, "<=", inst.drone_range)
    v = inst.drone_speed
    for i in drone:
        terms = [(d0[i] / v, x[i, 0, k]) for k in K]
        for j in cust:
            for k in K:
                terms.append((c0[j] / v, Z[i, j, k]))
                terms.append((c0[j] / v, Y[i, j, k]))
        terms += [(dj[j, i] / v, x[j, i, k]) for j in cust for k in K]
        b.row(f"time_{i}", terms + [(-1.0, q[i])], "<=", 0.0)
    for i in drone:
        b.row(f"makespan_{i}", [(1.0, q[i]), (-1.0, Q)], "<=", 0.0)
    for i in drone:
        for j in cust:
            for k in K:
                b.row(f"zlink_{i}_{j}_{k}",
                      [(1.0, x[i, 0, k]), (1.0, x[0, j, k]),
                       (-1.0, Z[i, j, k])], "<=", 1.0)
    for i in drone:
        for j in cust:
            for k in K:
                b.row(f"zx1_{i}_{j}_{k}",
                      [(1.0, Z[i, j, k]), (-1.0, x[i, 0, k])], "<=", 0.0)
    for i in drone:
        for j in cust:
            for k in K:
                b.row(f"zx2_{i}_{j}_{k}",
                      [(1.0, Z[i, j, k]), (-1.0, x[0, j, k])], "<=", 0.0)
    for i in drone:
        for j in cust:
            for k in K:
                b.row(f"ylink_{i}_{j}_{k}",
                      [(1.0, x[i, 0, k]), (1.0, x[j, 0, k]),
                       (-1.0, Y[i, j, k])], "<=", 1.0)
    for i in drone:
        for j in cust:
            for k in K:
                b.row(f"yx1_{i}_{j}_{k}",
                      [(1.0, Y[i, j, k]), (-1.0, x[i, 0, k])], "<=", 0.0)
    for i in drone:
        for j in cust:
            for k in K:
                b.row(f"yx2_{i}_{j}_{k}",
                      [(1.0, Y[i, j, k]), (-1.0, x[j, 0, k])], "<=", 0.0)
    return b.model()


def export_milp(inst: Instance, problem, max_visits: int = 3,
                subtour_limit: int = 12, center=None,
                path=None) -> MilpModel:
    """Build the requested formulation; optionally write LP text to ``path``."""
    problem = canonical_problem(problem)
    if max_visits < 1:
        raise ValueError("max_visits must be at least 1")
    if problem in ("III", "IV") and inst.n_customers > subtour_limit:
        raise TooLarge(
            f"{inst.n_customers} customers exceeds subtour_limit="
            f"{subtour_limit}; subset rows are enumerated explicitly")
    if problem in ("I", "II", "I_alt", "II_alt"):
        center = _centroid(inst) if center is None else as_point(center)
    if problem == "I":
        model = _build_I(inst, center)
    elif problem == "II":
        model = _build_II(inst, center, max_visits)
    elif problem == "III":
        model = _build_III(inst)
    elif problem == "IV":
        model = _build_IV(inst, max_visits)
    elif problem == "I_alt":
        model = _build_I_alt(inst, center)
    else:
        model = _build_II_alt(inst, center)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(model.to_lp())
    return model


# ---------------------------------------------------------------------------
# LP text writer / minimal reader
# ---------------------------------------------------------------------------

def _num(x: float) -> str:
    return "%.12g" % x


def _expr(terms) -> str:
    parts = []
    for coef, var in terms:
        if coef == 0:
            continue
        mag = _num(abs(coef))
        if not parts:
            if coef < 0:
                parts.append(f"- {var}" if mag == "1" else f"- {mag} {var}")
            else:
                parts.append(var if mag == "1" else f"{mag} {var}")
        else:
            sign = "-" if coef < 0 else "+"
            head = f"{sign} {var}" if mag == "1" else f"{sign} {mag} {var}"
            parts.append(head)
    return " ".join(parts) if parts else "0"


def write_lp(model: MilpModel) -> str:
    lines = [f"\\ problem {model.problem}",
             f"\\ big_M {_num(model.big_M)}"]
    if model.max_visits is not None:
        lines.append(f"\\ max_visits {model.max_visits}")
    for name, drone, center, visits in model.routes:
        tag = "center" if center == "center" else f"center {center}"
        lines.append(f"\\ route {name}: drone {drone} {tag} visits " +
                     " ".join(str(v) for v in visits))
    lines.append("Minimize")
    lines.append(" obj: " + _expr(model.objective))
    lines.append("Subject To")
    for con in model.constraints:
        lines.append(f" {con.name}: {_expr(con.terms)} {con.sense} {_num(con.rhs)}")
    if model.binaries:
        lines.append("Binaries")
        for start in range(0, len(model.binaries), 8):
            lines.append(" " + " ".join(model.binaries[start:start + 8]))
    if model.integers:
        lines.append("Generals")
        for start in range(0, len(model.integers), 8):
            lines.append(" " + " ".join(model.integers[start:start + 8]))
    lines.append("End")
    return "\n".join(lines) + "\n"


@dataclass
class ParsedLp:
    objective: str
    constraints: list      # (name, expr, sense, rhs)
    binaries: tuple
    generals: tuple

    @property
    def variables(self):
        names = set(self.binaries) | set(self.generals)
        for _, expr, _, _ in self.constraints:
            names |= _expr_vars(expr)
        names |= _expr_vars(self.objective)
        return names


_SENSES = ("<=", ">=", "=")


def _expr_vars(expr: str):
    out = set()
    for tok in expr.split():
        if tok in ("+", "-"):
            continue
        try:
            float(tok)
        except ValueError:
            out.add(tok)
    return out


def parse_lp(text: str) -> ParsedLp:
    """Minimal LP reader for the files this module writes (used to sanity
    check exports round-trip)."""
    objective = ""
    constraints = []
    binaries = []
    generals = []
    section = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low == "minimize":
            section = "obj"
            continue
        if low == "subject to":
            section = "cons"
            continue
        if low == "binaries":
            section = "bin"
            continue
        if low == "generals":
            section = "gen"
            continue
        if low == "end":
            break
        if section == "obj":
            name, _, rest = line.partition(":")
            objective = rest.strip()
        elif section == "cons":
            name, _, rest = line.partition(":")
            rest = rest.strip()
            for sense in _SENSES:
                pos = rest.rfind(f" {sense} ")
                if pos >= 0:
                    expr = rest[:pos]
                    rhs = float(rest[pos + len(sense) + 2:])
                    constraints.append((name.strip(), expr, sense, rhs))
                    break
            else:
                raise ValueError(f"cannot parse constraint line: {line}")
        elif section == "bin":
            binaries.extend(line.split())
        elif section == "gen":
            generals.extend(line.split())
    return ParsedLp(objective, constraints, tuple(binaries), tuple(generals))
