"""Per-cluster drone scheduling: token encoding, cost, route enumeration and
the tabu search that assigns and orders deliveries.

Solutions are encoded as the flat token list used throughout the search
literature we mirror here: label 1 is the cluster center, labels
2..n_c+1 are the cluster customers, labels n_c+2..n_c+n_d+1 its drones.  A
drone token opens a block; each following (1, customer) pair is one visit.  In
recharging mode every block is a single-visit trip; in revisiting mode one
block may chain several visits into one battery charge.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left, insort
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import (RECHARGING, REVISITING, MODES, RANGE_TOL,
                   DroneTrip, Instance, Point2, as_point, dist, trip_length, last_leg)


class DecodeError(ValueError):
    pass


class InfeasibleCluster(ValueError):
    pass


@dataclass(frozen=True)
class Cluster:
    """A pickup center with the customers and drones allotted to it."""

    inst: Instance
    center: Point2
    customers: tuple  # global customer indices
    drones: tuple     # global drone indices

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        object.__setattr__(self, "customers", tuple(int(c) for c in self.customers))
        object.__setattr__(self, "drones", tuple(int(d) for d in self.drones))
        if len(set(self.customers)) != len(self.customers):
            raise ValueError("duplicate customer in cluster")
        if len(set(self.drones)) != len(self.drones):
            raise ValueError("duplicate drone in cluster")


@dataclass(frozen=True)
class EncodedSolution:
    tokens: tuple
    mode: str

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "tokens", tuple(int(t) for t in self.tokens))


def _labels(cluster: Cluster):
    nc = len(cluster.customers)
    cust_label = {c: 2 + i for i, c in enumerate(cluster.customers)}
    drone_label = {d: 2 + nc + i for i, d in enumerate(cluster.drones)}
    return cust_label, drone_label


def encode(trips: Sequence[DroneTrip], cluster: Cluster) -> EncodedSolution:
    """One block per trip, in the given trip order."""
    if not trips:
        raise ValueError("nothing to encode")
    mode = trips[0].mode
    cust_label, drone_label = _labels(cluster)
    tokens = []
    for t in trips:
        if t.mode != mode:
            raise ValueError("mixed modes in one encoding")
        tokens.append(drone_label[t.drone])
        for v in t.visits:
            tokens.append(1)
            tokens.append(cust_label[v])
    return EncodedSolution(tuple(tokens), mode)


def decode(sol: EncodedSolution, cluster: Cluster,
           require_cover: bool = False) -> list:
    """Parse a token list back into DroneTrips.

    Grammar and duplicate visits are always enforced; ``require_cover``
    additionally demands that every cluster customer appears (search results
    always do, but hand-written partial encodings are legal)."""
    nc = len(cluster.customers)
    nd = len(cluster.drones)
    toks = sol.tokens
    trips = []
    seen = set()
    i = 0
    while i < len(toks):
        t = toks[i]
        if not 2 + nc <= t < 2 + nc + nd:
            raise DecodeError(f"expected a drone token at position {i}, got {t}")
        drone = cluster.drones[t - 2 - nc]
        i += 1
        visits = []
        while i < len(toks) and toks[i] == 1:
            if i + 1 >= len(toks):
                raise DecodeError("dangling center token")
            c = toks[i + 1]
            if not 2 <= c < 2 + nc:
                raise DecodeError(f"expected a customer token at position {i + 1}, got {c}")
            cust = cluster.customers[c - 2]
            if cust in seen:
                raise DecodeError(f"customer {cust} appears twice")
            seen.add(cust)
            visits.append(cust)
            i += 2
        if not visits:
            raise DecodeError("drone block without visits")
        if sol.mode == RECHARGING and len(visits) > 1:
            raise DecodeError("recharging blocks hold exactly one visit")
        trips.append(DroneTrip(drone, cluster.center, tuple(visits), sol.mode))
    if require_cover and seen != set(cluster.customers):
        raise DecodeError("token list does not cover the cluster customers")
    return trips


def cluster_cost(trips: Sequence[DroneTrip], inst: Instance) -> float:
    """Drone makespan at one center: max over drones of total flight time
    minus the homeward leg of the drone's final trip."""
    per_drone: dict = {}
    for t in trips:
        per_drone.setdefault(t.drone, []).append(t)
    worst = 0.0
    for trips_d in per_drone.values():
        q = sum(trip_length(t, inst) for t in trips_d)
        q -= last_leg(trips_d[-1], inst)
        worst = max(worst, q / inst.drone_speed)
    return worst


def enumerate_routes(cluster: Cluster, center, drone: int, mode: str,
                     max_visits: int = 3) -> list:
    """All range-feasible trips for one drone through ``center`` visiting up to
    ``max_visits`` cluster customers (order matters; recharging means 1)."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    center = as_point(center)
    limit = 1 if mode == RECHARGING else max_visits
    inst = cluster.inst
    out = []
    for size in range(1, limit + 1):
        for visits in itertools.permutations(cluster.customers, size):
            t = DroneTrip(drone, center, visits, mode)
            if trip_length(t, inst) <= inst.drone_range + RANGE_TOL:
                out.append(t)
    return out


@dataclass
class TabuState:
    """Search knobs: tenure equals the tabu list size, which is 0.7 of the
    number of available actions (all customer swaps plus one drone-change
    action per cluster drone)."""

    action_list_size: int
    tabu_list_size: int
    iterations: int = 1000

    @classmethod
    def for_cluster(cls, cluster: Cluster, iterations: int = 1000) -> "TabuState":
        nc = len(cluster.customers)
        nd = len(cluster.drones)
        n_actions = nc * (nc - 1) // 2 + nd
        return cls(n_actions, int(0.7 * n_actions), iterations)


class _Engine:
    """Incremental evaluator over the slot representation: slot k holds
    (drone, customer); slot order is the service order."""

    def __init__(self, cluster: Cluster, mode: str):
        inst = cluster.inst
        self.mode = mode
        self.vd = inst.drone_speed
        self.L = inst.drone_range + RANGE_TOL
        self.nc = len(cluster.customers)
        self.nd = len(cluster.drones)
        center = cluster.center
        self.a = np.array([dist(inst.drone_bases[d], center) for d in cluster.drones])
        self.b = np.array([dist(center, inst.customers[c]) for c in cluster.customers])
        self.e = np.array([[dist(inst.customers[c], inst.drone_bases[d])
                            for c in cluster.customers] for d in cluster.drones])
        self.loop = self.a[:, None] + self.b[None, :] + self.e
        self.ok = self.loop <= self.L
        if not self.ok.any(axis=0).all():
            bad = [cluster.customers[c] for c in range(self.nc) if not self.ok[:, c].any()]
            raise InfeasibleCluster(f"no drone can reach customers {bad}")

        # initial solution: customers in index order, each on its nearest feasible drone
        self.slot_cust = list(range(self.nc))
        self.slot_drone = [int(np.argmin(np.where(self.ok[:, c], self.loop[:, c], np.inf)))
                           for c in range(self.nc)]
        self.pos_of = list(range(self.nc))
        self.slots_of = [[] for _ in range(self.nd)]
        self.qsum = [0.0] * self.nd
        for k in range(self.nc):
            d = self.slot_drone[k]
            self.slots_of[d].append(k)
            self.qsum[d] += self.loop[d, k]
        self.t = [self._drone_time(d) for d in range(self.nd)]

    # -- full evaluation of one drone from the current slots -----------------

    def _seq(self, d: int) -> list:
        return [self.slot_cust[k] for k in self.slots_of[d]]

    def _drone_time(self, d: int) -> Optional[float]:
        return self.time_of_seq(d, self._seq(d))

    def time_of_seq(self, d: int, seq: list) -> Optional[float]:
        """Deducted flight time of drone d serving ``seq`` in order, or None
        if no range-feasible trip split exists."""
        if not seq:
            return 0.0
        if self.mode == RECHARGING:
            q = 0.0
            for c in seq:
                if not self.ok[d, c]:
                    return None
                q += self.loop[d, c]
            return (q - self.e[d, seq[-1]]) / self.vd
        # revisiting: greedy chaining, return to base only when the next
        # customer would not fit the current charge
        a = self.a[d]
        q = 0.0
        sum2 = 0.0
        lastc = -1
        for c in seq:
            if lastc >= 0 and a + sum2 + self.b[c] + self.e[d, c] <= self.L:
                sum2 += 2.0 * self.b[c]
                lastc = c
            else:
                if lastc >= 0:
                    q += a + sum2 - self.b[lastc] + self.e[d, lastc]
                if a + self.b[c] + self.e[d, c] > self.L:
                    return None
                sum2 = 2.0 * self.b[c]
                lastc = c
        q += a + sum2 - self.b[lastc] + self.e[d, lastc]
        return (q - self.e[d, lastc]) / self.vd

    def trips_of(self, d: int, drone_id: int, center, cust_ids) -> list:
        """Materialise drone d's trips (global ids) from the current slots."""
        seq = self._seq(d)
        if not seq:
            return []
        if self.mode == RECHARGING:
            return [DroneTrip(drone_id, center, (cust_ids[c],), RECHARGING) for c in seq]
        trips = []
        cur = []
        a = self.a[d]
        sum2 = 0.0
        for c in seq:
            if cur and a + sum2 + self.b[c] + self.e[d, c] <= self.L:
                sum2 += 2.0 * self.b[c]
                cur.append(c)
            else:
                if cur:
                    trips.append(cur)
                cur = [c]
                sum2 = 2.0 * self.b[c]
        trips.append(cur)
        return [DroneTrip(drone_id, center, tuple(cust_ids[c] for c in t), REVISITING)
                for t in trips]

    # -- candidate evaluation -------------------------------------------------

    def eval_swap(self, ci: int, cj: int):
        """New times for the drones touched by swapping customers ci and cj."""
        pi, pj = self.pos_of[ci], self.pos_of[cj]
        d1, d2 = self.slot_drone[pi], self.slot_drone[pj]
        if d1 == d2:
            if self.mode == RECHARGING:
                last_k = self.slots_of[d1][-1]
                lastc = self.slot_cust[last_k]
                if last_k == pi:
                    lastc = cj
                elif last_k == pj:
                    lastc = ci
                return ((d1, (self.qsum[d1] - self.e[d1, lastc]) / self.vd),)
            seq = self._seq(d1)
            seq = [cj if c == ci else ci if c == cj else c for c in seq]
            t = self.time_of_seq(d1, seq)
            return None if t is None else ((d1, t),)
        if self.mode == RECHARGING:
            if not (self.ok[d1, cj] and self.ok[d2, ci]):
                return None
            out = []
            for d, gone, came, p in ((d1, ci, cj, pi), (d2, cj, ci, pj)):
                q = self.qsum[d] - self.loop[d, gone] + self.loop[d, came]
                last_k = self.slots_of[d][-1]
                lastc = came if last_k == p else self.slot_cust[last_k]
                out.append((d, (q - self.e[d, lastc]) / self.vd))
            return tuple(out)
        out = []
        for d, gone, came in ((d1, ci, cj), (d2, cj, ci)):
            seq = [came if c == gone else c for c in self._seq(d)]
            t = self.time_of_seq(d, seq)
            if t is None:
                return None
            out.append((d, t))
        return tuple(out)

    def eval_drone_change(self, pos: int, dn: int):
        """New times when slot ``pos`` moves from its drone to drone dn."""
        do = self.slot_drone[pos]
        c = self.slot_cust[pos]
        if self.mode == RECHARGING:
            if not self.ok[dn, c]:
                return None
            slots_o = self.slots_of[do]
            if len(slots_o) == 1:
                t_old = (do, 0.0)
            else:
                last_k = slots_o[-2] if slots_o[-1] == pos else slots_o[-1]
                q = self.qsum[do] - self.loop[do, c]
                t_old = (do, (q - self.e[do, self.slot_cust[last_k]]) / self.vd)
            slots_n = self.slots_of[dn]
            if not slots_n or pos > slots_n[-1]:
                lastc = c
            else:
                lastc = self.slot_cust[slots_n[-1]]
            q = self.qsum[dn] + self.loop[dn, c]
            return (t_old, (dn, (q - self.e[dn, lastc]) / self.vd))
        seq_o = [x for x in self._seq(do) if x != c]
        t_old = self.time_of_seq(do, seq_o)
        ks = self.slots_of[dn]
        at = bisect_left(ks, pos)
        seq_n = [self.slot_cust[k] for k in ks[:at]] + [c] + [self.slot_cust[k] for k in ks[at:]]
        t_new = self.time_of_seq(dn, seq_n)
        if t_old is None or t_new is None:
            return None
        return ((do, t_old), (dn, t_new))

    # -- mutation -------------------------------------------------------------

    def apply_swap(self, ci: int, cj: int):
        pi, pj = self.pos_of[ci], self.pos_of[cj]
        d1, d2 = self.slot_drone[pi], self.slot_drone[pj]
        self.slot_cust[pi], self.slot_cust[pj] = cj, ci
        self.pos_of[ci], self.pos_of[cj] = pj, pi
        if d1 != d2:
            self.qsum[d1] += self.loop[d1, cj] - self.loop[d1, ci]
            self.qsum[d2] += self.loop[d2, ci] - self.loop[d2, cj]

    def apply_drone_change(self, pos: int, dn: int):
        do = self.slot_drone[pos]
        c = self.slot_cust[pos]
        self.slots_of[do].remove(pos)
        insort(self.slots_of[dn], pos)
        self.slot_drone[pos] = dn
        self.qsum[do] -= self.loop[do, c]
        self.qsum[dn] += self.loop[dn, c]

    def set_times(self, updates):
        for d, t in updates:
            self.t[d] = t

    def snapshot(self):
        return (list(self.slot_cust), list(self.slot_drone))

    def restore(self, snap):
        self.slot_cust, self.slot_drone = list(snap[0]), list(snap[1])
        self.pos_of = [0] * self.nc
        for k, c in enumerate(self.slot_cust):
            self.pos_of[c] = k
        self.slots_of = [[] for _ in range(self.nd)]
        self.qsum = [0.0] * self.nd
        for k in range(self.nc):
            d = self.slot_drone[k]
            self.slots_of[d].append(k)
            self.qsum[d] += self.loop[d, k]
        self.t = [self._drone_time(d) for d in range(self.nd)]


def tabu_search(cluster: Cluster, mode: str, state: Optional[TabuState] = None,
                seed: int = 0):
    """Swap/reassign tabu search over the cluster's deliveries.

    Returns ``(EncodedSolution, time)`` where time is the cluster's deducted
    drone makespan for the best solution found.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if not cluster.customers or not cluster.drones:
        raise ValueError("tabu search needs at least one customer and one drone")
    if state is None:
        state = TabuState.for_cluster(cluster)

    eng = _Engine(cluster, mode)
    nc, nd = eng.nc, eng.nd
    actions = [("swap", i, j) for i in range(nc) for j in range(i + 1, nc)]
    actions += [("drone", d) for d in range(nd)]
    if len(actions) != state.action_list_size:
        raise ValueError("tabu state does not match the cluster dimensions")

    rng = np.random.default_rng(int(seed))
    counters = [0] * len(actions)
    tenure = state.tabu_list_size

    best_cost = max(eng.t)
    best_snap = eng.snapshot()

    for _ in range(state.iterations):
        # three largest drone times: a candidate touches at most two drones,
        # so one of these always witnesses the unaffected maximum
        top3 = sorted(range(nd), key=lambda d: eng.t[d], reverse=True)[:3]
        chosen = None  # (cost, action index, payload, updates)
        for ai, act in enumerate(actions):
            if act[0] == "swap":
                payload = (act[1], act[2])
                updates = eng.eval_swap(*payload)
            else:
                dn = act[1]
                cand = [k for k in range(nc) if eng.slot_drone[k] != dn]
                if not cand:
                    continue
                pos = cand[int(rng.integers(len(cand)))]
                payload = (pos, dn)
                updates = eng.eval_drone_change(pos, dn)
            if updates is None:
                continue
            new_cost = 0.0
            for _d, v in updates:
                if v > new_cost:
                    new_cost = v
            for d in top3:
                if d != updates[0][0] and (len(updates) == 1 or d != updates[1][0]):
                    if eng.t[d] > new_cost:
                        new_cost = eng.t[d]
                    break
            if counters[ai] > 0 and not new_cost < best_cost:
                continue  # tabu and no aspiration
            if chosen is None or new_cost < chosen[0]:
                chosen = (new_cost, ai, payload, updates)

        for i, cnt in enumerate(counters):
            if cnt > 0:
                counters[i] = cnt - 1
        if chosen is None:
            continue
        cost, ai, payload, updates = chosen
        if actions[ai][0] == "swap":
            eng.apply_swap(*payload)
        else:
            eng.apply_drone_change(*payload)
        eng.set_times(updates)
        counters[ai] = tenure
        if cost < best_cost:
            best_cost = cost
            best_snap = eng.snapshot()

    eng.restore(best_snap)
    trips = []
    for dloc in range(nd):
        trips.extend(eng.trips_of(dloc, cluster.drones[dloc], cluster.center,
                                  cluster.customers))
    return encode(trips, cluster), best_cost
