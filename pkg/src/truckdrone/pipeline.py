"""End-to-end heuristics: cluster customers, schedule drones per cell with
tabu search, route the truck through the pickup stops.

Four variants share the clustering front end:

* ``run_original`` keeps the continuous cluster centers as free truck stops.
* ``run_alg1`` snaps each center onto its nearest customer and moves customers
  the drones cannot (or should not) serve onto the truck tour.
* ``run_alg2`` additionally relocates each center toward the centroid of the
  truck stops when a closer customer can host it without losing feasibility.
* ``run_alg3`` additionally merges centers pairwise while the combined drone
  fleet can still cover the combined customers, re-homing every drone and
  customer at the start of each merge pass (this is where the conservative
  quarter-range clustering radius gets relaxed).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .clustering import min_feasible_k
from .core import (RECHARGING, REVISITING, MODES, RANGE_TOL,
                   Instance, Params, Plan, Point2, dist, make_plan, stop_point)
from .drone_router import Cluster, TabuState, decode, tabu_search
from .tsp import lk_tour

ALGORITHMS = ("original", "alg1", "alg2", "alg3")


@dataclass(frozen=True)
class PipelineConfig:
    algorithm: str = "alg3"
    mode: str = RECHARGING
    params: Params = Params()
    tabu_iterations: int = 1000

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class _Cell:
    center: Point2
    center_cust: Optional[int]      # customer hosting the center (algs 1-3)
    members: list                   # all customers of the original cell
    served: list                    # drone-served customers (excl. center_cust)
    drones: list


def _loop(inst: Instance, d: int, center: Point2, c: int) -> float:
    base = inst.drone_bases[d]
    z = inst.customers[c]
    return dist(base, center) + dist(center, z) + dist(z, base)


def _best_loop(inst: Instance, drones, center: Point2, c: int):
    best = None
    for d in drones:
        v = _loop(inst, d, center, c)
        if best is None or v < best:
            best = v
    return best


def _initial_cells(inst: Instance, seed: int):
    clu = min_feasible_k(inst, seed)
    cells = [_Cell(center=p, center_cust=None, members=[], served=[], drones=[])
             for p in clu.centers]
    truck = set()
    for c in range(inst.n_customers):
        j = clu.customer_assignment[c]
        if j is None:
            truck.add(c)
        else:
            cells[j].members.append(c)
            cells[j].served.append(c)
    for d in range(inst.n_drones):
        j = clu.drone_assignment[d]
        if j is not None:
            cells[j].drones.append(d)
    return cells, truck


def _cell_key(cell: _Cell):
    return (cell.center.x, cell.center.y,
            -1 if cell.center_cust is None else cell.center_cust)


def _route_stops(inst: Instance, stops, seed: int):
    if len(stops) <= 2:
        return tuple(stops)
    pts = [stop_point(s, inst) for s in stops]
    tour = lk_tour(pts, seed)
    return tuple(stops[i] for i in tour.order)


def _finalize(inst: Instance, cells, truck, config: PipelineConfig, mode: str) -> Plan:
    truck = set(truck)
    cells = sorted(cells, key=_cell_key)
    trips = []
    free_stops = []
    for idx, cell in enumerate(cells):
        if cell.served and not cell.drones:
            truck |= set(cell.served)   # nobody to fly: the truck takes over
            cell.served = []
        if not cell.served:
            if cell.center_cust is None:
                continue                # continuous center with no work: drop
        else:
            cluster = Cluster(inst, cell.center,
                              tuple(sorted(cell.served)), tuple(sorted(cell.drones)))
            state = TabuState.for_cluster(cluster, config.tabu_iterations)
            sol, _ = tabu_search(cluster, mode, state, config.params.seed ^ idx)
            trips.extend(decode(sol, cluster))
            if cell.center_cust is None:
                free_stops.append(cell.center)
    stops = free_stops + sorted(truck)
    ordered = _route_stops(inst, stops, config.params.seed)
    return make_plan(inst, ordered, trips)


# ---------------------------------------------------------------------------
# stage transforms
# ---------------------------------------------------------------------------

def _stage_alg1(inst: Instance, cells, truck):
    """Snap centers onto customers; send unservable (or truck-cheaper single)
    customers to the truck."""
    L = inst.drone_range + RANGE_TOL
    out = []
    for cell in cells:
        if not cell.members:
            continue
        c0 = min(cell.members,
                 key=lambda c: (dist(inst.customers[c], cell.center), c))
        m = inst.customers[c0]
        rest = [c for c in sorted(cell.members) if c != c0]
        served = []
        for z in rest:
            best = _best_loop(inst, cell.drones, m, z)
            if best is None or best > L:
                truck.add(z)
                continue
            # a lone companion goes by truck when the out-and-back drive
            # beats the best drone loop
            if len(rest) == 1 and (2.0 * dist(inst.customers[z], m) / inst.truck_speed
                                   <= best / inst.drone_speed):
                truck.add(z)
                continue
            served.append(z)
        truck.add(c0)
        out.append(_Cell(center=m, center_cust=c0, members=list(cell.members),
                         served=served, drones=sorted(cell.drones)))
    return out, truck


def _truck_centroid(inst: Instance, truck) -> Point2:
    pts = [inst.customers[c] for c in sorted(truck)]
    return Point2(sum(p.x for p in pts) / len(pts), sum(p.y for p in pts) / len(pts))


def _stage_alg2(inst: Instance, cells, truck):
    """Move each center to the first customer at least as close to the truck
    centroid that keeps a drone within L/4 and every drone-served customer
    (plus the old center customer) reachable."""
    g = _truck_centroid(inst, truck)
    L = inst.drone_range + RANGE_TOL
    radius = inst.drone_range / 4.0
    for cell in cells:
        c0 = cell.center_cust
        dg = {c: dist(inst.customers[c], g) for c in cell.members}
        for z in sorted(cell.members, key=lambda c: (dg[c], c)):
            if dg[z] > dg[c0]:
                break
            zp = inst.customers[z]
            if not any(dist(inst.drone_bases[d], zp) < radius for d in cell.drones):
                continue
            need = (set(cell.served) | {c0}) - {z}
            if all((b := _best_loop(inst, cell.drones, zp, w)) is not None and b <= L
                   for w in need):
                if z != c0:
                    cell.center = zp
                    cell.center_cust = z
                    cell.served = sorted(need)
                    truck.discard(c0)
                    truck.add(z)
                break
    return cells, truck, g


def _reallocate(inst: Instance, cells, g):
    """Global re-homing used by each merge pass: every drone to its nearest
    center, every non-center customer to the nearest center whose drones can
    serve it, leftovers to the truck."""
    L = inst.drone_range + RANGE_TOL
    center_custs = {cell.center_cust for cell in cells}
    for cell in cells:
        cell.drones = []
        cell.served = []
    for d in range(inst.n_drones):
        j = min(range(len(cells)),
                key=lambda j: (dist(inst.drone_bases[d], cells[j].center), j))
        cells[j].drones.append(d)
    truck = set(center_custs)
    for c in range(inst.n_customers):
        if c in center_custs:
            continue
        for j in sorted(range(len(cells)),
                        key=lambda j: (dist(inst.customers[c], cells[j].center), j)):
            best = _best_loop(inst, cells[j].drones, cells[j].center, c)
            if best is not None and best <= L:
                cells[j].served.append(c)
                break
        else:
            truck.add(c)
    return cells, truck


def _merge_feasible(inst: Instance, custs, drones, center: Point2) -> bool:
    L = inst.drone_range + RANGE_TOL
    for z in custs:
        best = _best_loop(inst, drones, center, z)
        if best is None or best > L:
            return False
    return True


def _stage_alg3(inst: Instance, cells, truck, g):
    """Merge passes: while some merge succeeded, re-home everything and try to
    fold each center into its nearest surviving neighbour."""
    changed = True
    while changed:
        changed = False
        if len(cells) <= 1:
            break
        cells.sort(key=lambda cell: (-dist(cell.center, g), cell.center_cust))
        cells, truck = _reallocate(inst, cells, g)
        k = len(cells)
        absorbed = set()
        count = 0
        for r in range(k):
            if r in absorbed:
                continue
            others = [s for s in range(k) if s != r and s not in absorbed]
            if not others:
                continue
            s = min(others, key=lambda s: (dist(cells[s].center, cells[r].center),
                                           dist(cells[s].center, g), s))
            if k == 2:
                size_r = len(cells[r].served) + 1
                size_s = len(cells[s].served) + 1
                if (size_s, dist(cells[r].center, g), cells[r].center_cust) < \
                   (size_r, dist(cells[s].center, g), cells[s].center_cust):
                    win, lose = r, s
                else:
                    win, lose = s, r
                custs = cells[lose].served + [cells[lose].center_cust] + cells[win].served
                drones = cells[lose].drones + cells[win].drones
                if _merge_feasible(inst, custs, drones, cells[win].center):
                    cells[win].served = sorted(custs)
                    cells[win].drones = sorted(drones)
                    truck.discard(cells[lose].center_cust)
                    absorbed.add(lose)
                break
            custs = cells[r].served + [cells[r].center_cust] + cells[s].served
            drones = cells[r].drones + cells[s].drones
            if _merge_feasible(inst, custs, drones, cells[s].center):
                cells[s].served = sorted(custs)
                cells[s].drones = sorted(drones)
                truck.discard(cells[r].center_cust)
                absorbed.add(r)
                count += 1
        cells = [cells[i] for i in range(k) if i not in absorbed]
        changed = count > 0
    return cells, truck


# ---------------------------------------------------------------------------
# public runners
# ---------------------------------------------------------------------------

def run_original(inst: Instance, config: PipelineConfig) -> Plan:
    cells, truck = _initial_cells(inst, config.params.seed)
    return _finalize(inst, cells, truck, config, config.mode)


def run_alg1(inst: Instance, config: PipelineConfig) -> Plan:
    cells, truck = _initial_cells(inst, config.params.seed)
    cells, truck = _stage_alg1(inst, cells, truck)
    return _finalize(inst, cells, truck, config, config.mode)


def run_alg2(inst: Instance, config: PipelineConfig) -> Plan:
    cells, truck = _initial_cells(inst, config.params.seed)
    cells, truck = _stage_alg1(inst, cells, truck)
    cells, truck, _ = _stage_alg2(inst, cells, truck)
    return _finalize(inst, cells, truck, config, config.mode)


def run_alg3(inst: Instance, config: PipelineConfig) -> Plan:
    cells, truck = _initial_cells(inst, config.params.seed)
    cells, truck = _stage_alg1(inst, cells, truck)
    cells, truck, g = _stage_alg2(inst, cells, truck)
    cells, truck = _stage_alg3(inst, cells, truck, g)
    return _finalize(inst, cells, truck, config, config.mode)


_RUNNERS = {"original": run_original, "alg1": run_alg1,
            "alg2": run_alg2, "alg3": run_alg3}


def solve(inst: Instance, config: PipelineConfig) -> Plan:
    return _RUNNERS[config.algorithm](inst, config)


def compare_modes(inst: Instance, config: PipelineConfig) -> Plan:
    """Run the configured algorithm in both battery modes; keep the cheaper
    plan, recharging on a tie (within params.epsilon)."""
    recharge = solve(inst, replace(config, mode=RECHARGING))
    revisit = solve(inst, replace(config, mode=REVISITING))
    if revisit.objective < recharge.objective - config.params.epsilon:
        return revisit
    return recharge
