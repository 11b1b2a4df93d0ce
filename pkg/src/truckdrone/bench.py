"""Instance generation, baselines, and sensitivity sweeps.

Instances live in the unit box. ``rho1`` is the drone/truck speed ratio and
``rho2`` the drone/customer count ratio; sweeps pair replicates across grid
cells by deriving the instance seed from (master seed, replicate) only, so a
cell change never reshuffles the geometry.
"""

from __future__ import annotations

import csv
import itertools
import math
import os
import time
from dataclasses import dataclass, fields, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import Instance, Params, Point2, as_point, savings
from .pipeline import ALGORITHMS, MODES, RECHARGING, PipelineConfig, solve
from .tsp import lk_tour

DISTRIBUTIONS = ("uniform", "gauss1", "gauss4")

GAUSS4_MEANS = (Point2(0.25, 0.25), Point2(0.25, 0.75),
                Point2(0.75, 0.75), Point2(0.75, 0.25))


@dataclass(frozen=True)
class GenSpec:
    """Random-instance recipe: counts, spatial distribution, speeds, range."""
    n_customers: int
    n_drones: int
    distribution: str = "uniform"
    mu: Point2 = Point2(0.5, 0.5)
    sigma2: float = 0.02
    drone_range: float = 0.8
    rho1: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.n_customers < 1:
            raise ValueError("need at least one customer")
        if self.n_drones < 0:
            raise ValueError("negative drone count")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.sigma2 <= 0:
            raise ValueError("sigma2 must be positive")
        if self.rho1 <= 0:
            raise ValueError("rho1 must be positive")
        object.__setattr__(self, "mu", as_point(self.mu))


def genspec_from_dict(data: dict) -> GenSpec:
    known = {f.name for f in fields(GenSpec)}
    extra = set(data) - known
    if extra:
        raise ValueError(f"unknown GenSpec keys: {sorted(extra)}")
    return GenSpec(**data)


def _sample(rng, spec: GenSpec, k: int):
    if spec.distribution == "uniform":
        arr = rng.random((k, 2))
        return [Point2(float(x), float(y)) for x, y in arr]
    sd = math.sqrt(spec.sigma2)
    pts = []
    for _ in range(k):
        if spec.distribution == "gauss1":
            mean = spec.mu
        else:
            mean = GAUSS4_MEANS[int(rng.integers(len(GAUSS4_MEANS)))]
        while True:
            x = float(rng.normal(mean.x, sd))
            y = float(rng.normal(mean.y, sd))
            if 0.0 <= x <= 1.0 and 0.0 <= y <= 1.0:
                pts.append(Point2(x, y))
                break
    return pts


def generate(spec: GenSpec) -> Instance:
    """Draw a deterministic instance; customers are sampled before drone
    bases so replicates stay paired when only the drone count changes."""
    rng = np.random.default_rng(spec.seed)
    customers = _sample(rng, spec, spec.n_customers)
    bases = _sample(rng, spec, spec.n_drones)
    return Instance(customers=tuple(customers), drone_bases=tuple(bases),
                    truck_speed=1.0, drone_speed=spec.rho1,
                    drone_range=spec.drone_range)


# ---------------------------------------------------------------------------
# baselines
# ---------------------------------------------------------------------------

def tsp_baseline(inst: Instance) -> float:
    """Truck-only cost: best-found closed tour over all customers."""
    if inst.n_customers == 1:
        return 0.0
    return lk_tour(inst.customers).length / inst.truck_speed


def tspd_baseline(inst: Instance) -> float:
    """Truck plus a single onboard drone with unlimited range.

    Starts from the truck-only tour and greedily offloads sorties: the drone
    launches at a tour node, serves the removed customer, and rejoins at the
    next node while the truck drives the shortcut; the combined leg costs the
    slower of the two. A leg already hosting a sortie cannot host another.
    """
    pts = inst.customers
    n = len(pts)
    if n == 1:
        return 0.0
    v_t, v_d = inst.truck_speed, inst.drone_speed
    cycle = list(lk_tour(pts).order)
    m = len(cycle)
    times = [dist_over(pts[cycle[i]], pts[cycle[(i + 1) % m]], v_t)
             for i in range(m)]
    locked = [False] * m
    while len(cycle) > 2:
        size = len(cycle)
        best = None
        for idx in range(size):
            if locked[idx - 1] or locked[idx]:
                continue
            a = pts[cycle[idx - 1]]
            c = pts[cycle[idx]]
            b = pts[cycle[(idx + 1) % size]]
            new = max(dist_over(a, b, v_t),
                      (math.hypot(a.x - c.x, a.y - c.y) +
                       math.hypot(c.x - b.x, c.y - b.y)) / v_d)
            delta = new - (times[idx - 1] + times[idx])
            if delta < -1e-12 and (best is None or delta < best[0]):
                best = (delta, idx, new)
        if best is None:
            break
        _, idx, new = best
        times[(idx - 1) % size] = new
        locked[(idx - 1) % size] = True
        del cycle[idx], times[idx], locked[idx]
    return sum(times)


def dist_over(a: Point2, b: Point2, speed: float) -> float:
    return math.hypot(a.x - b.x, a.y - b.y) / speed


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepGrid:
    """Cartesian sweep specification; tuple fields are grid axes."""
    rho1: tuple = (2.0,)
    rho2: tuple = (1.0,)
    drone_range: tuple = (0.8,)
    sigma2: tuple = (0.02,)
    distribution: tuple = ("uniform",)
    n_customers: int = 60
    algorithm: str = "alg3"
    mode: str = RECHARGING
    reps: int = 5
    seed: int = 0

    def __post_init__(self):
        for name in ("rho1", "rho2", "drone_range", "sigma2", "distribution"):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                value = tuple(value) if isinstance(value, (list, set)) else (value,)
                object.__setattr__(self, name, value)
            if not value:
                raise ValueError(f"empty grid axis {name}")
        if self.reps < 1:
            raise ValueError("reps must be positive")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")


def grid_from_dict(data: dict) -> SweepGrid:
    known = {f.name for f in fields(SweepGrid)}
    extra = set(data) - known
    if extra:
        raise ValueError(f"unknown sweep keys: {sorted(extra)}")
    return SweepGrid(**data)


@dataclass(frozen=True)
class SweepResult:
    rho1: float
    rho2: float
    drone_range: float
    sigma2: float
    distribution: str
    algorithm: str
    mode: str
    seed: int
    objective: float
    baseline_objective: float
    savings: float
    runtime: float

    @property
    def key(self):
        return (self.rho1, self.rho2, self.drone_range, self.sigma2,
                self.distribution, self.algorithm, self.mode, self.seed)


CSV_FIELDS = [f.name for f in fields(SweepResult)]


def replicate_seed(master: int, rep: int) -> int:
    """Instance seed for replicate ``rep``; independent of the grid cell so
    comparisons across cells are paired."""
    return int(np.random.SeedSequence([int(master), int(rep)])
               .generate_state(1)[0])


def run_cell(grid: SweepGrid, rho1: float, rho2: float, drone_range: float,
             sigma2: float, distribution: str, rep: int) -> SweepResult:
    inst_seed = replicate_seed(grid.seed, rep)
    spec = GenSpec(n_customers=grid.n_customers,
                   n_drones=int(round(rho2 * grid.n_customers)),
                   distribution=distribution, sigma2=sigma2,
                   drone_range=drone_range, rho1=rho1, seed=inst_seed)
    inst = generate(spec)
    config = PipelineConfig(algorithm=grid.algorithm, mode=grid.mode,
                            params=Params(rho1=rho1, rho2=rho2, seed=inst_seed))
    start = time.perf_counter()
    plan = solve(inst, config)
    runtime = time.perf_counter() - start
    base = tsp_baseline(inst)
    return SweepResult(rho1=rho1, rho2=rho2, drone_range=drone_range,
                       sigma2=sigma2, distribution=distribution,
                       algorithm=grid.algorithm, mode=grid.mode, seed=inst_seed,
                       objective=plan.objective, baseline_objective=base,
                       savings=savings(base, plan.objective), runtime=runtime)


def read_results(path) -> list:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(SweepResult(
                rho1=float(row["rho1"]), rho2=float(row["rho2"]),
                drone_range=float(row["drone_range"]),
                sigma2=float(row["sigma2"]),
                distribution=row["distribution"], algorithm=row["algorithm"],
                mode=row["mode"], seed=int(row["seed"]),
                objective=float(row["objective"]),
                baseline_objective=float(row["baseline_objective"]),
                savings=float(row["savings"]),
                runtime=float(row["runtime"])))
    return out


def _append_row(path, result: SweepResult, write_header: bool):
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if write_header:
            writer.writerow(CSV_FIELDS)
        writer.writerow([getattr(result, name) for name in CSV_FIELDS])
        fh.flush()
        os.fsync(fh.fileno())


def _rewrite_sorted(path, results: Sequence[SweepResult]):
    ordered = sorted(results, key=lambda r: r.key)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for result in ordered:
            writer.writerow([getattr(result, name) for name in CSV_FIELDS])


def sweep(grid: SweepGrid, out_csv=None, resume: bool = True,
          progress=None) -> list:
    """Run every grid cell for every replicate; returns all results.

    With ``out_csv``, each finished row is appended immediately, rows already
    present are skipped (resume), and the file is rewritten in sorted order at
    the end so content is independent of completion order.
    """
    done = {}
    if out_csv is not None and resume and os.path.exists(out_csv):
        for result in read_results(out_csv):
            done[result.key] = result
    results = list(done.values())
    header_needed = out_csv is not None and not done and \
        not os.path.exists(out_csv)
    cells = itertools.product(grid.distribution, grid.sigma2,
                              grid.drone_range, grid.rho1, grid.rho2)
    for distribution, sigma2, drone_range, rho1, rho2 in cells:
        for rep in range(grid.reps):
            key = (rho1, rho2, drone_range, sigma2, distribution,
                   grid.algorithm, grid.mode, replicate_seed(grid.seed, rep))
            if key in done:
                continue
            try:
                result = run_cell(grid, rho1, rho2, drone_range, sigma2,
                                  distribution, rep)
            except Exception as exc:
                raise RuntimeError(
                    f"sweep cell failed: rho1={rho1} rho2={rho2} "
                    f"L={drone_range} sigma2={sigma2} "
                    f"distribution={distribution} rep={rep}") from exc
            results.append(result)
            done[key] = result
            if out_csv is not None:
                _append_row(out_csv, result, header_needed)
                header_needed = False
            if progress is not None:
                progress(result)
    if out_csv is not None:
        _rewrite_sorted(out_csv, results)
    return results


def mean_savings(results: Iterable[SweepResult], **filters) -> float:
    picked = [r for r in results
              if all(getattr(r, k) == v for k, v in filters.items())]
    if not picked:
        raise ValueError(f"no rows match {filters}")
    return sum(r.savings for r in picked) / len(picked)
