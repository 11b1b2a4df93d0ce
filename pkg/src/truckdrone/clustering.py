"""Coverage clustering: find the fewest centers so every customer sits within
a quarter of the drone range of its center.

Radius L/4 guarantees any drone and any customer of the same cell are at most
L/2 apart through the center, so every base -> center -> customer -> base loop
fits the range L.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Instance, Point2

RESTARTS = 10
FEAS_TOL = 1e-9


class InvalidK(ValueError):
    pass


@dataclass(frozen=True)
class Clustering:
    k: int
    centers: tuple
    customer_assignment: dict  # customer index -> center index, or None
    drone_assignment: dict     # drone index -> center index, or None


def _as_array(points) -> np.ndarray:
    return np.asarray([(p[0], p[1]) for p in points], dtype=float)


def _dists_to(pts: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = pts[:, None, :] - centers[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def kmeans_cost(points, centers) -> float:
    """Sum of squared distances to the nearest center."""
    d = _dists_to(_as_array(points), _as_array(centers))
    return float((d.min(axis=1) ** 2).sum())


def lloyd(points: Sequence, k: int, seed: int = 0,
          max_iter: int = 100, tol: float = 1e-7) -> list:
    """Lloyd's algorithm with farthest-point seeding (first pick seeded)."""
    pts = _as_array(points)
    n = len(pts)
    if not 1 <= k <= n:
        raise InvalidK(f"k={k} must be in [1, {n}]")
    rng = np.random.default_rng(int(seed))

    centers = np.empty((k, 2), dtype=float)
    centers[0] = pts[int(rng.integers(n))]
    dmin = np.hypot(pts[:, 0] - centers[0, 0], pts[:, 1] - centers[0, 1])
    for j in range(1, k):
        centers[j] = pts[int(np.argmax(dmin))]
        dmin = np.minimum(dmin, np.hypot(pts[:, 0] - centers[j, 0],
                                         pts[:, 1] - centers[j, 1]))

    for _ in range(max_iter):
        d = _dists_to(pts, centers)
        labels = d.argmin(axis=1)
        # a cluster that lost all members restarts at the worst-covered point
        for j in range(k):
            if not (labels == j).any():
                dmin = d.min(axis=1)
                centers[j] = pts[int(np.argmax(dmin))]
                d = _dists_to(pts, centers)
                labels = d.argmin(axis=1)
        new_centers = np.array([pts[labels == j].mean(axis=0) for j in range(k)])
        move = np.hypot(*(new_centers - centers).T).max()
        centers = new_centers
        if move < tol:
            break
    return [Point2(float(c[0]), float(c[1])) for c in centers]


def _restart_seed(master: int, k: int, r: int) -> int:
    return int(np.random.SeedSequence([int(master), k, r]).generate_state(1)[0])


def _coverage(inst: Instance, centers) -> float:
    d = _dists_to(_as_array(inst.customers), _as_array(centers))
    return float(d.min(axis=1).max())


def _probe(inst: Instance, k: int, seed: int):
    """Best feasible restart at this k, or None (feasible = all customers
    within L/4 of some center, up to FEAS_TOL)."""
    radius = inst.drone_range / 4.0
    best = None
    for r in range(RESTARTS):
        centers = lloyd(inst.customers, k, _restart_seed(seed, k, r))
        if _coverage(inst, centers) <= radius + FEAS_TOL:
            cost = kmeans_cost(inst.customers, centers)
            if best is None or cost < best[0]:
                best = (cost, r, centers)
    return None if best is None else best[2]


def voronoi_assign(inst: Instance, centers: Sequence) -> Clustering:
    """Nearest-center assignment, but only when strictly inside radius L/4;
    ties go to the lowest center index.  Unassigned customers ride the truck,
    unassigned drones stay idle."""
    radius = inst.drone_range / 4.0
    carr = _as_array(centers)

    def assign(points) -> dict:
        out = {}
        if len(points) == 0:
            return out
        d = _dists_to(_as_array(points), carr)
        idx = d.argmin(axis=1)
        for i, (j, dd) in enumerate(zip(idx, d[np.arange(len(points)), idx])):
            out[i] = int(j) if dd < radius else None
        return out

    return Clustering(
        k=len(centers),
        centers=tuple(Point2(float(c[0]), float(c[1])) for c in carr),
        customer_assignment=assign(inst.customers),
        drone_assignment=assign(inst.drone_bases),
    )


def min_feasible_k(inst: Instance, seed: int = 0) -> Clustering:
    """Binary-search the smallest k whose best-of-RESTARTS Lloyd run covers
    every customer within L/4, then Voronoi-assign customers and drones."""
    n = inst.n_customers
    cache: dict = {}

    def feasible(k: int):
        if k not in cache:
            cache[k] = _probe(inst, k, seed)
        return cache[k]

    lo, hi = 1, n
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(mid) is not None:
            hi = mid
        else:
            lo = mid + 1
    centers = feasible(lo)
    if centers is None:
        # k = n puts a center on every customer; only degenerate inputs land here
        raise RuntimeError("no feasible clustering found")
    return voronoi_assign(inst, centers)
