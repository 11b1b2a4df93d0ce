"""Closed-tour solvers for the truck route.

``lk_tour`` is a light Lin-Kernighan-style stand-in: nearest-neighbour
construction improved to joint 2-opt / Or-opt local optimality, best of a few
seeded restarts.  ``exact_tour`` enumerates every tour (small inputs only).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import dist

#: exhaustive enumeration refuses more points than this
EXACT_LIMIT = 10
RESTARTS = 5


class TooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Tour:
    order: tuple
    length: float


def _dmatrix(points) -> np.ndarray:
    pts = np.asarray([(p[0], p[1]) for p in points], dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def tour_length(order: Sequence[int], D: np.ndarray) -> float:
    if len(order) <= 1:
        return 0.0
    total = 0.0
    for a, b in zip(order, order[1:]):
        total += float(D[a, b])
    total += float(D[order[-1], order[0]])
    return total


def _nearest_neighbour(D: np.ndarray, start: int) -> np.ndarray:
    n = D.shape[0]
    order = [start]
    todo = np.ones(n, dtype=bool)
    todo[start] = False
    cur = start
    for _ in range(n - 1):
        row = np.where(todo, D[cur], np.inf)
        cur = int(np.argmin(row))
        todo[cur] = False
        order.append(cur)
    return np.array(order, dtype=np.int64)


def _two_opt(o: np.ndarray, D: np.ndarray) -> bool:
    """Apply 2-opt moves until none improves; True if anything changed."""
    n = len(o)
    changed = False
    improving = True
    while improving:
        improving = False
        for i in range(n - 1):
            js = np.arange(i + 2, n if i > 0 else n - 1)
            if js.size == 0:
                continue
            a, b = o[i], o[i + 1]
            c = o[js]
            d = o[(js + 1) % n]
            delta = D[a, c] + D[b, d] - D[a, b] - D[c, d]
            k = int(np.argmin(delta))
            if delta[k] < -1e-12:
                j = int(js[k])
                o[i + 1:j + 1] = o[i + 1:j + 1][::-1]
                improving = True
                changed = True
    return changed


def _or_opt(o: np.ndarray, D: np.ndarray) -> bool:
    """Relocate segments of 1..3 nodes (forward or reversed); True if changed."""
    n = len(o)
    changed = False
    improving = True
    while improving:
        improving = False
        for seglen in (1, 2, 3):
            if seglen >= n - 1:
                break
            for i in range(n - seglen):
                prev = o[(i - 1) % n]
                nxt = o[(i + seglen) % n]
                s0, s1 = o[i], o[i + seglen - 1]
                gain = D[prev, s0] + D[s1, nxt] - D[prev, nxt]
                if gain <= 1e-12:
                    continue
                rest = np.concatenate([o[:i], o[i + seglen:]])
                m = len(rest)
                js = np.arange(m)
                p = rest[js]
                q = rest[(js + 1) % m]
                cost_f = D[p, s0] + D[s1, q] - D[p, q]
                cost_r = D[p, s1] + D[s0, q] - D[p, q]
                jf = int(np.argmin(cost_f))
                jr = int(np.argmin(cost_r))
                best, rev = (cost_f[jf], False) if cost_f[jf] <= cost_r[jr] else (cost_r[jr], True)
                jbest = jr if rev else jf
                if best < gain - 1e-12:
                    seg = o[i:i + seglen][::-1] if rev else o[i:i + seglen]
                    o[:] = np.concatenate([rest[:jbest + 1], seg, rest[jbest + 1:]])
                    improving = True
                    changed = True
                    break
            if improving:
                break
    return changed


def lk_tour(points: Sequence, seed: int = 0) -> Tour:
    """Best closed tour over ``points`` from RESTARTS seeded local searches."""
    n = len(points)
    if n == 0:
        raise ValueError("need at least one point")
    if n == 1:
        return Tour((0,), 0.0)
    if n == 2:
        return Tour((0, 1), 2.0 * dist(points[0], points[1]))
    D = _dmatrix(points)
    best_order = None
    best_len = float("inf")
    for r in range(RESTARTS):
        rng = np.random.default_rng([int(seed), r])
        o = _nearest_neighbour(D, int(rng.integers(n)))
        while True:
            _two_opt(o, D)
            if not _or_opt(o, D):
                break
        length = tour_length(o, D)
        if length < best_len:
            best_len = length
            best_order = tuple(int(v) for v in o)
    return Tour(best_order, best_len)


def exact_tour(points: Sequence) -> Tour:
    """Optimal closed tour by exhaustive enumeration (first node fixed,
    orientation canonical: order[1] < order[-1])."""
    n = len(points)
    if n > EXACT_LIMIT:
        raise TooLarge(f"exact tour limited to {EXACT_LIMIT} points, got {n}")
    if n == 0:
        raise ValueError("need at least one point")
    if n == 1:
        return Tour((0,), 0.0)
    if n == 2:
        return Tour((0, 1), 2.0 * dist(points[0], points[1]))
    D = _dmatrix(points)
    perms = np.array([p for p in itertools.permutations(range(1, n)) if p[0] < p[-1]],
                     dtype=np.int64)
    full = np.hstack([np.zeros((len(perms), 1), dtype=np.int64), perms])
    lengths = D[full[:, :-1], full[:, 1:]].sum(axis=1) + D[full[:, -1], 0]
    k = int(np.argmin(lengths))
    return Tour(tuple(int(v) for v in full[k]), float(lengths[k]))
