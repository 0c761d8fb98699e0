"""Exact linear sum assignment on dense square cost matrices.

The solver is the shortest-augmenting-path form of the Hungarian method with
row/column potentials: rows are inserted one at a time and each insertion
runs a Dijkstra-like search over reduced costs, ``O(n^3)`` overall. The
inner loop is compiled with numba.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numba
import numpy as np

BRUTEFORCE_MAX_N = 9


@dataclass(frozen=True)
class Assignment:
    """A row-to-column permutation and its total cost.

    ``perm[i]`` is the (0-based) column assigned to row ``i``.
    """

    perm: np.ndarray
    total_cost: float


def validate_cost(cost) -> np.ndarray:
    """Return ``cost`` as a float64 array, raising ``ValueError`` unless it is
    square with finite, non-negative entries."""
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ValueError("cost matrix contains non-finite entries")
    if np.any(c < 0):
        raise ValueError("cost matrix contains negative entries")
    return np.ascontiguousarray(c)


@numba.njit(cache=True)
def _shortest_augmenting_path(cost):
    n = cost.shape[0]
    inf = np.inf
    # index 0 is a virtual column used as the root of each search
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    col_owner = np.zeros(n + 1, dtype=np.int64)  # row (1-based) matched to column j
    way = np.zeros(n + 1, dtype=np.int64)
    minv = np.empty(n + 1)
    used = np.empty(n + 1, dtype=np.bool_)

    for i in range(1, n + 1):
        col_owner[0] = i
        j0 = 0
        minv[:] = inf
        used[:] = False
        while True:
            used[j0] = True
            i0 = col_owner[j0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[col_owner[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if col_owner[j0] == 0:
                break
        # flip the alternating path back to the root
        while j0 != 0:
            j1 = way[j0]
            col_owner[j0] = col_owner[j1]
            j0 = j1

    perm = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        perm[col_owner[j] - 1] = j - 1
    return perm


def _total(cost: np.ndarray, perm: np.ndarray) -> float:
    return math.fsum(cost[np.arange(len(perm)), perm])


def solve_lsap(cost) -> Assignment:
    """Minimum-cost perfect matching of rows to columns.

    Parameters
    ----------
    cost : (n, n) array_like
        Finite, non-negative costs.

    Returns
    -------
    Assignment
        Globally optimal permutation. Among several optima the one reached by
        the fixed row-insertion / column-scan order is returned, so the
        output is deterministic.
    """
    c = validate_cost(cost)
    if c.shape[0] == 0:
        return Assignment(np.empty(0, dtype=np.int64), 0.0)
    perm = _shortest_augmenting_path(c)
    return Assignment(perm, _total(c, perm))


def lsap_bruteforce(cost) -> Assignment:
    """Enumerate every permutation and return the first minimiser found.

    Test oracle only; refuses matrices larger than 9x9.
    """
    c = validate_cost(cost)
    n = c.shape[0]
    if n > BRUTEFORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTEFORCE_MAX_N}, got {n}")
    if n == 0:
        return Assignment(np.empty(0, dtype=np.int64), 0.0)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    totals = c[np.arange(n), perms].sum(axis=1)
    best = perms[int(np.argmin(totals))]
    return Assignment(best, _total(c, best))
