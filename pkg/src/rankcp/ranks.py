"""Empirical multivariate ranks via optimal assignment onto a grid.

The pooled sample of ``N`` points is matched one-to-one with the ``N`` grid
points so that the total squared Euclidean transport cost is minimal. The
grid point matched to an observation is its rank. In one dimension with the
grid ``{i/N}`` this reproduces the classical ranks divided by ``N``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .assignment import solve_lsap
from .grid import UnitGrid, make_grid


class TiedObservationsWarning(UserWarning):
    """Pooled sample contains repeated observations."""


def as_points(data) -> np.ndarray:
    """Coerce ``data`` to a float ``(N, d)`` array; 1-D input becomes one column."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"expected a 1-D or 2-D array, got {arr.ndim} dimensions")
    return arr


@dataclass(frozen=True, eq=False)
class RankMap:
    """Ranks of a pooled sample.

    Attributes
    ----------
    ranks : (N, d) ndarray
        ``ranks[i]`` is the grid point assigned to observation ``i``; the rows
        are a permutation of ``grid.points``.
    perm : (N,) ndarray of int
        Grid index assigned to each observation.
    grid : UnitGrid
    tie_labels : (N,) ndarray of int or None
        Group label of each observation when the sample has repeated points,
        otherwise ``None``.
    """

    ranks: np.ndarray
    perm: np.ndarray
    grid: UnitGrid
    tie_labels: np.ndarray | None = None

    @property
    def has_ties(self) -> bool:
        return self.tie_labels is not None

    def midranks(self) -> np.ndarray:
        """Ranks with each group of identical observations given the mean of
        its assigned grid points.

        Identical observations are indistinguishable, so which of them gets
        which grid point is an artefact of solver tie-breaking; averaging
        removes that arbitrariness (the multivariate analogue of mid-ranks).
        Without ties this is just ``ranks``.
        """
        if self.tie_labels is None:
            return self.ranks
        n_groups = int(self.tie_labels.max()) + 1
        sums = np.zeros((n_groups, self.ranks.shape[1]))
        np.add.at(sums, self.tie_labels, self.ranks)
        counts = np.bincount(self.tie_labels, minlength=n_groups)
        return (sums / counts[:, None])[self.tie_labels]


def cost_matrix(points, grid: UnitGrid) -> np.ndarray:
    """Squared Euclidean distances ``|points[i] - grid.points[j]|^2``."""
    pts = as_points(points)
    if pts.shape[1] != grid.dim:
        raise ValueError(f"dimension mismatch: sample d={pts.shape[1]}, grid d={grid.dim}")
    if pts.shape[0] != len(grid):
        raise ValueError(f"size mismatch: sample N={pts.shape[0]}, grid N={len(grid)}")
    diff = pts[:, None, :] - grid.points[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _tie_labels(pts: np.ndarray) -> np.ndarray | None:
    _, inverse = np.unique(pts, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    if inverse.max(initial=-1) + 1 == len(pts):
        return None
    return inverse


def _monotone_assignment(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    # in 1-D the squared-cost optimum sends the k-th smallest point to the
    # k-th smallest grid value; sorting avoids cost-matrix round-off when
    # points are closer than the cost resolution
    if len(x) != len(g):
        raise ValueError(f"size mismatch: sample N={len(x)}, grid N={len(g)}")
    perm = np.empty(len(x), dtype=np.int64)
    perm[np.argsort(x, kind="stable")] = np.argsort(g, kind="stable")
    return perm


def compute_rank_map(points, grid: UnitGrid | None = None, grid_kind: str = "halton") -> RankMap:
    """Transport the pooled sample onto ``grid`` under squared Euclidean cost.

    When ``grid`` is omitted it is built with :func:`make_grid` for the
    sample's size and dimension. One-dimensional samples are solved exactly
    by sorting (the monotone rearrangement); higher dimensions go through
    :func:`~rankcp.assignment.solve_lsap`.
    """
    pts = as_points(points)
    if grid is None:
        grid = make_grid(pts.shape[0], pts.shape[1], grid_kind)
    if not np.all(np.isfinite(pts)):
        raise ValueError("sample contains non-finite values")
    if pts.shape[1] == 1 and grid.dim == 1:
        perm = _monotone_assignment(pts[:, 0], grid.points[:, 0])
    else:
        perm = solve_lsap(cost_matrix(pts, grid)).perm
    labels = _tie_labels(pts)
    if labels is not None:
        warnings.warn(
            "pooled sample contains repeated observations; tied points share "
            "the mean of their assigned ranks",
            TiedObservationsWarning,
            stacklevel=2,
        )
    return RankMap(grid.points[perm], perm, grid, labels)
