"""Deterministic reference grids in the unit cube.

Multivariate ranks are defined by transporting a pooled sample onto a fixed
set of points in ``[0, 1]^d``. For ``d == 1`` the grid is ``{i/n}``; for
``d >= 2`` the default is the (unscrambled) Halton sequence. A Kronecker
("torus") sequence is available as an alternative generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

GRID_KINDS = ("halton", "torus", "uniform1d")


@dataclass(frozen=True, eq=False)
class UnitGrid:
    """An ordered set of ``n`` distinct points in ``(0, 1]^d``.

    Attributes
    ----------
    points : (n, d) ndarray
        Grid points, row ``i`` is the ``i``-th point of the sequence.
    kind : str
        One of ``"halton"``, ``"torus"``, ``"uniform1d"``.
    """

    points: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in GRID_KINDS:
            raise ValueError(f"unknown grid kind {self.kind!r}")
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("grid points must form a 2-D array")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


def first_primes(k: int) -> list[int]:
    """Return the first ``k`` primes."""
    primes: list[int] = []
    candidate = 2
    while len(primes) < k:
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
        candidate += 1
    return primes


def radical_inverse(index: int, base: int) -> float:
    """Base-``base`` digit reversal of ``index`` about the radix point.

    >>> radical_inverse(3, 2)
    0.75
    """
    if index < 1:
        raise ValueError("index must be >= 1 (index 0 maps to the origin)")
    if base < 2:
        raise ValueError("base must be >= 2")
    result = 0.0
    factor = 1.0 / base
    while index:
        index, digit = divmod(index, base)
        result += digit * factor
        factor /= base
    return result


def _radical_inverse_column(n: int, base: int) -> np.ndarray:
    # vectorised digit reversal for indices 1..n
    idx = np.arange(1, n + 1, dtype=np.int64)
    out = np.zeros(n)
    factor = 1.0 / base
    while np.any(idx):
        idx, digit = np.divmod(idx, base)
        out += digit * factor
        factor /= base
    return out


def halton_grid(n: int, d: int) -> UnitGrid:
    """First ``n`` points (starting at index 1) of the ``d``-dimensional Halton sequence.

    Coordinate ``j`` uses the ``j``-th prime as base. No scrambling is applied,
    so the output is a pure function of ``(n, d)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 2:
        raise ValueError("halton_grid needs d >= 2; use unit_grid_1d for d == 1")
    cols = [_radical_inverse_column(n, p) for p in first_primes(d)]
    return UnitGrid(np.column_stack(cols), "halton")


def unit_grid_1d(n: int) -> UnitGrid:
    """The grid ``(1/n, 2/n, ..., 1)`` as an ``(n, 1)`` array."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return UnitGrid((np.arange(1, n + 1) / n).reshape(n, 1), "uniform1d")


def torus_grid(n: int, d: int) -> UnitGrid:
    """Kronecker sequence ``frac(i * sqrt(p_j))`` for ``i = 1..n``."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    roots = np.sqrt(np.array(first_primes(d), dtype=float))
    i = np.arange(1, n + 1, dtype=float).reshape(n, 1)
    return UnitGrid(np.mod(i * roots, 1.0), "torus")


@lru_cache(maxsize=256)
def make_grid(n: int, d: int, kind: str = "halton") -> UnitGrid:
    """Grid used as rank targets for a pooled sample of size ``n`` in ``d`` dimensions.

    ``kind="halton"`` is the default family: Halton for ``d >= 2`` and the
    uniform ``{i/n}`` grid for ``d == 1``. ``kind="torus"`` selects the
    Kronecker sequence in every dimension. Results are cached; the returned
    grid is read-only.
    """
    if kind == "torus":
        return torus_grid(n, d)
    if kind == "uniform1d":
        if d != 1:
            raise ValueError("uniform1d grid requires d == 1")
        return unit_grid_1d(n)
    if kind != "halton":
        raise ValueError(f"unknown grid kind {kind!r}")
    return unit_grid_1d(n) if d == 1 else halton_grid(n, d)


def is_valid_grid(grid: UnitGrid) -> bool:
    """True when every coordinate is in ``(0, 1]`` and the points are pairwise distinct."""
    pts = grid.points
    if pts.size and not (np.all(pts > 0.0) and np.all(pts <= 1.0)):
        return False
    return len(np.unique(pts, axis=0)) == len(pts)


__all__ = [
    "UnitGrid",
    "first_primes",
    "halton_grid",
    "is_valid_grid",
    "make_grid",
    "radical_inverse",
    "torus_grid",
    "unit_grid_1d",
]
