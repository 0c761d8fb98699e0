"""Rank energy statistic and its scaled divergence.

For two point sets ``A`` (size m) and ``B`` (size n) and exponent ``alpha``,

    E = 2/(m n) sum_{a,b} |a - b|^alpha
        - within(A) - within(B)

where ``within`` is the mean of ``|x - x'|^alpha`` over unordered distinct
pairs (``"ustat"``) or over all ordered pairs including the zero diagonal
(``"vstat"``, i.e. normalised by m^2). The scaled divergence is
``Q = m n / (m + n) * E``.

Applied to ranks rather than raw observations the statistic is distribution
free: for continuous data the pooled ranks are always the same grid points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import UnitGrid
from .ranks import as_points, compute_rank_map

VARIANTS = ("ustat", "vstat")


@dataclass(frozen=True)
class EnergyConfig:
    """Exponent and normalisation of the energy statistic.

    ``alpha`` must lie in ``(0, 2]``. At ``alpha == 2`` the statistic only
    compares means, so it no longer detects arbitrary distributional change.
    """

    alpha: float = 1.0
    variant: str = "ustat"

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must be in (0, 2], got {self.alpha}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")

    @property
    def min_side(self) -> int:
        """Smallest sample size per side for which the statistic is defined."""
        return 2 if self.variant == "ustat" else 1


@dataclass(frozen=True)
class SplitStatistic:
    """Statistic of one candidate split.

    ``tau`` is the size of the left sample and ``kappa`` the right end of the
    pooled window, both relative to the start of the analysed segment, so the
    two samples are ``[0, tau)`` and ``[tau, kappa)``.
    """

    tau: int
    kappa: int
    e_value: float
    q_value: float


def power_distances(a, b, alpha: float) -> np.ndarray:
    """Matrix of ``|a_i - b_j|^alpha``."""
    a = as_points(a)
    b = as_points(b)
    diff = a[:, None, :] - b[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    if alpha == 2.0:
        return sq
    return sq ** (alpha / 2.0)


def scaled_divergence(m: int, n: int, e_value: float) -> float:
    """``m n / (m + n) * e_value``."""
    if m < 1 or n < 1:
        raise ValueError("sample sizes must be >= 1")
    return m * n / (m + n) * e_value


def _check_sizes(m: int, n: int, cfg: EnergyConfig) -> None:
    if min(m, n) < cfg.min_side:
        raise ValueError(
            f"{cfg.variant} energy needs at least {cfg.min_side} points per sample, got {m} and {n}"
        )


def pairwise_energy(a, b, cfg: EnergyConfig = EnergyConfig()) -> float:
    """Energy statistic between point sets ``a`` and ``b``.

    Parameters
    ----------
    a, b : array_like, shape (m, d) and (n, d)
        Points (1-D input is read as ``d == 1``).
    cfg : EnergyConfig

    Returns
    -------
    float
        May be negative for the ``"ustat"`` variant.
    """
    a = as_points(a)
    b = as_points(b)
    m, n = len(a), len(b)
    _check_sizes(m, n, cfg)
    if a.shape[1] != b.shape[1]:
        raise ValueError("samples differ in dimension")
    between = power_distances(a, b, cfg.alpha).sum()
    within_a = power_distances(a, a, cfg.alpha).sum()  # ordered pairs, zero diagonal
    within_b = power_distances(b, b, cfg.alpha).sum()
    if cfg.variant == "ustat":
        return 2.0 * between / (m * n) - within_a / (m * (m - 1)) - within_b / (n * (n - 1))
    return 2.0 * between / (m * n) - within_a / m**2 - within_b / n**2


def split_energies(dist: np.ndarray, cfg: EnergyConfig = EnergyConfig()) -> np.ndarray:
    """Energy statistic for every split point of a pooled sample.

    Parameters
    ----------
    dist : (N, N) ndarray
        Symmetric matrix of ``|z_i - z_j|^alpha`` with a zero diagonal, rows in
        time order.
    cfg : EnergyConfig
        Only ``variant`` is used; ``alpha`` is already baked into ``dist``.

    Returns
    -------
    (N + 1,) ndarray
        Entry ``tau`` is the statistic between ``z[:tau]`` and ``z[tau:]``,
        NaN where a side is too small for the variant.
    """
    N = dist.shape[0]
    upper = np.triu(dist, 1)
    left_add = upper.sum(axis=0)  # sum_{i<k} D[i, k]
    right_add = upper.sum(axis=1)  # sum_{k>j} D[j, k]
    within_left = np.concatenate(([0.0], np.cumsum(left_add)))
    within_right = np.concatenate((np.cumsum(right_add[::-1])[::-1], [0.0]))
    total = within_left[N]
    between = total - within_left - within_right

    m = np.arange(N + 1, dtype=float)
    n = N - m
    out = np.full(N + 1, np.nan)
    ok = (m >= cfg.min_side) & (n >= cfg.min_side)
    mm, nn = m[ok], n[ok]
    if cfg.variant == "ustat":
        within = within_left[ok] / (mm * (mm - 1) / 2) + within_right[ok] / (nn * (nn - 1) / 2)
    else:
        within = 2.0 * within_left[ok] / mm**2 + 2.0 * within_right[ok] / nn**2
    out[ok] = 2.0 * between[ok] / (mm * nn) - within
    return out


def split_divergences(dist: np.ndarray, cfg: EnergyConfig = EnergyConfig()) -> np.ndarray:
    """:func:`split_energies` scaled by ``tau (N - tau) / N``."""
    N = dist.shape[0]
    tau = np.arange(N + 1, dtype=float)
    return tau * (N - tau) / N * split_energies(dist, cfg)


def rank_energy(
    sample,
    tau: int,
    grid: UnitGrid | None = None,
    cfg: EnergyConfig = EnergyConfig(),
    grid_kind: str = "halton",
) -> float:
    """Energy statistic between the ranks of ``sample[:tau]`` and ``sample[tau:]``.

    The ranks come from a single rank map of the whole pooled sample.
    """
    pts = as_points(sample)
    _check_sizes(tau, len(pts) - tau, cfg)
    ranks = compute_rank_map(pts, grid, grid_kind).midranks()
    return pairwise_energy(ranks[:tau], ranks[tau:], cfg)
