"""Multiple change point estimation with rank energy divergences.

Two procedures are provided:

* :func:`divisive_detect` splits the series recursively at the split point
  maximising the scaled rank energy divergence and keeps a split only when a
  permutation test finds it significant.
* :func:`agglomerative_detect` starts from consecutive blocks, greedily merges
  adjacent clusters and returns the clustering that maximises the sum of
  divergences between neighbouring clusters over the whole merge sequence.

Indices are 0-based. A change point ``c`` means observations ``[.., c)`` and
``[c, ..)`` come from different distributions.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .energy import (
    EnergyConfig,
    SplitStatistic,
    power_distances,
    split_divergences,
    split_energies,
)
from .grid import make_grid
from .ranks import as_points, compute_rank_map

logger = logging.getLogger(__name__)

KAPPA_MODES = ("segment_end", "full_sweep")

# relative slack when comparing permuted maxima to the observed one; both are
# sums of the same terms in different order
_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class DetectConfig:
    """Settings shared by both detection procedures.

    Attributes
    ----------
    energy : EnergyConfig
    min_size : int
        Minimum observations on each side of a split. The ``"ustat"`` variant
        needs at least 2; values of 5 or more give steadier p-values.
    n_permutations : int
        Permutation replicates per significance test.
    sig_level : float
        A split is kept when its p-value is ``<= sig_level``.
    kappa_mode : str
        ``"segment_end"`` pools the whole segment once; ``"full_sweep"`` also
        maximises over the right end of the pooled window, solving one
        assignment per window (much slower).
    seed : int
        Root seed of the permutation streams.
    max_change_points : int or None
        Optional cap for the divisive procedure.
    grid : str
        Grid family, ``"halton"`` (default) or ``"torus"``.
    """

    energy: EnergyConfig = field(default_factory=EnergyConfig)
    min_size: int = 2
    n_permutations: int = 199
    sig_level: float = 0.05
    kappa_mode: str = "segment_end"
    seed: int = 0
    max_change_points: int | None = None
    grid: str = "halton"

    def __post_init__(self):
        if self.min_size < self.energy.min_side:
            raise ValueError(
                f"min_size must be >= {self.energy.min_side} for the {self.energy.variant} variant"
            )
        if self.n_permutations < 1:
            raise ValueError("n_permutations must be >= 1")
        if not (0.0 < self.sig_level < 1.0):
            raise ValueError("sig_level must be in (0, 1)")
        if self.kappa_mode not in KAPPA_MODES:
            raise ValueError(f"kappa_mode must be one of {KAPPA_MODES}")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a non-negative 64-bit integer")
        if self.max_change_points is not None and self.max_change_points < 0:
            raise ValueError("max_change_points must be non-negative")
        if self.grid not in ("halton", "torus"):
            raise ValueError("grid must be 'halton' or 'torus'")

    def as_dict(self) -> dict:
        return {
            "alpha": self.energy.alpha,
            "variant": self.energy.variant,
            "min_size": self.min_size,
            "n_permutations": self.n_permutations,
            "sig_level": self.sig_level,
            "kappa_mode": self.kappa_mode,
            "seed": self.seed,
            "max_change_points": self.max_change_points,
            "grid": self.grid,
        }


@dataclass(frozen=True)
class Segment:
    """Half-open index range ``[start, end)`` of the series."""

    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid segment [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class SplitDecision:
    """Outcome of one divisive significance test."""

    segment: Segment
    statistic: SplitStatistic
    p_value: float
    accepted: bool

    @property
    def location(self) -> int:
        return self.segment.start + self.statistic.tau


@dataclass
class ChangePointResult:
    """Estimated change points.

    ``p_values`` and ``statistics`` follow detection order: one entry per
    tested split for the divisive procedure (``tested`` holds the details),
    and for the agglomerative procedure ``statistics`` lists the divergence
    between each pair of neighbouring clusters of the selected clustering.
    """

    change_points: list[int]
    p_values: list[float]
    statistics: list[float]
    config: DetectConfig
    tested: list[SplitDecision] = field(default_factory=list)


@dataclass(frozen=True)
class MergeStep:
    merged: tuple[int, int]
    boundaries: tuple[int, ...]
    score: float


@dataclass
class MergeTrace:
    """Record of an agglomerative run.

    Cluster boundaries are stored as ``(0, b_1, ..., T)``. ``best_step`` is
    the index into ``steps`` of the selected clustering, or ``None`` when the
    initial clustering scored highest.
    """

    initial_boundaries: tuple[int, ...]
    initial_score: float
    steps: list[MergeStep]
    best_step: int | None

    @property
    def scores(self) -> list[float]:
        return [self.initial_score] + [s.score for s in self.steps]

    @property
    def best_boundaries(self) -> tuple[int, ...]:
        if self.best_step is None:
            return self.initial_boundaries
        return self.steps[self.best_step].boundaries

    @property
    def best_score(self) -> float:
        if self.best_step is None:
            return self.initial_score
        return self.steps[self.best_step].score


# ---------------------------------------------------------------------------
# single split
# ---------------------------------------------------------------------------


def _rank_distances(points: np.ndarray, cfg: DetectConfig) -> np.ndarray:
    grid = make_grid(len(points), points.shape[1], cfg.grid)
    ranks = compute_rank_map(points, grid).midranks()
    return power_distances(ranks, ranks, cfg.energy.alpha)


def _argmax_split(dist: np.ndarray, lo: int, hi: int, cfg: DetectConfig) -> SplitStatistic:
    # best tau in [lo, hi]; np.argmax keeps the first (smallest) tau on ties
    N = len(dist)
    e = split_energies(dist, cfg.energy)
    tau = np.arange(N + 1, dtype=float)
    q = (tau * (N - tau) / N * e)[lo : hi + 1]
    k = int(np.argmax(q))
    return SplitStatistic(tau=lo + k, kappa=N, e_value=float(e[lo + k]), q_value=float(q[k]))


def _check_length(n: int, cfg: DetectConfig) -> None:
    if n < 2 * cfg.min_size:
        raise ValueError(f"segment of length {n} is shorter than 2 * min_size = {2 * cfg.min_size}")


def best_split(data, cfg: DetectConfig = DetectConfig()) -> SplitStatistic:
    """Split point of ``data`` maximising the scaled rank energy divergence.

    In ``segment_end`` mode the pooled window is the whole segment and one
    rank map is computed; every ``tau`` in ``[min_size, len - min_size]`` is
    scored and the smallest maximiser is returned. In ``full_sweep`` mode the
    right end ``kappa`` also varies over ``[tau + min_size, len]`` with a
    fresh rank map for each prefix.
    """
    pts = as_points(data)
    L = len(pts)
    _check_length(L, cfg)
    ms = cfg.min_size
    if cfg.kappa_mode == "segment_end":
        return _argmax_split(_rank_distances(pts, cfg), ms, L - ms, cfg)

    best: SplitStatistic | None = None
    for kappa in range(2 * ms, L + 1):
        cand = _argmax_split(_rank_distances(pts[:kappa], cfg), ms, kappa - ms, cfg)
        if best is None or cand.q_value > best.q_value or (
            cand.q_value == best.q_value and cand.tau < best.tau
        ):
            best = cand
    return best


def permutation_p_value(observed: float, permuted) -> float:
    """``(1 + #{permuted >= observed}) / (R + 1)``."""
    permuted = np.asarray(permuted, dtype=float)
    slack = _TIE_RTOL * max(1.0, abs(observed))
    exceed = int(np.count_nonzero(permuted >= observed - slack))
    return (1 + exceed) / (len(permuted) + 1)


def _replicate_rng(cfg: DetectConfig, stream: tuple[int, ...], r: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, *stream, r])


def _permuted_maxima(pts: np.ndarray, cfg: DetectConfig, stream: tuple[int, ...],
                     dist: np.ndarray | None = None) -> np.ndarray:
    L = len(pts)
    ms = cfg.min_size
    out = np.empty(cfg.n_permutations)
    if cfg.kappa_mode == "segment_end":
        # ranks depend only on the pooled point set, so permuting the
        # observations permutes the rank distance matrix
        if dist is None:
            dist = _rank_distances(pts, cfg)
        for r in range(cfg.n_permutations):
            order = _replicate_rng(cfg, stream, r).permutation(L)
            out[r] = _argmax_split(dist[np.ix_(order, order)], ms, L - ms, cfg).q_value
    else:
        for r in range(cfg.n_permutations):
            order = _replicate_rng(cfg, stream, r).permutation(L)
            out[r] = best_split(pts[order], cfg).q_value
    return out


def permutation_test(data, observed: SplitStatistic, cfg: DetectConfig = DetectConfig(),
                     stream: tuple[int, ...] = ()) -> float:
    """Permutation p-value of ``observed`` for the segment ``data``.

    Replicate ``r`` shuffles the segment with a generator seeded from
    ``(cfg.seed, *stream, r)``, recomputes the maximal divergence and counts
    how often it reaches the observed one. Replicates are independent of
    evaluation order.
    """
    pts = as_points(data)
    return permutation_p_value(observed.q_value, _permuted_maxima(pts, cfg, stream))


def _test_segment(series: np.ndarray, seg: Segment, cfg: DetectConfig) -> SplitDecision:
    pts = series[seg.start : seg.end]
    stream = (seg.start, seg.end)
    if cfg.kappa_mode == "segment_end":
        dist = _rank_distances(pts, cfg)
        stat = _argmax_split(dist, cfg.min_size, len(pts) - cfg.min_size, cfg)
        permuted = _permuted_maxima(pts, cfg, stream, dist)
    else:
        stat = best_split(pts, cfg)
        permuted = _permuted_maxima(pts, cfg, stream)
    p = permutation_p_value(stat.q_value, permuted)
    return SplitDecision(seg, stat, p, p <= cfg.sig_level)


# ---------------------------------------------------------------------------
# divisive procedure
# ---------------------------------------------------------------------------


def divisive_detect(series, cfg: DetectConfig = DetectConfig()) -> ChangePointResult:
    """Hierarchical binary segmentation with permutation significance tests.

    Segments are tested in discovery order. A significant split is recorded
    and both halves are queued if they can still hold two ``min_size``
    samples; the run stops when the queue is empty or
    ``cfg.max_change_points`` is reached.
    """
    data = as_points(series)
    T = len(data)
    _check_length(T, cfg)
    queue = deque([Segment(0, T)])
    tested: list[SplitDecision] = []
    found: list[int] = []
    cap = cfg.max_change_points
    while queue and (cap is None or len(found) < cap):
        seg = queue.popleft()
        result = _test_segment(data, seg, cfg)
        tested.append(result)
        logger.debug("segment [%d, %d): tau=%d q=%.6g p=%.4f",
                     seg.start, seg.end, result.location, result.statistic.q_value, result.p_value)
        if not result.accepted:
            continue
        cp = result.location
        found.append(cp)
        for sub in (Segment(seg.start, cp), Segment(cp, seg.end)):
            if len(sub) >= 2 * cfg.min_size:
                queue.append(sub)
    return ChangePointResult(
        change_points=sorted(found),
        p_values=[t.p_value for t in tested],
        statistics=[t.statistic.q_value for t in tested],
        config=cfg,
        tested=tested,
    )


# ---------------------------------------------------------------------------
# agglomerative procedure
# ---------------------------------------------------------------------------


def _as_bounds(clustering) -> tuple[int, ...]:
    segs = [c if isinstance(c, Segment) else Segment(*c) for c in clustering]
    if not segs:
        raise ValueError("empty clustering")
    for left, right in zip(segs, segs[1:]):
        if left.end != right.start:
            raise ValueError(f"clusters [{left.start}, {left.end}) and [{right.start}, {right.end}) are not adjacent")
    return (segs[0].start,) + tuple(s.end for s in segs)


class _PairDivergence:
    """Memoised divergence between adjacent clusters ``[a, b)`` and ``[b, c)``."""

    def __init__(self, data: np.ndarray, cfg: DetectConfig):
        self.data = data
        self.cfg = cfg
        self._cache: dict[tuple[int, int, int], float] = {}

    def __call__(self, a: int, b: int, c: int) -> float:
        key = (a, b, c)
        if key not in self._cache:
            m, n = b - a, c - b
            if min(m, n) < self.cfg.energy.min_side:
                raise ValueError(f"clusters of sizes {m} and {n} are too small for the {self.cfg.energy.variant} variant")
            dist = _rank_distances(self.data[a:c], self.cfg)
            self._cache[key] = float(split_divergences(dist, self.cfg.energy)[m])
        return self._cache[key]

    def score(self, bounds: tuple[int, ...]) -> float:
        # fsum makes the total independent of summation order
        return math.fsum(self(bounds[i], bounds[i + 1], bounds[i + 2]) for i in range(len(bounds) - 2))


def goodness_of_fit(clustering, series, cfg: DetectConfig = DetectConfig()) -> float:
    """Sum of scaled divergences between neighbouring clusters.

    ``clustering`` is a time-ordered list of contiguous clusters given as
    :class:`Segment` objects or ``(start, end)`` pairs. Each term pools just
    the two neighbouring clusters and ranks them jointly.
    """
    data = as_points(series)
    bounds = _as_bounds(clustering)
    if bounds[-1] > len(data):
        raise ValueError("clustering extends past the end of the series")
    return _PairDivergence(data, cfg).score(bounds)


def legal_merges(clustering) -> list[tuple[int, int]]:
    """Index pairs of clusters that may merge: exactly the neighbours."""
    bounds = _as_bounds(clustering)
    return [(i, i + 1) for i in range(len(bounds) - 2)]


def initial_blocks(T: int, block: int) -> tuple[int, ...]:
    """Boundaries of consecutive ``block``-sized clusters; the last absorbs the remainder."""
    if block < 1:
        raise ValueError("block must be >= 1")
    if T < 2 * block:
        raise ValueError(f"series of length {T} needs at least two blocks of {block}")
    n = T // block
    return tuple(i * block for i in range(n)) + (T,)


def agglomerative_detect(series, initial_block: int = 2,
                         cfg: DetectConfig = DetectConfig()) -> tuple[ChangePointResult, MergeTrace]:
    """Greedy merging of adjacent clusters, keeping the best-scoring clustering.

    At each step the neighbouring pair whose merge leaves the largest total
    divergence is merged (leftmost pair on ties). The returned clustering is
    the one with the highest recorded score; ties go to the later step, i.e.
    fewer clusters.
    """
    data = as_points(series)
    if initial_block < cfg.energy.min_side:
        raise ValueError(f"initial_block must be >= {cfg.energy.min_side} for the {cfg.energy.variant} variant")
    bounds = initial_blocks(len(data), initial_block)
    pair = _PairDivergence(data, cfg)

    initial = bounds
    initial_score = pair.score(bounds)
    best_score, best_step = initial_score, None
    steps: list[MergeStep] = []
    while len(bounds) > 2:
        choice: tuple[float, int, tuple[int, ...]] | None = None
        for i in range(len(bounds) - 2):
            candidate = bounds[: i + 1] + bounds[i + 2 :]
            s = pair.score(candidate)
            if choice is None or s > choice[0]:
                choice = (s, i, candidate)
        s, i, bounds = choice
        steps.append(MergeStep((i, i + 1), bounds, s))
        if s >= best_score:
            best_score, best_step = s, len(steps) - 1

    trace = MergeTrace(initial, initial_score, steps, best_step)
    chosen = trace.best_boundaries
    result = ChangePointResult(
        change_points=list(chosen[1:-1]),
        p_values=[],
        statistics=[pair(chosen[i], chosen[i + 1], chosen[i + 2]) for i in range(len(chosen) - 2)],
        config=cfg,
    )
    return result, trace
