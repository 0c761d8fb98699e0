"""Distribution-free multiple change point detection with rank energy statistics.

Observations are ranked by optimally assigning the pooled sample to a fixed
low-discrepancy grid in the unit cube, and the energy distance between the
ranks before and after a candidate split measures the change.
"""

from .assignment import Assignment, lsap_bruteforce, solve_lsap
from .datagen import SegmentSpec, generate
from .energy import EnergyConfig, SplitStatistic, pairwise_energy, rank_energy, scaled_divergence
from .grid import UnitGrid, halton_grid, make_grid, radical_inverse, torus_grid, unit_grid_1d
from .ranks import RankMap, compute_rank_map, cost_matrix
from .segmentation import (
    ChangePointResult,
    DetectConfig,
    MergeTrace,
    Segment,
    agglomerative_detect,
    best_split,
    divisive_detect,
    goodness_of_fit,
    legal_merges,
    permutation_test,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "ChangePointResult",
    "DetectConfig",
    "EnergyConfig",
    "MergeTrace",
    "RankMap",
    "Segment",
    "SegmentSpec",
    "SplitStatistic",
    "UnitGrid",
    "agglomerative_detect",
    "best_split",
    "compute_rank_map",
    "cost_matrix",
    "divisive_detect",
    "generate",
    "goodness_of_fit",
    "halton_grid",
    "legal_merges",
    "lsap_bruteforce",
    "make_grid",
    "pairwise_energy",
    "permutation_test",
    "radical_inverse",
    "rank_energy",
    "scaled_divergence",
    "solve_lsap",
    "torus_grid",
    "unit_grid_1d",
]
