import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_best_tau_1d, contiguous_clusterings, naive_gof_1d, naive_q_1d
from rankcp.datagen import cauchy_shift_example, generate, mean_shift_specs
from rankcp.energy import EnergyConfig, scaled_divergence
from rankcp.segmentation import (
    DetectConfig,
    Segment,
    agglomerative_detect,
    best_split,
    divisive_detect,
    goodness_of_fit,
    initial_blocks,
    legal_merges,
    permutation_p_value,
    permutation_test,
)

STEP = np.array([0.0, 0, 0, 0, 10, 10, 10, 10])


def shift_series(seed, lengths=(100, 100), shifts=(0.0, 5.0), d=2):
    return generate(mean_shift_specs(lengths, shifts, d=d), seed=seed)


# -- configuration ----------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError, match="min_size"):
        DetectConfig(min_size=1)
    DetectConfig(energy=EnergyConfig(variant="vstat"), min_size=1)
    with pytest.raises(ValueError):
        DetectConfig(n_permutations=0)
    with pytest.raises(ValueError):
        DetectConfig(sig_level=1.0)
    with pytest.raises(ValueError):
        DetectConfig(kappa_mode="both")
    with pytest.raises(ValueError):
        DetectConfig(seed=-1)
    with pytest.raises(ValueError):
        DetectConfig(grid="sobol")


def test_segment():
    assert len(Segment(3, 10)) == 7
    with pytest.raises(ValueError):
        Segment(5, 5)


# -- best_split -------------------------------------------------------------


def test_best_split_step_series_matches_bruteforce():
    tau, qs = brute_best_tau_1d(STEP)
    assert tau == 4
    stat = best_split(STEP)
    assert stat.tau == 4 and stat.kappa == 8
    assert stat.q_value == pytest.approx(qs[4], abs=1e-12)
    assert stat.q_value == pytest.approx(scaled_divergence(4, 4, stat.e_value), abs=1e-15)


def test_best_split_random_1d_matches_bruteforce():
    rng = np.random.default_rng(2)
    for ms in (2, 3):
        x = rng.standard_normal(17)
        tau, qs = brute_best_tau_1d(x, min_size=ms)
        stat = best_split(x, DetectConfig(min_size=ms))
        assert stat.tau == tau
        assert stat.q_value == pytest.approx(qs[tau], abs=1e-12)


def test_best_split_constant_series():
    stat = best_split(np.full((12, 2), 3.0), DetectConfig(min_size=3))
    assert stat.q_value == 0.0 and stat.e_value == 0.0
    assert stat.tau == 3


def test_best_split_too_short():
    with pytest.raises(ValueError, match="shorter"):
        best_split(np.arange(5.0), DetectConfig(min_size=3))


def test_full_sweep_matches_bruteforce():
    rng = np.random.default_rng(6)
    x = np.concatenate([rng.standard_normal(6), rng.standard_normal(5) + 2])
    best = None
    for kappa in range(4, len(x) + 1):
        for tau in range(2, kappa - 1):
            q = naive_q_1d(x[:kappa], tau)
            if best is None or q > best[2] + 1e-12:
                best = (tau, kappa, q)
    stat = best_split(x, DetectConfig(kappa_mode="full_sweep"))
    assert (stat.tau, stat.kappa) == best[:2]
    assert stat.q_value == pytest.approx(best[2], abs=1e-12)


def test_best_split_cauchy_example_runs():
    x = generate(cauchy_shift_example(), seed=0)
    stat = best_split(x)
    assert 2 <= stat.tau <= 398 and stat.kappa == 400


# -- permutation test -------------------------------------------------------


@pytest.mark.parametrize("count, expected", [(0, 1 / 200), (199, 1.0), (9, 0.05)])
def test_p_value_formula(count, expected):
    permuted = np.r_[np.full(count, 5.0), np.zeros(199 - count)]
    assert permutation_p_value(1.0, permuted) == pytest.approx(expected)


def test_permutation_shortcut_matches_recomputation():
    # permuting the rank distance matrix must equal re-ranking permuted data
    x = shift_series(3, (15, 15), (0, 1))
    cfg = DetectConfig(n_permutations=25, seed=9)
    observed = best_split(x, cfg)
    p = permutation_test(x, observed, cfg, stream=(0, 30))
    maxima = []
    for r in range(cfg.n_permutations):
        order = np.random.default_rng([cfg.seed, 0, 30, r]).permutation(len(x))
        maxima.append(best_split(x[order], cfg).q_value)
    assert p == permutation_p_value(observed.q_value, maxima)


def test_permutation_test_constant_data_is_one():
    x = np.ones((20, 1))
    cfg = DetectConfig(n_permutations=19)
    assert permutation_test(x, best_split(x, cfg), cfg) == 1.0


def test_permutation_full_sweep_runs():
    x = shift_series(1, (6, 6), (0, 4), d=1)
    cfg = DetectConfig(kappa_mode="full_sweep", n_permutations=9)
    p = permutation_test(x, best_split(x, cfg), cfg)
    assert p in {(1 + c) / 10 for c in range(10)}


# -- divisive ---------------------------------------------------------------


def test_divisive_single_shift():
    res = divisive_detect(shift_series(0), DetectConfig(seed=0))
    assert len(res.change_points) == 1
    assert 90 <= res.change_points[0] <= 110
    assert res.p_values[0] == pytest.approx(0.005)
    assert res.tested[0].accepted and res.tested[0].segment == Segment(0, 200)
    assert len(res.p_values) == len(res.statistics) == len(res.tested)


def test_divisive_two_shifts():
    x = shift_series(4, (70, 70, 70), (0, 4, 0))
    res = divisive_detect(x, DetectConfig(seed=4))
    assert len(res.change_points) >= 2
    for truth in (70, 140):
        assert min(abs(c - truth) for c in res.change_points) <= 10


def test_divisive_step_series():
    assert divisive_detect(STEP).change_points == [4]


def test_divisive_constant_series():
    res = divisive_detect(np.full((30, 2), 1.5))
    assert res.change_points == [] and res.p_values == [1.0]


def test_divisive_cap():
    x = shift_series(4, (40, 40, 40, 40), (0, 5, 0, 5))
    assert len(divisive_detect(x, DetectConfig(max_change_points=1)).change_points) == 1
    assert divisive_detect(x, DetectConfig(max_change_points=0)).change_points == []


def test_divisive_too_short():
    with pytest.raises(ValueError):
        divisive_detect(np.arange(3.0))


def test_divisive_deterministic():
    x = shift_series(8, (50, 50, 50), (0, 2, 4))
    cfg = DetectConfig(seed=123, min_size=5)
    a, b = divisive_detect(x, cfg), divisive_detect(x, cfg)
    assert a.change_points == b.change_points
    assert a.p_values == b.p_values and a.statistics == b.statistics


@settings(max_examples=12, deadline=None)
@given(seed=st.integers(0, 10_000), ms=st.integers(2, 6), T=st.integers(12, 80))
def test_divisive_invariants(seed, ms, T):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((T, 2)) + (np.arange(T) > T // 2)[:, None] * 3
    cfg = DetectConfig(min_size=ms, n_permutations=39, seed=seed)
    res = divisive_detect(x, cfg)
    cps = res.change_points
    assert cps == sorted(set(cps))
    assert all(ms <= c <= T - ms for c in cps)
    assert all(b - a >= ms for a, b in zip(cps, cps[1:]))
    lattice = {(1 + c) / 40 for c in range(40)}
    assert all(p in lattice for p in res.p_values)


# -- agglomerative ----------------------------------------------------------


def test_legal_merges():
    assert legal_merges([(0, 3), (3, 6), (6, 9)]) == [(0, 1), (1, 2)]
    assert legal_merges([(0, 9)]) == []
    assert legal_merges([Segment(0, 4), Segment(4, 9)]) == [(0, 1)]
    with pytest.raises(ValueError, match="adjacent"):
        legal_merges([(0, 3), (4, 9)])


def test_goodness_of_fit_single_pair():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(11)
    assert goodness_of_fit([(0, 5), (5, 11)], x) == pytest.approx(naive_q_1d(x, 5), abs=1e-12)
    assert goodness_of_fit([(0, 11)], x) == 0.0


def test_goodness_of_fit_step_series():
    two = goodness_of_fit([(0, 4), (4, 8)], STEP)
    three = goodness_of_fit([(0, 2), (2, 6), (6, 8)], STEP)
    assert two == pytest.approx(naive_gof_1d(STEP, (0, 4, 8)), abs=1e-12)
    assert three == pytest.approx(naive_gof_1d(STEP, (0, 2, 6, 8)), abs=1e-12)
    assert two > three


def test_goodness_of_fit_constant_and_errors():
    assert goodness_of_fit([(0, 3), (3, 6), (6, 10)], np.ones(10)) == 0.0
    with pytest.raises(ValueError, match="adjacent"):
        goodness_of_fit([(0, 3), (5, 10)], np.ones(10))
    with pytest.raises(ValueError, match="too small"):
        goodness_of_fit([(0, 1), (1, 10)], np.arange(10.0))


def test_initial_blocks():
    assert initial_blocks(9, 2) == (0, 2, 4, 6, 9)
    assert initial_blocks(8, 4) == (0, 4, 8)
    with pytest.raises(ValueError):
        initial_blocks(7, 4)


def test_agglomerative_step_series():
    best = max(contiguous_clusterings((0, 2, 4, 6, 8)), key=lambda b: naive_gof_1d(STEP, b))
    assert best == (0, 4, 8)
    res, trace = agglomerative_detect(STEP, 2)
    assert res.change_points == [4]
    assert trace.best_score == pytest.approx(naive_gof_1d(STEP, best), abs=1e-12)


def test_agglomerative_constant_series():
    res, trace = agglomerative_detect(np.full(12, 2.0), 3)
    assert res.change_points == []
    assert trace.scores == [0.0] * 4
    assert trace.best_step == len(trace.steps) - 1


def test_agglomerative_shift_on_block_boundary():
    res, trace = agglomerative_detect(shift_series(0), 10)
    assert res.change_points == [100]
    assert len(trace.steps) == 19


def test_agglomerative_block_too_large():
    with pytest.raises(ValueError):
        agglomerative_detect(np.arange(10.0), 6)
    with pytest.raises(ValueError):
        agglomerative_detect(np.arange(10.0), 1)


def test_agglomerative_greedy_choice():
    # each step merges the pair leaving the largest score, leftmost on ties
    rng = np.random.default_rng(31)
    x = rng.standard_normal((30, 2))
    _, trace = agglomerative_detect(x, 3)
    bounds = trace.initial_boundaries
    for step in trace.steps:
        options = [bounds[: i + 1] + bounds[i + 2 :] for i in range(len(bounds) - 2)]
        scores = [goodness_of_fit(list(zip(o, o[1:])), x) for o in options]
        i = int(np.argmax(scores))
        assert step.merged == (i, i + 1)
        assert step.boundaries == options[i]
        assert step.score == pytest.approx(scores[i], abs=1e-12)
        bounds = step.boundaries


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), T=st.integers(8, 120), block=st.integers(2, 6), d=st.integers(1, 3))
def test_merge_trace_invariants(seed, T, block, d):
    if T < 2 * block:
        block = T // 2
    x = np.random.default_rng(seed).standard_normal((T, d))
    res, trace = agglomerative_detect(x, block)
    n0 = len(trace.initial_boundaries) - 1
    assert len(trace.steps) == n0 - 1
    sizes = [n0]
    for step in trace.steps:
        b = step.boundaries
        assert b[0] == 0 and b[-1] == T and all(u < v for u, v in zip(b, b[1:]))
        sizes.append(len(b) - 1)
    assert all(a - b == 1 for a, b in zip(sizes, sizes[1:]))
    assert trace.best_score == max(trace.scores)
    assert res.change_points == list(trace.best_boundaries[1:-1])
