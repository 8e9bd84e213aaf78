import math

import numpy as np
import pytest

from sobench.core import Trajectory, TrajectoryRecord
from sobench.harness import (
    PerformanceSample,
    PostProcessor,
    aggregate,
    default_checkpoints,
    postprocess,
    run_macroreplication,
    run_many,
    spsa_budget_sweep,
    start_point,
    summarize,
    sweep_cost,
    terminal_values,
)
from sobench.problems import get_problem


def traj(records, budget=300, failed=False):
    return Trajectory([TrajectoryRecord(n, np.asarray(p, dtype=float), v) for n, p, v in records],
                      budget=budget, failed=failed)


def step(ns, values, i=0):
    return PerformanceSample(i, np.asarray(ns), np.asarray(values, dtype=float))


# Runs -----------------------------------------------------------------


def test_same_seed_path_same_trajectory():
    a = run_macroreplication("eoq", "gs", seed=1, macrorep=2, budget=1_500)
    b = run_macroreplication("eoq", "gs", seed=1, macrorep=2, budget=1_500)
    assert [(r.n, r.point.tolist(), r.sample_mean) for r in a.records] == \
           [(r.n, r.point.tolist(), r.sample_mean) for r in b.records]


def test_random_search_terminal_budget():
    t = run_macroreplication("eoq", "rs", seed=0, macrorep=0, budget=300)
    assert t.budget == 300
    assert t.records[0].n == 30


def test_start_points_are_shared_across_algorithms():
    p = get_problem("multimodal")
    a = run_macroreplication(p, "rs", seed=3, macrorep=4, budget=300)
    b = run_macroreplication(p, "nm", seed=3, macrorep=4, budget=300)
    np.testing.assert_array_equal(a.records[0].point, b.records[0].point)
    np.testing.assert_array_equal(a.records[0].point, start_point(p, 3, 4))


def test_bad_start_fixes_initial_point():
    t = run_macroreplication("eoq", "nm", seed=0, macrorep=0, budget=300, bad_start=True)
    assert t.records[0].point.tolist() == [10.0]
    with pytest.raises(ValueError):
        start_point(get_problem("san"), 0, 0, bad_start=True)


def test_parallel_equals_serial():
    tasks = [dict(problem="eoq", algorithm=a, seed=5, macrorep=i, budget=600)
             for a in ("rs", "spsa") for i in range(3)]
    serial = run_many(tasks, jobs=1)
    parallel = run_many(tasks, jobs=2)
    for s, p in zip(serial, parallel):
        assert [(r.n, r.point.tolist(), r.sample_mean) for r in s.records] == \
               [(r.n, r.point.tolist(), r.sample_mean) for r in p.records]


# SPSA sweep -----------------------------------------------------------


def test_single_point_sweep_matches_direct_run():
    sweep = spsa_budget_sweep("eoq", [300], seed=2, macroreps=3)
    for i in range(3):
        direct = run_macroreplication("eoq", "spsa", seed=2, macrorep=i, budget=300).final
        rec = sweep[i].records[0]
        assert rec.n == 300
        np.testing.assert_array_equal(rec.point, direct.point)
        assert rec.sample_mean == direct.sample_mean


def test_sweep_cost_and_checkpoint_validation():
    assert sweep_cost([150, 300], 30) == 30 * 450
    with pytest.raises(ValueError):
        spsa_budget_sweep("eoq", [300, 300], seed=0, macroreps=1)


def test_default_checkpoints():
    grid = default_checkpoints(15_000)
    assert grid == list(range(150, 15_001, 150))
    assert default_checkpoints(50) == list(range(1, 51))
    assert default_checkpoints(12_345)[-1] == 12_345


# Post-processing ------------------------------------------------------


def test_crn_shared_point_identical_estimates():
    p = get_problem("eoq")
    shared = [40.0]
    trajs = {
        "a": {0: traj([(30, [20.0], 0.0), (90, shared, 0.0)])},
        "b": {0: traj([(30, shared, 0.0)])},
    }
    ps = postprocess(trajs, p, seed=9)
    assert ps["a"][0].values[1] == ps["b"][0].values[0]


def test_single_record_is_constant_and_precedes_first_record():
    ps = postprocess({"a": {0: traj([(60, [40.0], 0.0)])}}, "eoq", seed=0)
    s = ps["a"][0]
    assert s(1) == s(60) == s(10_000)


def test_failed_flag_propagates():
    ps = postprocess({"a": {0: traj([(30, [40.0], 0.0)], failed=True)}}, "eoq", seed=0)
    assert ps["a"][0].failed


def test_postprocessing_charges_nothing():
    t = run_macroreplication("eoq", "rs", seed=0, macrorep=0, budget=300)
    before = [(r.n, r.sample_mean) for r in t.records]
    postprocess({"rs": {0: t}}, "eoq", seed=0)
    assert [(r.n, r.sample_mean) for r in t.records] == before
    assert t.budget == 300


def test_postprocessed_optimum_within_clt_band():
    p = get_problem("eoq")
    post = PostProcessor(p, seed=0)
    x = p.optimal_solution
    sd = p.replicate(x, np.random.default_rng(0), 100_000).std(ddof=1)
    band = 3 * sd / math.sqrt(post.r_post)
    inside = np.mean([abs(post.estimate(x, i) - p.optimal_value) <= band for i in range(500)])
    assert inside >= 0.99


# Aggregation ----------------------------------------------------------


def test_summarize_m2_half_width():
    mean, half, q25, q50, q75, m = summarize([3.0, 5.0])
    assert (mean, m) == (4.0, 2)
    assert half == pytest.approx(1.96, abs=1e-12)


def test_summarize_identical_samples():
    mean, half, q25, q50, q75, m = summarize([2.5] * 4)
    assert half == 0.0
    assert q25 == q50 == q75 == mean == 2.5


def test_summarize_even_median():
    assert summarize([1.0, 2.0, 3.0, 4.0])[3] == 2.5


def test_aggregate_step_functions():
    samples = [step([30, 90], [1.0, 3.0], 0), step([60], [2.0], 1)]
    curve = aggregate(samples, [30, 60, 90])
    assert [c.mean for c in curve] == [1.5, 1.5, 2.5]
    assert all(c.m == 2 for c in curve)


def test_terminal_values_sorted():
    samples = {0: step([30], [5.0]), 1: step([30], [1.0]), 2: step([30], [3.0])}
    assert terminal_values(samples, 300) == [1.0, 3.0, 5.0]
