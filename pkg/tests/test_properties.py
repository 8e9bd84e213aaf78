import itertools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from sobench.algorithms import gs_fd_gradient, make_solver, spsa_gradient
from sobench.core import Domain, SampleStats, project_to_domain
from sobench.harness import default_checkpoints, summarize
from sobench.problems.san import san_objective

from conftest import FunctionProblem

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
unit = st.floats(0.0, 1.0)


@st.composite
def box_and_points(draw, max_dim=5):
    d = draw(st.integers(1, max_dim))
    lower = np.array(draw(st.lists(st.floats(-50, 50), min_size=d, max_size=d)))
    widths = np.array(draw(st.lists(st.floats(0.1, 50), min_size=d, max_size=d)))
    domain = Domain(lower, lower + widths)
    frac = np.array(draw(st.lists(unit, min_size=d, max_size=d)))
    prev = lower + frac * widths
    proposed = np.array(draw(st.lists(finite, min_size=d, max_size=d)))
    return domain, prev, proposed


@settings(max_examples=300, deadline=None)
@given(box_and_points())
def test_projection_feasible_and_idempotent(case):
    domain, prev, proposed = case
    once = project_to_domain(prev, proposed, domain)
    assert domain.contains(once, atol=1e-9)
    np.testing.assert_array_equal(project_to_domain(prev, once, domain), once)
    if domain.contains(proposed):
        np.testing.assert_array_equal(once, proposed)


@settings(max_examples=200, deadline=None)
@given(st.lists(finite, min_size=2, max_size=50))
def test_sample_stats_variance_nonnegative(values):
    s = SampleStats.from_samples(values)
    assert s.variance >= 0
    assert s.count == len(values)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=40))
def test_summary_orderings(values):
    mean, half, q25, q50, q75, m = summarize(values)
    assert q25 <= q50 <= q75
    assert half >= 0
    assert min(values) <= q25 and q75 <= max(values)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**7))
def test_checkpoint_grid(budget):
    grid = default_checkpoints(budget)
    assert grid[-1] == budget
    assert len(grid) == min(budget, 100)
    assert all(a < b for a, b in zip(grid, grid[1:]))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_spsa_unbiased_on_affine(d, seed):
    gen = np.random.default_rng(seed)
    w, b = gen.normal(size=d), gen.normal()
    x = gen.uniform(-1, 1, d)
    box = Domain.box(-10, 10, dim=d)
    f = lambda z: SampleStats(float(w @ z + b), 0.0, 30)
    total = np.zeros(d)
    for delta in itertools.product((-1.0, 1.0), repeat=d):
        total += spsa_gradient(f, x, 0.1, box, np.array(delta))
    np.testing.assert_allclose(total / 2**d, w, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_fd_exact_on_quadratics(d, seed):
    gen = np.random.default_rng(seed)
    A = gen.normal(size=(d, d))
    Q = A @ A.T
    w = gen.normal(size=d)
    x = gen.uniform(-1, 1, d)
    h = gen.uniform(0.01, 0.5, d)
    box = Domain.box(-10, 10, dim=d)
    f = lambda z: SampleStats(float(z @ Q @ z + w @ z), 0.0, 30)
    np.testing.assert_allclose(gs_fd_gradient(f, x, h, box), 2 * Q @ x + w, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), unit)
def test_san_convex_along_segments(seed, t):
    gen = np.random.default_rng(seed)
    u = 1.0 - gen.random(13)
    a, b = gen.uniform(0.01, 25, 13), gen.uniform(0.01, 25, 13)
    mid = t * a + (1 - t) * b
    lhs = san_objective(mid, u)
    rhs = t * san_objective(a, u) + (1 - t) * san_objective(b, u)
    assert lhs <= rhs + 1e-9 * (1 + abs(rhs))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["rs", "gs", "spsa", "strong", "strong1", "nm"]),
       st.integers(0, 1000), st.integers(4, 40))
def test_incumbent_monotone_and_budget_respected(alg, seed, evals):
    p = FunctionProblem(lambda x: -np.sum((x - 0.2) ** 2), [0, 0], [1, 1], noise_std=0.5)
    budget = 30 * evals + seed % 30
    s = make_solver(alg).fit(p, budget=budget, random_state=seed)
    means = [rec.sample_mean for rec in s.trajectory_.records]
    assert all(a < b for a, b in zip(means, means[1:]))
    assert s.budget_used_ <= budget
    for rec in s.trajectory_.records:
        assert p.domain.contains(rec.point)
    if alg == "nm":
        assert s.simplex_ is None or len(s.simplex_) == 3
    if alg in ("strong", "strong1"):
        st_ = s.settings_
        assert all(st_.delta_min <= r <= st_.delta_max for r in s.radii_)
