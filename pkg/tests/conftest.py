import numpy as np
import pytest

from sobench.core import MAXIMIZE, Domain
from sobench.problems import Problem


class FunctionProblem(Problem):
    """Oracle ``f(x) + noise_std * N(0, 1)`` over a box, for tests."""

    def __init__(self, func, lower, upper, sense=MAXIMIZE, noise_std=0.0, r=30,
                 default_budget=15_000, id="fn"):
        self.func = func
        self.lower = np.atleast_1d(np.asarray(lower, dtype=float))
        self.upper = np.atleast_1d(np.asarray(upper, dtype=float))
        self.dim = self.lower.size
        self.sense = sense
        self.noise_std = noise_std
        self.r = r
        self.default_budget = default_budget
        self.id = id
        super().__init__()

    def _make_domain(self):
        return Domain(self.lower, self.upper)

    def replicate(self, x, rng, n):
        noise = rng.normal(0.0, 1.0, n) * self.noise_std
        return self.func(np.asarray(x, dtype=float)) + noise

    def expected_value(self, x):
        return float(self.func(np.asarray(x, dtype=float)))


class CountingProblem(Problem):
    """Wraps a problem and counts every observation drawn from it."""

    def __init__(self, inner):
        self.inner = inner
        self.id = inner.id
        self.dim = inner.dim
        self.sense = inner.sense
        self.r = inner.r
        self.default_budget = inner.default_budget
        self.bad_start = inner.bad_start
        self.draws = 0
        super().__init__()

    def _make_domain(self):
        return self.inner.domain

    def replicate(self, x, rng, n):
        self.draws += n
        return self.inner.replicate(x, rng, n)


@pytest.fixture
def quadratic():
    """Noiseless ``-(x - 0.3)^2`` on [0, 1]^2, maximized at (0.3, 0.3)."""
    return FunctionProblem(lambda x: -np.sum((x - 0.3) ** 2), [0, 0], [1, 1])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Acceptance verdicts, printed once at the end of the session.
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
