"""Input validation helpers shared by the solvers and the harness."""
import numbers

import numpy as np

from .core import RngStream, as_point


def check_problem(problem):
    """Accept a problem instance or a registry id."""
    from .problems import Problem, get_problem

    if isinstance(problem, str):
        return get_problem(problem)
    if not isinstance(problem, Problem):
        raise TypeError(f"expected a Problem or a problem id, got {type(problem).__name__}")
    return problem


def check_budget(budget, problem, r):
    """Resolve the replication budget; it must cover one evaluation."""
    if budget is None:
        budget = problem.default_budget
    if not isinstance(budget, numbers.Integral) or isinstance(budget, bool):
        raise TypeError(f"budget must be an integer number of replications, got {budget!r}")
    budget = int(budget)
    if budget < r:
        raise ValueError(f"budget {budget} is smaller than one evaluation (r={r})")
    return budget


def check_random_state(random_state):
    """Turn ``None``, an int seed or an :class:`RngStream` into a stream."""
    if isinstance(random_state, RngStream):
        return random_state
    if random_state is None:
        return RngStream(int(np.random.SeedSequence().entropy % (2**63)))
    if isinstance(random_state, numbers.Integral) and not isinstance(random_state, bool):
        return RngStream(int(random_state))
    raise TypeError(f"random_state must be None, an int or an RngStream, got {random_state!r}")


def check_point(x, domain):
    """A finite point of the right dimension lying in ``domain``."""
    x = as_point(x, domain.dim)
    if not domain.contains(x):
        raise ValueError(f"point {x.tolist()} lies outside the domain")
    return x


def check_replications(r, problem):
    r = problem.r if r is None else r
    if not isinstance(r, numbers.Integral) or isinstance(r, bool) or r < 1:
        raise ValueError(f"r must be a positive integer, got {r!r}")
    return int(r)
