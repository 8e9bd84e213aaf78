"""Service-rate selection for a single-server queue."""
import numpy as np

from ..core import MINIMIZE, Domain
from .base import Problem, register_problem


def lindley_waits(services, interarrivals):
    """Waiting times from the Lindley recursion, first customer waiting 0.

    ``services[..., k]`` is the service time of customer ``k`` and
    ``interarrivals[..., k]`` the gap until customer ``k + 1`` arrives.
    Leading axes are treated as independent replications.

    >>> lindley_waits([1.5, 1.5], [1.0, 1.0]).tolist()
    [0.0, 0.5, 1.0]
    """
    services = np.asarray(services, dtype=float)
    interarrivals = np.asarray(interarrivals, dtype=float)
    steps = services - interarrivals
    waits = np.zeros(steps.shape[:-1] + (steps.shape[-1] + 1,))
    for k in range(steps.shape[-1]):
        waits[..., k + 1] = np.maximum(0.0, waits[..., k] + steps[..., k])
    return waits


@register_problem
class QueueGG1(Problem):
    """Choose the service rate ``x``: mean wait of 100 customers plus ``0.5 x``.

    Poisson arrivals at rate 1, exponential service at rate ``x``, starting
    empty.
    """

    id = "queuegg1"
    name = "GI/G/1 Queue"
    dim = 1
    sense = MINIMIZE
    default_budget = 15_000
    n_customers = 100
    rate_cost = 0.5

    def _make_domain(self):
        return Domain.box([0.5], [10.0])

    def replicate(self, x, rng, n):
        rate = x[0]
        gaps = rng.exponential(1.0, (n, self.n_customers - 1))
        services = rng.exponential(1.0 / rate, (n, self.n_customers - 1))
        waits = lindley_waits(services, gaps)
        return waits.mean(axis=1) + self.rate_cost * rate
