"""Two-facility placement in the unit square."""
import numpy as np

from ..core import MINIMIZE, Domain
from .base import Problem, register_problem


def mean_nearest_distance(x, demand):
    """Average distance from each demand point to the closer facility.

    ``x`` packs the facilities as ``(a1, a2, b1, b2)``; ``demand`` has shape
    ``(..., k, 2)``.
    """
    x = np.asarray(x, dtype=float)
    demand = np.asarray(demand, dtype=float)
    da = np.hypot(demand[..., 0] - x[0], demand[..., 1] - x[1])
    db = np.hypot(demand[..., 0] - x[2], demand[..., 1] - x[3])
    return np.minimum(da, db).mean(axis=-1)


@register_problem
class FacilityLocation(Problem):
    id = "facilitylocation"
    name = "Facility Location"
    dim = 4
    sense = MINIMIZE
    default_budget = 15_000
    n_demand = 30

    def _make_domain(self):
        return Domain.box(0.0, 1.0, dim=self.dim)

    def replicate(self, x, rng, n):
        demand = rng.random((n, self.n_demand, 2))
        return mean_nearest_distance(x, demand)
