"""Single-period newsvendor and economic-order-quantity oracles."""
import math

import numpy as np

from ..core import MAXIMIZE, MINIMIZE, Domain
from .base import Problem, register_problem

DAYS = 100


def newsvendor_profit(x, demand, price=9.0, salvage=1.0, cost=5.0):
    """Profit of ordering ``x`` units when ``demand`` arrives."""
    demand = np.asarray(demand, dtype=float)
    sold = np.minimum(x, demand)
    left = np.maximum(x - demand, 0.0)
    return price * sold + salvage * left - cost * x


@register_problem
class ContinuousNewsvendor(Problem):
    """Order quantity against exponential demand (mean 5).

    Sells at 9, salvages leftovers at 1, buys at 5. The critical fractile
    is 1/2, so the optimal order is the demand median ``5 ln 2``. One
    replication reports the average profit over ``n_days`` independent
    selling periods with the same order quantity.
    """

    id = "ctsnews"
    name = "Continuous Newsvendor"
    dim = 1
    sense = MAXIMIZE
    default_budget = 15_000
    price, salvage, cost, mean_demand = 9.0, 1.0, 5.0, 5.0

    optimal_solution = np.array([5.0 * math.log(2.0)])
    optimal_value = 20.0 * (1.0 - math.log(2.0))

    def __init__(self, n_days=DAYS):
        self.n_days = int(n_days)
        super().__init__()

    def _make_domain(self):
        return Domain.box([0.0], [10.0])

    def replicate(self, x, rng, n):
        demand = rng.exponential(self.mean_demand, (n, self.n_days))
        return newsvendor_profit(x[0], demand, self.price, self.salvage, self.cost).mean(axis=1)

    def expected_value(self, x):
        q = float(np.asarray(x, dtype=float).ravel()[0])
        # E[min(q, D)] for exponential D
        sold = self.mean_demand * (1.0 - math.exp(-q / self.mean_demand))
        return (self.price - self.salvage) * sold + (self.salvage - self.cost) * q


def eoq_cost(x, demand_rate, setup=100.0, holding=1.0):
    """Ordering plus holding cost per unit time for order size ``x``."""
    return setup * np.asarray(demand_rate, dtype=float) / x + holding * x / 2.0


@register_problem
class EconomicOrderQuantity(Problem):
    """Order size under a random demand rate, Gamma(100, 0.1) with mean 10.

    Setup cost 100, holding cost 1. The expected cost ``1000/x + x/2`` is
    steep below the optimum ``sqrt(2000)`` and flat above it.
    """

    id = "eoq"
    name = "Economic-Order-Quantity"
    dim = 1
    sense = MINIMIZE
    default_budget = 15_000
    setup, holding = 100.0, 1.0
    demand_shape, demand_scale = 100.0, 0.1

    optimal_solution = np.array([math.sqrt(2000.0)])
    optimal_value = math.sqrt(2000.0)
    bad_start = np.array([10.0])

    def _make_domain(self):
        return Domain.box([1.0], [200.0])

    def replicate(self, x, rng, n):
        rate = rng.gamma(self.demand_shape, self.demand_scale, n)
        return eoq_cost(x[0], rate, self.setup, self.holding)

    def expected_value(self, x):
        q = float(np.asarray(x, dtype=float).ravel()[0])
        return float(eoq_cost(q, self.demand_shape * self.demand_scale, self.setup, self.holding))
