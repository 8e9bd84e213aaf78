"""Maximum-likelihood fit of a two-parameter gamma distribution."""
import numpy as np
from scipy.special import digamma, gammaln

from ..core import MAXIMIZE, Domain
from .base import Problem, register_problem


def gamma_log_density(t, shape, scale):
    t = np.asarray(t, dtype=float)
    return (shape - 1.0) * np.log(t) - t / scale - shape * np.log(scale) - gammaln(shape)


@register_problem
class ParameterEstimation(Problem):
    """Average log-likelihood of (shape, scale) on 50 draws from Gamma(2, 5).

    The expected log-likelihood is maximised at the true parameters.
    """

    id = "paramestimation"
    name = "Parameter Estimation: 2D Gamma"
    dim = 2
    sense = MAXIMIZE
    default_budget = 15_000
    true_shape, true_scale = 2.0, 5.0
    n_samples = 50
    optimal_solution = np.array([2.0, 5.0])

    def _make_domain(self):
        return Domain.box([0.1, 0.1], [10.0, 10.0])

    def replicate(self, x, rng, n):
        data = rng.gamma(self.true_shape, self.true_scale, (n, self.n_samples))
        return gamma_log_density(data, x[0], x[1]).mean(axis=1)

    def expected_value(self, x):
        shape, scale = np.asarray(x, dtype=float).ravel()
        mean_log = digamma(self.true_shape) + np.log(self.true_scale)
        mean = self.true_shape * self.true_scale
        return float((shape - 1.0) * mean_log - mean / scale - shape * np.log(scale) - gammaln(shape))


ParameterEstimation.optimal_value = ParameterEstimation().expected_value(ParameterEstimation.optimal_solution)
