"""Analytic test surfaces observed with additive Gaussian noise."""
import numpy as np
from scipy.optimize import minimize

from ..core import MAXIMIZE, MINIMIZE, Domain
from .base import Problem, register_problem

_CENTRES = np.array([(2 * i + 1, 2 * j + 1) for i in range(5) for j in range(5)], dtype=float)
_HEIGHTS = np.array([1.0 + 0.1 * (5 * i + j) for i in range(5) for j in range(5)])
_WIDTH = 0.4


def multimodal_surface(x):
    """Sum of 25 Gaussian bumps on a 5x5 grid; the tallest (3.4) sits at (9, 9)."""
    x = np.asarray(x, dtype=float)
    sq = np.sum((x[..., None, :] - _CENTRES) ** 2, axis=-1)
    return np.sum(_HEIGHTS * np.exp(-sq / (2.0 * _WIDTH**2)), axis=-1)


def _multimodal_argmax():
    res = minimize(lambda z: -multimodal_surface(z), x0=[9.0, 9.0], method="BFGS", options={"gtol": 1e-12})
    return res.x, float(multimodal_surface(res.x))


@register_problem
class MultiModal(Problem):
    """Two-dimensional surface with 25 separated local maxima."""

    id = "multimodal"
    name = "A Multimodal Function"
    dim = 2
    sense = MAXIMIZE
    default_budget = 15_000
    optimal_solution, optimal_value = _multimodal_argmax()

    def __init__(self, noise_std=0.3):
        self.noise_std = float(noise_std)
        super().__init__()

    def _make_domain(self):
        return Domain.box([0.0, 0.0], [10.0, 10.0])

    def replicate(self, x, rng, n):
        noise = rng.normal(0.0, 1.0, n) * self.noise_std
        return multimodal_surface(x) + noise

    def expected_value(self, x):
        return float(multimodal_surface(x))

    def __repr__(self):
        return f"MultiModal(noise_std={self.noise_std})"


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (tail - head**2) ** 2 + (1.0 - head) ** 2, axis=-1)


@register_problem
class Rosenbrock(Problem):
    """40-dimensional Rosenbrock valley with N(0, 5^2) observation noise."""

    id = "rosenbrock"
    name = "Rosenbrock's Function"
    dim = 40
    sense = MINIMIZE
    default_budget = 120_000
    optimal_solution = np.ones(40)
    optimal_value = 0.0

    def __init__(self, noise_std=5.0):
        self.noise_std = float(noise_std)
        super().__init__()

    def _make_domain(self):
        return Domain.box(-2.0, 2.0, dim=self.dim)

    def replicate(self, x, rng, n):
        return rosenbrock(x) + rng.normal(0.0, 1.0, n) * self.noise_std

    def expected_value(self, x):
        return float(rosenbrock(x))

    def __repr__(self):
        return f"Rosenbrock(noise_std={self.noise_std})"
