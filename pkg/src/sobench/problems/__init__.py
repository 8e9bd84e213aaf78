"""Testbed of stochastic simulation problems and their registry.

Importing this package registers the built-in problems. New problems
subclass :class:`Problem` and are added with :func:`register_problem`.
"""
from .base import Problem, UnknownProblemError, get_problem, problem_ids, register_problem
from .estimation import ParameterEstimation
from .facility import FacilityLocation
from .functions import MultiModal, Rosenbrock
from .inventory import ContinuousNewsvendor, EconomicOrderQuantity
from .queueing import QueueGG1
from .san import SANDuration

__all__ = [
    "Problem",
    "UnknownProblemError",
    "get_problem",
    "problem_ids",
    "register_problem",
    "ContinuousNewsvendor",
    "EconomicOrderQuantity",
    "QueueGG1",
    "MultiModal",
    "ParameterEstimation",
    "Rosenbrock",
    "SANDuration",
    "FacilityLocation",
]
