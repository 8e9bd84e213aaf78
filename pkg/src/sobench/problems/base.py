"""Problem base class and the registry used by the harness and CLI."""
from __future__ import annotations

from typing import Optional

import numpy as np

from ..core import MAXIMIZE, MINIMIZE, Domain, as_point

_REGISTRY: dict = {}


class UnknownProblemError(KeyError):
    def __init__(self, problem_id):
        self.problem_id = problem_id
        known = ", ".join(sorted(_REGISTRY))
        super().__init__(f"unknown problem {problem_id!r}; registered problems: {known}")

    def __str__(self):
        return self.args[0]


class Problem:
    """A stochastic simulation oracle over a box domain.

    Subclasses set the class attributes below and implement
    :meth:`replicate`, which returns ``n`` independent observations of the
    objective at ``x`` using only the supplied generator. Observations are
    in the problem's own sense; the evaluator flips minimization problems.

    Attributes
    ----------
    id : str
        Stable lowercase registry name.
    name : str
        Descriptive name.
    dim : int
    sense : {"maximize", "minimize"}
    default_budget : int
        Replications per macroreplication.
    r : int
        Replications per solution evaluation.
    optimal_solution, optimal_value
        Known optimum, or ``None``.
    bad_start
        Deliberately poor starting solution, or ``None``.
    """

    id: str = ""
    name: str = ""
    dim: int = 0
    sense: str = MAXIMIZE
    default_budget: int = 15_000
    r: int = 30
    optimal_solution: Optional[np.ndarray] = None
    optimal_value: Optional[float] = None
    bad_start: Optional[np.ndarray] = None

    def __init__(self):
        self.domain = self._make_domain()

    def _make_domain(self) -> Domain:
        raise NotImplementedError

    def replicate(self, x, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def simulate(self, x, rng: np.random.Generator) -> float:
        """One replication at ``x``."""
        return float(self.replicate(as_point(x, self.dim), rng, 1)[0])

    def expected_value(self, x) -> float:
        """Exact objective value, for problems where it is available."""
        raise NotImplementedError(f"{self.id} has no closed-form objective")

    @property
    def known_optimum(self) -> bool:
        return self.optimal_solution is not None

    def __repr__(self):
        return f"{type(self).__name__}()"


def register_problem(cls):
    """Class decorator adding a problem to the registry under ``cls.id``."""
    if not cls.id or cls.id != cls.id.lower():
        raise ValueError("problem ids must be non-empty lowercase strings")
    if cls.id in _REGISTRY and _REGISTRY[cls.id] is not cls:
        raise ValueError(f"problem id {cls.id!r} already registered")
    if cls.sense not in (MAXIMIZE, MINIMIZE):
        raise ValueError(f"bad sense {cls.sense!r}")
    _REGISTRY[cls.id] = cls
    return cls


def get_problem(problem_id: str, **kwargs) -> Problem:
    """Instantiate a registered problem by id."""
    try:
        cls = _REGISTRY[problem_id]
    except KeyError:
        raise UnknownProblemError(problem_id) from None
    return cls(**kwargs)


def problem_ids() -> list:
    return sorted(_REGISTRY)
