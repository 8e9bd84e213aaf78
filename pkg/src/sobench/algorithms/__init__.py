"""Solvers and the algorithm registry."""
from .base import BaseSolver
from .gradient_search import (
    GradientSearch,
    gs_bandwidths,
    gs_fd_gradient,
    gs_line_search,
    gs_restart_check,
)
from .nelder_mead import NelderMead, Simplex, nm_initial_simplex, nm_iterate
from .random_search import RandomSearch
from .spsa import SPSA, spsa_gains, spsa_gradient
from .strong import STRONG, STRONG1, StrongState, dogleg_step, significant_improvement, strong_iterate

ALGORITHMS = {
    "rs": RandomSearch,
    "gs": GradientSearch,
    "spsa": SPSA,
    "strong": STRONG,
    "strong1": STRONG1,
    "nm": NelderMead,
}


class UnknownAlgorithmError(KeyError):
    def __init__(self, algorithm_id):
        super().__init__(
            f"unknown algorithm {algorithm_id!r}; valid algorithms: {', '.join(ALGORITHMS)}"
        )

    def __str__(self):
        return self.args[0]


def make_solver(algorithm_id, **params):
    """Build a solver by registry id, applying parameter overrides."""
    try:
        cls = ALGORITHMS[algorithm_id]
    except KeyError:
        raise UnknownAlgorithmError(algorithm_id) from None
    return cls().set_params(**params) if params else cls()


__all__ = [
    "ALGORITHMS",
    "BaseSolver",
    "GradientSearch",
    "NelderMead",
    "RandomSearch",
    "SPSA",
    "STRONG",
    "STRONG1",
    "Simplex",
    "StrongState",
    "UnknownAlgorithmError",
    "dogleg_step",
    "gs_bandwidths",
    "gs_fd_gradient",
    "gs_line_search",
    "gs_restart_check",
    "make_solver",
    "nm_initial_simplex",
    "nm_iterate",
    "significant_improvement",
    "spsa_gains",
    "spsa_gradient",
    "strong_iterate",
]
