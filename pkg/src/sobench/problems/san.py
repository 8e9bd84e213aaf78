"""Stochastic activity network: mean-duration choice against project length."""
import numpy as np

from ..core import MINIMIZE, Domain
from .base import Problem, register_problem

# 1-based (tail, head); every arc points to a higher-numbered node.
SAN_ARCS = (
    (1, 2), (1, 3), (2, 3), (2, 4), (2, 6), (3, 6), (4, 5),
    (4, 7), (5, 6), (5, 8), (6, 9), (7, 8), (8, 9),
)
SAN_NODES = 9


def longest_path(durations, arcs=SAN_ARCS, n_nodes=SAN_NODES):
    """Length of the longest path from node 1 to node ``n_nodes``.

    ``durations[..., j]`` belongs to ``arcs[j]``; leading axes are
    replications. Arcs must be listed so that tails are already final when
    visited, which holds when arcs are sorted by tail node.
    """
    durations = np.asarray(durations, dtype=float)
    finish = np.zeros(durations.shape[:-1] + (n_nodes + 1,))
    for j, (tail, head) in enumerate(arcs):
        finish[..., head] = np.maximum(finish[..., head], finish[..., tail] + durations[..., j])
    return finish[..., n_nodes]


def san_objective(x, uniforms):
    """Project length plus ``sum(1/x)`` for arc durations ``-x ln U``."""
    x = np.asarray(x, dtype=float)
    durations = -x * np.log(uniforms)
    return longest_path(durations) + np.sum(1.0 / x)


@register_problem
class SANDuration(Problem):
    """Pick mean arc durations on a 13-arc network; faster arcs cost ``1/x``."""

    id = "san"
    name = "SAN Duration"
    dim = 13
    sense = MINIMIZE
    default_budget = 60_000

    def _make_domain(self):
        return Domain.box(0.01, 25.0, dim=self.dim)

    def replicate(self, x, rng, n):
        # 1 - U keeps the log argument in (0, 1].
        uniforms = 1.0 - rng.random((n, self.dim))
        return san_objective(x, uniforms)
