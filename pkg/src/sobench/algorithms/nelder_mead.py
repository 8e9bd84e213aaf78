"""Nelder-Mead simplex search adapted to noisy observations.

Uses a gentle 0.9 shrink and re-samples the best vertex after every
shrink, so a lucky early estimate cannot anchor the simplex forever.
"""
import itertools
from dataclasses import dataclass

import numpy as np

from ..core import SampleStats, project_to_domain
from .base import BaseSolver


@dataclass(frozen=True)
class Vertex:
    point: np.ndarray
    stats: SampleStats  # maximization view
    seq: int  # insertion order; lower is older


class Simplex:
    """``d + 1`` evaluated vertices kept ordered best first.

    Ties in sample mean rank the older vertex first.
    """

    def __init__(self, vertices):
        self.vertices = sorted(vertices, key=lambda v: (-v.stats.mean, v.seq))

    def __len__(self):
        return len(self.vertices)

    @property
    def best(self):
        return self.vertices[0]

    @property
    def worst(self):
        return self.vertices[-1]

    @property
    def points(self):
        return np.array([v.point for v in self.vertices])

    def diameter(self):
        pts = self.points
        return max(np.linalg.norm(a - b) for a, b in itertools.combinations(pts, 2))


def nm_initial_points(x1, domain, step_frac=0.05):
    """Start point plus one axis step per coordinate.

    Steps are ``step_frac`` of each coordinate's width (1 when unbounded);
    a step that would leave the domain is taken in the other direction.
    """
    x1 = np.asarray(x1, dtype=float)
    widths = domain.widths
    points = [x1.copy()]
    for j in range(x1.size):
        delta = step_frac * widths[j] if np.isfinite(widths[j]) else 1.0
        if x1[j] + delta > domain.upper[j]:
            delta = -delta
        target = x1.copy()
        target[j] += delta
        points.append(project_to_domain(x1, target, domain))
    return points


def nm_initial_simplex(x1, evaluate, domain, counter, step_frac=0.05):
    """Evaluate the starting vertices and return the ordered simplex."""
    return Simplex([Vertex(p, evaluate(p), next(counter)) for p in nm_initial_points(x1, domain, step_frac)])


def nm_iterate(simplex, evaluate, domain, counter, reflect=1.0, expand=2.0, contract=0.5, shrink=0.9):
    """One reflect / expand / contract / shrink move.

    Returns ``(simplex, move, n_evaluated)``. Trial points are projected
    onto the domain along the line from the centroid of the retained
    vertices.
    """
    worst = simplex.worst
    others = simplex.vertices[:-1]
    centroid = np.mean([v.point for v in others], axis=0)
    z = worst.point

    def trial(coef, toward):
        return project_to_domain(centroid, centroid + coef * (toward - centroid), domain)

    z_ref = trial(-reflect, z)
    s_ref = evaluate(z_ref)
    n_eval = 1
    best_mean = simplex.best.stats.mean

    if s_ref.mean > best_mean:
        z_exp = trial(-expand, z)
        s_exp = evaluate(z_exp)
        n_eval += 1
        if s_exp.mean > s_ref.mean:
            new = Vertex(z_exp, s_exp, next(counter))
            move = "expand"
        else:
            new = Vertex(z_ref, s_ref, next(counter))
            move = "reflect"
        return Simplex(others + [new]), move, n_eval

    worst_of_others = min(v.stats.mean for v in others)
    if s_ref.mean >= worst_of_others:
        return Simplex(others + [Vertex(z_ref, s_ref, next(counter))]), "reflect", n_eval

    # Reflection worse than every retained vertex: contract.
    if s_ref.mean > worst.stats.mean:
        z_con = trial(contract, z_ref)
    else:
        z_con = trial(contract, z)
    s_con = evaluate(z_con)
    n_eval += 1
    if s_con.mean >= worst_of_others:
        return Simplex(others + [Vertex(z_con, s_con, next(counter))]), "contract", n_eval

    best = simplex.best
    shrunk = []
    for v in simplex.vertices[1:]:
        p = best.point + shrink * (v.point - best.point)
        shrunk.append(Vertex(p, evaluate(p), next(counter)))
        n_eval += 1
    # Fresh replications for the best vertex; it keeps its age.
    refreshed = Vertex(best.point, evaluate(best.point), best.seq)
    n_eval += 1
    return Simplex([refreshed] + shrunk), "shrink", n_eval


class NelderMead(BaseSolver):
    """Nelder-Mead with shrink-and-resample for noisy objectives.

    Parameters
    ----------
    r : int, optional
    reflect, expand, contract, shrink : float
        Move coefficients.
    init_step_frac : float
        Initial simplex edge as a fraction of each coordinate's width.
    """

    def __init__(self, r=None, reflect=1.0, expand=2.0, contract=0.5, shrink=0.9, init_step_frac=0.05):
        self.r = r
        self.reflect = reflect
        self.expand = expand
        self.contract = contract
        self.shrink = shrink
        self.init_step_frac = init_step_frac

    def _reset_diagnostics(self):
        self.moves_ = []
        self.simplex_ = None

    def _solve(self, ev, x0, rng):
        counter = itertools.count()
        ledger = ev.ledger
        self.simplex_ = nm_initial_simplex(x0, ev, ev.domain, counter, self.init_step_frac)
        while True:
            before = ledger.consumed
            self.simplex_, move, n_eval = nm_iterate(
                self.simplex_, ev, ev.domain, counter,
                self.reflect, self.expand, self.contract, self.shrink,
            )
            self.moves_.append({"move": move, "evaluated": n_eval, "cost": ledger.consumed - before})
