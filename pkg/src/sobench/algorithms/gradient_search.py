"""Finite-difference gradient ascent with a halving line search and
random restarts."""
import math

import numpy as np

from ..core import norm, project_to_domain, sample_initial
from .base import BaseSolver


def gs_fd_gradient(evaluate, x, h, domain):
    """Central-difference gradient of the maximization view at ``x``.

    Each probe ``x +/- h_j e_j`` is projected into ``domain`` first; the
    difference quotient then uses the distance actually separating the two
    probes. Costs ``2 d`` evaluations.
    """
    x = np.asarray(x, dtype=float)
    h = np.broadcast_to(np.asarray(h, dtype=float), x.shape)
    if np.any(h <= 0):
        raise ValueError("finite-difference half-widths must be positive")
    grad = np.zeros_like(x)
    for j in range(x.size):
        step = np.zeros_like(x)
        step[j] = h[j]
        plus = project_to_domain(x, x + step, domain)
        minus = project_to_domain(x, x - step, domain)
        y_plus = evaluate(plus).mean
        y_minus = evaluate(minus).mean
        spread = plus[j] - minus[j]
        grad[j] = (y_plus - y_minus) / spread if spread > 0 else 0.0
    return grad


def _upper_clamp(width):
    return width / 2.0 if np.isfinite(width) else 1.0


def gs_bandwidths(first_iteration, x1, x_prime, variance, r, grad1, widths, h_min=1e-8):
    """Finite-difference half-widths.

    On the first iteration every coordinate shares
    ``min_i |x1[i] - x'[i]| / 3`` for a second random solution ``x'``.
    Afterwards ``h_j = sqrt(variance) / (sqrt(2 r) |grad1_j|)`` with
    ``variance`` and ``grad1`` taken at the start point, clamped to
    ``[h_min, width_j / 2]``. A zero gradient component gets the upper clamp.
    """
    widths = np.asarray(widths, dtype=float)
    upper = np.array([_upper_clamp(w) for w in widths])
    if first_iteration:
        gap = np.min(np.abs(np.asarray(x1, dtype=float) - np.asarray(x_prime, dtype=float))) / 3.0
        return np.clip(np.full(widths.shape, gap), h_min, upper)
    sd = math.sqrt(variance) if np.isfinite(variance) and variance > 0 else 0.0
    grad1 = np.abs(np.asarray(grad1, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        h = sd / (math.sqrt(2.0 * r) * grad1)
    h = np.where(grad1 > 0, h, upper)
    return np.clip(h, h_min, upper)


def gs_line_search(evaluate, x, stats_x, grad, domain, c_init=2.0, c_min=1e-4):
    """Try ``x + c grad`` for ``c = c_init, c_init/2, ...`` while ``c >= c_min``.

    Returns ``(point, stats, accepted, trials)``; the first candidate with a
    strictly larger sample mean than ``x`` is accepted.
    """
    c = c_init
    trials = 0
    while c >= c_min:
        cand = project_to_domain(x, x + c * grad, domain)
        stats = evaluate(cand)
        trials += 1
        if stats.mean > stats_x.mean:
            return cand, stats, True, trials
        c /= 2.0
    return x, stats_x, False, trials


def gs_restart_check(y_k, y_next, x_k, x_next, grad_k, var_k, tau=1e-4):
    """True when all four stalling conditions hold.

    The ``y`` values are used exactly as passed; :class:`GradientSearch`
    passes them in the minimization view, so a large decrease vetoes a
    restart.
    """
    x_k = np.asarray(x_k, dtype=float)
    x_next = np.asarray(x_next, dtype=float)
    g = norm(grad_k)
    small_gain = y_k - y_next < tau * (1.0 + abs(y_next))
    small_move = norm(x_k - x_next) < math.sqrt(tau) * (1.0 + norm(x_next))
    flat = g < tau ** (1.0 / 3.0) * (1.0 + abs(y_next))
    buried = g < var_k
    return bool(small_gain and small_move and flat and buried)


class GradientSearch(BaseSolver):
    """Gradient search with random restarts.

    Parameters
    ----------
    r : int, optional
    tau : float
        Restart tolerance.
    c_init, c_min : float
        First line-search step multiplier and the smallest one tried.
    h_min : float
        Lower clamp for the finite-difference half-widths.
    """

    def __init__(self, r=None, tau=1e-4, c_init=2.0, c_min=1e-4, h_min=1e-8):
        self.r = r
        self.tau = tau
        self.c_init = c_init
        self.c_min = c_min
        self.h_min = h_min

    def _reset_diagnostics(self):
        self.iterations_ = []
        self.n_restarts_ = 0

    def _solve(self, ev, x0, rng):
        domain, ledger = ev.domain, ev.ledger
        x, sx = x0, ev(x0)
        while True:
            start = ledger.consumed
            x_prime = sample_initial(domain, rng)
            h = gs_bandwidths(True, x, x_prime, sx.variance, ev.r, None, domain.widths, self.h_min)
            grad = gs_fd_gradient(ev, x, h, domain)
            h = gs_bandwidths(False, x, x_prime, sx.variance, ev.r, grad, domain.widths, self.h_min)
            while True:
                x_new, s_new, accepted, trials = gs_line_search(
                    ev, x, sx, grad, domain, self.c_init, self.c_min
                )
                restart = not accepted or gs_restart_check(
                    -sx.mean, -s_new.mean, x, x_new, grad, sx.variance, self.tau
                )
                self.iterations_.append(
                    {
                        "cost": ledger.consumed - start,
                        "rejections": trials - int(accepted),
                        "accepted": accepted,
                        "restart": restart,
                    }
                )
                if restart:
                    self.n_restarts_ += 1
                    x = sample_initial(domain, rng)
                    sx = ev(x)
                    break
                x, sx = x_new, s_new
                start = ledger.consumed
                grad = gs_fd_gradient(ev, x, h, domain)
