"""Simultaneous perturbation stochastic approximation."""
import math

import numpy as np

from ..core import NumericalFailure, norm, project_to_domain
from .base import BaseSolver


def rademacher(rng, d):
    return np.where(rng.random(d) < 0.5, -1.0, 1.0)


def spsa_gradient(evaluate, x, c, domain, delta):
    """Two-evaluation gradient estimate of the maximization view.

    ``delta`` is the +/-1 perturbation direction. Both probes are projected
    into ``domain``; the quotient uses the perturbation actually applied.
    """
    if c <= 0:
        raise ValueError("perturbation size must be positive")
    x = np.asarray(x, dtype=float)
    delta = np.asarray(delta, dtype=float)
    plus = project_to_domain(x, x + c * delta, domain)
    minus = project_to_domain(x, x - c * delta, domain)
    y_plus = evaluate(plus).mean
    y_minus = evaluate(minus).mean
    spread = plus - minus
    with np.errstate(divide="ignore", invalid="ignore"):
        grad = np.where(spread != 0, (y_plus - y_minus) / spread, 0.0)
    return grad


def spsa_gains(budget, d, r, noise_std, grad_norm, domain, alpha=0.602, gamma=0.101,
               stability_frac=0.1, first_step_frac=0.05, c_floor_frac=1e-4):
    """Gain sequence constants for a run with ``budget`` replications.

    One evaluation of the start point (``r`` replications) calibrates the
    noise level; every iteration then costs ``2 r``. Returns a dict with
    ``K`` (iterations), ``A``, ``a``, ``c``, ``alpha`` and ``gamma``. The
    step ``a / (A + 1)^alpha * grad_norm`` of the first iteration equals
    ``first_step_frac`` of the domain diameter.
    """
    if budget < 4 * r:
        raise ValueError(f"budget {budget} leaves no room for calibration and one iteration (needs {4 * r})")
    K = (budget - r) // (2 * r)
    A = stability_frac * K
    if domain.bounded:
        min_width, diameter = float(np.min(domain.widths)), domain.diameter
    else:
        min_width, diameter = float(np.min(domain.scale)), float(np.linalg.norm(domain.scale))
    sd = noise_std if np.isfinite(noise_std) else 0.0
    c = max(sd / math.sqrt(r), c_floor_frac * min_width)
    first_step = first_step_frac * diameter * (A + 1.0) ** alpha
    a = first_step / grad_norm if grad_norm > 0 else first_step
    return {"K": int(K), "A": A, "a": a, "c": c, "alpha": alpha, "gamma": gamma}


class SPSA(BaseSolver):
    """Simultaneous perturbation with automatic gain selection.

    The budget is an input to the gain sequence, so a run is tuned to the
    exact number of replications it receives.

    Parameters
    ----------
    r : int, optional
    alpha, gamma : float
        Decay exponents of the step and perturbation sequences.
    stability_frac : float
        ``A`` as a fraction of the iteration count.
    first_step_frac : float
        First step length as a fraction of the domain diameter.
    c_floor_frac : float
        Lower bound on ``c`` as a fraction of the narrowest domain width.
    """

    def __init__(self, r=None, alpha=0.602, gamma=0.101, stability_frac=0.1,
                 first_step_frac=0.05, c_floor_frac=1e-4):
        self.r = r
        self.alpha = alpha
        self.gamma = gamma
        self.stability_frac = stability_frac
        self.first_step_frac = first_step_frac
        self.c_floor_frac = c_floor_frac

    def _reset_diagnostics(self):
        self.gains_ = None
        self.iteration_costs_ = []

    def _solve(self, ev, x0, rng):
        domain, ledger, r = ev.domain, ev.ledger, ev.r
        x = x0
        s0 = ev(x)
        if ledger.limit < 4 * r:
            # Too small to tune: the start point is all we can afford.
            return
        tune = lambda grad_norm: spsa_gains(
            ledger.limit, domain.dim, r, s0.std, grad_norm, domain, self.alpha, self.gamma,
            self.stability_frac, self.first_step_frac, self.c_floor_frac,
        )
        gains = tune(0.0)
        for k in range(gains["K"]):
            before = ledger.consumed
            c_k = gains["c"] / (k + 1) ** gains["gamma"]
            grad = spsa_gradient(ev, x, c_k, domain, rademacher(rng, domain.dim))
            if k == 0:
                # Step size is calibrated on the first gradient estimate.
                gains = tune(norm(grad))
                self.gains_ = gains
            a_k = gains["a"] / (k + 1 + gains["A"]) ** gains["alpha"]
            step = a_k * grad
            if not np.all(np.isfinite(step)):
                raise NumericalFailure(f"non-finite SPSA step at iteration {k}")
            x = project_to_domain(x, x + step, domain)
            self.iteration_costs_.append(ledger.consumed - before)
        if ledger.remaining >= r:
            ev(x)
