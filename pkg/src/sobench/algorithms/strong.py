"""Stochastic trust-region response-surface method (STRONG) and its
first-stage-only variant.

Everything in this module works in the minimization view ``F = -y``: the
evaluator's maximization-view means are negated on the way in.
"""
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import stats as st

from ..core import SampleStats, project_to_domain
from .base import BaseSolver
from .gradient_search import gs_fd_gradient


def dogleg_step(grad, hessian, radius):
    """Approximate minimizer of ``g.s + s.H.s / 2`` over ``||s|| <= radius``."""
    grad = np.asarray(grad, dtype=float)
    gnorm = np.linalg.norm(grad)
    if gnorm == 0.0:
        return np.zeros_like(grad)
    to_boundary = -radius * grad / gnorm
    curvature = grad @ hessian @ grad
    if curvature <= 0:
        return to_boundary
    cauchy = -(grad @ grad) / curvature * grad
    try:
        np.linalg.cholesky(hessian)
        newton = -np.linalg.solve(hessian, grad)
    except np.linalg.LinAlgError:
        newton = None
    if newton is not None and np.linalg.norm(newton) <= radius:
        return newton
    if np.linalg.norm(cauchy) >= radius or newton is None:
        return to_boundary
    # ||cauchy + t (newton - cauchy)|| = radius for t in [0, 1]
    d = newton - cauchy
    a, b, c = d @ d, 2.0 * cauchy @ d, cauchy @ cauchy - radius**2
    t = (-b + np.sqrt(b * b - 4.0 * a * c)) / (2.0 * a)
    return cauchy + t * d


def model_decrease(grad, hessian, step):
    """Predicted reduction ``r(x) - r(x + step)`` of the quadratic model."""
    return -(grad @ step + 0.5 * step @ hessian @ step)


def significant_improvement(center, candidate, level=0.05):
    """One-sided Welch test that ``candidate`` has a smaller mean than ``center``.

    Both arguments are minimization-view :class:`SampleStats`. With no
    usable variance estimate the test reduces to comparing means.
    """
    diff = center.mean - candidate.mean
    if center.count < 2 or candidate.count < 2:
        return diff > 0
    if center.variance == 0 and candidate.variance == 0:
        return diff > 0
    res = st.ttest_ind_from_stats(
        center.mean, center.std, center.count,
        candidate.mean, candidate.std, candidate.count,
        equal_var=False, alternative="greater",
    )
    return bool(res.pvalue < level)


def bfgs_update(hessian, s, y, curvature_tol=1e-10, first=False):
    """BFGS update of a Hessian approximation; skipped if ``s.y`` is too small.

    With ``first`` set, the starting matrix is first rescaled to
    ``(y.y / s.y) I`` so its magnitude matches the observed curvature.
    """
    sy = s @ y
    if sy <= curvature_tol:
        return hessian, False
    if first:
        hessian = (y @ y) / sy * np.eye(s.size)
    hs = hessian @ s
    updated = hessian + np.outer(y, y) / sy - np.outer(hs, hs) / (s @ hs)
    return 0.5 * (updated + updated.T), True


@dataclass(frozen=True)
class StrongSettings:
    delta0: float
    delta_min: float
    delta_max: float
    delta_switch: float
    eta0: float = 0.01
    eta1: float = 0.3
    gamma1: float = 0.5
    gamma2: float = 2.0
    level: float = 0.05
    stage_two: bool = True
    stage_one_curvature: float = 0.0
    h_min: float = 1e-8
    curvature_tol: float = 1e-10


@dataclass(frozen=True)
class StrongState:
    center: np.ndarray
    center_stats: SampleStats  # minimization view
    radius: float
    hessian: np.ndarray  # BFGS memory, used in stage II only
    stage: int = 1
    prev_center: Optional[np.ndarray] = None
    prev_grad: Optional[np.ndarray] = None
    bfgs_updates: int = 0
    iteration: int = 0
    last: dict = field(default_factory=dict)


def _min_view(stats):
    return stats.negated()


def strong_iterate(state, evaluate, domain, settings):
    """One trust-region iteration; returns the next state.

    Builds a model at the center from a central-difference gradient. Stage I
    models are first order (curvature ``settings.stage_one_curvature``,
    zero by default, times the identity); stage II uses the BFGS matrix.
    Takes a dogleg step inside the radius and accepts the candidate when
    both the ratio test and the significance test pass. The radius grows
    after an accepted step with ratio at least ``eta1``, shrinks when the
    ratio falls below ``eta0`` and is kept otherwise.
    """
    x = state.center
    half = np.minimum(state.radius / 2.0, np.where(np.isfinite(domain.widths), domain.widths / 2.0, np.inf))
    half = np.maximum(half, settings.h_min)
    grad = -gs_fd_gradient(evaluate, x, half, domain)

    hessian, updates = state.hessian, state.bfgs_updates
    if settings.stage_two and state.prev_grad is not None:
        hessian, done = bfgs_update(hessian, x - state.prev_center, grad - state.prev_grad,
                                    settings.curvature_tol, first=updates == 0)
        updates += int(done)
    if state.stage == 2:
        model_h = hessian
    else:
        model_h = settings.stage_one_curvature * np.eye(x.size)

    step = dogleg_step(grad, model_h, state.radius)
    cand = project_to_domain(x, x + step, domain)
    step = cand - x
    predicted = model_decrease(grad, model_h, step)
    cand_stats = _min_view(evaluate(cand))

    if predicted <= 0:
        rho, accepted = -np.inf, False
    else:
        rho = (state.center_stats.mean - cand_stats.mean) / predicted
        accepted = rho >= settings.eta0 and significant_improvement(
            state.center_stats, cand_stats, settings.level
        )

    if accepted and rho >= settings.eta1:
        radius = min(state.radius * settings.gamma2, settings.delta_max)
    elif rho >= settings.eta0:
        # Accepted with a mediocre ratio, or a good prediction whose gain is
        # not yet statistically significant.
        radius = state.radius
    else:
        radius = max(state.radius * settings.gamma1, settings.delta_min)
    stage = 2 if settings.stage_two and radius <= settings.delta_switch else 1

    common = dict(radius=radius, stage=stage, hessian=hessian, bfgs_updates=updates,
                  iteration=state.iteration + 1,
                  last={"rho": rho, "accepted": accepted, "predicted": predicted,
                        "candidate": cand, "gradient": grad})
    if accepted:
        return replace(state, center=cand, center_stats=cand_stats,
                       prev_center=x, prev_grad=grad, **common)
    # Center unchanged: the next gradient is at the same point, so no curvature pair.
    return replace(state, prev_center=None, prev_grad=None, **common)


class STRONG(BaseSolver):
    """Trust-region search with local response-surface models.

    Parameters
    ----------
    r : int, optional
    stage_two : bool
        Switch to BFGS second-order models once the radius falls to
        ``delta0 / 4``. ``False`` keeps first-stage models throughout.
    eta0, eta1 : float
        Ratio thresholds for acceptance and for radius growth.
    gamma1, gamma2 : float
        Radius shrink and growth factors.
    delta0_frac, delta_min_frac : float
        Initial and minimum radius as fractions of the domain diameter.
    level : float
        Size of the one-sided Welch test.
    stage_one_curvature : float
        Diagonal curvature of stage I models; 0 gives linear models whose
        step runs to the trust-region boundary.
    """

    def __init__(self, r=None, stage_two=True, eta0=0.01, eta1=0.3, gamma1=0.5, gamma2=2.0,
                 delta0_frac=0.1, delta_min_frac=1e-6, level=0.05, stage_one_curvature=0.0):
        self.r = r
        self.stage_two = stage_two
        self.eta0 = eta0
        self.eta1 = eta1
        self.gamma1 = gamma1
        self.gamma2 = gamma2
        self.delta0_frac = delta0_frac
        self.delta_min_frac = delta_min_frac
        self.level = level
        self.stage_one_curvature = stage_one_curvature

    def settings_for(self, domain):
        diameter = domain.diameter if domain.bounded else float(np.linalg.norm(domain.scale)) * 10.0
        delta0 = self.delta0_frac * diameter
        return StrongSettings(
            delta0=delta0,
            delta_min=self.delta_min_frac * diameter,
            delta_max=diameter,
            delta_switch=delta0 / 4.0,
            eta0=self.eta0, eta1=self.eta1, gamma1=self.gamma1, gamma2=self.gamma2,
            level=self.level, stage_two=bool(self.stage_two),
            stage_one_curvature=float(self.stage_one_curvature),
        )

    def _reset_diagnostics(self):
        self.radii_ = []
        self.stages_ = []
        self.state_ = None

    def _solve(self, ev, x0, rng):
        settings = self.settings_for(ev.domain)
        self.settings_ = settings
        state = StrongState(center=x0, center_stats=_min_view(ev(x0)), radius=settings.delta0,
                            hessian=np.eye(x0.size))
        self.radii_.append(state.radius)
        self.stages_.append(state.stage)
        while True:
            state = strong_iterate(state, ev, ev.domain, settings)
            self.state_ = state
            self.radii_.append(state.radius)
            self.stages_.append(state.stage)


class STRONG1(STRONG):
    """STRONG restricted to first-stage models."""

    def __init__(self, r=None, stage_two=False, eta0=0.01, eta1=0.3, gamma1=0.5, gamma2=2.0,
                 delta0_frac=0.1, delta_min_frac=1e-6, level=0.05, stage_one_curvature=0.0):
        super().__init__(r=r, stage_two=stage_two, eta0=eta0, eta1=eta1, gamma1=gamma1,
                         gamma2=gamma2, delta0_frac=delta0_frac, delta_min_frac=delta_min_frac,
                         level=level, stage_one_curvature=stage_one_curvature)
