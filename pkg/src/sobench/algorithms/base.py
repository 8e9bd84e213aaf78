"""Estimator-style base class for the solvers."""
import numpy as np
from sklearn.base import BaseEstimator

from ..core import (
    BudgetExhausted,
    BudgetLedger,
    Evaluator,
    NumericalFailure,
    sample_initial,
)
from ..validation import (
    check_budget,
    check_point,
    check_problem,
    check_random_state,
    check_replications,
)


class BaseSolver(BaseEstimator):
    """Common ``fit`` logic: budget, streams, start point, failure handling.

    Subclasses implement ``_solve(evaluator, x0, rng)``, drawing every
    observation through ``evaluator`` and any algorithmic randomness from
    ``rng``. ``_solve`` normally ends by raising :class:`BudgetExhausted`.

    After ``fit`` the solver exposes

    ``trajectory_``
        :class:`~sobench.core.Trajectory` of incumbent changes.
    ``best_point_``, ``best_value_``
        Final incumbent and its sample mean (problem's sense).
    ``budget_used_``
        Replications charged, never above the budget.
    ``failed_``
        True if the run stopped on a numerical failure.
    """

    def fit(self, problem, budget=None, random_state=None, x0=None):
        """Run the solver on ``problem`` until the budget is spent.

        Parameters
        ----------
        problem : Problem or str
        budget : int, optional
            Replications; defaults to the problem's budget.
        random_state : int or RngStream, optional
            Root stream. Observations use ``random_state.child("sim")``,
            algorithm decisions ``child("algo")`` and, when ``x0`` is not
            given, the start point ``child("start")``.
        x0 : array-like, optional
            Starting solution.
        """
        problem = check_problem(problem)
        r = check_replications(getattr(self, "r", None), problem)
        budget = check_budget(budget, problem, r)
        stream = check_random_state(random_state)
        if x0 is None:
            x0 = sample_initial(problem.domain, stream.child("start").generator())
        x0 = check_point(x0, problem.domain)

        ledger = BudgetLedger(budget)
        evaluator = Evaluator(problem, ledger, stream.child("sim").generator(), r=r)
        self._reset_diagnostics()
        failed, message = False, ""
        try:
            self._solve(evaluator, x0, stream.child("algo").generator())
        except BudgetExhausted:
            pass
        except (NumericalFailure, FloatingPointError, np.linalg.LinAlgError) as exc:
            failed, message = True, f"{type(exc).__name__}: {exc}"

        traj = evaluator.trajectory
        traj.failed, traj.message = failed, message
        self.trajectory_ = traj
        self.ledger_ = ledger
        self.budget_used_ = ledger.consumed
        self.failed_ = failed
        self.n_points_evaluated_ = evaluator.n_points
        if traj.records:
            self.best_point_ = traj.final.point
            self.best_value_ = traj.final.sample_mean
        else:
            self.best_point_, self.best_value_ = x0, np.nan
        return self

    def _reset_diagnostics(self):
        pass

    def _solve(self, evaluator, x0, rng):
        raise NotImplementedError
