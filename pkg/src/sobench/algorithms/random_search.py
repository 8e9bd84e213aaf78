from ..core import sample_initial
from .base import BaseSolver


class RandomSearch(BaseSolver):
    """Evaluate independent draws from the domain's sampling rule.

    The start point is evaluated first; afterwards every candidate comes
    from the same distribution used for random starting solutions.

    Parameters
    ----------
    r : int, optional
        Replications per candidate; defaults to the problem's ``r``.
    """

    def __init__(self, r=None):
        self.r = r

    def _solve(self, evaluator, x0, rng):
        evaluator(x0)
        while True:
            evaluator(sample_initial(evaluator.domain, rng))
