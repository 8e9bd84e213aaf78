"""Finite-time benchmarking of simulation-optimization algorithms."""
from .core import (
    BudgetExhausted,
    BudgetLedger,
    Domain,
    Evaluator,
    NumericalFailure,
    RngStream,
    SampleStats,
    Trajectory,
    estimate_objective,
    project_to_domain,
    sample_initial,
)

__version__ = "0.1.0"
