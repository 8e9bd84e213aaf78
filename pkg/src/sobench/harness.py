"""Macroreplication runner, post-processing and curve aggregation.

Stream layout for one experiment seed ``s``:

``(s, problem, "start", i)``
    start point of macroreplication ``i``; shared by all algorithms, so
    runs with the same index are paired.
``(s, problem, algorithm, i)``
    root stream handed to the solver (``sim`` / ``algo`` children).
``(s, problem, "post", i)``
    post-processing replications of macroreplication ``i``. Every point
    evaluated for index ``i`` replays this stream from the start, so the
    j-th post-processing replication uses the same random numbers for
    every point and every algorithm (common random numbers).
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algorithms import make_solver
from .core import RngStream, Trajectory, sample_initial
from .problems import get_problem

DEFAULT_MACROREPS = 30
DEFAULT_R_POST = 30
CI_MULTIPLIER = 1.96
N_CHECKPOINTS = 100


def start_point(problem, seed, macrorep, bad_start=False):
    if bad_start:
        if problem.bad_start is None:
            raise ValueError(f"problem {problem.id!r} defines no bad starting solution")
        return np.asarray(problem.bad_start, dtype=float).copy()
    stream = RngStream(seed, problem.id, "start", macrorep)
    return sample_initial(problem.domain, stream.generator())


def run_macroreplication(problem, algorithm, seed, macrorep, budget=None, params=None,
                         bad_start=False, r=None):
    """Run one solver to budget exhaustion; deterministic in its arguments.

    ``problem`` may be an instance or a registry id. A run that stops on a
    numerical failure returns its trajectory up to the last valid
    incumbent with ``failed`` set.
    """
    if isinstance(problem, str):
        problem = get_problem(problem)
    params = dict(params or {})
    if r is not None:
        params["r"] = r
    solver = make_solver(algorithm, **params)
    x0 = start_point(problem, seed, macrorep, bad_start)
    stream = RngStream(seed, problem.id, algorithm, macrorep)
    solver.fit(problem, budget=budget, random_state=stream, x0=x0)
    return solver.trajectory_


def _run_task(task):
    return run_macroreplication(**task)


def run_many(tasks, jobs=1):
    """Run macroreplication tasks (kwargs dicts), in order, optionally in
    worker processes. The result list does not depend on ``jobs``."""
    tasks = list(tasks)
    if jobs is None or jobs <= 1 or len(tasks) <= 1:
        return [_run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def spsa_budget_sweep(problem, checkpoints, seed, macroreps=DEFAULT_MACROREPS, params=None,
                      bad_start=False, r=None, jobs=1):
    """Rerun SPSA once per checkpoint budget and keep the final incumbents.

    Returns ``{macrorep: Trajectory}`` where the records are the final
    incumbents of the runs with budget ``N`` (record ``n`` equals ``N``).
    Macroreplication ``i`` uses the same streams for every ``N``. The
    ``budget`` attribute holds the total replications spent on the sweep.
    """
    if isinstance(problem, str):
        problem = get_problem(problem)
    checkpoints = [int(n) for n in checkpoints]
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    tasks = [
        dict(problem=problem.id, algorithm="spsa", seed=seed, macrorep=i, budget=n,
             params=params, bad_start=bad_start, r=r)
        for i in range(macroreps)
        for n in checkpoints
    ]
    runs = run_many(tasks, jobs)
    out = {}
    for i in range(macroreps):
        sweep = Trajectory(budget=0)
        for k, n in enumerate(checkpoints):
            traj = runs[i * len(checkpoints) + k]
            final = traj.final
            sweep.records.append(type(final)(n, final.point, final.sample_mean))
            sweep.budget += traj.budget
            if traj.failed:
                sweep.failed = True
                sweep.message = traj.message
        out[i] = sweep
    return out


def sweep_cost(checkpoints, macroreps=DEFAULT_MACROREPS):
    return int(macroreps) * int(sum(int(n) for n in checkpoints))


def default_checkpoints(budget, count=N_CHECKPOINTS):
    """``count`` evenly spaced budgets from ``budget/count`` to ``budget``,
    rounded up and deduplicated; always ends at ``budget``."""
    budget = int(budget)
    if budget < 1:
        raise ValueError("budget must be positive")
    grid = sorted({-(-k * budget // count) for k in range(1, count + 1)})
    return [n for n in grid if n >= 1]


# --------------------------------------------------------------------------
# Post-processing
# --------------------------------------------------------------------------


@dataclass
class PerformanceSample:
    """Step function ``Z_i(n)`` of one macroreplication.

    ``values[k]`` holds from ``ns[k]`` up to the next record. Before the
    first record the function takes its first value.
    """

    macrorep: int
    ns: np.ndarray
    values: np.ndarray
    failed: bool = False
    points: list = field(default_factory=list)

    def __call__(self, n):
        n = np.asarray(n)
        idx = np.searchsorted(self.ns, n, side="right") - 1
        return self.values[np.clip(idx, 0, None)]


class PostProcessor:
    """Budget-free objective estimates with common random numbers.

    The estimate of ``x`` for macroreplication ``i`` averages ``r_post``
    replications drawn from a fresh copy of the stream
    ``(seed, problem, "post", i)``; results are cached per point.
    """

    def __init__(self, problem, seed, r_post=DEFAULT_R_POST):
        if r_post < 1:
            raise ValueError("r_post must be positive")
        self.problem = problem
        self.seed = seed
        self.r_post = int(r_post)
        self._cache = {}

    def estimate(self, point, macrorep):
        point = np.asarray(point, dtype=float)
        key = (int(macrorep), point.tobytes())
        if key not in self._cache:
            rng = RngStream(self.seed, self.problem.id, "post", int(macrorep)).generator()
            values = self.problem.replicate(point, rng, self.r_post)
            self._cache[key] = float(np.mean(values))
        return self._cache[key]


def postprocess(trajectories, problem, seed, r_post=DEFAULT_R_POST):
    """Turn trajectories into performance samples.

    ``trajectories`` maps algorithm id to ``{macrorep: Trajectory}`` (or a
    list indexed by macrorep). Returns the same nesting with
    :class:`PerformanceSample` values. Nothing is charged to any budget.
    """
    if isinstance(problem, str):
        problem = get_problem(problem)
    post = PostProcessor(problem, seed, r_post)
    out = {}
    for alg, runs in trajectories.items():
        items = runs.items() if isinstance(runs, dict) else enumerate(runs)
        samples = {}
        for i, traj in items:
            if not traj.records:
                raise ValueError(f"{alg} macrorep {i} has an empty trajectory")
            ns = np.array([rec.n for rec in traj.records], dtype=np.int64)
            vals = np.array([post.estimate(rec.point, i) for rec in traj.records])
            samples[i] = PerformanceSample(i, ns, vals, traj.failed, [rec.point for rec in traj.records])
        out[alg] = samples
    return out


# --------------------------------------------------------------------------
# Aggregation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CurvePoint:
    n: int
    mean: float
    ci_half_width: float
    q25: float
    q50: float
    q75: float
    m: int


def summarize(values):
    """Mean, normal 95% half-width and quartiles of one checkpoint's values.

    Quartiles interpolate linearly between order statistics. A single
    value has half-width 0.
    """
    values = np.asarray(values, dtype=float)
    m = values.size
    if m == 0:
        raise ValueError("no samples to aggregate")
    mean = float(np.mean(values))
    half = CI_MULTIPLIER * float(np.std(values, ddof=1)) / np.sqrt(m) if m > 1 else 0.0
    q25, q50, q75 = (float(q) for q in np.percentile(values, [25, 50, 75], method="linear"))
    return mean, half, q25, q50, q75, m


def aggregate(samples, checkpoints):
    """Mean curve with confidence half-widths and quartiles.

    ``samples`` is an iterable (or dict) of :class:`PerformanceSample`.
    """
    if isinstance(samples, dict):
        samples = [samples[k] for k in sorted(samples)]
    samples = list(samples)
    if not samples:
        raise ValueError("no performance samples")
    curve = []
    for n in checkpoints:
        vals = [float(s(n)) for s in samples]
        mean, half, q25, q50, q75, m = summarize(vals)
        curve.append(CurvePoint(int(n), mean, half, q25, q50, q75, m))
    return curve


def terminal_values(samples, n):
    """Sorted ``Z_i(n)`` values: the empirical distribution at budget ``n``."""
    if isinstance(samples, dict):
        samples = list(samples.values())
    return sorted(float(s(n)) for s in samples)
