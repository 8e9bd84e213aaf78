"""Shared building blocks: domains, random streams, sample statistics,
budget accounting, boundary projection and the evaluation context that
every solver draws observations through.

Solvers work on a maximization view of the objective. Minimization
problems are negated once, inside :class:`Evaluator`, so no solver needs
to branch on the problem's sense.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

MAXIMIZE = "maximize"
MINIMIZE = "minimize"

SAMPLING_RULES = ("uniform", "exponential", "laplace")


class BudgetExhausted(Exception):
    """Raised when an algorithm asks for observations it cannot pay for."""


class NumericalFailure(Exception):
    """Raised when an iterate or estimate becomes non-finite."""


# --------------------------------------------------------------------------
# Domain
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box, possibly unbounded, plus the rule used to draw
    starting solutions from it.

    Parameters
    ----------
    lower, upper : sequence of float
        Coordinate bounds. ``-inf``/``inf`` mark unbounded coordinates.
    sampling : {"uniform", "exponential", "laplace"}, optional
        Rule for random starting points. Defaults to ``"uniform"`` when
        every coordinate is bounded and ``"exponential"`` otherwise.
    scale : sequence of float, optional
        Per-coordinate scale for the exponential/laplace rules (default 1).
    """

    lower: np.ndarray
    upper: np.ndarray
    sampling: str = ""
    scale: Optional[np.ndarray] = None

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.shape != upper.shape:
            raise ValueError("lower and upper bounds differ in length")
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise ValueError("bounds must not be NaN")
        if not np.all(lower < upper):
            raise ValueError("every lower bound must be strictly below its upper bound")
        bounded = bool(np.all(np.isfinite(lower)) and np.all(np.isfinite(upper)))
        sampling = self.sampling or ("uniform" if bounded else "exponential")
        if sampling not in SAMPLING_RULES:
            raise ValueError(f"unknown sampling rule {sampling!r}")
        if bounded and sampling != "uniform":
            raise ValueError("bounded domains use the uniform sampling rule")
        if not bounded and sampling == "uniform":
            raise ValueError("unbounded domains need the exponential or laplace rule")
        if self.scale is None:
            scale = np.ones_like(lower)
        else:
            scale = np.broadcast_to(np.asarray(self.scale, dtype=float), lower.shape).copy()
            if np.any(scale <= 0):
                raise ValueError("sampling scales must be positive")
        for arr in (lower, upper, scale):
            arr.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "sampling", sampling)
        object.__setattr__(self, "scale", scale)

    @classmethod
    def box(cls, lower, upper, dim=None):
        """Bounded box; scalar bounds are broadcast to ``dim`` coordinates."""
        if dim is not None:
            lower = np.full(dim, lower, dtype=float)
            upper = np.full(dim, upper, dtype=float)
        return cls(lower, upper)

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower)) and np.all(np.isfinite(self.upper)))

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    @property
    def diameter(self) -> float:
        """Euclidean length of the box diagonal (inf when unbounded)."""
        return float(np.linalg.norm(self.widths))

    def contains(self, x, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - atol) and np.all(x <= self.upper + atol))

    def __eq__(self, other):
        if not isinstance(other, Domain):
            return NotImplemented
        return (
            np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
            and self.sampling == other.sampling
            and np.array_equal(self.scale, other.scale)
        )

    __hash__ = None


# --------------------------------------------------------------------------
# Random streams
# --------------------------------------------------------------------------


def _tag_to_int(tag) -> int:
    if isinstance(tag, (bool, np.bool_)):
        raise TypeError("boolean stream tags are ambiguous")
    if isinstance(tag, (int, np.integer)):
        if tag < 0:
            raise ValueError("integer stream tags must be non-negative")
        return int(tag)
    if isinstance(tag, str):
        # Stable across interpreter runs, unlike hash().
        digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    raise TypeError(f"stream tags must be str or int, got {type(tag).__name__}")


@dataclass(frozen=True)
class RngStream:
    """A named random stream addressed by a hierarchical path.

    The path usually reads ``(seed, problem, algorithm, macrorep, purpose)``.
    Each call to :meth:`generator` returns a fresh generator whose output is
    a pure function of the path, so streams can be replayed and distinct
    paths give independent sequences (via ``numpy.random.SeedSequence``
    spawn keys).

    Examples
    --------
    >>> root = RngStream(7, "eoq", "rs", 0)
    >>> a = root.child("sim").generator().random()
    >>> b = RngStream(7, "eoq", "rs", 0, "sim").generator().random()
    >>> a == b
    True
    """

    path: tuple

    def __init__(self, *path):
        if not path:
            raise ValueError("a stream path needs at least a seed")
        if not isinstance(path[0], (int, np.integer)) or isinstance(path[0], bool):
            raise TypeError("the first path element must be an integer seed")
        for tag in path:
            _tag_to_int(tag)
        object.__setattr__(self, "path", tuple(path))

    def child(self, *tags) -> "RngStream":
        return RngStream(*self.path, *tags)

    def seed_sequence(self) -> np.random.SeedSequence:
        entropy = _tag_to_int(self.path[0])
        key = tuple(_tag_to_int(t) for t in self.path[1:])
        return np.random.SeedSequence(entropy, spawn_key=key)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.seed_sequence()))


# --------------------------------------------------------------------------
# Statistics and budget
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SampleStats:
    """Sample mean, unbiased variance and count of a batch of observations.

    ``variance`` is NaN for a single observation.
    """

    mean: float
    variance: float
    count: int

    @classmethod
    def from_samples(cls, values) -> "SampleStats":
        values = np.asarray(values, dtype=float).ravel()
        n = values.size
        if n == 0:
            raise ValueError("no observations")
        mean = float(values.mean())
        var = float(values.var(ddof=1)) if n > 1 else math.nan
        return cls(mean, var, n)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance) if self.count > 1 else math.nan

    def negated(self) -> "SampleStats":
        return SampleStats(-self.mean, self.variance, self.count)


class BudgetLedger:
    """Monotone count of simulation replications consumed against a limit."""

    def __init__(self, limit: int):
        limit = int(limit)
        if limit < 1:
            raise ValueError("budget limit must be a positive number of replications")
        self.limit = limit
        self._consumed = 0

    @property
    def consumed(self) -> int:
        return self._consumed

    @property
    def remaining(self) -> int:
        return self.limit - self._consumed

    @property
    def exhausted(self) -> bool:
        return self._consumed >= self.limit

    def charge(self, n: int) -> None:
        n = int(n)
        if n < 0:
            raise ValueError("cannot refund replications")
        if n > self.remaining:
            raise BudgetExhausted(f"charge of {n} exceeds remaining budget {self.remaining}")
        self._consumed += n

    def __repr__(self):
        return f"BudgetLedger(consumed={self._consumed}, limit={self.limit})"


# --------------------------------------------------------------------------
# Sampling and projection
# --------------------------------------------------------------------------


def sample_initial(domain: Domain, rng: np.random.Generator) -> np.ndarray:
    """Draw a random solution from ``domain`` using its sampling rule.

    Bounded boxes are sampled uniformly. Unbounded coordinates are offset
    from their finite bound by an exponential draw (or are Laplace around
    zero when both bounds are infinite); the result is clipped into the
    domain so half-bounded Laplace draws stay feasible.
    """
    d = domain.dim
    if domain.sampling == "uniform":
        return domain.lower + rng.random(d) * domain.widths
    lower, upper, scale = domain.lower, domain.upper, domain.scale
    x = np.empty(d)
    for j in range(d):
        lo, hi = lower[j], upper[j]
        if np.isfinite(lo) and np.isfinite(hi):
            x[j] = lo + rng.random() * (hi - lo)
        elif domain.sampling == "exponential":
            step = rng.exponential(scale[j])
            if np.isfinite(lo):
                x[j] = lo + step
            elif np.isfinite(hi):
                x[j] = hi - step
            else:
                x[j] = step if rng.random() < 0.5 else -step
        else:
            centre = lo if np.isfinite(lo) else (hi if np.isfinite(hi) else 0.0)
            x[j] = rng.laplace(centre, scale[j])
    return np.clip(x, lower, upper)


def project_to_domain(prev, proposed, domain: Domain) -> np.ndarray:
    """Move an infeasible proposal back onto the boundary of ``domain``.

    The result is ``prev + t * (proposed - prev)`` with ``t`` the largest
    value in ``[0, 1]`` that keeps the point inside the box; feasible
    proposals are returned unchanged.

    >>> dom = Domain.box([0.0, 0.0], [1.0, 1.0])
    >>> project_to_domain([0.5, 0.5], [1.5, 2.5], dom).tolist()
    [0.75, 1.0]
    """
    prev = np.asarray(prev, dtype=float)
    proposed = np.asarray(proposed, dtype=float)
    if prev.shape != (domain.dim,) or proposed.shape != (domain.dim,):
        raise ValueError("point dimension does not match the domain")
    if not domain.contains(prev):
        raise ValueError("the reference point must lie inside the domain")
    if not np.all(np.isfinite(proposed)):
        raise NumericalFailure("proposed point is not finite")
    if domain.contains(proposed):
        return proposed.copy()
    step = proposed - prev
    t = 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        over = proposed > domain.upper
        under = proposed < domain.lower
        if np.any(over):
            t = min(t, float(np.min((domain.upper[over] - prev[over]) / step[over])))
        if np.any(under):
            t = min(t, float(np.min((domain.lower[under] - prev[under]) / step[under])))
    t = max(t, 0.0)
    out = prev + t * step
    # Rounding can leave the crossing coordinate a hair outside the box.
    return np.clip(out, domain.lower, domain.upper)


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------


def estimate_objective(problem, x, r: int, rng: np.random.Generator, ledger: BudgetLedger) -> SampleStats:
    """Take up to ``r`` replications of ``problem`` at ``x``.

    Draws ``min(r, ledger.remaining)`` observations, charges each one to the
    ledger and returns their statistics in the problem's own sense. Raises
    :class:`BudgetExhausted` if nothing is left to spend.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    n = min(int(r), ledger.remaining)
    if n <= 0:
        raise BudgetExhausted("no replications left")
    ledger.charge(n)
    values = np.asarray(problem.replicate(np.asarray(x, dtype=float), rng, n), dtype=float)
    if values.shape != (n,):
        raise RuntimeError(f"{problem!r} returned {values.shape} observations, expected ({n},)")
    if not np.all(np.isfinite(values)):
        raise NumericalFailure("oracle returned a non-finite observation")
    return SampleStats.from_samples(values)


@dataclass(frozen=True)
class TrajectoryRecord:
    n: int
    point: np.ndarray
    sample_mean: float


@dataclass
class Trajectory:
    """Incumbent changes of one macroreplication.

    ``records`` hold the ledger reading when each incumbent was found, the
    incumbent point, and its sample mean in the problem's own sense.
    ``budget`` is the terminal replication count.
    """

    records: list = field(default_factory=list)
    budget: int = 0
    failed: bool = False
    message: str = ""

    @property
    def final(self) -> TrajectoryRecord:
        if not self.records:
            raise ValueError("empty trajectory")
        return self.records[-1]

    def __len__(self):
        return len(self.records)


@dataclass(frozen=True)
class Incumbent:
    point: np.ndarray
    stats: SampleStats
    n_at_discovery: int


class Evaluator:
    """Evaluation context for one macroreplication.

    Wraps a problem, a ledger and the simulation stream. Calling it with a
    point takes ``r`` replications and returns statistics in the
    maximization view. Every fully evaluated point is an incumbent
    candidate; the incumbent only changes on a strictly better sample mean,
    so ties keep the earlier point.
    """

    def __init__(self, problem, ledger: BudgetLedger, rng: np.random.Generator, r: Optional[int] = None):
        self.problem = problem
        self.domain = problem.domain
        self.ledger = ledger
        self.rng = rng
        self.r = int(r if r is not None else problem.r)
        if self.r < 1:
            raise ValueError("r must be at least 1")
        self.sign = 1.0 if problem.sense == MAXIMIZE else -1.0
        self.incumbent: Optional[Incumbent] = None
        self.trajectory = Trajectory(budget=ledger.limit)
        self.n_points = 0

    def __call__(self, x) -> SampleStats:
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise NumericalFailure("iterate is not finite")
        stats = estimate_objective(self.problem, x, self.r, self.rng, self.ledger)
        if stats.count < self.r:
            # Truncated final evaluation: charged, but not a candidate.
            raise BudgetExhausted("budget ran out mid-evaluation")
        self.n_points += 1
        view = stats if self.sign > 0 else stats.negated()
        self._offer(x, view)
        return view

    def _offer(self, x, view: SampleStats) -> None:
        if self.incumbent is None or view.mean > self.incumbent.stats.mean:
            n = self.ledger.consumed
            self.incumbent = Incumbent(x.copy(), view, n)
            self.trajectory.records.append(TrajectoryRecord(n, x.copy(), self.sign * view.mean))

    def can_afford(self, n_points: int = 1) -> bool:
        return self.ledger.remaining >= n_points * self.r


def as_point(x, dim: int) -> np.ndarray:
    """Validate a point: a finite vector of length ``dim``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    if x.shape != (dim,):
        raise ValueError(f"expected a point of dimension {dim}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point coordinates must be finite")
    return x


def norm(v: Sequence[float]) -> float:
    return float(np.linalg.norm(np.asarray(v, dtype=float)))
