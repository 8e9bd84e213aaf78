"""Command-line front end: ``sobench list | run | report``.

A run is configured by an optional plain-text file of ``key=value`` lines
(``#`` starts a comment) plus command-line flags; flags win. Keys:
``experiment_id``, ``problems`` (comma list or ``all``), ``algorithms``,
``macroreps``, ``budget``, ``seed``, ``r``, ``r_post``, ``bad_start``,
``jobs``, ``out``. A dotted key ``alg.param=value`` overrides a solver
parameter, e.g. ``spsa.alpha=0.7``.

Exit codes: 0 success, 1 configuration or input error, 2 runtime failure.
"""
import argparse
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .algorithms import ALGORITHMS, make_solver
from .harness import (
    CI_MULTIPLIER,
    DEFAULT_MACROREPS,
    DEFAULT_R_POST,
    N_CHECKPOINTS,
    aggregate,
    default_checkpoints,
    postprocess,
    run_many,
    spsa_budget_sweep,
    sweep_cost,
    terminal_values,
)
from .output import (
    KIND_CURVE,
    KIND_ECDF,
    KIND_SWEEP,
    KIND_TRAJECTORY,
    OutputFormatError,
    format_header,
    read_trajectories,
    write_curve,
    write_ecdf,
    write_meta,
    write_trajectories,
)
from .problems import get_problem, problem_ids

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass
class ExperimentConfig:
    experiment_id: str = "experiment"
    problems: list = field(default_factory=lambda: ["all"])
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))
    macroreps: int = DEFAULT_MACROREPS
    budget: int = None
    seed: int = 0
    r: int = None
    r_post: int = DEFAULT_R_POST
    bad_start: bool = False
    jobs: int = 1
    out: str = "results"
    params: dict = field(default_factory=dict)

    def validate(self):
        """Resolve ``all`` and check every field; returns a new config."""
        if not self.experiment_id or any(c in self.experiment_id for c in "/\\ \t"):
            raise ConfigError("experiment_id", f"{self.experiment_id!r} is not a usable directory name")
        problems = problem_ids() if self.problems == ["all"] else list(self.problems)
        known = problem_ids()
        for pid in problems:
            if pid not in known:
                raise ConfigError("problems", f"unknown problem {pid!r}; registered problems: {', '.join(known)}")
        if not problems:
            raise ConfigError("problems", "no problems selected")
        algorithms = list(self.algorithms)
        for alg in algorithms:
            if alg not in ALGORITHMS:
                raise ConfigError("algorithms", f"unknown algorithm {alg!r}; valid algorithms: {', '.join(ALGORITHMS)}")
        if not algorithms:
            raise ConfigError("algorithms", "no algorithms selected")
        for name in ("macroreps", "jobs", "r_post"):
            value = getattr(self, name)
            if not _is_int(value) or value < 1:
                raise ConfigError(name, f"must be a positive integer, got {value!r}")
        if not _is_int(self.seed) or self.seed < 0:
            raise ConfigError("seed", f"must be a non-negative integer, got {self.seed!r}")
        if self.r is not None and (not _is_int(self.r) or self.r < 1):
            raise ConfigError("r", f"must be a positive integer, got {self.r!r}")
        if self.budget is not None and (not _is_int(self.budget) or self.budget < 1):
            raise ConfigError("budget", f"must be a positive integer, got {self.budget!r}")
        for pid in problems:
            problem = get_problem(pid)
            r = self.r or problem.r
            if (self.budget or problem.default_budget) < r:
                raise ConfigError("budget", f"smaller than one evaluation of {pid} (r={r})")
            if self.bad_start and problem.bad_start is None:
                raise ConfigError("bad_start", f"problem {pid!r} defines no bad starting solution")
        for alg, overrides in self.params.items():
            if alg not in ALGORITHMS:
                raise ConfigError(f"{alg}.*", f"unknown algorithm {alg!r}; valid algorithms: {', '.join(ALGORITHMS)}")
            for key, value in overrides.items():
                try:
                    make_solver(alg, **{key: value})
                except ValueError as exc:
                    raise ConfigError(f"{alg}.{key}", str(exc)) from None
        return replace(self, problems=problems, algorithms=algorithms)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _coerce(text):
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "null", ""):
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def _split_list(value):
    return [v.strip() for v in str(value).split(",") if v.strip()]


def _set_field(config, key, raw):
    if "." in key:
        alg, param = key.split(".", 1)
        config.params.setdefault(alg, {})[param] = _coerce(raw)
        return
    if key in ("problems", "algorithms"):
        setattr(config, key, _split_list(raw))
    elif key in ("experiment_id", "out"):
        setattr(config, key, str(raw))
    elif key == "bad_start":
        value = _coerce(raw) if isinstance(raw, str) else raw
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true or false, got {raw!r}")
        config.bad_start = value
    elif key in ("macroreps", "budget", "seed", "r", "r_post", "jobs"):
        value = _coerce(raw) if isinstance(raw, str) else raw
        if value is not None and not _is_int(value):
            raise ConfigError(key, f"expected an integer, got {raw!r}")
        setattr(config, key, value)
    else:
        raise ConfigError(key, "unknown configuration key")


def load_config(path, config=None):
    """Read a ``key=value`` file into ``config`` (a fresh default if omitted)."""
    config = config or ExperimentConfig()
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError("config", f"line {lineno} is not key=value: {line!r}")
        _set_field(config, key.strip(), value.strip())
    return config


def config_from_args(args):
    config = load_config(args.config) if args.config else ExperimentConfig()
    flags = {
        "problems": args.problems,
        "algorithms": args.algorithms,
        "macroreps": args.macroreps,
        "budget": args.budget,
        "seed": args.seed,
        "jobs": args.jobs,
        "out": args.out,
        "experiment_id": args.experiment_id,
    }
    for key, value in flags.items():
        if value is not None:
            _set_field(config, key, value)
    if args.bad_start:
        config.bad_start = True
    return config.validate()


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_list(stream=None):
    stream = stream or sys.stdout
    print("problems:", file=stream)
    for pid in problem_ids():
        p = get_problem(pid)
        optimum = "known-optimum" if p.known_optimum else "unknown-optimum"
        print(f"  {pid} d={p.dim} {optimum} {p.sense} budget={p.default_budget} r={p.r}", file=stream)
    print("algorithms:", file=stream)
    for alg, cls in ALGORITHMS.items():
        print(f"  {alg} {cls.__name__}", file=stream)
    return EXIT_OK


def _trajectory_header(config, problem, algorithm, kind, budget, r):
    return format_header(experiment_id=config.experiment_id, seed=config.seed, problem=problem.id,
                         algorithm=algorithm, kind=kind, budget=budget, r=r,
                         r_post=config.r_post, bad_start=int(config.bad_start))


def cmd_run(config, log=None):
    """Run every (problem, algorithm) pair and write trajectories, curves
    and metadata under ``<out>/<experiment_id>/``. Returns written paths."""
    log = log or sys.stderr
    root = Path(config.out) / config.experiment_id
    traj_dir = root / "trajectories"
    problems = [get_problem(pid) for pid in config.problems]
    plain = [a for a in config.algorithms if a != "spsa"]

    tasks = []
    for p in problems:
        for alg in plain:
            for i in range(config.macroreps):
                tasks.append(dict(problem=p.id, algorithm=alg, seed=config.seed, macrorep=i,
                                  budget=config.budget, params=config.params.get(alg),
                                  bad_start=config.bad_start, r=config.r))
    print(f"running {len(tasks)} macroreplications", file=log)
    results = iter(run_many(tasks, config.jobs))

    meta = [
        ("experiment_id", config.experiment_id),
        ("seed", config.seed),
        ("package_version", __version__),
        ("testbed", "reconstructed"),
        ("budget_unit", "replications"),
        ("problems", ",".join(config.problems)),
        ("algorithms", ",".join(config.algorithms)),
        ("macroreps", config.macroreps),
        ("r_post", config.r_post),
        ("bad_start", int(config.bad_start)),
        ("ci_multiplier", CI_MULTIPLIER),
        ("quartile_method", "linear"),
        ("n_checkpoints", N_CHECKPOINTS),
        ("z_before_first_record", "defined-from-first-evaluation"),
        ("failure_policy", "carry-forward-and-flag"),
    ]
    for alg in sorted(config.params):
        for key in sorted(config.params[alg]):
            meta.append((f"param.{alg}.{key}", config.params[alg][key]))

    written = []
    for p in problems:
        budget = config.budget or p.default_budget
        r = config.r or p.r
        meta += [(f"budget.{p.id}", budget), (f"r.{p.id}", r)]
        files = []
        for alg in config.algorithms:
            path = traj_dir / f"{p.id}__{alg}.csv"
            if alg == "spsa":
                # Budgets below one evaluation cannot produce an incumbent.
                checkpoints = [n for n in default_checkpoints(budget) if n >= r]
                print(f"{p.id}: spsa budget sweep over {len(checkpoints)} budgets", file=log)
                trajs = spsa_budget_sweep(p, checkpoints, config.seed, config.macroreps,
                                          config.params.get(alg), config.bad_start, config.r, config.jobs)
                kind = KIND_SWEEP
                meta.append((f"spsa_sweep_cost.{p.id}", sweep_cost(checkpoints, config.macroreps)))
            else:
                trajs = {i: next(results) for i in range(config.macroreps)}
                kind = KIND_TRAJECTORY
            n_failed = sum(t.failed for t in trajs.values())
            meta.append((f"failed.{p.id}.{alg}", n_failed))
            write_trajectories(path, _trajectory_header(config, p, alg, kind, budget, r),
                               p.id, alg, trajs, config.experiment_id)
            files.append(path)
        written += files
        written += cmd_report(files, root / "curves", log=log)
    write_meta(root / "meta.txt", meta)
    written.append(root / "meta.txt")
    return written


def cmd_report(paths, out_dir=None, log=None):
    """Post-process trajectory files of one problem into curve files.

    Writes ``<problem>__<algorithm>.csv`` curves on the common checkpoint
    grid and ``<problem>__ecdf.csv`` with the sorted terminal values.
    """
    log = log or sys.stderr
    files = []
    for path in map(Path, paths):
        if not path.exists():
            raise OutputFormatError(f"{path} does not exist")
        files.extend(sorted(path.glob("*.csv")) if path.is_dir() else [path])
    if not files:
        raise OutputFormatError("no trajectory files given")
    loaded = [read_trajectories(f) for f in files]
    problems = {pid for _, pid, _, _ in loaded}
    if len(problems) != 1:
        raise OutputFormatError(f"trajectory files mix problems: {', '.join(sorted(problems))}")
    for key in ("experiment_id", "seed", "budget", "r_post"):
        values = {meta.get(key) for meta, *_ in loaded}
        if len(values) != 1:
            raise OutputFormatError(f"trajectory files disagree on {key}: {', '.join(map(str, sorted(values)))}")
    meta0 = loaded[0][0]
    seed, budget, r_post = int(meta0["seed"]), int(meta0["budget"]), int(meta0["r_post"])
    problem = get_problem(problems.pop())
    by_alg = {}
    for meta, _, alg, trajs in loaded:
        if alg in by_alg:
            raise OutputFormatError(f"algorithm {alg!r} appears in more than one file")
        by_alg[alg] = trajs
    # Registry order, so output bytes do not depend on input order.
    by_alg = {alg: by_alg[alg] for alg in sorted(by_alg, key=list(ALGORITHMS).index)}

    samples = postprocess(by_alg, problem, seed, r_post)
    checkpoints = default_checkpoints(budget)
    if out_dir is None:
        parent = files[0].parent
        out_dir = parent.parent / "curves" if parent.name == "trajectories" else parent / "curves"
    out_dir = Path(out_dir)

    def header(kind, alg=None):
        fields = dict(experiment_id=meta0["experiment_id"], seed=seed, problem=problem.id)
        if alg is not None:
            fields["algorithm"] = alg
        fields.update(kind=kind, budget=budget, r_post=r_post,
                      z_before_first_record="defined-from-first-evaluation")
        return format_header(**fields)

    written = []
    terminal = {}
    for alg, runs in samples.items():
        n_failed = sum(s.failed for s in runs.values())
        if n_failed:
            print(f"warning: {problem.id}/{alg}: {n_failed} failed macroreplication(s) carried forward",
                  file=log)
        path = out_dir / f"{problem.id}__{alg}.csv"
        write_curve(path, header(KIND_CURVE, alg), problem.id, alg, aggregate(runs, checkpoints))
        written.append(path)
        terminal[alg] = (budget, terminal_values(runs, budget))
    path = out_dir / f"{problem.id}__ecdf.csv"
    write_ecdf(path, header(KIND_ECDF), problem.id, terminal)
    written.append(path)
    return written


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="sobench", description="Benchmark simulation-optimization solvers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list registered problems and algorithms")

    run = sub.add_parser("run", help="run macroreplications and write trajectories and curves")
    run.add_argument("--config", help="key=value configuration file")
    run.add_argument("--problems", help="comma-separated problem ids, or 'all'")
    run.add_argument("--algorithms", help="comma-separated algorithm ids")
    run.add_argument("--macroreps", type=int)
    run.add_argument("--budget", type=int, help="replication budget for every problem")
    run.add_argument("--seed", type=int)
    run.add_argument("--bad-start", action="store_true", help="start from each problem's bad solution")
    run.add_argument("--jobs", type=int, help="worker processes")
    run.add_argument("--out", help="output root directory")
    run.add_argument("--experiment-id")

    report = sub.add_parser("report", help="post-process trajectory CSVs of one problem into curves")
    report.add_argument("paths", nargs="+", help="trajectory CSV files or directories")
    report.add_argument("--out", help="directory for curve files")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.command == "list":
            return cmd_list()
        if args.command == "run":
            written = cmd_run(config_from_args(args))
        else:
            written = cmd_report(args.paths, args.out)
    except (ConfigError, OutputFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - report and signal runtime failure
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
