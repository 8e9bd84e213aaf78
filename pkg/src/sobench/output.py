"""CSV and metadata files written by the command-line runner.

Every CSV starts with one ``#`` provenance line of ``key=value`` pairs
(experiment id, seed, problem, file kind, ...). Floats are written with
``repr`` so that reading a file back reproduces the exact values and
reruns produce identical bytes.
"""
import csv
from pathlib import Path

import numpy as np

from .core import Trajectory, TrajectoryRecord

TRAJECTORY_COLUMNS = ["experiment_id", "problem", "algorithm", "macrorep", "n", "coords",
                      "sample_mean", "flag"]
CURVE_COLUMNS = ["problem", "algorithm", "n", "mean", "ci_half_width", "q25", "q50", "q75", "m"]
ECDF_COLUMNS = ["problem", "algorithm", "n", "rank", "value"]

# File kinds recorded in the provenance line.
KIND_TRAJECTORY = "trajectory"
KIND_SWEEP = "sweep"
KIND_CURVE = "curve"
KIND_ECDF = "ecdf"


class OutputFormatError(ValueError):
    pass


def fmt(x):
    return repr(float(x))


def format_header(**fields):
    return "# " + " ".join(f"{k}={v}" for k, v in fields.items())


def parse_header(line):
    if not line.startswith("#"):
        raise OutputFormatError("missing provenance line")
    out = {}
    for item in line[1:].split():
        key, sep, value = item.partition("=")
        if not sep:
            raise OutputFormatError(f"bad provenance entry {item!r}")
        out[key] = value
    return out


def _write(path, header, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)


def write_trajectories(path, header, problem_id, algorithm, trajectories, experiment_id):
    """Write ``{macrorep: Trajectory}`` in the trajectory schema.

    A failed macroreplication has every row flagged ``failed``.
    """
    rows = []
    for i in sorted(trajectories):
        traj = trajectories[i]
        flag = "failed" if traj.failed else "ok"
        for rec in traj.records:
            coords = ";".join(fmt(c) for c in rec.point)
            rows.append([experiment_id, problem_id, algorithm, i, int(rec.n), coords,
                         fmt(rec.sample_mean), flag])
    _write(path, header, TRAJECTORY_COLUMNS, rows)


def write_curve(path, header, problem_id, algorithm, curve):
    rows = [[problem_id, algorithm, p.n, fmt(p.mean), fmt(p.ci_half_width),
             fmt(p.q25), fmt(p.q50), fmt(p.q75), p.m] for p in curve]
    _write(path, header, CURVE_COLUMNS, rows)


def write_ecdf(path, header, problem_id, terminal):
    """``terminal`` maps algorithm id to ``(n, sorted values)``."""
    rows = []
    for alg, (n, values) in terminal.items():
        rows.extend([problem_id, alg, n, k + 1, fmt(v)] for k, v in enumerate(values))
    _write(path, header, ECDF_COLUMNS, rows)


def read_csv(path):
    """Return ``(provenance dict, list of row dicts)``."""
    with open(path, newline="") as fh:
        meta = parse_header(fh.readline().rstrip("\n"))
        rows = list(csv.DictReader(fh))
    return meta, rows


def read_trajectories(path):
    """Read a trajectory file back into ``{macrorep: Trajectory}``.

    Returns ``(provenance, problem, algorithm, trajectories)``.
    """
    meta, rows = read_csv(path)
    kind = meta.get("kind")
    if kind in (KIND_CURVE, KIND_ECDF):
        raise OutputFormatError(f"{path} holds {kind} output; curves are terminal outputs and cannot be re-reported")
    if kind not in (KIND_TRAJECTORY, KIND_SWEEP):
        raise OutputFormatError(f"{path} is not a trajectory file")
    if not rows:
        raise OutputFormatError(f"{path} has no records")
    if list(rows[0]) != TRAJECTORY_COLUMNS:
        raise OutputFormatError(f"{path} columns do not match the trajectory schema")
    budget = int(meta["budget"])
    problems = {row["problem"] for row in rows}
    algorithms = {row["algorithm"] for row in rows}
    if len(problems) != 1 or len(algorithms) != 1:
        raise OutputFormatError(f"{path} mixes problems or algorithms")
    trajectories = {}
    for row in rows:
        i = int(row["macrorep"])
        traj = trajectories.setdefault(i, Trajectory(budget=budget))
        point = np.array([float(c) for c in row["coords"].split(";")])
        traj.records.append(TrajectoryRecord(int(row["n"]), point, float(row["sample_mean"])))
        if row["flag"] == "failed":
            traj.failed = True
    return meta, problems.pop(), algorithms.pop(), trajectories


def write_meta(path, entries):
    """Plain ``key=value`` lines in the given order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        for key, value in entries:
            fh.write(f"{key}={value}\n")
