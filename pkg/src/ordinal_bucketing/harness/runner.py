"""Execute experiment plans and persist CSV results.

Every repetition ``r`` uses seed ``base_seed + r`` for all grid points, so
grid points are compared on common random numbers.  Output rows are always
written in grid-then-repetition order, whatever order workers finish in.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

from ..bucketing import Bucketing, make_policy
from ..distributions import SourceSpec, sample_stream
from ..environments import make_game
from ..quantile_eval import bucketing_error
from ..search import play_episode
from .config import ExperimentPlan

QUANTILE_COLUMNS = ("policy", "k", "n", "m", "t", "distribution", "repetition", "seed", "q", "E", "error")
QUANTILE_AGG_COLUMNS = ("policy", "k", "n", "m", "t", "distribution", "runs", "mean_E")
GAMEPLAY_COLUMNS = ("variant", "game", "sigma", "budget", "repetition", "seed", "win", "score",
                    "ticks", "moves", "iterations_per_move", "outcome", "error")
GAMEPLAY_AGG_COLUMNS = ("variant", "game", "sigma", "budget", "runs", "win_rate", "mean_score",
                        "mean_iterations_per_move")


@dataclass
class RunSummary:
    rows: list[dict]
    aggregates: list[dict]
    failures: int
    output: Path | None = None
    aggregate_output: Path | None = None
    columns: tuple = field(default=(), repr=False)


def _map(fn: Callable, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


# -- quantile-error sweeps ----------------------------------------------------

def _stream_key(point: dict) -> tuple:
    return tuple(point[a] for a in ("policy", "k", "n", "m", "distribution"))


def quantile_task(task: tuple) -> list[tuple]:
    """Feed one stream and measure E at every requested prefix length.

    The sketch state after ``t`` samples only depends on the first ``t``
    samples, so evaluating all lengths on one stream equals separate runs.
    Returns ``(q, E, error)`` per length.
    """
    (policy, k, n, m, dist), lengths, seed = task
    lengths = sorted(lengths)
    samples = sample_stream(SourceSpec(kind=dist, seed=seed), lengths[-1]).tolist()
    sketch = Bucketing(make_policy(policy, k=k, n=n, m=m if m is not None else 3))
    out = {}
    done = 0
    for t in lengths:
        sketch.extend(samples[done:t])
        done = t
        try:
            report = bucketing_error(samples[:t], sketch)
            out[t] = (report.q, report.E, "")
        except ValueError as exc:
            out[t] = (len(sketch), math.nan, str(exc))
    return [out[t] for t in lengths]


def run_quantile_sweep(plan: ExperimentPlan, jobs: int = 1) -> RunSummary:
    points = plan.points()
    lengths: dict[tuple, set] = {}
    for p in points:
        lengths.setdefault(_stream_key(p), set()).add(p["t"])
    keys = list(lengths)
    tasks = [(key, sorted(lengths[key]), plan.run_seed(r)) for key in keys for r in range(plan.repetitions)]
    results = _map(quantile_task, tasks, jobs)
    by = {}
    for (key, ts, seed), res in zip(tasks, results):
        for t, value in zip(ts, res):
            by[key, t, seed] = value

    rows, aggregates, failures = [], [], 0
    for p in points:
        es = []
        for r in range(plan.repetitions):
            seed = plan.run_seed(r)
            q, e, err = by[_stream_key(p), p["t"], seed]
            failures += bool(err)
            if not err:
                es.append(e)
            rows.append({**p, "repetition": r, "seed": seed, "q": q, "E": e, "error": err})
        aggregates.append({**p, "runs": len(es), "mean_E": math.fsum(es) / len(es) if es else math.nan})
    return _finish(plan, rows, aggregates, failures, QUANTILE_COLUMNS, QUANTILE_AGG_COLUMNS)


# -- game play ------------------------------------------------------------------

def gameplay_task(task: tuple) -> dict:
    plan, point, seed = task
    try:
        game = make_game(plan.env_spec(point["game"], seed))
        cfg = plan.search_config(point, seed)
        res = play_episode(game, cfg, env_seed=seed)
    except Exception as exc:  # one failed episode must not sink the sweep
        return {"win": "", "score": "", "ticks": "", "moves": "", "iterations_per_move": "",
                "outcome": "error", "error": f"{type(exc).__name__}: {exc}"}
    return {"win": int(res.win), "score": res.score, "ticks": res.ticks, "moves": res.moves,
            "iterations_per_move": res.iterations_per_move, "outcome": res.outcome, "error": ""}


def run_gameplay(plan: ExperimentPlan, jobs: int = 1) -> RunSummary:
    points = plan.points()
    tasks = [(plan, p, plan.run_seed(r)) for p in points for r in range(plan.repetitions)]
    results = iter(_map(gameplay_task, tasks, jobs))
    rows, aggregates, failures = [], [], 0
    for p in points:
        ok = []
        for r in range(plan.repetitions):
            res = next(results)
            failures += bool(res["error"])
            if not res["error"]:
                ok.append(res)
            rows.append({**p, "repetition": r, "seed": plan.run_seed(r), **res})
        aggregates.append(_gameplay_aggregate(p, ok))
    return _finish(plan, rows, aggregates, failures, GAMEPLAY_COLUMNS, GAMEPLAY_AGG_COLUMNS)


def _gameplay_aggregate(point: dict, ok: list[dict]) -> dict:
    n = len(ok)

    def mean(key):
        return math.fsum(float(r[key]) for r in ok) / n if n else math.nan

    return {**point, "runs": n, "win_rate": mean("win"), "mean_score": mean("score"),
            "mean_iterations_per_move": mean("iterations_per_move")}


# -- output ----------------------------------------------------------------------

def aggregate_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".agg" + (path.suffix or ".csv"))


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, columns: Iterable[str], rows: Iterable[dict]) -> None:
    columns = list(columns)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c)) for c in columns])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _finish(plan, rows, aggregates, failures, columns, agg_columns) -> RunSummary:
    summary = RunSummary(rows, aggregates, failures, columns=columns)
    if plan.output:
        summary.output = Path(plan.output)
        summary.aggregate_output = aggregate_path(plan.output)
        write_csv(summary.output, columns, rows)
        write_csv(summary.aggregate_output, agg_columns, aggregates)
    return summary


def recompute_aggregates(rows: list[dict], family: str) -> list[dict]:
    """Rebuild the aggregate table from raw CSV rows (string-valued)."""
    if family == "QuantileError":
        axes, _value = ("policy", "k", "n", "m", "t", "distribution"), "E"
    else:
        axes, _value = ("variant", "game", "sigma", "budget"), "win"
    groups: dict[tuple, list] = {}
    for r in rows:
        bucket = groups.setdefault(tuple(r[a] for a in axes), [])
        if not r["error"]:
            bucket.append(r)
    out = []
    for key, ok in groups.items():
        point = dict(zip(axes, key))
        n = len(ok)
        if family == "QuantileError":
            out.append({**point, "runs": n, "mean_E": math.fsum(float(r["E"]) for r in ok) / n if n else math.nan})
        else:
            out.append(_gameplay_aggregate(point, ok))
    return out


def run_plan(plan: ExperimentPlan, jobs: int = 1) -> RunSummary:
    if plan.family == "QuantileError":
        return run_quantile_sweep(plan, jobs)
    return run_gameplay(plan, jobs)
