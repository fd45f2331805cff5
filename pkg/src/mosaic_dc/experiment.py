"""Day-long runs, sensitivity sweeps and their on-disk outputs.

Epochs are optimized independently, optionally on a process pool. Everything
written except ``timing.json`` and the trace files depends only on the
scenario, seed and evaluation budget, never on the number of workers.
"""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .baselines import ALGORITHMS as BASELINES, BaselineConfig, run_baseline
from .decision import DecisionSpace
from .errors import ConfigError
from .evaluation import OBJECTIVE_NAMES
from .models import HOURS_PER_DAY
from .mosaic import MosaicConfig, optimize_epoch
from .pareto import cumulative_best, efficient_corners, normalize, phv
from .problem import OptimizerResult
from .scenario import Scenario, generate_scenario

log = logging.getLogger(__name__)

ALGORITHMS = ("mosaic",) + BASELINES
DEFAULT_EPOCH = 18
SWEEP_AXES = {
    "dcs": (4, 8, 16),
    "subscription": (0.5, 0.75, 0.99),
    "objectives": (1, 2, 3),
}
REPORT_VERSION = 1


def epoch_seed(seed: int, epoch: int) -> int:
    """Independent, reproducible seed for one epoch of a run."""
    return int(np.random.SeedSequence([seed, epoch]).generate_state(1)[0])


def run_epoch(scenario: Scenario, epoch: int, algorithm: str, seed: int,
              max_evals: int | None = None, wall_budget: float | None = None,
              objectives: Sequence[int] = (0, 1, 2), audit: bool = False,
              trace_every: int | None = 1000) -> OptimizerResult:
    """Optimize one epoch with the named algorithm."""
    objectives = tuple(objectives)
    if algorithm == "mosaic":
        cfg = MosaicConfig(objectives=objectives, max_evals=max_evals, wall_budget=wall_budget,
                           seed=seed, trace_every=trace_every, audit=audit)
        return optimize_epoch(scenario, epoch, cfg)
    if algorithm in BASELINES:
        cfg = BaselineConfig(algorithm, objectives=objectives, max_evals=max_evals,
                             wall_budget=wall_budget, seed=seed, trace_every=trace_every,
                             audit=audit)
        return run_baseline(scenario, epoch, cfg)
    raise ConfigError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")


def _call(args: tuple) -> OptimizerResult:
    return run_epoch(*args)


def _map(tasks: list[tuple], workers: int) -> list[OptimizerResult]:
    if workers <= 1 or len(tasks) <= 1:
        return [_call(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_call, tasks))


@dataclass
class RunReport:
    algorithm: str
    seed: int
    max_evals: int | None
    wall_budget: float | None
    objectives: tuple[int, ...]
    epochs: list[int]
    results: list[OptimizerResult] = field(repr=False)

    def corners(self, i: int) -> dict[str, list[float]]:
        front = self.results[i].front
        idx = efficient_corners(front.selected)
        return {OBJECTIVE_NAMES[o]: front.objectives[k].tolist()
                for o, k in zip(self.objectives, idx)}

    def corner_totals(self) -> dict[str, dict[str, float]]:
        """Day totals of each objective's cheapest plan, all objectives reported."""
        totals = {}
        for o in self.objectives:
            vec = np.zeros(3)
            for i in range(len(self.results)):
                vec += np.array(self.corners(i)[OBJECTIVE_NAMES[o]])
            totals[f"{OBJECTIVE_NAMES[o]}_efficient"] = dict(zip(OBJECTIVE_NAMES, vec.tolist()))
        return totals

    def cumulative_best(self) -> tuple[list[int], dict[str, float]]:
        """Best-compromise pick per epoch, scored on the day-wide range."""
        picks, _ = cumulative_best([r.front.selected for r in self.results])
        total = np.sum([r.front.objectives[k] for r, k in zip(self.results, picks)], axis=0)
        return picks, dict(zip(OBJECTIVE_NAMES, total.tolist()))

    def to_dict(self) -> dict:
        picks, totals = self.cumulative_best()
        epochs = []
        for i, (epoch, res) in enumerate(zip(self.epochs, self.results)):
            entry = {
                "epoch": epoch,
                "seed": epoch_seed(self.seed, epoch),
                "evaluations": res.evaluations,
                "front_size": len(res.front),
                "efficient_corners": self.corners(i),
                "best_compromise": res.front.objectives[picks[i]].tolist(),
            }
            if res.audit is not None:
                entry["audit"] = res.audit
            epochs.append(entry)
        return {
            "report_version": REPORT_VERSION,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "budget": {"evals": self.max_evals, "seconds": self.wall_budget},
            "deterministic": self.wall_budget is None,
            "objectives": [OBJECTIVE_NAMES[o] for o in self.objectives],
            "epochs": epochs,
            "aggregates": {
                "efficient_corner_totals": self.corner_totals(),
                "cumulative_best": totals,
            },
        }

    def write(self, out_dir: str | Path) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for epoch, res in zip(self.epochs, self.results):
            res.front.to_csv(out / f"front_epoch_{epoch:02d}.csv")
            with open(out / f"trace_epoch_{epoch:02d}.jsonl", "w", encoding="utf-8") as fh:
                for rec in res.trace:
                    fh.write(json.dumps(rec) + "\n")
        with open(out / "report.json", "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")
        timing = {f"{e:02d}": round(r.elapsed_s, 6) for e, r in zip(self.epochs, self.results)}
        with open(out / "timing.json", "w", encoding="utf-8") as fh:
            json.dump({"wall_seconds_per_epoch": timing}, fh, indent=2)
            fh.write("\n")


def check_epochs(scenario: Scenario, epochs: Iterable[int]) -> None:
    """Raise :class:`OversubscriptionError` naming the first infeasible epoch."""
    for epoch in epochs:
        DecisionSpace(scenario, epoch)


def run_day(scenario: Scenario, algorithm: str, seed: int = 0, max_evals: int | None = None,
            wall_budget: float | None = None, out_dir: str | Path | None = None,
            workers: int = 1, epochs: Sequence[int] | None = None,
            objectives: Sequence[int] = (0, 1, 2), audit: bool = False,
            trace_every: int | None = 1000) -> RunReport:
    """Optimize every epoch of the day independently and assemble a report.

    ``max_evals`` is the per-epoch evaluation budget including the initial
    population, so a budget equal to the population size reports on random
    plans only.
    """
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    if max_evals is None and wall_budget is None:
        raise ConfigError("set a per-epoch budget in evaluations or seconds")
    epochs = list(range(HOURS_PER_DAY) if epochs is None else epochs)
    check_epochs(scenario, epochs)
    tasks = [(scenario, e, algorithm, epoch_seed(seed, e), max_evals, wall_budget,
              tuple(objectives), audit, trace_every) for e in epochs]
    log.info("running %s on %d epochs with %d worker(s)", algorithm, len(epochs), workers)
    results = _map(tasks, workers)
    report = RunReport(algorithm, seed, max_evals, wall_budget, tuple(objectives), epochs, results)
    if out_dir is not None:
        report.write(out_dir)
    return report


@dataclass(frozen=True)
class SweepRow:
    axis: str
    value: float
    algorithm: str
    median_phv: float
    mean_phv: float
    normalized: float
    phvs: tuple[float, ...]


def _cell_scenario(axis: str, value, n_dcs: int, subscription: float,
                   scenario_seed: int, profile: str) -> tuple[Scenario, tuple[int, ...]]:
    if axis == "dcs":
        return generate_scenario(int(value), scenario_seed, subscription, profile=profile), (0, 1, 2)
    if axis == "subscription":
        return generate_scenario(n_dcs, scenario_seed, float(value), profile=profile), (0, 1, 2)
    if axis == "objectives":
        m = int(value)
        if m not in (1, 2, 3):
            raise ConfigError(f"objective count must be 1, 2 or 3, got {m}")
        return generate_scenario(n_dcs, scenario_seed, subscription, profile=profile), tuple(range(m))
    raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {tuple(SWEEP_AXES)}")


def sweep(axis: str, algorithms: Sequence[str], seeds: Sequence[int], max_evals: int,
          values: Sequence | None = None, n_dcs: int = 16, subscription: float = 0.75,
          scenario_seed: int = 0, epoch: int = DEFAULT_EPOCH, profile: str = "flat",
          workers: int = 1, out_dir: str | Path | None = None,
          progress: Callable[[str], None] | None = None) -> list[SweepRow]:
    """Compare algorithms along one axis of the problem.

    Within a cell, every front is normalized over the union of all fronts in
    that cell; each algorithm's median PHV is then divided by TOO's mean PHV.
    """
    algorithms = list(algorithms)
    if "too" not in algorithms:
        raise ConfigError("sweep normalizes against TOO; include 'too' in the algorithm list")
    for a in algorithms:
        if a not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {a!r}")
    if not seeds:
        raise ConfigError("at least one seed is required")
    values = list(SWEEP_AXES.get(axis, ()) if values is None else values)
    if not values:
        raise ConfigError("sweep axis needs at least one value")
    rows: list[SweepRow] = []
    for value in values:
        scenario, objectives = _cell_scenario(axis, value, n_dcs, subscription, scenario_seed,
                                              profile)
        tasks = [(scenario, epoch, a, s, max_evals, None, objectives, False, None)
                 for a in algorithms for s in seeds]
        results = _map(tasks, workers)
        fronts = [r.front.selected for r in results]
        normed, _ = normalize(fronts)
        vals = np.array([phv(f) for f in normed]).reshape(len(algorithms), len(seeds))
        too_mean = vals[algorithms.index("too")].mean()
        for a, row in zip(algorithms, vals):
            med = float(np.median(row))
            rows.append(SweepRow(axis, value, a, med, float(row.mean()),
                                 med / too_mean if too_mean > 0 else float("nan"),
                                 tuple(float(v) for v in row)))
        if progress:
            progress(f"{axis}={value}: " + ", ".join(
                f"{r.algorithm}={r.normalized:.3f}" for r in rows[-len(algorithms):]))
    if out_dir is not None:
        write_sweep_csv(rows, Path(out_dir) / f"sweep_{axis}.csv")
    return rows


def write_sweep_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["axis", "value", "algorithm", "median_phv", "mean_phv", "normalized_median"])
        for r in rows:
            w.writerow([r.axis, r.value, r.algorithm, repr(r.median_phv), repr(r.mean_phv),
                        repr(r.normalized)])

