"""Per-epoch optimization problem shared by MOSAIC and the baselines.

An :class:`EpochProblem` owns the evaluation budget, the external archive
and the convergence trace, so every optimizer is scored on identical terms.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .decision import DecisionSpace, conservation_check
from .errors import BudgetExhausted, ConfigError
from .evaluation import CompiledEpoch
from .pareto import DEFAULT_REF, ParetoArchive, ParetoFront, apply_bounds, phv
from .scenario import Scenario


class Evaluated(NamedTuple):
    genomes: np.ndarray     # (B, G) canonical genomes
    objectives: np.ndarray  # (B, 3) raw cost, carbon, water
    energy: np.ndarray      # (B, D) facility energy per datacenter


@dataclass
class OptimizerResult:
    algorithm: str
    front: ParetoFront
    trace: list[dict]
    evaluations: int
    elapsed_s: float
    audit: dict | None = None
    state: dict = field(default_factory=dict)


class EpochProblem:
    """Budgeted evaluation of genomes for one epoch.

    Every evaluation goes through here: it is counted against ``max_evals``
    and ``wall_seconds``, added to the external archive and optionally
    audited for arrival-rate conservation. Raises :class:`BudgetExhausted`
    once nothing more may be evaluated.
    """

    def __init__(self, scenario: Scenario, epoch: int, objectives: Sequence[int] = (0, 1, 2),
                 max_evals: int | None = None, wall_seconds: float | None = None,
                 trace_every: int | None = 1000, audit: bool = False):
        if not objectives or any(o not in (0, 1, 2) for o in objectives):
            raise ConfigError(f"objective indices must be drawn from 0, 1, 2, got {objectives}")
        if max_evals is not None and max_evals < 1:
            raise ConfigError("max_evals must be >= 1")
        if wall_seconds is not None and not wall_seconds > 0:
            raise ConfigError("wall_seconds must be > 0")
        self.scenario = scenario
        self.epoch = epoch
        self.space = DecisionSpace(scenario, epoch)
        self.compiled = CompiledEpoch(scenario, epoch, self.space)
        self.objective_idx = tuple(objectives)
        self.max_evals = max_evals
        self.wall_seconds = wall_seconds
        self.trace_every = trace_every
        self.audit = audit
        self.audited = 0
        self.violations = 0
        self.archive = ParetoArchive(self.space.genome_size, self.objective_idx)
        self.evaluations = 0
        self.trace: list[dict] = []
        self.lo: np.ndarray | None = None
        self.span: np.ndarray | None = None
        self._start = time.perf_counter()
        self._contract_rate = self.compiled.contract_rate

    @property
    def n_objectives(self) -> int:
        return len(self.objective_idx)

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._start

    def remaining(self) -> int | None:
        return None if self.max_evals is None else self.max_evals - self.evaluations

    def repair(self, x: np.ndarray) -> np.ndarray:
        return self.space.repair(x)

    def random_genome(self, rng: np.random.Generator) -> np.ndarray:
        return self.space.random_genome(rng)

    def purchasable(self, energy: np.ndarray) -> np.ndarray:
        """Energy per datacenter that is not covered by an annual contract."""
        return energy - np.minimum(energy, self._contract_rate)

    def evaluate(self, genomes: np.ndarray) -> Evaluated:
        """Evaluate a ``(B, G)`` batch, truncated to what the budget allows."""
        genomes = np.atleast_2d(genomes)
        allowed = genomes.shape[0]
        left = self.remaining()
        if left is not None:
            allowed = min(allowed, left)
        if allowed <= 0 or (self.wall_seconds is not None and self.elapsed >= self.wall_seconds):
            raise BudgetExhausted()
        genomes = genomes[:allowed]
        result = self.compiled.evaluate(genomes)
        canon = genomes.copy()
        canon[:, self.space.n_share_genes:] = result.premium_kwh
        for i in range(allowed):
            self._record(canon[i], result.objectives[i])
        return Evaluated(canon, result.objectives, result.energy_kwh)

    def evaluate_one(self, genome: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        ev = self.evaluate(genome[None, :])
        return ev.genomes[0], ev.objectives[0], ev.energy[0]

    def _record(self, genome: np.ndarray, objectives: np.ndarray) -> None:
        self.evaluations += 1
        if self.audit:
            self.audited += 1
            if not conservation_check(self.space.to_plan(genome), self.scenario.demand,
                                      self.epoch):
                self.violations += 1
        self.archive.add(objectives, genome)
        if (self.trace_every and self.lo is not None
                and self.evaluations % self.trace_every == 0):
            self.sample_trace()

    def freeze_scale(self, objectives: np.ndarray) -> None:
        """Fix the normalization used by scalarizations and the trace.

        Called once with the initial population so that every later value is
        measured on the same yardstick.
        """
        sel = np.atleast_2d(objectives)[:, list(self.objective_idx)]
        self.lo = sel.min(axis=0)
        span = sel.max(axis=0) - self.lo
        self.span = np.where(span > 0, span, np.maximum(np.abs(self.lo), 1.0))

    def scaled(self, objectives: np.ndarray) -> np.ndarray:
        """Selected objective columns mapped onto the frozen scale."""
        sel = objectives[..., list(self.objective_idx)]
        return (sel - self.lo) / self.span

    def archive_phv(self) -> float:
        pts = apply_bounds(self.archive.selected, self.lo, self.lo + self.span)
        return phv(pts, DEFAULT_REF)

    def sample_trace(self) -> None:
        self.trace.append({
            "evaluations": self.evaluations,
            "elapsed_s": round(self.elapsed, 6),
            "archive_phv": self.archive_phv(),
            "archive_size": self.archive.size,
        })

    def result(self, algorithm: str, **state) -> OptimizerResult:
        if self.lo is not None and (not self.trace or self.trace[-1]["evaluations"] != self.evaluations):
            self.sample_trace()
        audit = None
        if self.audit:
            audit = {"audited": self.audited, "violations": self.violations}
        return OptimizerResult(algorithm, self.archive.front(self.space.gene_names()),
                               self.trace, self.evaluations, self.elapsed, audit, state)
