"""MOSAIC: update-table-guided local search combined with a decomposition EA.

Each population slot is permanently bound to a weight vector. Every
generation a few starting slots are hill-climbed on their weighted sum, the
endpoints replace the starts, and offspring bred between the starters and the
rest of the population compete for slots under the incumbents' weights.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import BudgetExhausted, ConfigError
from .operators import blend_crossover, gaussian_mutation
from .problem import EpochProblem, OptimizerResult
from .scenario import Scenario


@dataclass(frozen=True)
class MosaicConfig:
    population_size: int = 30
    objectives: tuple[int, ...] = (0, 1, 2)
    max_generations: int | None = None
    iter_early: int = 500
    table_length: int = 50
    starters_per_gen: int | None = None   # defaults to population_size // 3
    local_search_budget: int = 30
    max_evals: int | None = None
    wall_budget: float | None = None
    seed: int = 0
    n_candidates: int = 5
    max_replacements: int = 2
    offspring_per_gen: int | None = None  # defaults to population_size
    share_steps: tuple[float, ...] = (0.05, 0.01)
    premium_step: float = 0.05
    mutation_sigma: float = 0.1
    trace_every: int | None = 1000
    audit: bool = False

    def __post_init__(self):
        m = len(self.objectives)
        if m < 1:
            raise ConfigError("at least one objective is required")
        if self.population_size < max(m, 2):
            raise ConfigError(f"population_size must be >= max(M, 2), got {self.population_size}")
        if not 1 <= self.starters < self.population_size:
            raise ConfigError("starters_per_gen must be in [1, population_size)")
        for name in ("table_length", "local_search_budget", "n_candidates", "max_replacements"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.iter_early < 0:
            raise ConfigError("iter_early must be >= 0")
        if self.max_evals is not None and self.max_evals < 1:
            raise ConfigError("max_evals must be >= 1")
        if self.wall_budget is not None and not self.wall_budget > 0:
            raise ConfigError("wall_budget must be > 0")
        if self.max_generations is not None and self.max_generations < 0:
            raise ConfigError("max_generations must be >= 0")
        if self.max_evals is None and self.wall_budget is None and self.max_generations is None:
            raise ConfigError("set at least one of max_evals, wall_budget, max_generations")
        if not self.share_steps or any(not 0 < s <= 1 for s in self.share_steps):
            raise ConfigError("share_steps must be in (0, 1]")

    @property
    def starters(self) -> int:
        return self.starters_per_gen if self.starters_per_gen is not None else self.population_size // 3

    @property
    def offspring(self) -> int:
        return self.offspring_per_gen if self.offspring_per_gen is not None else self.population_size


def simplex_lattice(h: int, m: int) -> np.ndarray:
    """All vectors with components in {0, 1/h, ..., 1} summing to one."""
    if m == 1:
        return np.ones((1, 1))
    rows = []
    # Stars and bars: choose m-1 cut points among h+m-1 positions.
    for cuts in itertools.combinations(range(h + m - 1), m - 1):
        parts = np.diff(np.array((-1,) + cuts + (h + m - 1,))) - 1
        rows.append(parts / h)
    return np.array(rows[::-1])


def generate_weights(n: int, m: int) -> np.ndarray:
    """``n`` evenly spread weight vectors over the M-simplex.

    Uses the smallest simplex lattice with at least ``n`` points and thins it
    by farthest-point selection seeded with the unit vectors. With a single
    objective there is only the vector (1,).
    """
    if m < 1 or n < m:
        raise ConfigError(f"need at least as many weight vectors as objectives (N={n}, M={m})")
    if m == 1:
        return np.ones((1, 1))
    h = 1
    while math.comb(h + m - 1, m - 1) < n:
        h += 1
    lattice = simplex_lattice(h, m)
    if lattice.shape[0] == n:
        return lattice
    chosen = [int(np.flatnonzero(lattice[:, i] == 1.0)[0]) for i in range(m)]
    dist = np.min(np.linalg.norm(lattice[:, None, :] - lattice[chosen][None, :, :], axis=2), axis=1)
    while len(chosen) < n:
        nxt = int(np.argmax(dist))
        chosen.append(nxt)
        dist = np.minimum(dist, np.linalg.norm(lattice - lattice[nxt], axis=1))
    return lattice[np.sort(chosen)]


def weighted_sum(obj, w, z) -> float:
    """Weighted sum of absolute distances from the ideal point."""
    return float(np.sum(np.asarray(w) * np.abs(np.asarray(obj, dtype=float) - z)))


def tchebycheff(obj, w, z) -> float:
    """Largest weighted absolute distance from the ideal point."""
    return float(np.max(np.asarray(w) * np.abs(np.asarray(obj, dtype=float) - z)))


class UpdateTable:
    """Per-slot rings of recent local-search outcomes (True = improved)."""

    def __init__(self, n_slots: int, length: int):
        self.length = length
        self.rings = [deque([True], maxlen=length) for _ in range(n_slots)]

    def record(self, slot: int, outcomes: Sequence[bool]) -> None:
        self.rings[slot].extend(bool(o) for o in outcomes)

    def reset(self, slot: int) -> None:
        self.rings[slot] = deque([True], maxlen=self.length)

    def frequencies(self) -> np.ndarray:
        return np.array([sum(r) / len(r) if r else 0.0 for r in self.rings])


def select_starters(table: UpdateTable, k: int, generation: int, iter_early: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Random slots early on, afterwards the ``k`` most frequently improved."""
    n = len(table.rings)
    if not 1 <= k <= n:
        raise ConfigError(f"k must be in [1, {n}], got {k}")
    if generation < iter_early:
        return np.sort(rng.choice(n, size=k, replace=False))
    f = table.frequencies()
    order = np.lexsort((rng.random(n), -f))
    return np.sort(order[:k])


class LocalSearchResult(NamedTuple):
    genome: np.ndarray
    objectives: np.ndarray
    energy: np.ndarray
    record: list[bool]
    g_start: float
    g_end: float


class MosaicState:
    """Mutable optimizer state for one epoch run."""

    def __init__(self, problem: EpochProblem, config: MosaicConfig):
        self.problem = problem
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.weights = generate_weights(config.population_size, len(config.objectives))
        n = config.population_size
        self.slot_weight = np.arange(n) % self.weights.shape[0]
        self.table = UpdateTable(n, config.table_length)
        self.z: np.ndarray | None = None
        sp = problem.space
        self.n_share = sp.n_share_genes
        self.n_dcs = sp.n_dcs
        self.n_wl = sp.n_workloads
        self.premium_dcs = np.flatnonzero(sp.premium_available & (sp.premium_ub > sp.premium_lb))

    def g(self, scaled: np.ndarray, slot: int) -> float:
        return weighted_sum(scaled, self.weights[self.slot_weight[slot]], self.z)

    def observe(self, objectives: np.ndarray) -> np.ndarray:
        scaled = self.problem.scaled(objectives)
        self.z = np.minimum(self.z, scaled)
        return scaled

    def initialize(self) -> None:
        p = self.problem
        n = self.config.population_size
        genomes = np.array([p.random_genome(self.rng) for _ in range(n)])
        ev = p.evaluate(genomes)
        if ev.genomes.shape[0] < n:
            raise BudgetExhausted()
        p.freeze_scale(ev.objectives)
        self.genomes = ev.genomes
        self.objectives = ev.objectives
        self.energy = ev.energy
        self.scaled = p.scaled(ev.objectives)
        self.z = self.scaled.min(axis=0)

    def _n_moves(self) -> int:
        return self.n_dcs * (self.n_dcs - 1) * self.n_wl + 2 * len(self.premium_dcs)

    def _apply(self, x: np.ndarray, energy: np.ndarray, move: int, step: float) -> np.ndarray | None:
        n_transfer = self.n_dcs * (self.n_dcs - 1) * self.n_wl
        y = x.copy()
        if move < n_transfer:
            j, pair = divmod(move, self.n_dcs * (self.n_dcs - 1))
            src, dst = divmod(pair, self.n_dcs - 1)
            dst += dst >= src
            i_src = src * self.n_wl + j
            amount = min(step, y[i_src])
            if amount <= 0.0:
                return None
            y[i_src] -= amount
            y[dst * self.n_wl + j] += amount
        else:
            d_idx, sign = divmod(move - n_transfer, 2)
            d = self.premium_dcs[d_idx]
            delta = self.config.premium_step * energy[d]
            if delta <= 0.0:
                return None
            y[self.n_share + d] += delta if sign == 0 else -delta
        y = self.problem.repair(y)
        if np.array_equal(y, x):
            return None
        return y

    def local_search(self, slot: int, budget: int) -> LocalSearchResult:
        """First-improvement hill climbing on the slot's weighted sum."""
        p = self.problem
        x, obj, energy = self.genomes[slot], self.objectives[slot], self.energy[slot]
        s = s_start = self.scaled[slot]
        record: list[bool] = []
        steps = self.config.share_steps
        level = 0
        spent = 0
        try:
            while spent < budget:
                improved = False
                step = steps[level]
                for move in self.rng.permutation(self._n_moves()):
                    if spent >= budget:
                        break
                    y = self._apply(x, energy, int(move), step)
                    if y is None:
                        continue
                    y, y_obj, y_energy = p.evaluate_one(y)
                    spent += 1
                    y_s = self.observe(y_obj)
                    better = self.g(y_s, slot) < self.g(s, slot)
                    record.append(better)
                    if better:
                        x, obj, energy, s = y, y_obj, y_energy, y_s
                        improved = True
                        break
                if not improved:
                    if level + 1 >= len(steps):
                        break
                    level += 1
        except BudgetExhausted:
            pass
        # Both ends are scored against the final ideal point.
        return LocalSearchResult(x, obj, energy, record, self.g(s_start, slot), self.g(s, slot))

    def run_local_search(self, starters: np.ndarray) -> None:
        for slot in starters:
            res = self.local_search(int(slot), self.config.local_search_budget)
            self.genomes[slot] = res.genome
            self.objectives[slot] = res.objectives
            self.energy[slot] = res.energy
            self.scaled[slot] = self.problem.scaled(res.objectives)
            self.table.record(int(slot), res.record)
            if self.problem.remaining() == 0:
                raise BudgetExhausted()

    def ea_step(self, starters: np.ndarray) -> int:
        """Breed, evaluate and insert offspring; return the number of replacements."""
        cfg = self.config
        p = self.problem
        sp = p.space
        n = cfg.population_size
        rest = np.setdiff1d(np.arange(n), starters)
        children = np.empty((cfg.offspring, sp.genome_size))
        for i in range(cfg.offspring):
            a = self.genomes[starters[self.rng.integers(len(starters))]]
            b = self.genomes[rest[self.rng.integers(len(rest))]]
            child = blend_crossover(a, b, self.n_share, self.rng)
            child = gaussian_mutation(child, sp.lower, sp.upper, self.rng, sigma=cfg.mutation_sigma)
            children[i] = p.repair(child)
        ev = p.evaluate(children)
        replaced = 0
        n_cand = min(cfg.n_candidates, n)
        for i in range(ev.genomes.shape[0]):
            c_s = self.observe(ev.objectives[i])
            done = 0
            for slot in self.rng.choice(n, size=n_cand, replace=False):
                if self.g(c_s, slot) < self.g(self.scaled[slot], slot):
                    self.genomes[slot] = ev.genomes[i]
                    self.objectives[slot] = ev.objectives[i]
                    self.energy[slot] = ev.energy[i]
                    self.scaled[slot] = c_s
                    self.table.reset(int(slot))
                    done += 1
                    replaced += 1
                    if done >= cfg.max_replacements:
                        break
        if ev.genomes.shape[0] < children.shape[0]:
            raise BudgetExhausted()
        return replaced


def optimize_epoch(scenario: Scenario, epoch: int, config: MosaicConfig,
                   problem: EpochProblem | None = None) -> OptimizerResult:
    """Run MOSAIC on one epoch until a budget runs out.

    Raises :class:`~mosaic_dc.errors.OversubscriptionError` before searching
    when the epoch's demand cannot fit the fleet.
    """
    if problem is None:
        problem = EpochProblem(scenario, epoch, config.objectives, config.max_evals,
                               config.wall_budget, config.trace_every, config.audit)
    state = MosaicState(problem, config)
    generation = 0
    try:
        state.initialize()
        while config.max_generations is None or generation < config.max_generations:
            starters = select_starters(state.table, config.starters, generation,
                                       config.iter_early, state.rng)
            state.run_local_search(starters)
            state.ea_step(starters)
            generation += 1
    except BudgetExhausted:
        pass
    return problem.result("mosaic", generations=generation,
                          ideal_point=None if state.z is None else state.z.tolist())
