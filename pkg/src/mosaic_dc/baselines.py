"""Comparison optimizers extended to the tri-objective problem.

TOO is multi-start simulated annealing, GALD a rank-and-crowding genetic
algorithm and DMGC a Tchebycheff decomposition EA whose replacement favours
crowding distance. All three draw evaluations from an :class:`EpochProblem`,
so they share the evaluator, the archive and the budget accounting with MOSAIC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhausted, ConfigError
from .mosaic import generate_weights, tchebycheff
from .operators import blend_crossover, gaussian_mutation
from .pareto import crowding_distance, dominates, nondominated_sort
from .problem import EpochProblem, OptimizerResult
from .scenario import Scenario

ALGORITHMS = ("too", "gald", "dmgc")


@dataclass(frozen=True)
class BaselineConfig:
    algorithm: str
    population_size: int = 30
    objectives: tuple[int, ...] = (0, 1, 2)
    max_evals: int | None = None
    wall_budget: float | None = None
    seed: int = 0
    # TOO
    chain_length: int = 500
    initial_temperature: float = 0.05
    decay: float = 0.99
    # GALD
    crossover_rate: float = 0.9
    mutation_rate: float | None = None   # defaults to 1 / genome length
    # TOO and DMGC
    sigma: float = 0.1
    # DMGC
    neighborhood: int = 5
    max_replacements: int = 2
    trace_every: int | None = 1000
    audit: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown baseline {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.population_size < max(len(self.objectives), 2):
            raise ConfigError("population_size must be >= max(M, 2)")
        if not 0 < self.decay < 1:
            raise ConfigError("decay must lie in (0, 1)")
        if self.initial_temperature < 0:
            raise ConfigError("initial_temperature must be >= 0")
        for name in ("crossover_rate", "mutation_rate"):
            v = getattr(self, name)
            if v is not None and not 0 <= v <= 1:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.chain_length < 1 or self.neighborhood < 1 or self.max_replacements < 1:
            raise ConfigError("chain_length, neighborhood and max_replacements must be >= 1")
        if not self.sigma > 0:
            raise ConfigError("sigma must be > 0")
        if self.max_evals is None and self.wall_budget is None:
            raise ConfigError("set max_evals or wall_budget")
        if self.max_evals is not None and self.max_evals < 1:
            raise ConfigError("max_evals must be >= 1")
        if self.wall_budget is not None and not self.wall_budget > 0:
            raise ConfigError("wall_budget must be > 0")


def _problem(scenario: Scenario, epoch: int, config: BaselineConfig) -> EpochProblem:
    return EpochProblem(scenario, epoch, config.objectives, config.max_evals,
                        config.wall_budget, config.trace_every, config.audit)


def _initial(problem: EpochProblem, n: int, rng: np.random.Generator):
    genomes = np.array([problem.random_genome(rng) for _ in range(n)])
    ev = problem.evaluate(genomes)
    problem.freeze_scale(ev.objectives)
    if ev.genomes.shape[0] < n:
        raise BudgetExhausted()
    return ev.genomes, problem.scaled(ev.objectives)


def sa_accept(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    """Metropolis rule; at zero temperature only strict improvements pass."""
    if delta < 0:
        return True
    if temperature <= 0:
        return False
    return rng.random() < math.exp(-delta / temperature)


def run_too(scenario: Scenario, epoch: int, config: BaselineConfig) -> OptimizerResult:
    """Multi-start simulated annealing on randomly weighted sums.

    Each restart draws a fresh weight vector, starts from a random archive
    member and cools geometrically over ``chain_length`` moves.
    """
    problem = _problem(scenario, epoch, config)
    rng = np.random.default_rng(config.seed)
    sp = problem.space
    m = problem.n_objectives
    restarts = 0
    try:
        _initial(problem, config.population_size, rng)
        while True:
            w = rng.dirichlet(np.ones(m))
            pick = rng.integers(problem.archive.size)
            x = problem.archive.genomes[pick].copy()
            fx = float(w @ problem.scaled(problem.archive.objectives[pick]))
            temperature = config.initial_temperature
            for _ in range(config.chain_length):
                y = gaussian_mutation(x, sp.lower, sp.upper, rng, rate=config.mutation_rate,
                                      sigma=config.sigma)
                y = problem.repair(y)
                y, obj, _ = problem.evaluate_one(y)
                fy = float(w @ problem.scaled(obj))
                if sa_accept(fy - fx, temperature, rng):
                    x, fx = y, fy
                temperature *= config.decay
            restarts += 1
    except BudgetExhausted:
        pass
    return problem.result("too", restarts=restarts)


def _tournament(rank: np.ndarray, crowd: np.ndarray, rng: np.random.Generator) -> int:
    a, b = rng.integers(rank.shape[0], size=2)
    if rank[a] != rank[b]:
        return int(a if rank[a] < rank[b] else b)
    return int(a if crowd[a] >= crowd[b] else b)


def _rank_and_crowd(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rank = nondominated_sort(points)
    crowd = np.empty(points.shape[0])
    for r in np.unique(rank):
        members = np.flatnonzero(rank == r)
        crowd[members] = crowding_distance(points[members])
    return rank, crowd


def survivors(points: np.ndarray, n: int) -> np.ndarray:
    """Indices of the ``n`` best points by rank, then larger crowding distance."""
    rank, crowd = _rank_and_crowd(points)
    order = np.lexsort((np.arange(points.shape[0]), -crowd, rank))
    return np.sort(order[:n])


def run_gald(scenario: Scenario, epoch: int, config: BaselineConfig) -> OptimizerResult:
    """Generational GA with rank and crowding selection (elitist, mu + lambda)."""
    problem = _problem(scenario, epoch, config)
    rng = np.random.default_rng(config.seed)
    sp = problem.space
    n = config.population_size
    generations = 0
    try:
        genomes, scaled = _initial(problem, n, rng)
        while True:
            rank, crowd = _rank_and_crowd(scaled)
            children = np.empty_like(genomes)
            for i in range(n):
                a = genomes[_tournament(rank, crowd, rng)]
                if rng.random() < config.crossover_rate:
                    b = genomes[_tournament(rank, crowd, rng)]
                    child = blend_crossover(a, b, sp.n_share_genes, rng)
                else:
                    child = a.copy()
                child = gaussian_mutation(child, sp.lower, sp.upper, rng,
                                          rate=config.mutation_rate, sigma=config.sigma)
                children[i] = problem.repair(child)
            ev = problem.evaluate(children)
            pool_g = np.vstack([genomes, ev.genomes])
            pool_s = np.vstack([scaled, problem.scaled(ev.objectives)])
            keep = survivors(pool_s, n)
            genomes, scaled = pool_g[keep], pool_s[keep]
            generations += 1
            if ev.genomes.shape[0] < n:
                raise BudgetExhausted()
    except BudgetExhausted:
        pass
    return problem.result("gald", generations=generations)


def dmgc_prefers_child(child: np.ndarray, incumbent: np.ndarray, child_crowd: float,
                       incumbent_crowd: float, w: np.ndarray, z: np.ndarray) -> bool:
    """Replacement rule: dominance first, then crowding, then Tchebycheff."""
    if dominates(child, incumbent):
        return True
    if dominates(incumbent, child):
        return False
    if child_crowd != incumbent_crowd:
        return child_crowd > incumbent_crowd
    return tchebycheff(child, w, z) < tchebycheff(incumbent, w, z)


def run_dmgc(scenario: Scenario, epoch: int, config: BaselineConfig) -> OptimizerResult:
    """Decomposition EA with parent-centred Gaussian offspring."""
    problem = _problem(scenario, epoch, config)
    rng = np.random.default_rng(config.seed)
    sp = problem.space
    n = config.population_size
    weights = generate_weights(n, problem.n_objectives)
    slot_w = np.arange(n) % weights.shape[0]
    wdist = np.linalg.norm(weights[slot_w][:, None, :] - weights[slot_w][None, :, :], axis=2)
    t = min(config.neighborhood, n)
    neighbors = np.argsort(wdist, axis=1, kind="stable")[:, :t]
    rate = config.mutation_rate if config.mutation_rate is not None else min(1.0, 3.0 / sp.genome_size)
    generations = 0
    try:
        genomes, scaled = _initial(problem, n, rng)
        z = scaled.min(axis=0)
        while True:
            children = np.empty_like(genomes)
            for i in range(n):
                child = gaussian_mutation(genomes[i], sp.lower, sp.upper, rng, rate=rate,
                                          sigma=config.sigma)
                children[i] = problem.repair(child)
            ev = problem.evaluate(children)
            for i in range(ev.genomes.shape[0]):
                c = problem.scaled(ev.objectives[i])
                z = np.minimum(z, c)
                crowd = crowding_distance(np.vstack([scaled, c]))
                done = 0
                for slot in rng.permutation(neighbors[i]):
                    if dmgc_prefers_child(c, scaled[slot], crowd[-1], crowd[slot],
                                          weights[slot_w[slot]], z):
                        genomes[slot] = ev.genomes[i]
                        scaled[slot] = c
                        done += 1
                        if done >= config.max_replacements:
                            break
                        crowd = crowding_distance(np.vstack([scaled, c]))
            generations += 1
            if ev.genomes.shape[0] < n:
                raise BudgetExhausted()
    except BudgetExhausted:
        pass
    return problem.result("dmgc", generations=generations)


RUNNERS = {"too": run_too, "gald": run_gald, "dmgc": run_dmgc}


def run_baseline(scenario: Scenario, epoch: int, config: BaselineConfig) -> OptimizerResult:
    return RUNNERS[config.algorithm](scenario, epoch, config)
