"""Generational evolutionary algorithm fitting genomes to a target spike-count profile.

Random streams are keyed by position, never by call order:

* individual evaluation: ``(seed, 0, trial, generation, index)`` split into a
  connectivity stream and a dynamics stream;
* breeding a generation: ``(seed, 1, trial, generation)``;
* the initial population: ``(seed, 2, trial)``.

Evaluating a population serially or on a pool therefore gives identical results.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Callable

import numpy as np

from .errors import UndefinedFitnessError, ValidationError
from .genome import GeneBounds, Genome, N_GENES, decode
from .metrics import BinnedCounts, FitnessValue, n_bins_for, record_counts, temporal_fitness
from .simulation import STEP_SECONDS, SpikeRecord, observed_record, simulate
from .topology import Connectivity, GridLayout, ModelKind, build_connectivity

log = logging.getLogger(__name__)

_EVAL, _BREED, _INIT = 0, 1, 2


@dataclass(frozen=True)
class EvolutionConfig:
    population_size: int = 60
    generations: int = 80
    parent_fraction: float = 0.5
    elite_fraction: float = 0.05
    mutation_prob: float = 0.10
    eval_steps: int = 1500
    trials: int = 10
    model_kind: ModelKind = ModelKind.NETWORK
    bounds: GeneBounds = field(default_factory=GeneBounds)
    seed: int = 0
    warmup_steps: int = 0
    step_seconds: float = STEP_SECONDS
    bin_seconds: float = 1.0
    window_offset_s: float = 0.0

    def __post_init__(self):
        kind = ModelKind.parse(self.model_kind)
        object.__setattr__(self, "model_kind", kind)
        bounds = self.bounds
        if isinstance(bounds, dict):
            bounds = GeneBounds.from_dict(bounds, model_kind=kind)
        object.__setattr__(self, "bounds", bounds.with_kind(kind))
        if self.population_size < 2:
            raise ValidationError("population_size must be >= 2")
        if self.generations < 0 or self.trials < 1:
            raise ValidationError("generations must be >= 0 and trials >= 1")
        if not 0 < self.elite_fraction <= self.parent_fraction < 1:
            raise ValidationError("need 0 < elite_fraction <= parent_fraction < 1")
        if not 0 <= self.mutation_prob <= 1:
            raise ValidationError("mutation_prob must lie in [0, 1]")
        if self.eval_steps < 1 or self.warmup_steps < 0:
            raise ValidationError("eval_steps must be >= 1 and warmup_steps >= 0")
        if self.window_offset_s < 0:
            raise ValidationError("window_offset_s must be >= 0")
        if self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")
        n_bins_for(self.window_seconds, self.bin_seconds)

    @property
    def window_seconds(self) -> float:
        return self.eval_steps * self.step_seconds

    @property
    def n_parents(self) -> int:
        return max(1, int(math.floor(self.population_size * self.parent_fraction + 0.5)))

    @property
    def n_elites(self) -> int:
        # round first: 0.05 * 60 is 3.0000000000000004 in binary
        return max(1, math.ceil(round(self.population_size * self.elite_fraction, 9)))

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, ModelKind):
                value = value.value
            elif isinstance(value, GeneBounds):
                value = value.to_dict()
            out[f.name] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EvolutionConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class Individual:
    genome: Genome
    lineage_id: int
    connectivity: Connectivity | None = None
    fitness: FitnessValue | None = None
    stream_key: tuple[int, int, int] | None = None  # (trial, generation, index) of its evaluation
    record: SpikeRecord | None = None  # observed record from its evaluation

    @property
    def objective(self) -> float:
        return math.inf if self.fitness is None else self.fitness.objective_f


@dataclass
class EvolutionResult:
    trial: int
    config: EvolutionConfig
    objective: np.ndarray  # (generations + 1, population_size), population order
    lineage: np.ndarray
    best_per_generation: list[Individual]

    @property
    def best(self) -> Individual:
        return self.best_per_generation[-1]

    @property
    def n_generations(self) -> int:
        return self.objective.shape[0]

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.objective.min(axis=1))

    def top_k_scores(self, k: int = 10) -> np.ndarray:
        """(generations + 1, k) scores of the k best individuals, best first."""
        k = min(k, self.objective.shape[1])
        return 1.0 - np.sort(self.objective, axis=1)[:, :k]


def _seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))


def individual_streams(seed: int, trial: int, generation: int, index: int):
    """(connectivity_rng, dynamics_rng) for one evaluation."""
    conn, dyn = _seed_sequence(seed, _EVAL, trial, generation, index).spawn(2)
    return np.random.default_rng(conn), np.random.default_rng(dyn)


def breeding_rng(seed: int, trial: int, generation: int) -> np.random.Generator:
    return np.random.default_rng(_seed_sequence(seed, _BREED, trial, generation))


def initial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(_seed_sequence(seed, _INIT, trial))


def run_individual(genome: Genome, config: EvolutionConfig, stream_key: tuple[int, int, int],
                   connectivity: Connectivity | None = None):
    """Build (or reuse) connectivity and simulate; returns (connectivity, observed record)."""
    conn_rng, dyn_rng = individual_streams(config.seed, *stream_key)
    params = decode(genome, config.bounds)
    layout = GridLayout()
    if connectivity is None:
        connectivity = build_connectivity(layout, config.model_kind, params.density,
                                          params.inhib_ratio, conn_rng)
    record = simulate(params, connectivity, config.eval_steps, dyn_rng,
                      warmup_steps=config.warmup_steps, step_seconds=config.step_seconds,
                      layout=layout)
    return connectivity, observed_record(record)


def evaluate_individual(ind: Individual, target: BinnedCounts, config: EvolutionConfig,
                        stream_key: tuple[int, int, int]) -> Individual:
    """Score one individual. Already-scored individuals (carried elites) pass through untouched."""
    if ind.fitness is not None:
        return ind
    conn, record = run_individual(ind.genome, config, stream_key, ind.connectivity)
    try:
        fitness = temporal_fitness(target, record_counts(record, config.bin_seconds))
    except UndefinedFitnessError:
        fitness = FitnessValue(math.inf)
    return replace(ind, connectivity=conn, fitness=fitness, stream_key=stream_key, record=record)


def _evaluate_star(args):
    return evaluate_individual(*args)


def evaluate_population(pop: list[Individual], target: BinnedCounts, config: EvolutionConfig,
                        trial: int = 0, generation: int = 0,
                        executor: Executor | None = None) -> list[Individual]:
    jobs = [(ind, target, config, (trial, generation, i)) for i, ind in enumerate(pop)]
    if executor is None:
        out = [_evaluate_star(j) for j in jobs]
    else:
        out = list(executor.map(_evaluate_star, jobs))
    n_bad = sum(1 for ind in out if math.isinf(ind.objective))
    if n_bad:
        log.warning("trial %d generation %d: %d individual(s) with undefined fitness ranked last",
                    trial, generation, n_bad)
    return out


def rank(pop: list[Individual]) -> list[Individual]:
    """Ascending objective, ties broken by lineage id."""
    if any(ind.fitness is None for ind in pop):
        raise ValidationError("cannot rank a population with unevaluated individuals")
    return sorted(pop, key=lambda ind: (ind.objective, ind.lineage_id))


def select_parents(pop: list[Individual], parent_fraction: float = 0.5) -> list[Individual]:
    n = max(1, int(math.floor(len(pop) * parent_fraction + 0.5)))
    return rank(pop)[:n]


def uniform_crossover(a: Genome, b: Genome, rng: np.random.Generator) -> Genome:
    take_a = rng.random(N_GENES) < 0.5
    return Genome(tuple(np.where(take_a, a.as_array(), b.as_array())))


def mutate(g: Genome, rng: np.random.Generator, p: float = 0.10) -> Genome:
    # both draws are always consumed so stream use does not depend on p
    hit = rng.random(N_GENES) < p
    fresh = rng.random(N_GENES)
    return Genome(tuple(np.where(hit, fresh, g.as_array())))


def next_generation(pop: list[Individual], config: EvolutionConfig, rng: np.random.Generator,
                    next_lineage: int) -> list[Individual]:
    """Elites copied verbatim (connectivity and fitness included), the rest bred from parents."""
    ranked = rank(pop)
    elites = ranked[:config.n_elites]
    parents = ranked[:config.n_parents]
    children = []
    for k in range(config.population_size - len(elites)):
        i, j = rng.integers(0, len(parents), size=2)
        genome = uniform_crossover(parents[i].genome, parents[j].genome, rng)
        genome = mutate(genome, rng, config.mutation_prob)
        children.append(Individual(genome, next_lineage + k))
    return list(elites) + children


def initial_population(config: EvolutionConfig, trial: int = 0) -> list[Individual]:
    rng = initial_rng(config.seed, trial)
    return [Individual(Genome(tuple(rng.random(N_GENES))), i) for i in range(config.population_size)]


def run_evolution(target: BinnedCounts, config: EvolutionConfig, trial: int = 0,
                  workers: int = 1,
                  on_generation: Callable[[int, list[Individual]], None] | None = None
                  ) -> EvolutionResult:
    """Evolve one trial: evaluate the initial population, then ``config.generations`` rounds."""
    expected = n_bins_for(config.window_seconds, config.bin_seconds)
    if target.n_bins != expected or target.bin_seconds != config.bin_seconds:
        raise ValidationError(
            f"target has {target.n_bins} bins of {target.bin_seconds} s; "
            f"config expects {expected} bins of {config.bin_seconds} s"
        )
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    objective, lineage, best = [], [], []
    try:
        pop = evaluate_population(initial_population(config, trial), target, config, trial, 0, executor)
        next_lineage = config.population_size
        for gen in range(config.generations + 1):
            if gen > 0:
                pop = next_generation(pop, config, breeding_rng(config.seed, trial, gen), next_lineage)
                next_lineage += config.population_size
                pop = evaluate_population(pop, target, config, trial, gen, executor)
            objective.append([ind.objective for ind in pop])
            lineage.append([ind.lineage_id for ind in pop])
            best.append(rank(pop)[0])
            log.info("trial %d generation %d: best f = %.4f", trial, gen, best[-1].objective)
            if on_generation is not None:
                on_generation(gen, pop)
    finally:
        if executor is not None:
            executor.shutdown()
    return EvolutionResult(trial, config, np.array(objective, dtype=float),
                           np.array(lineage, dtype=np.int64), best)


def synthetic_target(genome: Genome, config: EvolutionConfig,
                     stream_key: tuple[int, int, int] = (999, 0, 0)) -> tuple[BinnedCounts, SpikeRecord]:
    """Simulate a known genome over the evaluation window and bin it as a target.

    The default stream key lies outside any trial index a run would use, so
    the evolved individuals never replay the target's own noise.
    """
    _, record = run_individual(genome, config, stream_key)
    return record_counts(record, config.bin_seconds), record
