"""Genetic algorithm over clustering vectors.

The chromosome is the clustering vector itself, with seed nodes frozen at
their clusters. Operators:

* graph-based initialization: clusters spread outward from the seeds in
  breadth-first order, each node copying a cluster from an assigned
  neighbour;
* roulette-wheel selection on ``worst - fitness`` (fitness is minimized);
* dispersive (uniform) crossover;
* graph-based mutation: a gene may only move to a cluster that currently
  hosts one of the node's neighbours.

Population-level operators work on ``(population, n_nodes)`` integer arrays;
the single-chromosome functions are thin wrappers over them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cost import (BatchEvaluator, ClusteringScheme, CostBreakdown, CostProfile, FitnessParams,
                   SchemeLike, _as_array, evaluate)
from .graph import ProcessingGraph

IMPROVEMENT_EPS = 1e-12


class SeedMutationError(ValueError):
    pass


class UnreachableNodeError(ValueError):
    pass


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 20
    mutation_prob: float = 0.4
    max_generations: int = 500
    stall_generations: int = 100
    elitism: int = 1
    rng_seed: int = 0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0 <= self.elitism < self.population_size:
            raise ValueError("elitism must lie in [0, population_size)")
        if not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if self.max_generations < 1 or self.stall_generations < 1:
            raise ValueError("max_generations and stall_generations must be >= 1")


@dataclass(frozen=True)
class Individual:
    scheme: ClusteringScheme
    breakdown: CostBreakdown

    @property
    def fitness(self) -> float:
        return self.breakdown.fitness


@dataclass
class GaResult:
    best: Individual
    history: list[tuple[float, float]] = field(default_factory=list)
    generations_run: int = 0
    converged: bool = False


def allowed_mutation_set(graph: ProcessingGraph, scheme: SchemeLike, node: int) -> set[int]:
    """Clusters currently hosting at least one neighbour of ``node``."""
    if graph.nodes[node].is_seed:
        raise SeedMutationError(f"node {node} is a seed and cannot mutate")
    a = _as_array(scheme)
    return {int(a[j]) for j in graph.neighbors(node)}


def graph_based_init(graph: ProcessingGraph, rng: np.random.Generator) -> np.ndarray:
    a = graph.seed_values.copy()
    assigned = graph.seed_mask.copy()
    seen = assigned.copy()
    queue = deque(np.flatnonzero(assigned).tolist())
    while queue:
        v = queue.popleft()
        if not assigned[v]:
            options = sorted({int(a[u]) for u in graph.neighbors(v) if assigned[u]})
            a[v] = options[rng.integers(len(options))]
            assigned[v] = True
        for w in sorted(graph.neighbors(v)):
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    if not assigned.all():
        missing = np.flatnonzero(~assigned).tolist()
        raise UnreachableNodeError(f"nodes {missing} are not connected to any seed")
    return a


def roulette_weights(fitness: np.ndarray) -> np.ndarray:
    """Selection weights for a minimized fitness: ``worst - f + eps``."""
    f = np.asarray(fitness, dtype=float)
    worst, best = f.max(), f.min()
    eps = 1e-9 * (worst - best + 1.0)
    return worst - f + eps


def select_indices(fitness: np.ndarray, rng: np.random.Generator, size: int) -> np.ndarray:
    w = roulette_weights(fitness)
    return rng.choice(len(w), size=size, p=w / w.sum())


def roulette_select(population: Sequence[Individual], rng: np.random.Generator) -> Individual:
    if not population:
        raise ValueError("cannot select from an empty population")
    fitness = np.array([ind.fitness for ind in population])
    return population[int(select_indices(fitness, rng, 1)[0])]


def crossover_batch(graph: ProcessingGraph, parents_a: np.ndarray, parents_b: np.ndarray,
                    rng: np.random.Generator) -> np.ndarray:
    take_a = rng.random(parents_a.shape) < 0.5
    children = np.where(take_a, parents_a, parents_b)
    return np.where(graph.seed_mask, graph.seed_values, children)


def mutate_batch(graph: ProcessingGraph, schemes: np.ndarray, mutation_prob: float,
                 rng: np.random.Generator) -> np.ndarray:
    """Graph-based mutation of every row; allowed sets use the pre-mutation rows."""
    X = np.atleast_2d(schemes)
    k = graph.n_clusters
    hosts = X[..., None] == np.arange(k)
    present = np.einsum("ij,cjk->cik", graph.connection.astype(np.int64), hosts.astype(np.int64)) > 0
    counts = present.sum(axis=-1)
    mutate = (rng.random(X.shape) < mutation_prob) & ~graph.seed_mask & (counts > 0)
    pick = np.minimum((rng.random(X.shape) * counts).astype(np.int64), np.maximum(counts - 1, 0))
    choice = np.argmax(present.cumsum(axis=-1) > pick[..., None], axis=-1)
    return np.where(mutate, choice, X)


def dispersive_crossover(graph: ProcessingGraph, parent_a: SchemeLike, parent_b: SchemeLike,
                         rng: np.random.Generator) -> np.ndarray:
    a, b = _as_array(parent_a), _as_array(parent_b)
    return crossover_batch(graph, a[None], b[None], rng)[0]


def graph_based_mutation(graph: ProcessingGraph, scheme: SchemeLike, config: GaConfig | float,
                         rng: np.random.Generator) -> np.ndarray:
    prob = config.mutation_prob if isinstance(config, GaConfig) else float(config)
    return mutate_batch(graph, _as_array(scheme)[None], prob, rng)[0]


def run_ga(graph: ProcessingGraph, profile: CostProfile, params: FitnessParams,
           config: GaConfig = GaConfig(), evaluator: Optional[BatchEvaluator] = None) -> GaResult:
    rng = np.random.default_rng(config.rng_seed)
    evaluator = evaluator or BatchEvaluator(graph, profile, params)
    size = config.population_size
    pop = np.stack([graph_based_init(graph, rng) for _ in range(size)])

    best_fit = np.inf
    best_scheme = pop[0]
    history: list[tuple[float, float]] = []
    stall = 0
    converged = False
    for gen in range(config.max_generations):
        fitness = evaluator(pop).fitness
        i = int(np.argmin(fitness))
        history.append((float(fitness[i]), float(fitness.mean())))
        if fitness[i] < best_fit - IMPROVEMENT_EPS:
            best_fit, best_scheme, stall = float(fitness[i]), pop[i].copy(), 0
        else:
            stall += 1
            if stall >= config.stall_generations:
                converged = True
                break
        if gen == config.max_generations - 1:
            break

        n_children = size - config.elitism
        elite = pop[np.argsort(fitness, kind="stable")[:config.elitism]]
        idx = select_indices(fitness, rng, 2 * n_children)
        children = crossover_batch(graph, pop[idx[:n_children]], pop[idx[n_children:]], rng)
        children = mutate_batch(graph, children, config.mutation_prob, rng)
        pop = np.concatenate([elite, children])

    scheme = ClusteringScheme(best_scheme)
    best = Individual(scheme, evaluate(graph, scheme, profile, params))
    return GaResult(best=best, history=history, generations_run=len(history), converged=converged)
