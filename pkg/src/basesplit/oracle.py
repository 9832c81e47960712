"""Exhaustive search over clustering schemes for small graphs.

Used as ground truth for the genetic algorithm. Free nodes are enumerated
row-major in node-id order, so the enumeration runs in lexicographic order of
the full assignment vector and the first minimum found is also the
lexicographically smallest one.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

import numpy as np

from .cost import BatchEvaluator, ClusteringScheme, CostBreakdown, CostProfile, FitnessParams, evaluate
from .graph import ProcessingGraph

DEFAULT_CAP = 10**7
CHUNK = 1 << 15


class SearchSpaceTooLargeError(ValueError):
    pass


def candidate_clusters(graph: ProcessingGraph, restrict: bool = False) -> list[list[int]]:
    """Candidate clusters for each free node, in node-id order.

    With ``restrict`` a node may only join seed clusters present in its
    connected component.
    """
    free = graph.free_nodes
    if not restrict:
        return [list(range(graph.n_clusters)) for _ in free]
    comp = np.full(graph.n_nodes, -1)
    label = 0
    for start in range(graph.n_nodes):
        if comp[start] >= 0:
            continue
        stack = [start]
        comp[start] = label
        while stack:
            v = stack.pop()
            for w in graph.neighbors(v):
                if comp[w] < 0:
                    comp[w] = label
                    stack.append(w)
        label += 1
    seeds_in = {}
    for n in graph.nodes:
        if n.is_seed:
            seeds_in.setdefault(comp[n.id], set()).add(n.seed_cluster)
    return [sorted(seeds_in.get(comp[v], set())) for v in free]


def _chunks(it: Iterable[tuple[int, ...]], size: int):
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def exhaustive_optimum(graph: ProcessingGraph, profile: CostProfile, params: FitnessParams,
                       restrict: bool = False, cap: int = DEFAULT_CAP) -> tuple[ClusteringScheme, CostBreakdown]:
    choices = candidate_clusters(graph, restrict)
    space = math.prod(len(c) for c in choices)
    if space > cap:
        raise SearchSpaceTooLargeError(f"{space} assignments exceed the cap of {cap}")
    if space == 0:
        raise SearchSpaceTooLargeError("some free node has no candidate cluster")
    free = graph.free_nodes
    evaluator = BatchEvaluator(graph, profile, params)
    base = graph.seed_values.copy()

    best_fit, best = np.inf, None
    for block in _chunks(itertools.product(*choices), CHUNK):
        A = np.tile(base, (len(block), 1))
        if free:
            A[:, free] = block
        fit = evaluator(A).fitness
        i = int(np.argmin(fit))
        # strict comparison keeps the earlier (lexicographically smaller) scheme on ties
        if fit[i] < best_fit:
            best_fit, best = fit[i], A[i].copy()
    scheme = ClusteringScheme(best)
    return scheme, evaluate(graph, scheme, profile, params)


def pareto_sweep(graph: ProcessingGraph, profile: CostProfile, params_base: FitnessParams,
                 alphas: Sequence[float], restrict: bool = False,
                 cap: int = DEFAULT_CAP) -> list[tuple[float, CostBreakdown]]:
    """Exact optimum of the scalarized objective for each ``alpha``, in input order."""
    out = []
    for alpha in alphas:
        _, breakdown = exhaustive_optimum(graph, profile, params_base.with_alpha(alpha), restrict, cap)
        out.append((float(alpha), breakdown))
    return out
