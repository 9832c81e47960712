"""Computational cost, fronthauling cost, path delay and penalized fitness.

The scalar functions (:func:`computational_cost`, :func:`fronthauling_cost`,
:func:`path_delay`, :func:`evaluate`) follow the cost tables literally and are
the reference. :class:`BatchEvaluator` computes the same quantities for a
whole population at once and is what the optimizer uses in its inner loop.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .graph import ProcessingGraph, home_sites


class InvalidSchemeError(ValueError):
    pass


class DegenerateNormError(ValueError):
    pass


@dataclass(frozen=True)
class ClusteringScheme:
    """Cluster index per node (entry k belongs to node k)."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))

    def __len__(self):
        return len(self.assignment)

    def __getitem__(self, k):
        return self.assignment[k]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.int64)


SchemeLike = Union[ClusteringScheme, Sequence[int], np.ndarray]


def _as_array(scheme: SchemeLike) -> np.ndarray:
    if isinstance(scheme, ClusteringScheme):
        return scheme.as_array()
    return np.asarray(scheme, dtype=np.int64)


def check_scheme(graph: ProcessingGraph, scheme: SchemeLike) -> np.ndarray:
    a = _as_array(scheme)
    if a.shape != (graph.n_nodes,):
        raise InvalidSchemeError(f"scheme has shape {a.shape}, expected ({graph.n_nodes},)")
    if a.size and (a.min() < 0 or a.max() >= graph.n_clusters):
        raise InvalidSchemeError("scheme references an unknown cluster")
    bad = graph.seed_mask & (a != graph.seed_values)
    if bad.any():
        raise InvalidSchemeError(f"seed nodes moved: {np.flatnonzero(bad).tolist()}")
    return a


@dataclass(frozen=True)
class CostProfile:
    cell_site_comp_base: float = 2.0
    co_comp_cost: float = 0.0
    site_to_site_fh_base: float = 4.0
    site_to_co_fh_base: float = 2.0
    intra_cluster_fh_cost: float = 0.0
    co_delay: float = 0.0

    def __post_init__(self):
        for name in ("cell_site_comp_base", "site_to_site_fh_base", "site_to_co_fh_base"):
            if not getattr(self, name) > 1:
                raise ValueError(f"{name} must be > 1")


@dataclass(frozen=True)
class FitnessParams:
    alpha: float
    comp_norm: float
    fh_norm: float
    delay_bound: tuple[float, ...]
    beta: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "delay_bound", tuple(float(d) for d in self.delay_bound))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not self.beta > 1:
            raise ValueError(f"beta must be > 1, got {self.beta}")
        if any(not d > 0 for d in self.delay_bound):
            raise ValueError("delay bounds must be > 0")
        if not (self.comp_norm > 0 and self.fh_norm > 0):
            raise ValueError("normalization constants must be > 0")

    @classmethod
    def for_graph(cls, graph: ProcessingGraph, profile: CostProfile, alpha: float,
                  delay_bound: Union[float, Sequence[float], Mapping[int, float]] = 30.0,
                  beta: float = 10.0, normalization: str = "shared") -> "FitnessParams":
        """Params with norms computed from ``graph``; a scalar bound applies to every path."""
        comp_norm, fh_norm = compute_norms(graph, profile, normalization)
        n_paths = len(graph.paths)
        if isinstance(delay_bound, Mapping):
            bounds = tuple(delay_bound[p] for p in range(n_paths))
        elif np.ndim(delay_bound) == 0:
            bounds = (float(delay_bound),) * n_paths
        else:
            bounds = tuple(delay_bound)
            if len(bounds) != n_paths:
                raise ValueError(f"{len(bounds)} delay bounds for {n_paths} paths")
        return cls(alpha=alpha, comp_norm=comp_norm, fh_norm=fh_norm, delay_bound=bounds, beta=beta)

    def with_alpha(self, alpha: float) -> "FitnessParams":
        return replace(self, alpha=alpha)


@dataclass(frozen=True)
class CostBreakdown:
    comp_total: float
    fh_total: float
    comp_scaled: float
    fh_scaled: float
    path_delays: tuple[float, ...]
    penalty: float
    fitness: float

    @property
    def max_path_delay(self) -> float:
        return max(self.path_delays, default=0.0)


def _cluster_loads(graph: ProcessingGraph, a: np.ndarray) -> np.ndarray:
    gamma = np.array([n.complexity for n in graph.nodes])
    return np.bincount(a, weights=gamma, minlength=graph.n_clusters)


def computational_cost(graph: ProcessingGraph, scheme: SchemeLike, profile: CostProfile, cluster: int) -> float:
    """Cost of hosting the nodes assigned to ``cluster``.

    A cell site costs ``base ** load`` (so an empty site still costs 1); a
    central office costs a flat ``co_comp_cost``.
    """
    a = _as_array(scheme)
    if not graph.clusters[cluster].is_site:
        return float(profile.co_comp_cost)
    load = sum(n.complexity for n in graph.nodes if a[n.id] == cluster)
    return float(profile.cell_site_comp_base ** load)


def _pair_base(graph: ProcessingGraph, profile: CostProfile, i: int, j: int) -> float:
    if graph.clusters[i].is_site and graph.clusters[j].is_site:
        return profile.site_to_site_fh_base
    return profile.site_to_co_fh_base


def fronthauling_cost(graph: ProcessingGraph, scheme: SchemeLike, profile: CostProfile,
                      cluster_i: int, cluster_j: int) -> float:
    """Cost of the traffic crossing between two clusters, both directions pooled.

    A pair with no traffic costs nothing.
    """
    a = _as_array(scheme)
    pair = {cluster_i, cluster_j}
    total = sum(e.bandwidth for e in graph.edges if {int(a[e.src]), int(a[e.dst])} == pair)
    if total == 0:
        return 0.0
    if cluster_i == cluster_j:
        return float(profile.intra_cluster_fh_cost)
    return float(_pair_base(graph, profile, cluster_i, cluster_j) ** total)


def path_delay(graph: ProcessingGraph, scheme: SchemeLike, profile: CostProfile, path: Sequence[int]) -> float:
    a = _as_array(scheme)
    loads = _cluster_loads(graph, a)
    total = 0.0
    for v in path:
        k = a[v]
        if graph.clusters[k].is_site:
            total += graph.nodes[v].complexity * loads[k]
        else:
            total += profile.co_delay
    return float(total)


def evaluate(graph: ProcessingGraph, scheme: SchemeLike, profile: CostProfile, params: FitnessParams) -> CostBreakdown:
    a = _as_array(scheme)
    k = graph.n_clusters
    comp_total = sum(computational_cost(graph, a, profile, i) for i in range(k))
    fh_total = sum(fronthauling_cost(graph, a, profile, i, j) for i in range(k) for j in range(i, k))
    delays = tuple(path_delay(graph, a, profile, p) for p in graph.paths)
    penalty = sum(max(0.0, d - bound) for d, bound in zip(delays, params.delay_bound))
    comp_scaled = comp_total / params.comp_norm
    fh_scaled = fh_total / params.fh_norm
    fitness = params.alpha * comp_scaled + (1 - params.alpha) * fh_scaled + params.beta * penalty
    return CostBreakdown(
        comp_total=float(comp_total),
        fh_total=float(fh_total),
        comp_scaled=float(comp_scaled),
        fh_scaled=float(fh_scaled),
        path_delays=delays,
        penalty=float(penalty),
        fitness=float(fitness),
    )


def reference_schemes(graph: ProcessingGraph) -> dict[str, np.ndarray]:
    """The all-distributed and all-centralized placements.

    All-distributed puts every free node at its nearest cell site; nodes with
    no reachable site fall back to the first central office. All-centralized
    is omitted when the graph has no central office.
    """
    seeds = graph.seed_values
    offices = graph.office_clusters
    home = home_sites(graph)
    if offices:
        home = np.where(home < 0, offices[0], home)
    refs = {"distributed": np.where(graph.seed_mask, seeds, home)}
    if offices:
        refs["centralized"] = np.where(graph.seed_mask, seeds, offices[0])
    if (refs["distributed"] < 0).any():
        raise DegenerateNormError("some node has no site or office to be placed at")
    return refs


NORMALIZATIONS = ("shared", "separate")


def compute_norms(graph: ProcessingGraph, profile: CostProfile, mode: str = "shared") -> tuple[float, float]:
    """Scheme-independent (comp_norm, fh_norm) from the reference placements.

    The computational maximum is taken at the all-distributed placement and
    the fronthauling maximum over both references. ``"separate"`` divides
    each objective by its own maximum; ``"shared"`` divides both by the
    larger of the two, which keeps their relative magnitudes intact.
    """
    if mode not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {mode!r}, expected one of {NORMALIZATIONS}")
    refs = reference_schemes(graph)
    # only the raw totals are used, so any valid params will do
    dummy = FitnessParams(alpha=0.0, comp_norm=1.0, fh_norm=1.0, delay_bound=(1.0,) * len(graph.paths))
    totals = {name: evaluate(graph, a, profile, dummy) for name, a in refs.items()}
    comp_max = totals["distributed"].comp_total
    fh_max = max(b.fh_total for b in totals.values())
    if comp_max <= 0 or fh_max <= 0:
        raise DegenerateNormError(f"degenerate normalization: comp max {comp_max}, fh max {fh_max}")
    if mode == "shared":
        scale = max(comp_max, fh_max)
        return scale, scale
    return comp_max, fh_max


@dataclass
class BatchCosts:
    comp_total: np.ndarray
    fh_total: np.ndarray
    path_delays: np.ndarray
    penalty: np.ndarray
    fitness: np.ndarray


@dataclass
class BatchEvaluator:
    """Vectorized :func:`evaluate` over a ``(population, n_nodes)`` assignment array."""

    graph: ProcessingGraph
    profile: CostProfile
    params: FitnessParams
    _gamma: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g, p = self.graph, self.profile
        k = g.n_clusters
        self._gamma = np.array([n.complexity for n in g.nodes], dtype=float)
        self._is_site = np.array([c.is_site for c in g.clusters], dtype=bool)
        self._src = np.array([e.src for e in g.edges], dtype=np.int64)
        self._dst = np.array([e.dst for e in g.edges], dtype=np.int64)
        self._bw = np.array([e.bandwidth for e in g.edges], dtype=float)
        base = np.full((k, k), p.site_to_co_fh_base)
        base[np.ix_(self._is_site, self._is_site)] = p.site_to_site_fh_base
        self._fh_base = base.reshape(-1)
        upper = np.triu(np.ones((k, k), dtype=bool), 1).reshape(-1)
        self._upper = upper
        self._diag = np.eye(k, dtype=bool).reshape(-1)
        incidence = np.zeros((g.n_nodes, len(g.paths)))
        for q, path in enumerate(g.paths):
            incidence[list(path), q] = 1.0
        self._incidence = incidence
        self._bounds = np.asarray(self.params.delay_bound, dtype=float)

    def __call__(self, assignments: np.ndarray) -> BatchCosts:
        A = np.atleast_2d(np.asarray(assignments, dtype=np.int64))
        pop, _ = A.shape
        k = self.graph.n_clusters
        prof, par = self.profile, self.params
        rows = np.arange(pop)[:, None]

        loads = np.zeros((pop, k))
        np.add.at(loads, (np.broadcast_to(rows, A.shape), A), self._gamma)
        comp = np.where(self._is_site, prof.cell_site_comp_base ** loads, prof.co_comp_cost).sum(axis=1)

        if self._bw.size:
            a, b = A[:, self._src], A[:, self._dst]
            pair = np.minimum(a, b) * k + np.maximum(a, b)
            traffic = np.zeros((pop, k * k))
            np.add.at(traffic, (np.broadcast_to(rows, pair.shape), pair), self._bw)
            used = traffic > 0
            cross = np.where(used & self._upper, np.power(self._fh_base, traffic), 0.0)
            intra = np.where(used & self._diag, prof.intra_cluster_fh_cost, 0.0)
            fh = cross.sum(axis=1) + intra.sum(axis=1)
        else:
            fh = np.zeros(pop)

        node_load = np.take_along_axis(loads, A, axis=1)
        node_delay = np.where(self._is_site[A], self._gamma * node_load, prof.co_delay)
        delays = node_delay @ self._incidence
        penalty = np.clip(delays - self._bounds, 0.0, None).sum(axis=1)
        fitness = (par.alpha * (comp / par.comp_norm) + (1 - par.alpha) * (fh / par.fh_norm)
                   + par.beta * penalty)
        return BatchCosts(comp, fh, delays, penalty, fitness)
