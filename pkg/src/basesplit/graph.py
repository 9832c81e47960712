"""Weighted directed graphs of baseband processing functions.

Nodes are processing functions carrying a compute complexity, edges are
information flows carrying a bandwidth. Clusters are physical locations
(cell sites and central offices). A graph is validated and frozen on
construction; clustering state always lives outside of it.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

DEFAULT_PATH_CAP = 10_000


class GraphError(ValueError):
    """Base class for structural graph errors."""


class SelfCycleError(GraphError):
    pass


class DanglingReferenceError(GraphError):
    pass


class UnseededTerminalError(GraphError):
    pass


class PathExplosionError(GraphError):
    pass


class ClusterKind(str, enum.Enum):
    CELL_SITE = "CellSite"
    CENTRAL_OFFICE = "CentralOffice"


@dataclass(frozen=True)
class Cluster:
    id: int
    kind: ClusterKind
    label: str = ""

    @property
    def is_site(self) -> bool:
        return self.kind is ClusterKind.CELL_SITE


@dataclass(frozen=True)
class FunctionNode:
    id: int
    kind: str
    complexity: float
    seed_cluster: Optional[int] = None
    label: Optional[str] = None

    @property
    def is_seed(self) -> bool:
        return self.seed_cluster is not None

    @property
    def name(self) -> str:
        return self.label or f"{self.kind}#{self.id}"


@dataclass(frozen=True)
class FlowEdge:
    id: int
    src: int
    dst: int
    bandwidth: float
    comp_link: bool = False


class ProcessingGraph:
    """Immutable processing graph.

    Build instances with :func:`build_graph`; the constructor assumes its
    inputs were already validated.
    """

    __slots__ = (
        "nodes", "edges", "clusters", "paths", "connection",
        "_neighbors", "_seed_mask", "_seed_values",
    )

    def __init__(self, nodes, edges, clusters, paths, connection):
        self.nodes: tuple[FunctionNode, ...] = tuple(nodes)
        self.edges: tuple[FlowEdge, ...] = tuple(edges)
        self.clusters: tuple[Cluster, ...] = tuple(clusters)
        self.paths: tuple[tuple[int, ...], ...] = tuple(tuple(p) for p in paths)
        connection = np.array(connection, dtype=bool)
        connection.setflags(write=False)
        self.connection = connection
        self._neighbors = tuple(
            frozenset(np.flatnonzero(row).tolist()) for row in connection
        )
        mask = np.array([n.is_seed for n in self.nodes], dtype=bool)
        values = np.array([n.seed_cluster if n.is_seed else -1 for n in self.nodes], dtype=np.int64)
        mask.setflags(write=False)
        values.setflags(write=False)
        self._seed_mask = mask
        self._seed_values = values

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_clusters(self) -> int:
        return len(self.clusters)

    @property
    def seed_mask(self) -> np.ndarray:
        return self._seed_mask

    @property
    def seed_values(self) -> np.ndarray:
        """Seed cluster per node, -1 where the node is free."""
        return self._seed_values

    @property
    def free_nodes(self) -> list[int]:
        return [n.id for n in self.nodes if not n.is_seed]

    @property
    def site_clusters(self) -> list[int]:
        return [c.id for c in self.clusters if c.is_site]

    @property
    def office_clusters(self) -> list[int]:
        return [c.id for c in self.clusters if not c.is_site]

    def neighbors(self, node: int) -> frozenset[int]:
        return self._neighbors[node]

    def __eq__(self, other):
        if not isinstance(other, ProcessingGraph):
            return NotImplemented
        return (self.nodes, self.edges, self.clusters) == (other.nodes, other.edges, other.clusters)

    def __hash__(self):
        return hash((self.nodes, self.edges, self.clusters))

    def __repr__(self):
        return (f"ProcessingGraph(nodes={self.n_nodes}, edges={len(self.edges)}, "
                f"clusters={self.n_clusters}, paths={len(self.paths)})")


def _check_dense(ids: Iterable[int], what: str) -> None:
    ids = list(ids)
    if sorted(ids) != list(range(len(ids))):
        raise DanglingReferenceError(f"{what} ids must be dense 0..{len(ids) - 1}, got {ids}")


def _flow_adjacency(n_nodes: int, edges: Sequence[FlowEdge]) -> list[list[int]]:
    """Outbound neighbours over non-CoMP edges, sorted and deduplicated."""
    out: list[set[int]] = [set() for _ in range(n_nodes)]
    for e in edges:
        if not e.comp_link:
            out[e.src].add(e.dst)
    return [sorted(s) for s in out]


def terminals(n_nodes: int, edges: Sequence[FlowEdge]) -> tuple[list[int], list[int]]:
    """Sources and sinks of the flow (non-CoMP) subgraph.

    Nodes without any flow edge are neither; they do not start or end a chain.
    """
    has_in = [False] * n_nodes
    has_out = [False] * n_nodes
    for e in edges:
        if e.comp_link:
            continue
        has_out[e.src] = True
        has_in[e.dst] = True
    sources = [v for v in range(n_nodes) if has_out[v] and not has_in[v]]
    sinks = [v for v in range(n_nodes) if has_in[v] and not has_out[v]]
    return sources, sinks


def _enumerate(n_nodes, edges, cap):
    out = _flow_adjacency(n_nodes, edges)
    sources, sinks = terminals(n_nodes, edges)
    sink_set = set(sinks)
    paths: list[tuple[int, ...]] = []
    for s in sources:
        # iterative DFS; neighbours pushed in reverse so lower ids come first
        stack = [(s, (s,))]
        while stack:
            v, path = stack.pop()
            if v in sink_set:
                paths.append(path)
                if len(paths) > cap:
                    raise PathExplosionError(f"more than {cap} source-to-sink paths")
                continue
            on_path = set(path)
            for w in reversed(out[v]):
                if w not in on_path:
                    stack.append((w, path + (w,)))
    return paths


def enumerate_paths(graph: ProcessingGraph, cap: int = DEFAULT_PATH_CAP) -> list[tuple[int, ...]]:
    """All simple source-to-sink paths, CoMP links excluded, in lexicographic order."""
    return _enumerate(graph.n_nodes, graph.edges, cap)


def build_graph(
    nodes: Sequence[FunctionNode],
    edges: Sequence[FlowEdge],
    clusters: Sequence[Cluster],
    path_cap: int = DEFAULT_PATH_CAP,
) -> ProcessingGraph:
    nodes = sorted(nodes, key=lambda n: n.id)
    edges = sorted(edges, key=lambda e: e.id)
    clusters = sorted(clusters, key=lambda c: c.id)
    _check_dense((n.id for n in nodes), "node")
    _check_dense((e.id for e in edges), "edge")
    _check_dense((c.id for c in clusters), "cluster")
    n, k = len(nodes), len(clusters)

    for node in nodes:
        if node.complexity < 0:
            raise GraphError(f"node {node.id} has negative complexity {node.complexity}")
        if node.seed_cluster is not None and not 0 <= node.seed_cluster < k:
            raise DanglingReferenceError(f"node {node.id} seeded to unknown cluster {node.seed_cluster}")
    for e in edges:
        if not (0 <= e.src < n and 0 <= e.dst < n):
            raise DanglingReferenceError(f"edge {e.id} references unknown node ({e.src}->{e.dst})")
        if e.src == e.dst:
            raise SelfCycleError(f"edge {e.id} is a self-cycle on node {e.src}")
        if e.bandwidth < 0:
            raise GraphError(f"edge {e.id} has negative bandwidth {e.bandwidth}")

    sources, sinks = terminals(n, edges)
    for v in sorted(set(sources) | set(sinks)):
        if nodes[v].seed_cluster is None:
            raise UnseededTerminalError(f"source/sink node {v} ({nodes[v].kind}) has no seed cluster")

    connection = np.zeros((n, n), dtype=bool)
    for e in edges:
        connection[e.src, e.dst] = connection[e.dst, e.src] = True

    paths = _enumerate(n, edges, path_cap)
    return ProcessingGraph(nodes, edges, clusters, paths, connection)


def neighbors(graph: ProcessingGraph, node: int) -> frozenset[int]:
    """Nodes linked to ``node`` by any edge, regardless of direction."""
    if not 0 <= node < graph.n_nodes:
        raise DanglingReferenceError(f"unknown node {node}")
    return graph.neighbors(node)


def home_sites(graph: ProcessingGraph) -> np.ndarray:
    """Nearest cell-site seed cluster for every node.

    Multi-source BFS from site-seeded nodes over non-CoMP edges (undirected);
    ties go to the smaller cluster id. Nodes that reach no site get -1.
    """
    adj: list[set[int]] = [set() for _ in range(graph.n_nodes)]
    for e in graph.edges:
        if not e.comp_link:
            adj[e.src].add(e.dst)
            adj[e.dst].add(e.src)
    dist = np.full(graph.n_nodes, -1, dtype=np.int64)
    home = np.full(graph.n_nodes, -1, dtype=np.int64)
    queue: deque[int] = deque()
    for node in graph.nodes:
        if node.is_seed and graph.clusters[node.seed_cluster].is_site:
            dist[node.id] = 0
            home[node.id] = node.seed_cluster
            queue.append(node.id)
    while queue:
        v = queue.popleft()
        for w in sorted(adj[v]):
            if dist[w] == -1:
                dist[w] = dist[v] + 1
                home[w] = home[v]
                queue.append(w)
            elif dist[w] == dist[v] + 1 and home[v] < home[w]:
                home[w] = home[v]
    return home
