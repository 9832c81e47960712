"""Simplified multi-cell baseband transceiver structure.

Each cell contributes a downlink chain set
``sourceDL -> code -> mod -> MIMOtx -> ifft -> radioTX`` and an uplink set
``radioRX -> fft -> MIMOrx -> demod -> decode -> sinkUL``, with one parallel
branch per chain between the shared (i)fft node and the data endpoint.
Radio front-ends are pinned to the cell's site; data source and sink are
pinned to the central office.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional

from .graph import Cluster, ClusterKind, FlowEdge, FunctionNode, ProcessingGraph, build_graph

NODE_WEIGHTS: Mapping[str, float] = MappingProxyType({
    "radioTX": 0.0,
    "radioRX": 0.0,
    "fft": 1.0,
    "ifft": 1.0,
    "MIMOtx": 0.5,
    "MIMOrx": 0.5,
    "mod": 0.1,
    "demod": 0.1,
    "code": 0.1,
    "decode": 2.0,
    "sourceDL": 0.0,
    "sinkUL": 0.0,
})

# Time-domain samples; 10% cyclic prefix/control overhead split over two chains.
RADIO_LINK = 1.0
SAMPLE_LINK = 0.45
# 30-bit complex sample -> 4-bit 16-QAM codeword.
CODEWORD_LINK = SAMPLE_LINK * 4 / 30
# Rate-1/2 channel code assumed.
INFO_LINK = CODEWORD_LINK / 2


@dataclass(frozen=True)
class ScenarioSpec:
    n_cells: int = 2
    chains_per_direction: int = 2
    comp_enabled: bool = False
    link_scale: float = 1.0

    def __post_init__(self):
        if self.n_cells < 1:
            raise ValueError(f"n_cells must be >= 1, got {self.n_cells}")
        if self.chains_per_direction < 1:
            raise ValueError(f"chains_per_direction must be >= 1, got {self.chains_per_direction}")
        if not self.link_scale > 0:
            raise ValueError(f"link_scale must be > 0, got {self.link_scale}")


class _Builder:
    def __init__(self, weights):
        self.weights = weights
        self.nodes: list[FunctionNode] = []
        self.edges: list[FlowEdge] = []
        self.by_label: dict[str, int] = {}

    def node(self, kind, label, seed=None):
        nid = len(self.nodes)
        self.nodes.append(FunctionNode(nid, kind, float(self.weights[kind]), seed, label))
        self.by_label[label] = nid
        return nid

    def edge(self, src, dst, weight, comp=False):
        self.edges.append(FlowEdge(len(self.edges), src, dst, float(weight), comp))


def build_scenario(spec: ScenarioSpec = ScenarioSpec(),
                   node_table: Optional[Mapping[str, float]] = None) -> ProcessingGraph:
    weights = dict(NODE_WEIGHTS)
    if node_table:
        weights.update(node_table)
    s = spec.link_scale
    n_cells, chains = spec.n_cells, spec.chains_per_direction
    co = n_cells
    clusters = [Cluster(c, ClusterKind.CELL_SITE, f"site{c + 1}") for c in range(n_cells)]
    clusters.append(Cluster(co, ClusterKind.CENTRAL_OFFICE, "CO"))

    b = _Builder(weights)
    for c in range(n_cells):
        cell = c + 1
        ks = range(1, chains + 1)
        # downlink
        src = b.node("sourceDL", f"sourceDL.{cell}", co)
        code = [b.node("code", f"code.{cell}.{k}") for k in ks]
        mod = [b.node("mod", f"mod.{cell}.{k}") for k in ks]
        mtx = [b.node("MIMOtx", f"MIMOtx.{cell}.{k}") for k in ks]
        ifft = b.node("ifft", f"ifft.{cell}")
        rtx = b.node("radioTX", f"radioTX.{cell}", c)
        for i in range(chains):
            b.edge(src, code[i], INFO_LINK * s)
            b.edge(code[i], mod[i], CODEWORD_LINK * s)
            b.edge(mod[i], mtx[i], SAMPLE_LINK * s)
            b.edge(mtx[i], ifft, SAMPLE_LINK * s)
        b.edge(ifft, rtx, RADIO_LINK * s)
        # uplink
        rrx = b.node("radioRX", f"radioRX.{cell}", c)
        fft = b.node("fft", f"fft.{cell}")
        mrx = [b.node("MIMOrx", f"MIMOrx.{cell}.{k}") for k in ks]
        demod = [b.node("demod", f"demod.{cell}.{k}") for k in ks]
        decode = [b.node("decode", f"decode.{cell}.{k}") for k in ks]
        sink = b.node("sinkUL", f"sinkUL.{cell}", co)
        b.edge(rrx, fft, RADIO_LINK * s)
        for i in range(chains):
            b.edge(fft, mrx[i], SAMPLE_LINK * s)
            b.edge(mrx[i], demod[i], SAMPLE_LINK * s)
            b.edge(demod[i], decode[i], CODEWORD_LINK * s)
            b.edge(decode[i], sink, INFO_LINK * s)

    if spec.comp_enabled and n_cells >= 2:
        tx_chain = min(2, chains)
        rx_chain = 1
        for c in range(n_cells):
            nxt = (c + 1) % n_cells
            b.edge(b.by_label[f"MIMOtx.{c + 1}.{tx_chain}"], b.by_label[f"MIMOtx.{nxt + 1}.{tx_chain}"],
                   SAMPLE_LINK * s, comp=True)
        for c in range(n_cells):
            nxt = (c + 1) % n_cells
            b.edge(b.by_label[f"MIMOrx.{c + 1}.{rx_chain}"], b.by_label[f"MIMOrx.{nxt + 1}.{rx_chain}"],
                   SAMPLE_LINK * s, comp=True)

    return build_graph(b.nodes, b.edges, clusters)


def small_oracle_scenario() -> ProcessingGraph:
    """One cell, one chain each way: 8 free nodes over 2 clusters."""
    return build_scenario(ScenarioSpec(n_cells=1, chains_per_direction=1))
