"""JSON scenario files.

Layout::

    {
      "clusters": [{"id": 0, "kind": "CellSite", "label": "site1"}, ...],
      "nodes":    [{"id": 0, "kind": "fft", "weight": 1.0,
                    "seed_cluster": 0, "label": "fft.1"}, ...],
      "edges":    [{"src": 0, "dst": 1, "weight": 0.45, "comp_link": false}, ...]
    }

``seed_cluster``, ``label`` and ``comp_link`` are optional. Edge ids are the
positions in the ``edges`` list. Unknown keys are rejected.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .graph import Cluster, ClusterKind, FlowEdge, FunctionNode, ProcessingGraph, build_graph


class ScenarioFormatError(ValueError):
    pass


_TOP = {"clusters", "nodes", "edges"}
_CLUSTER = ({"id", "kind"}, {"label"})
_NODE = ({"id", "kind", "weight"}, {"seed_cluster", "label"})
_EDGE = ({"src", "dst", "weight"}, {"comp_link"})


def _check_keys(obj: Any, keys, where: str) -> None:
    required, optional = keys
    if not isinstance(obj, dict):
        raise ScenarioFormatError(f"{where}: expected an object")
    missing = required - obj.keys()
    unknown = obj.keys() - required - optional
    if missing:
        raise ScenarioFormatError(f"{where}: missing keys {sorted(missing)}")
    if unknown:
        raise ScenarioFormatError(f"{where}: unknown keys {sorted(unknown)}")


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioFormatError(f"{where}: expected an integer, got {value!r}")
    return value


def _num(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioFormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def graph_from_dict(doc: dict) -> ProcessingGraph:
    if not isinstance(doc, dict):
        raise ScenarioFormatError("scenario document must be an object")
    unknown = doc.keys() - _TOP
    if unknown:
        raise ScenarioFormatError(f"unknown top-level keys {sorted(unknown)}")
    missing = _TOP - doc.keys()
    if missing:
        raise ScenarioFormatError(f"missing top-level keys {sorted(missing)}")

    clusters = []
    for i, c in enumerate(doc["clusters"]):
        _check_keys(c, _CLUSTER, f"clusters[{i}]")
        try:
            kind = ClusterKind(c["kind"])
        except ValueError:
            raise ScenarioFormatError(f"clusters[{i}]: unknown kind {c['kind']!r}") from None
        clusters.append(Cluster(_int(c["id"], f"clusters[{i}].id"), kind, str(c.get("label", ""))))

    nodes = []
    for i, n in enumerate(doc["nodes"]):
        _check_keys(n, _NODE, f"nodes[{i}]")
        seed = n.get("seed_cluster")
        nodes.append(FunctionNode(
            id=_int(n["id"], f"nodes[{i}].id"),
            kind=str(n["kind"]),
            complexity=_num(n["weight"], f"nodes[{i}].weight"),
            seed_cluster=None if seed is None else _int(seed, f"nodes[{i}].seed_cluster"),
            label=n.get("label"),
        ))

    edges = []
    for i, e in enumerate(doc["edges"]):
        _check_keys(e, _EDGE, f"edges[{i}]")
        comp = e.get("comp_link", False)
        if not isinstance(comp, bool):
            raise ScenarioFormatError(f"edges[{i}].comp_link: expected a boolean")
        edges.append(FlowEdge(i, _int(e["src"], f"edges[{i}].src"), _int(e["dst"], f"edges[{i}].dst"),
                              _num(e["weight"], f"edges[{i}].weight"), comp))

    return build_graph(nodes, edges, clusters)


def graph_to_dict(graph: ProcessingGraph) -> dict:
    nodes = []
    for n in graph.nodes:
        entry = {"id": n.id, "kind": n.kind, "weight": n.complexity}
        if n.seed_cluster is not None:
            entry["seed_cluster"] = n.seed_cluster
        if n.label is not None:
            entry["label"] = n.label
        nodes.append(entry)
    return {
        "clusters": [{"id": c.id, "kind": c.kind.value, "label": c.label} for c in graph.clusters],
        "nodes": nodes,
        "edges": [{"src": e.src, "dst": e.dst, "weight": e.bandwidth, "comp_link": e.comp_link}
                  for e in graph.edges],
    }


def load_scenario(path: Union[str, Path]) -> ProcessingGraph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read scenario file {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"{path}: invalid JSON ({exc})") from exc
    return graph_from_dict(doc)


def save_scenario(graph: ProcessingGraph, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(graph), indent=2) + "\n", encoding="utf-8")
