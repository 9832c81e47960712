"""Parameter sweeps, repeated runs and result tables.

Every run gets its own generator seed derived from the master seed, the
experiment id, the grid index and the run index. Paired experiments reuse
the experiment id so both variants see the same seeds.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import spearmanr

from .cost import CostProfile, FitnessParams
from .ga import GaConfig, run_ga
from .graph import ProcessingGraph
from .scenario import ScenarioSpec, build_scenario

DEFAULT_ALPHAS = tuple(float(a) for a in np.linspace(0.01, 0.3, 30))
DEFAULT_DELAYS = tuple(float(d) for d in range(1, 21))
DEFAULT_RUNS = 10

ROW_FIELDS = (
    "experiment_id", "alpha", "delay_bound", "comp_enabled", "run_index", "rng_seed",
    "comp_total", "fh_total", "comp_scaled", "fh_scaled", "penalty", "fitness",
    "max_path_delay", "assignment",
)


@dataclass(frozen=True)
class SweepRow:
    experiment_id: str
    alpha: float
    delay_bound: float
    comp_enabled: bool
    run_index: int
    rng_seed: int
    comp_total: float
    fh_total: float
    comp_scaled: float
    fh_scaled: float
    penalty: float
    fitness: float
    max_path_delay: float
    assignment: tuple[int, ...]
    grid_index: int = 0


@dataclass(frozen=True)
class RunOptions:
    """Everything shared by the runs of one experiment except alpha, bound and seed."""

    profile: CostProfile = CostProfile()
    ga: GaConfig = GaConfig()
    beta: float = 10.0
    normalization: str = "shared"
    master_seed: int = 0
    jobs: int = 1


def derive_seed(master_seed: int, experiment_id: str, grid_index: int, run_index: int) -> int:
    entropy = [master_seed & 0xFFFFFFFFFFFFFFFF, zlib.crc32(experiment_id.encode("utf-8")), grid_index, run_index]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def has_comp_links(graph: ProcessingGraph) -> bool:
    return any(e.comp_link for e in graph.edges)


def _run_one(task):
    graph, profile, params, config = task
    result = run_ga(graph, profile, params, config)
    return result.best.scheme.assignment, result.best.breakdown


def run_grid(graph: ProcessingGraph, experiment_id: str, points: Sequence[tuple[float, float]],
             runs: int, opts: RunOptions) -> list[SweepRow]:
    """One GA run per (point, run); ``points`` are ``(alpha, delay_bound)`` pairs."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    comp = has_comp_links(graph)
    tasks, meta = [], []
    for gi, (alpha, bound) in enumerate(points):
        params = FitnessParams.for_graph(graph, opts.profile, alpha, bound, opts.beta, opts.normalization)
        for ri in range(runs):
            seed = derive_seed(opts.master_seed, experiment_id, gi, ri)
            tasks.append((graph, opts.profile, params, dataclasses.replace(opts.ga, rng_seed=seed)))
            meta.append((gi, alpha, bound, ri, seed))
    if opts.jobs > 1:
        with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
            results = list(pool.map(_run_one, tasks, chunksize=max(1, len(tasks) // (4 * opts.jobs))))
    else:
        results = [_run_one(t) for t in tasks]
    rows = []
    for (gi, alpha, bound, ri, seed), (assignment, b) in zip(meta, results):
        rows.append(SweepRow(
            experiment_id=experiment_id, alpha=float(alpha), delay_bound=float(bound), comp_enabled=comp,
            run_index=ri, rng_seed=seed, comp_total=b.comp_total, fh_total=b.fh_total,
            comp_scaled=b.comp_scaled, fh_scaled=b.fh_scaled, penalty=b.penalty, fitness=b.fitness,
            max_path_delay=b.max_path_delay, assignment=assignment, grid_index=gi,
        ))
    return rows


def sweep_alpha(graph, alphas=DEFAULT_ALPHAS, runs=DEFAULT_RUNS, delay_bound=30.0,
                opts: RunOptions = RunOptions(), experiment_id="sweep-alpha") -> list[SweepRow]:
    return run_grid(graph, experiment_id, [(a, delay_bound) for a in alphas], runs, opts)


def sweep_delay(graph, delays=DEFAULT_DELAYS, alpha=0.01, runs=DEFAULT_RUNS,
                opts: RunOptions = RunOptions(), experiment_id="sweep-delay") -> list[SweepRow]:
    return run_grid(graph, experiment_id, [(alpha, d) for d in delays], runs, opts)


def compare_comp(n_cells=2, chains=2, alpha=0.05, delay_bound=30.0, runs=DEFAULT_RUNS,
                 opts: RunOptions = RunOptions()) -> dict[str, list[SweepRow]]:
    """Same seeds on the CoMP and non-CoMP variants of the generated scenario."""
    out = {}
    for label, comp in (("non-comp", False), ("comp", True)):
        graph = build_scenario(ScenarioSpec(n_cells, chains, comp))
        out[label] = run_grid(graph, "compare-comp", [(alpha, delay_bound)], runs, opts)
    return out


# summaries

def group_by_point(rows: Sequence[SweepRow]) -> dict[int, list[SweepRow]]:
    groups: dict[int, list[SweepRow]] = {}
    for r in rows:
        groups.setdefault(r.grid_index, []).append(r)
    return dict(sorted(groups.items()))


def point_means(rows: Sequence[SweepRow]) -> list[dict]:
    out = []
    for gi, group in group_by_point(rows).items():
        out.append({
            "alpha": group[0].alpha,
            "delay_bound": group[0].delay_bound,
            "runs": len(group),
            "mean_comp_total": float(np.mean([r.comp_total for r in group])),
            "mean_fh_total": float(np.mean([r.fh_total for r in group])),
            "mean_penalty": float(np.mean([r.penalty for r in group])),
            "mean_fitness": float(np.mean([r.fitness for r in group])),
        })
    return out


def centralization_stats(graph: ProcessingGraph, rows: Sequence[SweepRow]) -> list[dict]:
    """Probability that each free node sits at a cell site, per grid point."""
    site = np.array([c.is_site for c in graph.clusters])
    out = []
    for gi, group in group_by_point(rows).items():
        A = np.array([r.assignment for r in group])
        at_site = site[A].sum(axis=0)
        for v in graph.free_nodes:
            out.append({
                "alpha": group[0].alpha,
                "delay_bound": group[0].delay_bound,
                "node": v,
                "label": graph.nodes[v].name,
                "kind": graph.nodes[v].kind,
                "p_cell_site": int(at_site[v]) / len(group),
            })
    return out


def office_fraction(graph: ProcessingGraph, rows: Sequence[SweepRow]) -> float:
    """Mean fraction of free nodes placed at a central office."""
    office = np.array([not c.is_site for c in graph.clusters])
    free = graph.free_nodes
    if not free or not rows:
        return 0.0
    A = np.array([r.assignment for r in rows])[:, free]
    return float(office[A].mean())


def spearman(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    if len(x) < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return None
    return float(spearmanr(x, y)[0])


# CSV

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return " ".join(str(v) for v in value)
    return str(value)


def to_csv(records: Sequence, fields: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for rec in records:
        get = rec.get if isinstance(rec, dict) else (lambda k, rec=rec: getattr(rec, k))
        writer.writerow([_fmt(get(f)) for f in fields])
    return buf.getvalue()


def rows_csv(rows: Sequence[SweepRow]) -> str:
    return to_csv(rows, ROW_FIELDS)


def read_rows_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
