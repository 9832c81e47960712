"""Command line entry point: ``basesplit <subcommand> [flags]``.

Exit codes: 0 on success, 2 for invalid flags or input files, 3 when a
computation fails.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import experiments as ex
from .cost import NORMALIZATIONS, CostProfile, FitnessParams
from .fileformat import ScenarioFormatError, graph_to_dict, load_scenario, save_scenario
from .ga import GaConfig, run_ga
from .graph import GraphError, ProcessingGraph
from .oracle import exhaustive_optimum
from .scenario import ScenarioSpec, build_scenario

EXIT_USAGE = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common(p: argparse.ArgumentParser, alpha: Optional[float], delay: float, runs: int) -> None:
    p.add_argument("--scenario", type=Path, help="scenario JSON file (default: generated scenario)")
    p.add_argument("--cells", type=int, default=2, help="cells in the generated scenario")
    p.add_argument("--chains", type=int, default=2, help="processing chains per direction")
    p.add_argument("--comp", action="store_true", help="add CoMP links to the generated scenario")
    p.add_argument("--alpha", type=float, default=alpha)
    p.add_argument("--delay-bound", type=float, default=delay)
    p.add_argument("--runs", type=int, default=runs)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--population", type=int, default=GaConfig.population_size)
    p.add_argument("--generations", type=int, default=GaConfig.max_generations)
    p.add_argument("--stall", type=int, default=GaConfig.stall_generations)
    p.add_argument("--mutation-prob", type=float, default=GaConfig.mutation_prob)
    p.add_argument("--beta", type=float, default=10.0)
    p.add_argument("--normalization", choices=NORMALIZATIONS, default="shared")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent runs")
    p.add_argument("--out", type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="basesplit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="one GA optimization")
    _common(p, 0.1, 30.0, 1)

    p = sub.add_parser("sweep-alpha", help="GA runs over a grid of tradeoff coefficients")
    _common(p, None, 30.0, ex.DEFAULT_RUNS)
    p.add_argument("--alphas", type=_float_list, help="comma-separated grid (default 30 points in [0.01, 0.3])")

    p = sub.add_parser("sweep-delay", help="GA runs over a grid of delay bounds")
    _common(p, 0.01, 30.0, ex.DEFAULT_RUNS)
    p.add_argument("--delays", type=_float_list, help="comma-separated grid (default 1..20)")

    p = sub.add_parser("compare-comp", help="paired runs with and without CoMP links")
    _common(p, 0.05, 30.0, ex.DEFAULT_RUNS)

    p = sub.add_parser("oracle", help="exhaustive optimum for small graphs")
    _common(p, 0.1, 30.0, 1)
    p.add_argument("--restrict", action="store_true",
                   help="only consider seed clusters reachable from each node")
    p.add_argument("--cap", type=int, default=10**7)

    p = sub.add_parser("gen-scenario", help="write a generated scenario file")
    _common(p, None, 30.0, 1)
    p.add_argument("--link-scale", type=float, default=1.0)
    return parser


def _validate(args) -> None:
    if args.alpha is not None and not 0.0 <= args.alpha <= 1.0:
        raise UsageError(f"--alpha must lie in [0, 1], got {args.alpha}")
    for a in getattr(args, "alphas", None) or []:
        if not 0.0 <= a <= 1.0:
            raise UsageError(f"alpha grid value {a} outside [0, 1]")
    bounds = [args.delay_bound] + list(getattr(args, "delays", None) or [])
    if any(not d > 0 for d in bounds):
        raise UsageError("delay bounds must be > 0")
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    if not args.beta > 1:
        raise UsageError("--beta must be > 1")
    if args.cells < 1 or args.chains < 1:
        raise UsageError("--cells and --chains must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        GaConfig(population_size=args.population, mutation_prob=args.mutation_prob,
                 max_generations=args.generations, stall_generations=args.stall)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _graph(args) -> ProcessingGraph:
    if args.scenario is not None:
        return load_scenario(args.scenario)
    return build_scenario(ScenarioSpec(args.cells, args.chains, args.comp,
                                       getattr(args, "link_scale", 1.0)))


def _options(args) -> ex.RunOptions:
    ga = GaConfig(population_size=args.population, mutation_prob=args.mutation_prob,
                  max_generations=args.generations, stall_generations=args.stall)
    return ex.RunOptions(profile=CostProfile(), ga=ga, beta=args.beta,
                         normalization=args.normalization, master_seed=args.master_seed, jobs=args.jobs)


def _emit(doc: dict, out: Optional[Path]) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _breakdown_doc(graph, assignment, breakdown) -> dict:
    doc = dataclasses.asdict(breakdown)
    doc["path_delays"] = list(breakdown.path_delays)
    doc["max_path_delay"] = breakdown.max_path_delay
    doc["assignment"] = {graph.nodes[v].name: int(c) for v, c in enumerate(assignment)}
    return doc


def _write_outputs(out_dir: Path, prefix: str, files: dict[str, str]) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / f"{prefix}_{name}").write_text(text, encoding="utf-8")


def cmd_solve(args) -> None:
    graph = _graph(args)
    opts = _options(args)
    params = FitnessParams.for_graph(graph, opts.profile, args.alpha, args.delay_bound, args.beta,
                                     args.normalization)
    seed = ex.derive_seed(args.master_seed, "solve", 0, 0)
    result = run_ga(graph, opts.profile, params, dataclasses.replace(opts.ga, rng_seed=seed))
    doc = {"alpha": args.alpha, "delay_bound": args.delay_bound, "rng_seed": seed,
           "generations_run": result.generations_run, "converged": result.converged}
    doc.update(_breakdown_doc(graph, result.best.scheme.assignment, result.best.breakdown))
    _emit(doc, args.out)


def cmd_oracle(args) -> None:
    graph = _graph(args)
    profile = CostProfile()
    params = FitnessParams.for_graph(graph, profile, args.alpha, args.delay_bound, args.beta,
                                     args.normalization)
    scheme, breakdown = exhaustive_optimum(graph, profile, params, args.restrict, args.cap)
    doc = {"alpha": args.alpha, "delay_bound": args.delay_bound}
    doc.update(_breakdown_doc(graph, scheme.assignment, breakdown))
    _emit(doc, args.out)


def _sweep_files(graph, rows, key: str) -> tuple[dict[str, str], dict]:
    means = ex.point_means(rows)
    xs = [m[key] for m in means]
    summary = {
        "points": len(means),
        "runs_per_point": means[0]["runs"] if means else 0,
        "spearman_comp_total": ex.spearman(xs, [m["mean_comp_total"] for m in means]),
        "spearman_fh_total": ex.spearman(xs, [m["mean_fh_total"] for m in means]),
        "mean_office_fraction": [ex.office_fraction(graph, g) for g in ex.group_by_point(rows).values()],
    }
    files = {
        "rows.csv": ex.rows_csv(rows),
        "means.csv": ex.to_csv(means, list(means[0]) if means else []),
        "centralization.csv": ex.to_csv(ex.centralization_stats(graph, rows),
                                        ["alpha", "delay_bound", "node", "label", "kind", "p_cell_site"]),
    }
    return files, summary


def cmd_sweep_alpha(args) -> None:
    graph = _graph(args)
    alphas = args.alphas or ([args.alpha] if args.alpha is not None else list(ex.DEFAULT_ALPHAS))
    rows = ex.sweep_alpha(graph, alphas, args.runs, args.delay_bound, _options(args))
    files, summary = _sweep_files(graph, rows, "alpha")
    files["summary.json"] = json.dumps(summary, indent=2) + "\n"
    _write_outputs(args.out or Path("results"), "sweep_alpha", files)


def cmd_sweep_delay(args) -> None:
    graph = _graph(args)
    delays = args.delays or list(ex.DEFAULT_DELAYS)
    rows = ex.sweep_delay(graph, delays, args.alpha, args.runs, _options(args))
    files, summary = _sweep_files(graph, rows, "delay_bound")
    files["summary.json"] = json.dumps(summary, indent=2) + "\n"
    _write_outputs(args.out or Path("results"), "sweep_delay", files)


def cmd_compare_comp(args) -> None:
    paired = ex.compare_comp(args.cells, args.chains, args.alpha, args.delay_bound, args.runs, _options(args))
    fields = ["variant", "alpha", "delay_bound", "node", "label", "kind", "p_cell_site"]
    stats, rows, summary = [], [], {}
    for label, variant_rows in paired.items():
        graph = build_scenario(ScenarioSpec(args.cells, args.chains, label == "comp"))
        stats += [{"variant": label, **s} for s in ex.centralization_stats(graph, variant_rows)]
        rows += variant_rows
        summary[label] = {
            "office_fraction": ex.office_fraction(graph, variant_rows),
            **ex.point_means(variant_rows)[0],
        }
    summary["office_fraction_difference"] = summary["comp"]["office_fraction"] - summary["non-comp"]["office_fraction"]
    _write_outputs(args.out or Path("results"), "compare_comp", {
        "rows.csv": ex.rows_csv(rows),
        "centralization.csv": ex.to_csv(stats, fields),
        "summary.json": json.dumps(summary, indent=2) + "\n",
    })


def cmd_gen_scenario(args) -> None:
    if args.link_scale <= 0:
        raise UsageError("--link-scale must be > 0")
    graph = build_scenario(ScenarioSpec(args.cells, args.chains, args.comp, args.link_scale))
    if args.out is None:
        _emit(graph_to_dict(graph), None)
    else:
        save_scenario(graph, args.out)


COMMANDS = {
    "solve": cmd_solve,
    "sweep-alpha": cmd_sweep_alpha,
    "sweep-delay": cmd_sweep_delay,
    "compare-comp": cmd_compare_comp,
    "oracle": cmd_oracle,
    "gen-scenario": cmd_gen_scenario,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        COMMANDS[args.command](args)
    except (UsageError, ScenarioFormatError, GraphError) as exc:
        print(f"basesplit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - any computation failure maps to one exit code
        print(f"basesplit {args.command}: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return 0


if __name__ == "__main__":
    sys.exit(main())
