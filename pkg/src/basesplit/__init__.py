"""Placement of baseband processing functions between cell sites and a central office."""

from .cost import (BatchEvaluator, ClusteringScheme, CostBreakdown, CostProfile, FitnessParams,
                   compute_norms, computational_cost, evaluate, fronthauling_cost, path_delay)
from .ga import GaConfig, GaResult, Individual, run_ga
from .graph import (Cluster, ClusterKind, FlowEdge, FunctionNode, ProcessingGraph, build_graph,
                    enumerate_paths, neighbors)
from .oracle import exhaustive_optimum, pareto_sweep
from .scenario import ScenarioSpec, build_scenario, small_oracle_scenario

__version__ = "0.1.0"
