"""Dynamic Erdős–Rényi graphs: subgraph count processes and their Gaussian limits."""

from .config import ConfigError, RunConfig
from .edge_process import EdgeDynamics, FlipBatch, Trajectory, sample_flips, sample_trajectory
from .graphs import PRESETS, LabeledGraph, Pattern, automorphism_count, canonical_form
from .scaling import RegimeError, ScalingRegime, optimal_common_subgraphs, pairing_constant
from .simulator import CountSeries, GraphState, SimConfig, simulate_counts, simulate_many
from .stats import MomentAccumulator, compare_covariance
from .theory import exact_covariance, example_report, limiting_covariance

__all__ = [
    "ConfigError", "RunConfig", "EdgeDynamics", "FlipBatch", "Trajectory", "sample_flips",
    "sample_trajectory", "PRESETS", "LabeledGraph", "Pattern", "automorphism_count",
    "canonical_form", "RegimeError", "ScalingRegime", "optimal_common_subgraphs",
    "pairing_constant", "CountSeries", "GraphState", "SimConfig", "simulate_counts",
    "simulate_many", "MomentAccumulator", "compare_covariance", "exact_covariance",
    "example_report", "limiting_covariance",
]
