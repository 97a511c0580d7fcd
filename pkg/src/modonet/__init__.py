"""Exact multiobjective discrete optimisation via layered network models."""

from .core import dominates, format_frontier, nd_filter, parse_frontier
from .network import Network, path_weight, validate
from .recursion import DpModel, compile_model, state_key
from .solver import SolveConfig, SolveReport, solve_instance

__all__ = [
    "DpModel",
    "Network",
    "SolveConfig",
    "SolveReport",
    "compile_model",
    "dominates",
    "format_frontier",
    "nd_filter",
    "parse_frontier",
    "path_weight",
    "solve_instance",
    "state_key",
    "validate",
]
