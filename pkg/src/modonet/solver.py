"""End-to-end pipeline: compile, reduce, search, optionally recover witnesses."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import lex_sorted
from .limits import Budget
from .network import Network
from .problems import Instance, build_model
from .recursion import compile_model
from .search import SearchResult, recover_all, solve
from .vpo import ReductionStats, apply_vpos


@dataclass
class SolveConfig:
    alg: str = "coup"
    filter: bool = False
    reduce: bool = True
    prune: bool = True
    arc_removal: bool = True
    delta: int = 2
    meet_layer: int | None = None
    recover: bool = False
    time_limit: float | None = None
    max_nodes: int = 50_000_000
    max_labels: int = 100_000_000


@dataclass
class SolveReport:
    frontier: np.ndarray  # original sense, lexicographically sorted
    search: SearchResult
    stats: ReductionStats
    compiled_nodes: int
    compiled_arcs: int
    nodes: int
    arcs: int
    seconds: float
    witnesses: list[list[int]] | None = None


def to_original(points: np.ndarray, sense: str) -> np.ndarray:
    return points if sense == "max" else lex_sorted(-points)


def to_canonical(points: np.ndarray, sense: str) -> np.ndarray:
    return points if sense == "max" else lex_sorted(-np.asarray(points, dtype=np.int64))


def solve_network(net: Network, cfg: SolveConfig, comparator=None, budget: Budget | None = None):
    """Apply the enabled reductions to ``net`` in place, then search it."""
    stats = apply_vpos(net, reduce=cfg.reduce, prune=cfg.prune, arc_removal=cfg.arc_removal, delta=cfg.delta)
    if budget is not None:
        budget.check_time()
    work = net.compact()
    res = solve(work, cfg.alg, comparator=comparator if cfg.filter else None, meet_layer=cfg.meet_layer, budget=budget)
    return work, stats, res


def solve_instance(inst: Instance, cfg: SolveConfig | None = None) -> SolveReport:
    cfg = cfg or SolveConfig()
    t0 = time.perf_counter()
    budget = Budget(max_nodes=cfg.max_nodes, max_labels=cfg.max_labels, time_limit=cfg.time_limit)
    model = build_model(inst)
    net = compile_model(model, budget)
    compiled_nodes, compiled_arcs = net.num_nodes, net.num_arcs
    # merged nodes may splice decisions from different states, so witnesses
    # come from a copy that only sees arc-deleting reductions
    spare = net.copy() if cfg.recover else None
    comparator = model if model.node_dominates is not None else None
    work, stats, res = solve_network(net, cfg, comparator, budget)
    witnesses = None
    if spare is not None:
        apply_vpos(spare, reduce=False, prune=cfg.prune, arc_removal=cfg.arc_removal, delta=cfg.delta)
        witnesses = recover_all(spare.compact(), res.frontier, model.decode)
    budget.check_time()
    frontier = to_original(res.frontier, inst.sense)
    if witnesses is not None and inst.sense == "min":
        # to_original re-sorts, so reorder witnesses to match
        order = np.lexsort((-res.frontier).T[::-1])
        witnesses = [witnesses[i] for i in order]
    return SolveReport(
        frontier=frontier,
        search=res,
        stats=stats,
        compiled_nodes=compiled_nodes,
        compiled_arcs=compiled_arcs,
        nodes=work.num_nodes,
        arcs=work.num_arcs,
        seconds=time.perf_counter() - t0,
        witnesses=witnesses,
    )
