"""Command-line interface: gen, solve, verify, bench.

Exit codes: 0 success, 1 usage or input error, 2 verification mismatch,
3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from pathlib import Path

import numpy as np

from .core import format_frontier, parse_frontier, to_tuples
from .limits import MemoryLimitError, ResourceLimitError, TimeLimitError
from .oracle import brute_force_frontier
from .problems import CLASSES, format_instance, generate, read_instance
from .solver import SolveConfig, SolveReport, solve_instance

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_RESOURCE = 0, 1, 2, 3

CSV_COLUMNS = [
    "class", "n", "K", "seed", "alg", "filter", "time_ms", "frontier_size", "nodes", "arcs", "labels",
    "meet_layer", "shifts", "merges", "arcs_removed", "nodes_removed", "status",
]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alg", choices=["td", "bu", "coup"], default="coup")
    p.add_argument("--filter", action="store_true", help="label filtering when the class has a comparator")
    p.add_argument("--no-reduce", action="store_true")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--no-arc-removal", action="store_true")
    p.add_argument("--meet-layer", type=int, default=None)
    p.add_argument("--limit-sec", type=float, default=None)


def _config(args, recover: bool = False) -> SolveConfig:
    return SolveConfig(
        alg=args.alg,
        filter=args.filter,
        reduce=not args.no_reduce,
        prune=not args.no_prune,
        arc_removal=not args.no_arc_removal,
        meet_layer=args.meet_layer,
        recover=recover,
        time_limit=args.limit_sec,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modonet", description="Exact Pareto frontiers via network models.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--class", dest="problem", choices=CLASSES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--K", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--M", type=int, default=None, help="mccavp coefficient range [-M, M]")
    g.add_argument("--delta", type=str, default=None, help="mccavp cardinality ratio, C = floor(n * delta)")
    g.add_argument("--rows", type=int, default=None, help="setcover/setpack number of constraints")
    g.add_argument("--row-size", type=int, default=None, help="setcover/setpack ones per constraint")
    g.add_argument("-o", "--output", required=True)

    s = sub.add_parser("solve", help="compute the Pareto frontier of an instance")
    _add_pipeline_flags(s)
    s.add_argument("--recover", action="store_true", help="also write one witness per frontier point")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output", required=True)

    v = sub.add_parser("verify", help="compare the solver (or a frontier file) against brute force")
    _add_pipeline_flags(v)
    v.add_argument("-i", "--input", required=True)
    v.add_argument("--frontier", default=None, help="check this frontier file instead of solving")

    b = sub.add_parser("bench", help="run a benchmark suite and write CSV")
    b.add_argument("--suite", required=True, help="JSON suite description")
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--limit-sec", type=float, default=None, help="per-run time limit (overrides the suite)")
    b.add_argument("--limit-mb", type=int, default=None, help="per-run memory limit (overrides the suite)")
    return parser


# -- gen / solve / verify ----------------------------------------------------


def cmd_gen(args) -> int:
    params = {}
    if args.M is not None:
        params["M"] = args.M
    if args.delta is not None:
        params["delta"] = args.delta
    if args.rows is not None:
        params["rows"] = args.rows
    if args.row_size is not None:
        params["row_size"] = args.row_size
    inst = generate(args.problem, args.n, args.K, args.seed, **params)
    Path(args.output).write_text(format_instance(inst))
    return EXIT_OK


def stats_lines(report: SolveReport) -> str:
    r, st = report.search, report.stats
    meet = "-" if r.meet_layer is None else r.meet_layer
    return (
        f"labels_td={r.labels_td} labels_bu={r.labels_bu} labels_coupled={r.labels_coupled} "
        f"meet_layer={meet} time_ms={report.seconds * 1000:.1f}\n"
        f"nodes={report.nodes} arcs={report.arcs} compiled_nodes={report.compiled_nodes} "
        f"compiled_arcs={report.compiled_arcs} shifts={st.shifts_applied} merges={st.merges_applied} "
        f"arcs_removed={st.arcs_removed} nodes_removed={st.nodes_removed} filtered={r.filtered}\n"
    )


def format_witnesses(report: SolveReport) -> str:
    lines = []
    for point, x in zip(to_tuples(report.frontier), report.witnesses or []):
        lines.append(" ".join(map(str, point)) + " : " + " ".join(map(str, x)))
    return "\n".join(lines) + ("\n" if lines else "")


def cmd_solve(args) -> int:
    inst = read_instance(args.input)
    report = solve_instance(inst, _config(args, recover=args.recover))
    Path(args.output).write_text(format_frontier(report.frontier, inst.k))
    if args.recover:
        Path(args.output + ".witness").write_text(format_witnesses(report))
    sys.stdout.write(stats_lines(report))
    return EXIT_OK


def frontier_diff(got: np.ndarray, want: np.ndarray) -> tuple[list, list]:
    g, w = set(to_tuples(got)), set(to_tuples(want))
    return sorted(g - w), sorted(w - g)


def cmd_verify(args) -> int:
    inst = read_instance(args.input)
    want = brute_force_frontier(inst)
    if args.frontier is not None:
        got = parse_frontier(Path(args.frontier).read_text())
    else:
        got = solve_instance(inst, _config(args)).frontier
    extra, missing = frontier_diff(got, want)
    if not extra and not missing:
        print(f"PASS {len(want)} points")
        return EXIT_OK
    print(f"FAIL solver={len(got)} oracle={len(want)}")
    for p in extra:
        print("+ " + " ".join(map(str, p)))
    for p in missing:
        print("- " + " ".join(map(str, p)))
    return EXIT_MISMATCH


# -- bench -------------------------------------------------------------------


def load_suite(path) -> tuple[dict, list[dict]]:
    """Expand a JSON suite into one cell per (instance, alg, filter)."""
    path = Path(path)
    try:
        suite = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read suite {path}: {exc}") from exc
    if not isinstance(suite, dict) or not isinstance(suite.get("runs"), list):
        raise UsageError("suite must be an object with a 'runs' list")
    cells = []
    for i, run in enumerate(suite["runs"]):
        if not isinstance(run, dict):
            raise UsageError(f"run {i} is not an object")
        algs = run.get("algs", ["coup"])
        filters = run.get("filters", [False])
        flags = run.get("flags", {})
        unknown = set(flags) - {"reduce", "prune", "arc_removal", "meet_layer"}
        if unknown or any(a not in ("td", "bu", "coup") for a in algs):
            raise UsageError(f"run {i}: bad algs or flags")
        if "instance" in run:
            sources = [{"instance": str((path.parent / run["instance"]).resolve()) if not Path(run["instance"]).is_absolute() else run["instance"]}]
        else:
            try:
                problem, n, k = run["class"], int(run["n"]), int(run["K"])
            except (KeyError, TypeError, ValueError) as exc:
                raise UsageError(f"run {i}: needs class, n, K (or instance)") from exc
            if problem not in CLASSES:
                raise UsageError(f"run {i}: unknown class {problem!r}")
            sources = [{"class": problem, "n": n, "K": k, "seed": int(s), "params": run.get("params", {})} for s in run.get("seeds", [0])]
        for src in sources:
            for alg in algs:
                for filt in filters:
                    cells.append({**src, "alg": alg, "filter": bool(filt), "flags": flags})
    return suite, cells


def run_cell(cell: dict, limit_sec: float | None, limit_mb: int | None) -> dict:
    if limit_mb is not None:
        import resource

        _, hard = resource.getrlimit(resource.RLIMIT_AS)
        resource.setrlimit(resource.RLIMIT_AS, (limit_mb * 1024 * 1024, hard))
    row = {c: "" for c in CSV_COLUMNS}
    row.update(alg=cell["alg"], filter=int(cell["filter"]), status="solved")
    try:
        if "instance" in cell:
            inst = read_instance(cell["instance"])
        else:
            inst = generate(cell["class"], cell["n"], cell["K"], cell["seed"], **cell["params"])
            row["seed"] = cell["seed"]
        row.update({"class": inst.problem, "n": inst.n, "K": inst.k})
        flags = cell["flags"]
        cfg = SolveConfig(
            alg=cell["alg"],
            filter=cell["filter"],
            reduce=flags.get("reduce", True),
            prune=flags.get("prune", True),
            arc_removal=flags.get("arc_removal", True),
            meet_layer=flags.get("meet_layer"),
            time_limit=limit_sec,
        )
        report = solve_instance(inst, cfg)
        r, st = report.search, report.stats
        row.update(
            time_ms=f"{report.seconds * 1000:.1f}",
            frontier_size=len(report.frontier),
            nodes=report.nodes,
            arcs=report.arcs,
            labels=r.labels,
            meet_layer="" if r.meet_layer is None else r.meet_layer,
            shifts=st.shifts_applied,
            merges=st.merges_applied,
            arcs_removed=st.arcs_removed,
            nodes_removed=st.nodes_removed,
        )
    except TimeLimitError:
        row["status"] = "timeout"
    except (MemoryLimitError, MemoryError):
        row["status"] = "memout"
    except ResourceLimitError:
        row["status"] = "memout"
    finally:
        if limit_mb is not None:
            resource.setrlimit(resource.RLIMIT_AS, (hard, hard))
    return row


def _run_cell_args(args):
    return run_cell(*args)


def _run_isolated(args):
    """Run one cell in a fresh process so a hard memory failure only loses that cell."""
    try:
        with ProcessPoolExecutor(max_workers=1) as pool:
            return pool.submit(run_cell, *args).result()
    except BrokenProcessPool:
        cell = args[0]
        row = {c: "" for c in CSV_COLUMNS}
        row.update(alg=cell["alg"], filter=int(cell["filter"]), status="memout")
        if "class" in cell:
            row.update({"class": cell["class"], "n": cell["n"], "K": cell["K"], "seed": cell["seed"]})
        return row


def bench_workers() -> int:
    cap = os.environ.get("MODO_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise UsageError("MODO_THREADS must be an integer") from None
    return n


def cmd_bench(args) -> int:
    suite, cells = load_suite(args.suite)
    limit_sec = args.limit_sec if args.limit_sec is not None else suite.get("limit_sec")
    limit_mb = args.limit_mb if args.limit_mb is not None else suite.get("limit_mb")
    jobs = [(c, limit_sec, limit_mb) for c in cells]
    workers = min(bench_workers(), max(1, len(jobs)))
    if limit_mb is not None:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_isolated, jobs))
    elif workers == 1:
        rows = [_run_cell_args(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell_args, jobs))
    with open(args.output, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    solved = sum(r["status"] == "solved" for r in rows)
    print(f"{solved}/{len(rows)} runs solved")
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "solve": cmd_solve, "verify": cmd_verify, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"modonet: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except MemoryError:
        print("modonet: resource limit: out of memory", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ValueError, KeyError, OSError) as exc:
        print(f"modonet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
