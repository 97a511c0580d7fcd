"""Acceptance criteria 1-9, one test per criterion.

Each test records a ``criterion N: PASS|FAIL`` line that the terminal
summary prints at the end of the run (see conftest.py). Tolerances are the
module constants below.
"""

import itertools
import time
from functools import lru_cache

import numpy as np

from modonet.cli import main
from modonet.core import to_tuples
from modonet.network import validate
from modonet.oracle import brute_force_frontier
from modonet.problems import build_model, evaluate, generate, packing_example, read_instance
from modonet.recursion import compile_model
from modonet.search import solve
from modonet.solver import SolveConfig, solve_instance, to_canonical
from modonet.vpo import apply_vpos, local_arc_removal, prune_parallel_arcs, reduce_sweep, weight_shift

from conftest import FIXTURES, PACKING_FRONTIER

FIXTURE_SECONDS = 1.0  # per configuration
FUZZ_PER_CLASS = 100
FUZZ_SECONDS = 600.0  # criterion 4, whole corpus
COUPLING_INSTANCES = 20
PERF_SECONDS = 60.0  # criterion 7, per instance

ALGS = ("td", "bu", "coup")
VPO_SUBSETS = list(itertools.product((False, True), repeat=3))  # (reduce, prune, arc_removal)
BINARY = ("knapsack", "setcover", "setpack", "mccavp")

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])


def fuzz_params(problem: str, i: int) -> tuple[int, int]:
    """(n, K) for the i-th fuzz instance; cycles through every combination."""
    if problem == "tsp":
        return 5 + i % 4, 3 + (i // 4) % 2
    return 8 + i % 7, 2 + (i // 7) % 3


def fuzz_corpus(count: int = FUZZ_PER_CLASS):
    for problem in (*BINARY, "tsp"):
        for i in range(count):
            n, k = fuzz_params(problem, i)
            yield problem, i, generate(problem, n, k, seed=1000 + i)


def sizes(net):
    return net.num_nodes, net.num_arcs


# -- 1 -------------------------------------------------------------------------


def test_fixture_every_configuration():
    inst = read_instance(FIXTURES / "packing7.modo")
    failures, slowest = [], 0.0
    for alg, (red, pru, arc), filt in itertools.product(ALGS, VPO_SUBSETS, (False, True)):
        cfg = SolveConfig(alg=alg, reduce=red, prune=pru, arc_removal=arc, filter=filt)
        t0 = time.perf_counter()
        front = solve_instance(inst, cfg).frontier
        dt = time.perf_counter() - t0
        slowest = max(slowest, dt)
        if set(to_tuples(front)) != PACKING_FRONTIER or dt >= FIXTURE_SECONDS:
            failures.append((alg, red, pru, arc, filt, to_tuples(front), dt))
    record(1, not failures, f"{3 * 8 * 2} configurations, slowest {slowest * 1000:.1f} ms")
    assert not failures


# -- 2 -------------------------------------------------------------------------


def test_fixture_layer_sizes():
    net = compile_model(build_model(packing_example()))
    before = net.layer_sizes()
    reduce_sweep(net)
    prune_parallel_arcs(net)
    after, paths = net.layer_sizes(), net.count_paths()
    ok = before == [1, 2, 3, 2, 2, 3, 4, 1] and after == [1, 2, 3, 2, 2, 3, 2, 1] and paths == 14
    record(2, ok, f"compiled {before}, reduced {after}, {paths} paths")
    assert ok


# -- 3 -------------------------------------------------------------------------


def test_fixture_label_counts():
    net = compile_model(build_model(packing_example()))
    reduce_sweep(net)
    prune_parallel_arcs(net)
    net = net.compact()
    coup = solve(net, "coup", meet_layer=5)
    td, bu = solve(net, "td"), solve(net, "bu")
    ok = coup.labels_coupled == 25 and td.labels == 36 and bu.labels == 36
    ok = ok and all(set(to_tuples(r.frontier)) == PACKING_FRONTIER for r in (coup, td, bu))
    record(3, ok, f"coupled {coup.labels_coupled}, top-down {td.labels}, bottom-up {bu.labels}")
    assert ok


# -- 4 and 5 -------------------------------------------------------------------


@lru_cache(maxsize=1)
def fuzz_outcome():
    """Solver vs oracle over the corpus, plus per-VPO invariance checks."""
    mismatches, vpo_failures = [], []
    runs = 0
    t0 = time.perf_counter()
    vpo_seconds = 0.0
    for problem, i, inst in fuzz_corpus():
        want = to_canonical(brute_force_frontier(inst), inst.sense)
        model = build_model(inst)
        comparator = model if model.node_dominates is not None else None
        base = compile_model(model)
        for red, pru, arc in VPO_SUBSETS:
            net = base.copy()
            apply_vpos(net, reduce=red, prune=pru, arc_removal=arc)
            work = net.compact()
            for alg, filt in itertools.product(ALGS, (False, True)):
                res = solve(work, alg, comparator=comparator if filt else None)
                runs += 1
                if not np.array_equal(res.frontier, want):
                    mismatches.append((problem, i, alg, red, pru, arc, filt))
        v0 = time.perf_counter()
        vpo_failures.extend(check_vpo_invariance(problem, i, base, want))
        vpo_seconds += time.perf_counter() - v0
    elapsed = time.perf_counter() - t0 - vpo_seconds
    return mismatches, runs, elapsed, vpo_failures


def check_vpo_invariance(problem, i, base, want):
    failures = []
    before = sorted(to_tuples(base.all_path_weights()))
    if not np.array_equal(base.enumerated_frontier(), want):
        failures.append((problem, i, "compiled"))
    n0, a0 = sizes(base)

    shifted = base.copy()
    for u in range(len(shifted.node_layer)):
        if u in (shifted.root, shifted.terminal):
            continue
        out = shifted.out_arcs(u)
        weight_shift(shifted, u, shifted.arc_weight[out].min(axis=0))
    if sorted(to_tuples(shifted.all_path_weights())) != before or sizes(shifted) != (n0, a0):
        failures.append((problem, i, "weight_shift"))

    for name, op in (("reduce_sweep", reduce_sweep), ("prune_parallel_arcs", prune_parallel_arcs), ("local_arc_removal", local_arc_removal)):
        net = base.copy()
        op(net)
        n1, a1 = sizes(net)
        if not np.array_equal(net.enumerated_frontier(), want) or n1 > n0 or a1 > a0 or validate(net):
            failures.append((problem, i, name))
        if name == "reduce_sweep" and sorted(to_tuples(net.all_path_weights())) != before:
            failures.append((problem, i, "reduce_sweep multiset"))
    return failures


def test_oracle_equivalence_fuzz():
    mismatches, runs, elapsed, _ = fuzz_outcome()
    ok = not mismatches and elapsed < FUZZ_SECONDS
    record(4, ok, f"{5 * FUZZ_PER_CLASS} instances, {runs} solves, {len(mismatches)} mismatches, {elapsed:.0f} s")
    assert not mismatches, mismatches[:10]
    assert elapsed < FUZZ_SECONDS


def test_vpo_invariance():
    failures = fuzz_outcome()[3]
    record(5, not failures, f"{5 * FUZZ_PER_CLASS} instances x 4 operations, {len(failures)} failures")
    assert not failures, failures[:10]


# -- 6 -------------------------------------------------------------------------


def test_coupling_at_every_layer():
    failures, checked = [], 0
    corpus = list(fuzz_corpus(COUPLING_INSTANCES // 5))
    for problem, i, inst in corpus:
        net = compile_model(build_model(inst))
        reduce_sweep(net)
        net = net.compact()
        fronts = [solve(net, "coup", meet_layer=j).frontier for j in range(1, net.n + 2)]
        checked += len(fronts)
        want = to_canonical(brute_force_frontier(inst), inst.sense)
        if any(not np.array_equal(f, want) for f in fronts):
            failures.append((problem, i))
    record(6, not failures, f"{len(corpus)} instances, {checked} meeting layers")
    assert not failures


# -- 7 -------------------------------------------------------------------------


PERF_CASES = [
    ("tsp n=10 K=3 coup", "tsp", 10, 3, {}, SolveConfig(alg="coup")),
    ("knapsack n=40 K=3 filter", "knapsack", 40, 3, {}, SolveConfig(filter=True)),
    ("mccavp n=20 K=3 M=50 C=10", "mccavp", 20, 3, {"M": 50, "delta": 0.5}, SolveConfig()),
]


def test_desk_scale_performance():
    parts, ok = [], True
    for label, problem, n, k, params, cfg in PERF_CASES:
        inst = generate(problem, n, k, seed=1, **params)
        t0 = time.perf_counter()
        rep = solve_instance(inst, cfg)
        dt = time.perf_counter() - t0
        ok &= dt < PERF_SECONDS
        parts.append(f"{label}: {dt:.1f} s, |front|={len(rep.frontier)}")
    record(7, ok, "; ".join(parts))
    assert ok


# -- 8 -------------------------------------------------------------------------


def test_cli_determinism(tmp_path, capsys):
    ok = True
    cases = [("knapsack", 20), ("setcover", 25), ("setpack", 25), ("tsp", 8), ("mccavp", 14)]
    for problem, n in cases:
        files = []
        for rep in range(2):
            inst, front = tmp_path / f"{problem}{rep}.modo", tmp_path / f"{problem}{rep}.front"
            main(["gen", "--class", problem, "--n", str(n), "--K", "3", "--seed", "11", "-o", str(inst)])
            main(["solve", "--filter", "-i", str(inst), "-o", str(front)])
            files.append((inst.read_bytes(), front.read_bytes()))
        ok &= files[0] == files[1]
    capsys.readouterr()
    record(8, ok, f"{len(cases)} classes, instance and frontier files byte-identical")
    assert ok


# -- 9 -------------------------------------------------------------------------


def test_witness_soundness(tmp_path, capsys):
    bad, total = [], 0
    cases = [(p, 12, s) for p in BINARY for s in range(3)] + [("tsp", 7, s) for s in range(3)]
    cases.append(("example", 7, 0))
    for problem, n, seed in cases:
        path = tmp_path / f"{problem}{seed}.modo"
        if problem == "example":
            path = FIXTURES / "packing7.modo"
        else:
            main(["gen", "--class", problem, "--n", str(n), "--K", "3", "--seed", str(seed), "-o", str(path)])
        out = tmp_path / f"{problem}{seed}.front"
        main(["solve", "--recover", "-i", str(path), "-o", str(out)])
        inst = read_instance(path)
        lines = (tmp_path / f"{problem}{seed}.front.witness").read_text().splitlines()
        front = out.read_text().splitlines()[1:]
        if len(lines) != len(front):
            bad.append((problem, seed, "count"))
        for line in lines:
            point, x = line.split(" : ")
            ok, f = evaluate(inst, [int(v) for v in x.split()])
            total += 1
            if not ok or f != tuple(int(v) for v in point.split()):
                bad.append((problem, seed, line))
    capsys.readouterr()
    record(9, not bad, f"{total} witnesses over {len(cases)} instances")
    assert not bad
