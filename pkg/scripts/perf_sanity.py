"""Time the desk-scale instances: TSP n=10, knapsack n=40, MCCAVP n=20 (K=3)."""

import argparse
import time

from modonet.problems import generate
from modonet.solver import SolveConfig, solve_instance

CASES = [
    ("tsp", 10, {}, SolveConfig(alg="coup")),
    ("knapsack", 40, {}, SolveConfig(filter=True)),
    ("mccavp", 20, {"M": 50, "delta": 0.5}, SolveConfig()),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--K", type=int, default=3)
    args = ap.parse_args()
    print(f"{'class':<9} {'n':>3} {'seed':>4} {'seconds':>8} {'|front|':>7} {'nodes':>7} {'labels':>9}")
    for problem, n, params, cfg in CASES:
        for seed in range(1, args.seeds + 1):
            inst = generate(problem, n, args.K, seed, **params)
            t0 = time.perf_counter()
            rep = solve_instance(inst, cfg)
            dt = time.perf_counter() - t0
            print(f"{problem:<9} {n:>3} {seed:>4} {dt:>8.2f} {len(rep.frontier):>7} {rep.nodes:>7} {rep.search.labels:>9}")


if __name__ == "__main__":
    main()
