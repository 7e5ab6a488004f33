"""Solve the two bundled reference instances and print their Pareto fronts."""
import argparse
import time

from crpareto.io import load_problem
from crpareto.pareto import GridSpec, epsilon_constraint_solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=int, default=20)
    args = ap.parse_args()
    for name in ("table1a", "table1b"):
        problem = load_problem(name)
        start = time.perf_counter()
        front = epsilon_constraint_solve(problem, GridSpec(intervals=args.q))
        elapsed = time.perf_counter() - start
        print(f"{name}: {front.subproblems_total} subproblems, "
              f"{front.subproblems_infeasible} infeasible, {elapsed:.3f} s")
        for p in front.points:
            print("   ", ", ".join(f"{v:g}" for v in p.objectives))


if __name__ == "__main__":
    main()
