"""Grid-size sweep: wall time of one topology as the number of grid intervals drops."""
import argparse

from crpareto.bench import format_sweep, gp_sweep, instance_problem
from crpareto.config import RunConfig
from crpareto.pareto import GridSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-M", type=int, default=5)
    ap.add_argument("-N", type=int, nargs="+", default=[5, 15])
    ap.add_argument("-K", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--qs", default="10,8,6,4,2")
    ap.add_argument("--time-budget", type=float, default=60.0, help="seconds per grid size")
    args = ap.parse_args()
    qs = [int(q) for q in args.qs.split(",")]
    for N in args.N:
        problem = instance_problem(RunConfig(seed=args.seed, M=args.M, N=N, K=args.K))
        print(format_sweep(gp_sweep(problem, qs, GridSpec(), args.time_budget), args.M, N, args.K))


if __name__ == "__main__":
    main()
