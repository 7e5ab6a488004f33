"""Benchmark over seeded topologies: mean, variance and std of CT and #POS."""
import argparse

from crpareto.bench import run_benchmark
from crpareto.config import RunConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="5,5,5", nargs="+",
                    help="M,N,K triples, e.g. 5,5,5 5,10,5")
    ap.add_argument("--q", type=int, default=10)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--time-budget", type=float, default=None)
    args = ap.parse_args()
    sizes = [args.sizes] if isinstance(args.sizes, str) else args.sizes
    for i, triple in enumerate(sizes):
        M, N, K = (int(x) for x in triple.split(","))
        cfg = RunConfig(M=M, N=N, K=K, q=args.q, time_budget=args.time_budget)
        report = run_benchmark(cfg, trials=args.trials, jobs=args.jobs)
        lines = report.format_table().splitlines()
        print("\n".join(lines if i == 0 else lines[1:]))


if __name__ == "__main__":
    main()
