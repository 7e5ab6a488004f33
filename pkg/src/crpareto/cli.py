"""Command-line interface: ``crpareto {generate,solve,oracle,benchmark}``.

Exit codes: 0 success, 1 usage/config error, 2 verification failure,
3 budget exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bench
from .config import RunConfig
from .errors import BudgetExceeded, ConfigError
from .io import instance_to_json, load_problem, front_to_csv, front_to_json, read_front_csv
from .network import build_channel_model
from .pareto import BRUTE_FORCE_BUDGET, brute_force_front, epsilon_constraint_solve
from .problem import Allocation, build_problem, is_feasible, reward_vector

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3
MATCH_TOL = 1e-6


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _q_arg(text: str):
    parts = [int(p) for p in text.split(",") if p.strip()]
    if not parts:
        raise argparse.ArgumentTypeError("expected an integer or comma-separated integers")
    return parts[0] if len(parts) == 1 else tuple(parts)


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("instance")
    g.add_argument("--config", help="YAML config file (flags override it)")
    g.add_argument("--seed", type=int)
    g.add_argument("--area-side", type=float, dest="area_side")
    g.add_argument("-K", type=int, dest="K", help="number of primary users")
    g.add_argument("-N", type=int, dest="N", help="number of secondary users")
    g.add_argument("-M", type=int, dest="M", help="number of channels")
    g.add_argument("--d-min", type=float, dest="d_min")
    g.add_argument("--d-max", type=float, dest="d_max")
    g.add_argument("--dp-range", type=float, nargs=2, dest="protection_radius_range",
                   metavar=("LO", "HI"), help="protection radius interval (km)")
    g.add_argument("--c-max", type=int, dest="c_max", help="radio interface limit")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--q", type=_q_arg, help="grid intervals, one value or one per constrained user")
    g.add_argument("--epsilon", type=float)
    g.add_argument("--main-user", type=int, dest="main_user", help="main objective (1-based)")
    g.add_argument("--workers", type=int, help="parallel sweep workers")
    g.add_argument("--time-budget", type=float, dest="time_budget", help="seconds")


_CONFIG_KEYS = ("seed", "area_side", "K", "N", "M", "d_min", "d_max", "protection_radius_range",
                "c_max", "q", "epsilon", "main_user", "workers", "time_budget", "trials", "jobs")


def _config(args) -> RunConfig:
    overrides = {k: getattr(args, k, None) for k in _CONFIG_KEYS}
    if getattr(args, "config", None):
        return RunConfig.from_file(args.config, **overrides)
    return RunConfig(**{k: v for k, v in overrides.items() if v is not None})


def _problem(args, cfg: RunConfig):
    if getattr(args, "instance", None):
        return load_problem(args.instance, cfg.c_max)
    return bench.instance_problem(cfg)


def cmd_generate(args) -> int:
    cfg = _config(args)
    top = cfg.topology()
    model = build_channel_model(top)
    text = instance_to_json(model, top, cfg.c_max)
    if args.out:
        Path(args.out).write_text(text)
        report = sys.stdout
    else:
        sys.stdout.write(text)
        report = sys.stderr
    N, M = model.num_users, model.num_channels
    if N == 0:
        print("warning: no secondary users; the channel model is empty", file=sys.stderr)
    density = float(model.availability.mean()) if N and M else 0.0
    conflicts = int(np.triu(model.conflict.transpose(2, 0, 1), 1).sum())
    print(f"seed={cfg.seed} N={N} M={M} K={len(top.pus)} availability={density:.3f} "
          f"conflict_pairs={conflicts}", file=report)
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _config(args)
    problem = _problem(args, cfg)
    if problem.num_users < 2:
        print(f"error: the instance has {problem.num_users} user(s); a multi-objective "
              "front needs at least two users (one objective per user)", file=sys.stderr)
        return EXIT_USAGE
    spec = cfg.grid_spec()
    front = epsilon_constraint_solve(problem, spec, workers=cfg.workers,
                                     time_budget=cfg.time_budget)
    if args.csv:
        Path(args.csv).write_text(front_to_csv(front, *problem.shape))
    if args.json:
        Path(args.json).write_text(front_to_json(front, spec))
    reused = front.subproblems_total - front.subproblems_solved
    print(f"pareto points: {len(front.points)}")
    print(f"subproblems: {front.subproblems_total} total, {front.subproblems_solved} searched, "
          f"{reused} settled by reuse, {front.subproblems_infeasible} infeasible")
    print(f"dominated points filtered: {front.filtered}")
    print(f"wall time: {front.elapsed:.3f} s")
    for pt in front.points:
        print("  " + "  ".join(f"{v:.4f}" for v in pt.objectives))
    if args.stats:
        s = front.stats
        print(f"search: {s.solves} solves, {s.nodes} nodes, {s.prunes} prunes, "
              f"{s.incumbents} incumbents", file=sys.stderr)
    return EXIT_OK


def _contains(vectors: np.ndarray, v) -> bool:
    if vectors.size == 0:
        return False
    return bool(np.any(np.all(np.abs(vectors - np.asarray(v)) <= MATCH_TOL, axis=1)))


def cmd_oracle(args) -> int:
    cfg = _config(args)
    problem = _problem(args, cfg)
    oracle = brute_force_front(problem, budget=args.budget)
    truth = oracle.vectors().reshape(-1, problem.num_users)

    if args.front:
        vecs, assigns = read_front_csv(args.front)
        bad_witness = [
            v for v, a in zip(vecs, assigns)
            if a.shape != problem.shape or not is_feasible(problem, Allocation(a))
            or np.max(np.abs(reward_vector(problem, Allocation(a)) - v), initial=0) > MATCH_TOL
        ]
        source = args.front
    else:
        front = epsilon_constraint_solve(problem, cfg.grid_spec(), workers=cfg.workers)
        vecs = [pt.objectives for pt in front.points]
        bad_witness = []
        source = "epsilon-constraint"
    found = np.array(vecs, dtype=float).reshape(-1, problem.num_users)

    extra = [v for v in vecs if not _contains(truth, v)]
    missed = [tuple(v) for v in truth if not _contains(found, v)]
    print(f"oracle front: {len(truth)} points; {source}: {len(vecs)} points")
    for v in extra:
        print("  not in oracle front: " + "  ".join(f"{x:.6g}" for x in v))
    for v in bad_witness:
        print("  witness does not reproduce point: " + "  ".join(f"{x:.6g}" for x in v))
    for v in missed:
        print("  oracle point not found: " + "  ".join(f"{x:.6g}" for x in v))
    if extra or bad_witness:
        print("FAIL: front is not a subset of the oracle front")
        return EXIT_VERIFY
    print("OK: front is a subset of the oracle front")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    cfg = _config(args)
    if args.q_sweep:
        problem = bench.instance_problem(cfg)
        entries = bench.gp_sweep(problem, args.q_sweep, cfg.grid_spec(), cfg.time_budget)
        print(bench.format_sweep(entries, cfg.M, cfg.N, cfg.K))
        return EXIT_OK
    report = bench.run_benchmark(cfg)
    if args.records_csv:
        Path(args.records_csv).write_text(report.records_csv())
    if args.report_json:
        Path(args.report_json).write_text(report.to_json())
    print(f"trials: {report.trials} (seeds {cfg.seed}..{cfg.seed + report.trials - 1}), q={cfg.q}")
    print(report.format_table())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crpareto", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="generate a random instance")
    _add_instance_flags(p)
    p.add_argument("--out", help="instance JSON path (default: stdout)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="epsilon-constraint Pareto front")
    _add_instance_flags(p)
    _add_solver_flags(p)
    p.add_argument("--instance", help="instance/problem JSON, or table1a / table1b")
    p.add_argument("--csv", help="write the front as CSV")
    p.add_argument("--json", help="write the full result as JSON")
    p.add_argument("--stats", action="store_true", help="print search statistics")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="check a front against brute-force enumeration")
    _add_instance_flags(p)
    _add_solver_flags(p)
    p.add_argument("--instance", help="instance/problem JSON, or table1a / table1b")
    p.add_argument("--front", help="front CSV to check instead of running the solver")
    p.add_argument("--budget", type=int, default=BRUTE_FORCE_BUDGET,
                   help="max number of binary variables to enumerate")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("benchmark", help="timing and front-size statistics")
    _add_instance_flags(p)
    _add_solver_flags(p)
    p.add_argument("--trials", type=int)
    p.add_argument("--jobs", type=int, help="parallel trials (processes)")
    p.add_argument("--q-sweep", type=lambda s: [int(x) for x in s.split(",")], dest="q_sweep",
                   help="solve one topology at each listed grid size instead")
    p.add_argument("--records-csv", dest="records_csv")
    p.add_argument("--report-json", dest="report_json")
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
