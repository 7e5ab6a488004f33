"""Benchmark over seeded random topologies and grid-size sweeps.

Timing is wall-clock around ``epsilon_constraint_solve`` only (no I/O), in
seconds rounded to milliseconds. Aggregates use the population variance, so a
single trial has variance and standard deviation exactly 0.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .config import RunConfig
from .errors import BudgetExceeded
from .network import build_channel_model
from .pareto import GridSpec, epsilon_constraint_solve
from .problem import AllocationProblem, build_problem


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    time_s: float
    pareto_count: int | None
    infeasible: int | None
    subproblems: int | None
    solved: int | None
    timed_out: bool = False


@dataclass(frozen=True)
class Aggregate:
    mean: float
    variance: float
    std: float

    @classmethod
    def of(cls, xs) -> "Aggregate":
        xs = np.asarray(list(xs), dtype=float)
        if xs.size == 0:
            return cls(math.nan, math.nan, math.nan)
        var = float(np.var(xs))
        return cls(float(np.mean(xs)), var, math.sqrt(var))


@dataclass(frozen=True)
class BenchReport:
    M: int
    N: int
    K: int
    q: int | tuple[int, ...]
    records: tuple[TrialRecord, ...]
    time: Aggregate
    pareto: Aggregate

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def timeouts(self) -> int:
        return sum(r.timed_out for r in self.records)

    @classmethod
    def from_records(cls, cfg: RunConfig, records) -> "BenchReport":
        records = tuple(sorted(records, key=lambda r: r.seed))
        done = [r for r in records if not r.timed_out]
        return cls(cfg.M, cfg.N, cfg.K, cfg.q, records,
                   Aggregate.of(r.time_s for r in done),
                   Aggregate.of(r.pareto_count for r in done))

    HEADER = ("M", "N", "K", "CT (s)", "Var CT", "SD CT", "#POS", "Var #POS", "SD #POS")

    def table_row(self) -> tuple:
        t, p = self.time, self.pareto
        return (self.M, self.N, self.K, f"{t.mean:.3f}", f"{t.variance:.4g}", f"{t.std:.3f}",
                f"{p.mean:.1f}", f"{p.variance:.4g}", f"{p.std:.2f}")

    def format_table(self) -> str:
        rows = [self.HEADER, self.table_row()]
        widths = [max(3 if j < 3 else 9, *(len(str(r[j])) for r in rows)) for j in range(len(self.HEADER))]
        lines = ["  ".join(str(v).rjust(w) for v, w in zip(r, widths)) for r in rows]
        if self.timeouts:
            lines.append(f"({self.timeouts} of {self.trials} trials hit the time budget "
                         "and are excluded from the aggregates)")
        return "\n".join(lines)

    def records_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = list(TrialRecord.__dataclass_fields__)
        w.writerow(names)
        for r in self.records:
            w.writerow([getattr(r, n) for n in names])
        return buf.getvalue()

    def to_json(self) -> str:
        d = {"M": self.M, "N": self.N, "K": self.K,
             "q": list(self.q) if isinstance(self.q, tuple) else self.q,
             "trials": self.trials, "timeouts": self.timeouts,
             "time_s": asdict(self.time), "pareto_count": asdict(self.pareto),
             "records": [asdict(r) for r in self.records]}
        return json.dumps(d, indent=1) + "\n"


def instance_problem(cfg: RunConfig) -> AllocationProblem:
    return build_problem(build_channel_model(cfg.topology()), cfg.c_max)


def run_trial(cfg: RunConfig) -> TrialRecord:
    problem = instance_problem(cfg)
    spec = cfg.grid_spec()
    start = time.perf_counter()
    try:
        front = epsilon_constraint_solve(problem, spec, workers=cfg.workers,
                                         time_budget=cfg.time_budget)
    except BudgetExceeded:
        return TrialRecord(cfg.seed, round(time.perf_counter() - start, 3),
                           None, None, None, None, True)
    elapsed = time.perf_counter() - start
    return TrialRecord(cfg.seed, round(elapsed, 3), len(front.points),
                       front.subproblems_infeasible, front.subproblems_total,
                       front.subproblems_solved)


def run_benchmark(cfg: RunConfig, trials: int | None = None, jobs: int | None = None) -> BenchReport:
    """Trials use seeds ``cfg.seed, cfg.seed + 1, ...``; records are ordered by seed."""
    trials = cfg.trials if trials is None else trials
    jobs = cfg.jobs if jobs is None else jobs
    cfgs = [cfg.with_seed(cfg.seed + t) for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run_trial, cfgs))
    else:
        records = [run_trial(c) for c in cfgs]
    return BenchReport.from_records(cfg, records)


@dataclass(frozen=True)
class SweepEntry:
    q: int
    subproblems: int
    time_s: float
    pareto_count: int | None
    timed_out: bool


def gp_sweep(problem: AllocationProblem, qs, spec: GridSpec = GridSpec(),
             time_budget: float | None = None) -> list[SweepEntry]:
    """Solve one instance at several grid sizes; timed-out runs report the budget."""
    out = []
    for q in qs:
        s = replace(spec, intervals=int(q))
        total = math.prod(x + 1 for x in s.q_for(problem.num_users))
        start = time.perf_counter()
        try:
            front = epsilon_constraint_solve(problem, s, time_budget=time_budget)
            out.append(SweepEntry(int(q), total, round(time.perf_counter() - start, 3),
                                  len(front.points), False))
        except BudgetExceeded:
            out.append(SweepEntry(int(q), total, round(time.perf_counter() - start, 3),
                                  None, True))
    return out


def format_sweep(entries, M: int, N: int, K: int) -> str:
    lines = [f"{'M':>3} {'N':>3} {'K':>3} {'GPs':>4} {'subproblems':>14} {'#POS':>6}  time"]
    for e in entries:
        t = f"> {e.time_s:.1f} s (budget)" if e.timed_out else f"{e.time_s:.3f} s"
        pos = "--" if e.pareto_count is None else str(e.pareto_count)
        lines.append(f"{M:>3} {N:>3} {K:>3} {e.q:>4} {e.subproblems:>14} {pos:>6}  {t}")
    return "\n".join(lines)
