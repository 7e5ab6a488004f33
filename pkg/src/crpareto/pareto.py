"""Augmented epsilon-constraint sweep with a lexicographic payoff table.

All objectives are maximised. One objective is the main one; every other
objective ``i`` gets ``q_i + 1`` equally spaced levels between its utopia
value (strictest) and its pseudo-nadir value (loosest). Each grid cell ``e``
is the subproblem

    max  f_main(x) + eps * sum_i (f_i(x) - e_i) / r_i
    s.t. f_i(x) >= e_i

where the slack ``f_i(x) - e_i`` has been substituted out, leaving a purely
binary search.

Cells are swept from loose to strict. Two exact shortcuts avoid repeated
searches: a cell whose grid indices are all no looser than an infeasible cell
is infeasible; and if a looser cell's optimum also meets a stricter cell's
levels, it is that cell's optimum too (the augmented objectives differ only by
a constant). The canonical witness is preserved by both, so ``reuse=False``
gives identical results, just slower.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bip import (SIDE_TOL, LinearObjective, SearchStats, SideConstraint, solve,
                  solve_lexicographic)
from .errors import BudgetExceeded, ConfigError
from .problem import Allocation, AllocationProblem, reward_vector

DOMINANCE_TOL = 1e-9
DEDUP_DIGITS = 9
BRUTE_FORCE_BUDGET = 24


@dataclass(frozen=True, eq=False)
class PayoffTable:
    phi: np.ndarray
    utopia: np.ndarray
    pseudo_nadir: np.ndarray
    nadir: np.ndarray | None
    ranges: np.ndarray
    witnesses: tuple[Allocation, ...] = ()

    @classmethod
    def from_phi(cls, phi, nadir=None, witnesses=()) -> "PayoffTable":
        phi = np.array(phi, dtype=float)
        if phi.ndim != 2 or phi.shape[0] != phi.shape[1]:
            raise ValueError("payoff matrix must be square")
        utopia = np.diag(phi).copy()
        pseudo = phi.min(axis=0)
        nadir = None if nadir is None else np.array(nadir, dtype=float)
        return cls(phi, utopia, pseudo, nadir, utopia - pseudo, tuple(witnesses))


@dataclass(frozen=True)
class GridSpec:
    """``main_objective`` is a 0-based user index; ``intervals`` is one q for
    all constrained objectives or a sequence with one q per constrained
    objective (in user order, skipping the main one)."""

    main_objective: int = 0
    intervals: int | tuple[int, ...] = 20
    epsilon: float = 1e-6

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ConfigError(f"epsilon must be in (0, 1), got {self.epsilon}")
        qs = (self.intervals,) if isinstance(self.intervals, int) else tuple(self.intervals)
        if any(int(q) != q or q < 1 for q in qs):
            raise ConfigError(f"grid intervals must be integers >= 1, got {self.intervals}")
        if not isinstance(self.intervals, int):
            object.__setattr__(self, "intervals", tuple(int(q) for q in qs))

    def constrained(self, p: int) -> list[int]:
        if not 0 <= self.main_objective < p:
            raise ConfigError(f"main objective {self.main_objective} out of range for {p} users")
        return [i for i in range(p) if i != self.main_objective]

    def q_for(self, p: int) -> tuple[int, ...]:
        if isinstance(self.intervals, int):
            return (self.intervals,) * (p - 1)
        if len(self.intervals) != p - 1:
            raise ConfigError(f"need {p - 1} grid interval counts, got {len(self.intervals)}")
        return self.intervals


@dataclass(frozen=True, eq=False)
class ParetoPoint:
    objectives: tuple[float, ...]
    witness: Allocation
    grid_index: tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class ParetoSet:
    """For the epsilon sweep the counters refer to grid cells; for the
    brute-force oracle they refer to enumerated allocations."""

    points: tuple[ParetoPoint, ...]
    subproblems_total: int
    subproblems_infeasible: int
    subproblems_solved: int = 0
    filtered: int = 0
    payoff: PayoffTable | None = None
    grids: tuple[tuple[float, ...], ...] = ()
    constrained: tuple[int, ...] = ()
    stats: SearchStats = field(default_factory=SearchStats)
    elapsed: float = 0.0

    def vectors(self) -> np.ndarray:
        if not self.points:
            return np.zeros((0, 0))
        return np.array([pt.objectives for pt in self.points])

    def vector_keys(self) -> set[tuple[float, ...]]:
        return {_key(pt.objectives) for pt in self.points}


def _key(v) -> tuple[float, ...]:
    return tuple(round(float(x), DEDUP_DIGITS) + 0.0 for x in v)


def dominates(f, g, tol: float = DOMINANCE_TOL) -> bool:
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape:
        raise ValueError(f"length mismatch: {f.shape} vs {g.shape}")
    return bool(np.all(f >= g - tol) and np.any(f > g + tol))


def nondominated_filter(points: Sequence[ParetoPoint]) -> list[ParetoPoint]:
    kept = [p for p in points
            if not any(dominates(q.objectives, p.objectives) for q in points if q is not p)]
    return sorted(kept, key=lambda p: tuple(p.objectives), reverse=True)


def grid_points(f_min: float, f_max: float, q: int) -> list[float]:
    """``q + 1`` levels from ``f_max`` down to ``f_min``, endpoints exact."""
    if q < 1:
        raise ConfigError("q must be >= 1")
    if f_min > f_max:
        raise ValueError(f"f_min {f_min} > f_max {f_max}")
    step = (f_min - f_max) / q
    e = [f_max + n * step for n in range(q + 1)]
    e[0], e[-1] = f_max, f_min
    return e


def payoff_table(problem: AllocationProblem, *, deadline: float | None = None) -> PayoffTable:
    p = problem.num_users
    if p < 2:
        raise ConfigError("a payoff table needs at least two objectives")
    objs = [LinearObjective.user_reward(problem, i) for i in range(p)]
    rows, witnesses = [], []
    for i in range(p):
        order = [i] + [j for j in range(p) if j != i]
        res = solve_lexicographic(problem, [objs[j] for j in order], deadline=deadline)
        rows.append(reward_vector(problem, res.witness))
        witnesses.append(res.witness)
    nadir = []
    for i in range(p):
        res = solve(problem, LinearObjective.user_reward(problem, i, -1.0), deadline=deadline)
        nadir.append(0.0 - res.value)
    return PayoffTable.from_phi(np.array(rows), nadir, witnesses)


def build_subproblem(problem: AllocationProblem, table: PayoffTable, spec: GridSpec,
                     e: Sequence[float]) -> tuple[LinearObjective, list[SideConstraint]]:
    cons = spec.constrained(problem.num_users)
    if len(e) != len(cons):
        raise ValueError(f"need {len(cons)} grid values, got {len(e)}")
    coeffs = np.zeros(problem.shape)
    coeffs[spec.main_objective] = problem.reward[spec.main_objective]
    constant = 0.0
    side = []
    for i, ei in zip(cons, e):
        row = np.zeros(problem.shape)
        row[i] = problem.reward[i]
        r = float(table.ranges[i])
        if r > 0:
            w = spec.epsilon / r
            coeffs[i] += w * problem.reward[i]
            constant -= w * ei
            side.append(SideConstraint(row, ">=", float(ei)))
        else:
            side.append(SideConstraint(row, ">=", float(table.pseudo_nadir[i])))
    return LinearObjective(coeffs, constant), side


@dataclass
class _SweepOut:
    found: dict = field(default_factory=dict)  # key -> (vec, assign bytes, cell)
    infeasible: int = 0
    solved: int = 0
    cells: int = 0
    stats: SearchStats = field(default_factory=SearchStats)


class _Archive:
    """Growing arrays of previously settled cells for the reuse checks."""

    def __init__(self, dims: int):
        self.idx = np.zeros((16, dims), dtype=np.int64)
        self.vals = np.zeros((16, dims))
        self.payload: list = []
        self.n = 0

    def add(self, cell, vals=None, payload=None) -> None:
        if self.n == len(self.idx):
            self.idx = np.concatenate([self.idx, np.zeros_like(self.idx)])
            self.vals = np.concatenate([self.vals, np.zeros_like(self.vals)])
        self.idx[self.n] = cell
        if vals is not None:
            self.vals[self.n] = vals
        self.payload.append(payload)
        self.n += 1


def _sweep(problem, table, spec, grids, first_values, reuse, deadline) -> _SweepOut:
    cons = spec.constrained(problem.num_users)
    qs = [len(g) - 1 for g in grids]
    out = _SweepOut()
    dims = len(cons)
    solved_arc = _Archive(dims)
    infeasible_arc = _Archive(dims)
    rows = np.array(cons)

    # loose (high index) to strict (index 0)
    inner = [range(q, -1, -1) for q in qs[1:]]
    for n0 in sorted(first_values, reverse=True):
        for rest in itertools.product(*inner):
            cell = (n0,) + rest
            out.cells += 1
            if deadline is not None and time.perf_counter() > deadline:
                raise BudgetExceeded("time budget exceeded during grid sweep")
            e = np.array([g[n] for g, n in zip(grids, cell)])
            c = np.array(cell)
            if reuse and infeasible_arc.n:
                if np.any(np.all(infeasible_arc.idx[:infeasible_arc.n] >= c, axis=1)):
                    out.infeasible += 1
                    continue
            hit = None
            if reuse and solved_arc.n:
                k = solved_arc.n
                ok = np.all(solved_arc.idx[:k] >= c, axis=1) & \
                    np.all(solved_arc.vals[:k] >= e - SIDE_TOL, axis=1)
                if ok.any():
                    hit = int(np.argmax(ok))
            if hit is not None:
                vec, assign = solved_arc.payload[hit]
            else:
                obj, side = build_subproblem(problem, table, spec, e)
                res = solve(problem, obj, side, deadline=deadline)
                out.solved += 1
                out.stats.add(res.stats)
                if not res.optimal:
                    out.infeasible += 1
                    infeasible_arc.add(cell)
                    continue
                vec = reward_vector(problem, res.witness)
                assign = res.witness.assign
                solved_arc.add(cell, vec[rows], (vec, assign))
            key = _key(vec)
            prev = out.found.get(key)
            if prev is None or cell < prev[2]:
                out.found[key] = (vec, assign, cell)
    return out


def _run_chunk(args) -> _SweepOut:
    return _sweep(*args)


def epsilon_constraint_solve(
    problem: AllocationProblem,
    spec: GridSpec = GridSpec(),
    *,
    workers: int = 1,
    processes: bool = False,
    reuse: bool = True,
    time_budget: float | None = None,
) -> ParetoSet:
    """Full augmented epsilon-constraint sweep.

    ``workers > 1`` splits the grid by the first constrained objective's index
    across a thread pool (or a process pool with ``processes=True``). The
    result does not depend on the split.
    """
    p = problem.num_users
    if p < 2:
        raise ConfigError(f"the epsilon-constraint method needs >= 2 users, got {p}")
    start = time.perf_counter()
    deadline = None if time_budget is None else start + time_budget

    table = payoff_table(problem, deadline=deadline)
    cons = spec.constrained(p)
    qs = spec.q_for(p)
    grids = [tuple(grid_points(table.pseudo_nadir[i], table.utopia[i], q))
             for i, q in zip(cons, qs)]
    total = math.prod(q + 1 for q in qs)

    workers = max(1, min(workers, qs[0] + 1))
    chunks = [list(range(w, qs[0] + 1, workers)) for w in range(workers)]
    args = [(problem, table, spec, grids, ch, reuse, deadline) for ch in chunks]
    if workers == 1:
        outs = [_sweep(*args[0])]
    else:
        pool_cls = ProcessPoolExecutor if processes else ThreadPoolExecutor
        with pool_cls(max_workers=workers) as pool:
            outs = list(pool.map(_run_chunk, args))

    merged: dict = {}
    stats = SearchStats()
    infeasible = solved = 0
    for out in outs:
        infeasible += out.infeasible
        solved += out.solved
        stats.add(out.stats)
        for key, item in out.found.items():
            if key not in merged or item[2] < merged[key][2]:
                merged[key] = item
    assert sum(o.cells for o in outs) == total

    points = [ParetoPoint(tuple(float(v) for v in vec), Allocation(assign), cell)
              for vec, assign, cell in merged.values()]
    front = nondominated_filter(points)
    return ParetoSet(
        points=tuple(front),
        subproblems_total=total,
        subproblems_infeasible=infeasible,
        subproblems_solved=solved,
        filtered=len(points) - len(front),
        payoff=table,
        grids=tuple(grids),
        constrained=tuple(cons),
        stats=stats,
        elapsed=time.perf_counter() - start,
    )


def _enumerate_chunks(V: int, chunk: int = 1 << 18) -> Iterable[np.ndarray]:
    total = 1 << V
    for lo in range(0, total, chunk):
        yield np.arange(lo, min(total, lo + chunk), dtype=np.int64)


def brute_force_front(problem: AllocationProblem, budget: int = BRUTE_FORCE_BUDGET) -> ParetoSet:
    """Exhaustive oracle: every 0/1 matrix, feasible ones mapped to rewards, non-dominated kept.

    Cell ``(n, m)`` is bit ``N*M - 1 - (n*M + m)`` of the enumeration index, so
    a larger index is a lexicographically larger assignment string; the
    largest index per objective vector is kept as its witness.
    """
    N, M = problem.shape
    V = N * M
    if V > budget:
        raise BudgetExceeded(f"brute force over {V} variables exceeds budget of {budget}")
    shifts = np.arange(V - 1, -1, -1, dtype=np.int64)
    forbidden = ~problem.allowed_mask().ravel()
    conf = np.array(problem.conflicts, dtype=np.int64).reshape(-1, 3)
    best: dict[tuple, tuple[int, np.ndarray]] = {}
    infeasible = 0
    for idx in _enumerate_chunks(V):
        bits = ((idx[:, None] >> shifts) & 1).astype(np.int8)
        A = bits.reshape(-1, N, M)
        ok = ~np.any(bits[:, forbidden], axis=1)
        ok &= np.all(A.sum(axis=2) <= problem.c_max, axis=1)
        for n, k, m in conf:
            ok &= ~((A[:, n, m] == 1) & (A[:, k, m] == 1))
        infeasible += int((~ok).sum())
        if not ok.any():
            continue
        vecs = np.einsum("anm,nm->an", A[ok].astype(float), problem.reward)
        ids = idx[ok]
        rounded = np.round(vecs, DEDUP_DIGITS) + 0.0
        # last occurrence per unique vector = largest index
        order = np.arange(len(ids) - 1, -1, -1)
        uniq, first = np.unique(rounded[order], axis=0, return_index=True)
        for u, j in zip(uniq, first):
            j = order[j]
            key = tuple(float(x) for x in u)
            if key not in best or ids[j] > best[key][0]:
                best[key] = (int(ids[j]), vecs[j])

    keys = list(best)
    vals = np.array([best[k][1] for k in keys]).reshape(len(keys), N)
    keep = []
    for a in range(len(keys)):
        dom = np.all(vals >= vals[a] - DOMINANCE_TOL, axis=1) & \
            np.any(vals > vals[a] + DOMINANCE_TOL, axis=1)
        if not dom.any():
            keep.append(a)
    points = []
    for a in keep:
        code, vec = best[keys[a]]
        assign = ((code >> shifts) & 1).astype(np.int8).reshape(N, M)
        points.append(ParetoPoint(tuple(float(v) for v in vec), Allocation(assign)))
    points.sort(key=lambda pt: pt.objectives, reverse=True)
    return ParetoSet(tuple(points), 1 << V, infeasible)
