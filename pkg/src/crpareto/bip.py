"""Exact depth-first branch and bound for linear objectives over allocations.

Variables are the allowed cells ``(n, m)`` in row-major order and each is
branched 1 before 0, so among equally good allocations the first one reached
-- the lexicographically largest assignment string -- is kept. A node is
pruned when the optimistic value of the objective (current value plus every
positive coefficient still assignable) cannot beat the incumbent, or when some
side constraint cannot be met even optimistically. For the objective, users
that pairwise conflict on a channel form a clique of which at most one cell
can be taken, so each clique contributes only its best undecided coefficient. Assigning a cell blocks the
same channel for every later conflicting user and, once a row reaches
``c_max``, the rest of that row.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded
from .problem import Allocation, AllocationProblem, is_feasible

SIDE_TOL = 1e-9
LEX_FIX_TOL = 1e-9
# relative margin an allocation must beat the incumbent by; far below any
# epsilon-augmentation difference, far above summation round-off
TIE_TOL = 1e-12
_DEADLINE_EVERY = 4096


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True, eq=False)
class LinearObjective:
    coeffs: np.ndarray
    constant: float = 0.0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if not np.all(np.isfinite(c)) or not np.isfinite(self.constant):
            raise ValueError("objective coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def user_reward(cls, problem: AllocationProblem, n: int, sign: float = 1.0) -> "LinearObjective":
        c = np.zeros(problem.shape)
        c[n] = sign * problem.reward[n]
        return cls(c)

    def evaluate(self, assign) -> float:
        return float((self.coeffs * np.asarray(assign)).sum() + self.constant)


@dataclass(frozen=True, eq=False)
class SideConstraint:
    coeffs: np.ndarray
    sense: str
    rhs: float

    def __post_init__(self):
        if self.sense not in (">=", "<=", "=="):
            raise ValueError(f"unknown constraint sense {self.sense!r}")
        c = np.array(self.coeffs, dtype=float)
        if not np.all(np.isfinite(c)) or not np.isfinite(self.rhs):
            raise ValueError("constraint data must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def satisfied(self, assign, tol: float = SIDE_TOL) -> bool:
        lhs = float((self.coeffs * np.asarray(assign)).sum())
        if self.sense == ">=":
            return lhs >= self.rhs - tol
        if self.sense == "<=":
            return lhs <= self.rhs + tol
        return abs(lhs - self.rhs) <= tol


@dataclass
class SearchStats:
    nodes: int = 0
    prunes: int = 0
    incumbents: int = 0
    solves: int = 0

    def add(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.prunes += other.prunes
        self.incumbents += other.incumbents
        self.solves += other.solves


@dataclass(frozen=True, eq=False)
class SolveResult:
    status: Status
    value: float | None = None
    witness: Allocation | None = None
    values: tuple[float, ...] = ()
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _as_ge_forms(objective: LinearObjective, side: Sequence[SideConstraint]):
    forms = [objective.coeffs]
    rhs = [None]
    for sc in side:
        if sc.sense in (">=", "=="):
            forms.append(sc.coeffs)
            rhs.append(sc.rhs - SIDE_TOL)
        if sc.sense in ("<=", "=="):
            forms.append(-sc.coeffs)
            rhs.append(-sc.rhs - SIDE_TOL)
    return forms, rhs


def _objective_cliques(cells, blocks, coeffs) -> list[list[tuple[int, float]]]:
    """Greedy partition of conflicting positive-coefficient cells into cliques.

    Cells are taken by decreasing coefficient; each joins the first clique on
    its channel it fully conflicts with. Only cliques of two or more cells are
    returned, members sorted by decreasing coefficient.
    """
    adj = [set() for _ in cells]
    for t, bl in enumerate(blocks):
        for u in bl:
            adj[t].add(u)
            adj[u].add(t)
    order = sorted((t for t, (n, m) in enumerate(cells) if coeffs[n, m] > 0 and adj[t]),
                   key=lambda t: (-coeffs[cells[t]], t))
    groups: dict[int, list[list[int]]] = {}
    for t in order:
        chan = groups.setdefault(cells[t][1], [])
        for g in chan:
            if all(u in adj[t] for u in g):
                g.append(t)
                break
        else:
            chan.append([t])
    return [[(u, float(coeffs[cells[u]])) for u in g]
            for m in sorted(groups) for g in groups[m] if len(g) > 1]


def solve(
    problem: AllocationProblem,
    objective: LinearObjective,
    side: Sequence[SideConstraint] = (),
    *,
    deadline: float | None = None,
) -> SolveResult:
    """Maximise ``objective`` over feasible allocations meeting every side constraint.

    ``deadline`` is a ``time.perf_counter()`` value; passing it makes the search
    raise :class:`BudgetExceeded` once exceeded.
    """
    N, M = problem.shape
    for a in [objective.coeffs] + [sc.coeffs for sc in side]:
        if a.shape != (N, M):
            raise ValueError(f"coefficient shape {a.shape} != problem shape {(N, M)}")

    forms, rhs = _as_ge_forms(objective, side)
    F = len(forms)
    allowed = problem.allowed_mask()
    cells = [(n, m) for n in range(N) for m in range(M) if allowed[n, m]]
    T = len(cells)
    index = {c: t for t, c in enumerate(cells)}

    touch = [[(f, float(forms[f][n, m])) for f in range(F) if forms[f][n, m] != 0]
             for n, m in cells]

    later_conflicts: dict[tuple[int, int], list[int]] = {}
    for n, k, m in problem.conflicts:
        if (n, m) in index and (k, m) in index:
            later_conflicts.setdefault((n, m), []).append(index[(k, m)])
    blocks = [sorted(later_conflicts.get(c, ())) for c in cells]

    cliques = _objective_cliques(cells, blocks, forms[0])
    in_clique = {u for members in cliques for u, _ in members}
    # objective coefficients of clique cells are bounded per clique, not summed
    pos = [[(f, c) for f, c in tl if c > 0 and not (f == 0 and t in in_clique)]
           for t, tl in enumerate(touch)]

    row = [n for n, _ in cells]
    row_rest = [[u for u in range(t + 1, T) if row[u] == row[t]] for t in range(T)]
    row_len = [sum(1 for r in row if r == n) for n in range(N)]
    capped = [row_len[n] > problem.c_max for n in range(N)]
    c_max = problem.c_max

    cur = [0.0] * F
    opt = [0.0] * F
    for pl in pos:
        for f, c in pl:
            opt[f] += c
    blk = [0] * T
    row_count = [0] * N
    x = [0] * T

    stats = SearchStats(solves=1)
    best_val = -np.inf
    best_x: list[int] | None = None
    tie = 0.0

    def obj_bound(start: int) -> float:
        b = opt[0]
        for members in cliques:
            for u, w in members:
                if u >= start and not blk[u]:
                    b += w
                    break
        return b

    def feasible_bounds() -> bool:
        for g in range(1, F):
            if cur[g] + opt[g] < rhs[g]:
                return False
        return True

    def block(u: int) -> None:
        if blk[u] == 0:
            for f, c in pos[u]:
                opt[f] -= c
        blk[u] += 1

    def rec(t: int) -> None:
        nonlocal best_val, best_x, tie
        stats.nodes += 1
        if deadline is not None and stats.nodes % _DEADLINE_EVERY == 0 \
                and time.perf_counter() > deadline:
            raise BudgetExceeded("time budget exceeded during branch and bound")
        if t == T:
            v = cur[0]
            if v > best_val + tie:
                best_val = v
                best_x = x[:]
                tie = TIE_TOL * max(1.0, abs(v))
                stats.incumbents += 1
            return
        if blk[t]:
            rec(t + 1)
            return

        saved_cur = cur[:]
        saved_opt = opt[:]
        saved_blk = blk[t + 1:]
        for f, c in pos[t]:
            opt[f] -= c
        undecided_opt = opt[:]

        # branch x_t = 1
        for f, c in touch[t]:
            cur[f] += c
        for u in blocks[t]:
            block(u)
        r = row[t]
        row_count[r] += 1
        if capped[r] and row_count[r] == c_max:
            for u in row_rest[t]:
                block(u)
        x[t] = 1
        if cur[0] + obj_bound(t + 1) > best_val + tie and feasible_bounds():
            rec(t + 1)
        else:
            stats.prunes += 1
        x[t] = 0
        row_count[r] -= 1
        blk[t + 1:] = saved_blk
        cur[:] = saved_cur
        opt[:] = undecided_opt

        # branch x_t = 0
        if cur[0] + obj_bound(t + 1) > best_val + tie and feasible_bounds():
            rec(t + 1)
        else:
            stats.prunes += 1
        opt[:] = saved_opt

    if feasible_bounds():
        rec(0)
    if best_x is None:
        return SolveResult(Status.INFEASIBLE, stats=stats)

    assign = np.zeros((N, M), dtype=np.int8)
    for t, bit in enumerate(best_x):
        if bit:
            assign[cells[t]] = 1
    witness = Allocation(assign)
    assert is_feasible(problem, witness)
    value = objective.evaluate(assign)
    return SolveResult(Status.OPTIMAL, value, witness, (value,), stats)


def solve_lexicographic(
    problem: AllocationProblem,
    objectives: Sequence[LinearObjective],
    side: Sequence[SideConstraint] = (),
    *,
    deadline: float | None = None,
) -> SolveResult:
    """Optimise ``objectives`` in priority order, each within the optima of the previous ones.

    Each stage is frozen with ``objective >= achieved - 1e-9 * max(1, |achieved|)``.
    ``values`` of the result holds every objective evaluated at the final witness.
    """
    if not objectives:
        raise ValueError("need at least one objective")
    constraints = list(side)
    stats = SearchStats()
    res = None
    for obj in objectives:
        res = solve(problem, obj, constraints, deadline=deadline)
        stats.add(res.stats)
        if not res.optimal:
            return SolveResult(Status.INFEASIBLE, stats=stats)
        delta = LEX_FIX_TOL * max(1.0, abs(res.value))
        constraints.append(SideConstraint(obj.coeffs, ">=", res.value - obj.constant - delta))
    assign = res.witness.assign
    values = tuple(obj.evaluate(assign) for obj in objectives)
    return SolveResult(Status.OPTIMAL, values[0], res.witness, values, stats)
