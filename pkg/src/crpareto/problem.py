"""Multi-objective binary allocation program built from a channel model."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .network import ChannelModel


@dataclass(frozen=True, eq=False)
class AllocationProblem:
    """One maximisation objective per SU: ``r_n = sum_m A[n, m] * B[n, m]``.

    Constraints: for each conflict triple ``(n, k, m)`` (``n < k``) at most one
    of ``A[n, m]``, ``A[k, m]`` is set; each row has at most ``c_max`` ones;
    cells in ``forbidden`` are never set.
    """

    num_users: int
    num_channels: int
    reward: np.ndarray
    conflicts: tuple[tuple[int, int, int], ...]
    c_max: int
    forbidden: frozenset[tuple[int, int]]

    def __post_init__(self):
        N, M = self.num_users, self.num_channels
        reward = np.array(self.reward, dtype=float).reshape(N, M)
        reward.setflags(write=False)
        object.__setattr__(self, "reward", reward)
        object.__setattr__(self, "conflicts", tuple(sorted(set(map(tuple, self.conflicts)))))
        object.__setattr__(self, "forbidden", frozenset(map(tuple, self.forbidden)))
        if M > 0 and not 1 <= self.c_max <= M:
            raise ConfigError(f"c_max must be in [1, {M}], got {self.c_max}")
        if M == 0 and self.c_max < 1:
            raise ConfigError("c_max must be >= 1")
        for n, k, m in self.conflicts:
            if not (0 <= n < k < N and 0 <= m < M):
                raise ValueError(f"bad conflict triple {(n, k, m)}")
        for n, m in self.forbidden:
            if not (0 <= n < N and 0 <= m < M):
                raise ValueError(f"bad forbidden cell {(n, m)}")
            if reward[n, m] != 0:
                raise ValueError(f"forbidden cell {(n, m)} has nonzero reward")

    @property
    def shape(self) -> tuple[int, int]:
        return self.num_users, self.num_channels

    def allowed_mask(self) -> np.ndarray:
        mask = np.ones(self.shape, dtype=bool)
        for n, m in self.forbidden:
            mask[n, m] = False
        return mask

    def scaled(self, c: float) -> "AllocationProblem":
        return AllocationProblem(self.num_users, self.num_channels, self.reward * c,
                                 self.conflicts, self.c_max, self.forbidden)


@dataclass(frozen=True, eq=False)
class Allocation:
    assign: np.ndarray

    def __post_init__(self):
        a = np.array(self.assign, dtype=np.int8)
        if a.ndim != 2 or not np.isin(a, (0, 1)).all():
            raise ValueError("assignment must be a 2-D 0/1 matrix")
        a.setflags(write=False)
        object.__setattr__(self, "assign", a)

    def __eq__(self, other):
        return isinstance(other, Allocation) and np.array_equal(self.assign, other.assign)

    def __hash__(self):
        return hash((self.assign.shape, self.assign.tobytes()))

    def key(self) -> str:
        return "".join(map(str, self.assign.ravel()))


def build_problem(model: ChannelModel, c_max: int | None = None) -> AllocationProblem:
    """``c_max=None`` means no interface limit (``c_max = M``)."""
    N, M = model.num_users, model.num_channels
    if c_max is None:
        c_max = max(M, 1)
    if c_max < 1:
        raise ConfigError(f"c_max must be >= 1, got {c_max}")
    c_max = min(c_max, M) if M else c_max

    idx = np.argwhere(model.conflict == 1)
    conflicts = [(int(n), int(k), int(m)) for n, k, m in idx if n < k]
    forbidden = {(int(n), int(m)) for n, m in np.argwhere(model.availability == 0)}
    reward = np.where(model.availability == 1, model.reward, 0.0)
    return AllocationProblem(N, M, reward, tuple(conflicts), c_max, frozenset(forbidden))


def reward_vector(problem: AllocationProblem, alloc: Allocation) -> np.ndarray:
    assign = np.asarray(alloc.assign)
    if assign.shape != problem.shape:
        raise ValueError(f"allocation shape {assign.shape} != problem shape {problem.shape}")
    return (assign * problem.reward).sum(axis=1)


def is_feasible(problem: AllocationProblem, alloc: Allocation) -> bool:
    a = np.asarray(alloc.assign)
    if a.shape != problem.shape:
        raise ValueError(f"allocation shape {a.shape} != problem shape {problem.shape}")
    if np.any(a.sum(axis=1) > problem.c_max):
        return False
    if any(a[n, m] for n, m in problem.forbidden):
        return False
    return not any(a[n, m] and a[k, m] for n, k, m in problem.conflicts)
