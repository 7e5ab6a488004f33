"""Geometric network model: random topologies and the L/B/C channel matrices.

Randomness comes from a single ``numpy.random.PCG64`` stream seeded with the
user seed. Only ``Generator.random`` (uniform doubles on [0, 1)) is drawn, in
this fixed order:

1. one ``(K, 4)`` block: per PU, x, y, channel draw, protection-radius draw;
2. one ``(N, 2)`` block: per SU, x, y.

Channel indices are ``floor(u * M)`` and radii ``lo + u * (hi - lo)``, so the
mapping from seed to topology does not depend on any integer-sampling
algorithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

DEFAULT_AREA_SIDE = 20.0
DEFAULT_D_MIN = 1.0
DEFAULT_D_MAX = 4.0
DEFAULT_PROTECTION_RANGE = (1.0, 3.0)


@dataclass(frozen=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class PrimaryUser:
    position: Point
    channel: int
    protection_radius: float


@dataclass(frozen=True)
class Topology:
    area_side: float
    pus: tuple[PrimaryUser, ...]
    sus: tuple[Point, ...]
    num_channels: int
    d_min: float = DEFAULT_D_MIN
    d_max: float = DEFAULT_D_MAX

    def __post_init__(self):
        object.__setattr__(self, "pus", tuple(self.pus))
        object.__setattr__(self, "sus", tuple(self.sus))
        if not 0 < self.d_min <= self.d_max:
            raise ConfigError(f"need 0 < d_min <= d_max, got {self.d_min}, {self.d_max}")
        if self.num_channels < 0:
            raise ConfigError("num_channels must be >= 0")
        for pu in self.pus:
            if not 0 <= pu.channel < self.num_channels:
                raise ConfigError(f"PU channel {pu.channel} out of range")
            if pu.protection_radius <= 0:
                raise ConfigError("protection radius must be > 0")


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ChannelModel:
    """Availability ``L``, reward ``B`` and conflict ``C`` for N SUs, M channels.

    ``interference_radius`` holds the raw (unclamped) radii and is ``None`` for
    hand-written fixtures that only specify the matrices.
    """

    availability: np.ndarray  # (N, M) int8
    reward: np.ndarray  # (N, M) float
    conflict: np.ndarray  # (N, N, M) int8
    interference_radius: np.ndarray | None = None  # (N, M) float

    def __post_init__(self):
        L = _frozen(self.availability, np.int8)
        B = _frozen(self.reward, float)
        n = L.shape[0]
        m = L.shape[1] if L.ndim == 2 else 0
        L = L.reshape(n, m)
        B = B.reshape(n, m)
        C = _frozen(self.conflict, np.int8).reshape(n, n, m)
        object.__setattr__(self, "availability", L)
        object.__setattr__(self, "reward", B)
        object.__setattr__(self, "conflict", C)
        if self.interference_radius is not None:
            ds = _frozen(self.interference_radius, float).reshape(n, m)
            object.__setattr__(self, "interference_radius", ds)
        if not np.array_equal(C, C.transpose(1, 0, 2)):
            raise ValueError("conflict tensor must be symmetric in its user indices")
        if n and np.any(C[np.arange(n), np.arange(n), :]):
            raise ValueError("conflict tensor must be zero on the diagonal")
        if np.any(B[L == 0] != 0) or np.any(B < 0):
            raise ValueError("reward must be non-negative and zero where unavailable")

    @property
    def num_users(self) -> int:
        return self.availability.shape[0]

    @property
    def num_channels(self) -> int:
        return self.availability.shape[1]


def distance(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def generate_topology(
    seed: int,
    area_side: float = DEFAULT_AREA_SIDE,
    K: int = 5,
    N: int = 5,
    M: int = 5,
    d_min: float = DEFAULT_D_MIN,
    d_max: float = DEFAULT_D_MAX,
    protection_radius_range: tuple[float, float] = DEFAULT_PROTECTION_RANGE,
) -> Topology:
    lo, hi = protection_radius_range
    if not 0 < lo <= hi:
        raise ConfigError(f"invalid protection radius interval [{lo}, {hi}]")
    if not 0 < d_min <= d_max:
        raise ConfigError(f"need 0 < d_min <= d_max, got {d_min}, {d_max}")
    if min(K, N, M) < 0:
        raise ConfigError("K, N, M must be non-negative")
    if K > 0 and M < 1:
        raise ConfigError("primary users need at least one channel")
    if area_side <= 0:
        raise ConfigError("area_side must be positive")

    rng = np.random.Generator(np.random.PCG64(seed))
    pu_draws = rng.random((K, 4))
    su_draws = rng.random((N, 2))

    pus = []
    for x, y, uc, ur in pu_draws:
        channel = min(int(math.floor(uc * M)), M - 1)
        pus.append(PrimaryUser(Point(float(x * area_side), float(y * area_side)),
                               channel, float(lo + ur * (hi - lo))))
    sus = [Point(float(x * area_side), float(y * area_side)) for x, y in su_draws]
    return Topology(area_side, tuple(pus), tuple(sus), M, d_min, d_max)


def compute_interference_radius(topology: Topology, n: int, m: int) -> float:
    """Raw interference radius of SU ``n`` on channel ``m`` (may be negative)."""
    su = topology.sus[n]
    inner = min(
        (distance(su, pu.position) - pu.protection_radius
         for pu in topology.pus if pu.channel == m),
        default=math.inf,
    )
    return min(topology.d_max, inner)


def build_channel_model(topology: Topology) -> ChannelModel:
    N, M = len(topology.sus), topology.num_channels
    ds = np.empty((N, M))
    for n in range(N):
        for m in range(M):
            ds[n, m] = compute_interference_radius(topology, n, m)

    # available iff d_s >= d_min (boundary counts as available)
    L = (ds >= topology.d_min).astype(np.int8)
    B = np.where(L == 1, ds * ds, 0.0)

    C = np.zeros((N, N, M), dtype=np.int8)
    for n in range(N - 1):
        for i in range(n + 1, N):
            gap = distance(topology.sus[n], topology.sus[i])
            for m in range(M):
                if ds[n, m] + ds[i, m] >= gap:
                    C[n, i, m] = C[i, n, m] = 1
    return ChannelModel(L, B, C, ds)
