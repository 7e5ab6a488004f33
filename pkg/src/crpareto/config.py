"""Run configuration shared by the CLI and the experiment scripts.

Config files are YAML mappings whose keys are the :class:`RunConfig` field
names, e.g.::

    seed: 7
    K: 5
    N: 5
    M: 5
    q: 10            # or a list, one entry per constrained user
    protection_radius_range: [1.0, 3.0]
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import yaml

from .errors import ConfigError
from .network import (DEFAULT_AREA_SIDE, DEFAULT_D_MAX, DEFAULT_D_MIN,
                      DEFAULT_PROTECTION_RANGE, generate_topology)
from .pareto import GridSpec


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    area_side: float = DEFAULT_AREA_SIDE
    K: int = 5
    N: int = 5
    M: int = 5
    d_min: float = DEFAULT_D_MIN
    d_max: float = DEFAULT_D_MAX
    protection_radius_range: tuple[float, float] = DEFAULT_PROTECTION_RANGE
    c_max: int | None = None
    q: int | tuple[int, ...] = 20
    epsilon: float = 1e-6
    main_user: int = 1  # 1-based
    trials: int = 300
    jobs: int = 1
    workers: int = 1
    time_budget: float | None = None
    instance: str | None = None
    out: str | None = None
    csv: str | None = None
    json: str | None = None

    def __post_init__(self):
        if isinstance(self.q, list):
            object.__setattr__(self, "q", tuple(self.q))
        object.__setattr__(self, "protection_radius_range",
                           tuple(float(x) for x in self.protection_radius_range))
        self.validate()

    def validate(self) -> None:
        if min(self.K, self.N, self.M) < 0:
            raise ConfigError("K, N and M must be non-negative")
        if not 0 < self.d_min <= self.d_max:
            raise ConfigError(f"need 0 < d_min <= d_max, got {self.d_min}, {self.d_max}")
        lo, hi = self.protection_radius_range
        if not 0 < lo <= hi:
            raise ConfigError(f"invalid protection radius range {self.protection_radius_range}")
        if self.c_max is not None and self.c_max < 1:
            raise ConfigError("c_max must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.jobs < 1 or self.workers < 1:
            raise ConfigError("jobs and workers must be >= 1")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ConfigError("time_budget must be positive")
        if self.main_user < 1:
            raise ConfigError("main_user is 1-based")

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "RunConfig":
        data = yaml.safe_load(Path(path).read_text()) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: config must be a mapping")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, seed=seed)

    def grid_spec(self) -> GridSpec:
        return GridSpec(self.main_user - 1, self.q, self.epsilon)

    def topology(self):
        return generate_topology(self.seed, self.area_side, self.K, self.N, self.M,
                                 self.d_min, self.d_max, self.protection_radius_range)

    def to_dict(self) -> dict:
        return asdict(self)
