"""Experiment configuration and its flat ``key = value`` file format.

Keys are the :class:`ExperimentConfig` field names (dashes and underscores
are interchangeable).  Lists are comma separated and grids are written
``LO:HI:STEP``.  Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..planners import PlannerConfig


@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    step: float

    @classmethod
    def parse(cls, text: str) -> "Grid":
        try:
            lo, hi, step = (float(t) for t in text.split(":"))
        except ValueError:
            raise ValueError(f"grid must look like LO:HI:STEP, got {text!r}") from None
        if step <= 0 or hi < lo:
            raise ValueError(f"empty grid {text!r}")
        return cls(lo, hi, step)

    def values(self) -> list[float]:
        n = int(round((self.hi - self.lo) / self.step)) + 1
        # rounding keeps endpoints such as 0.0 and 1.0 exact
        return [round(self.lo + i * self.step, 10) for i in range(n)]

    def __str__(self) -> str:
        return f"{self.lo:g}:{self.hi:g}:{self.step:g}"


@dataclass
class ExperimentConfig:
    env: str = "maze"
    env_seed: int = 0
    maze_path: Optional[str] = None
    seed: int = 0
    runs: int = 100
    agents: list[str] = field(default_factory=list)
    cycles: list[int] = field(default_factory=lambda: [1, 3, 5, 10])
    alpha_grid: Grid = field(default_factory=lambda: Grid(0.0, 1.0, 0.02))
    d_grid: Grid = field(default_factory=lambda: Grid(0.0, 1.0, 0.02))
    transitions: int = 10_000
    episodes: int = 200
    step_cap: int = 10_000
    epsilon: float = 0.05
    optimism_threshold: int = 4
    optimistic_value: float = 0.0
    optimism_in_backups: bool = True
    queue_cutoff: float = 1e-8
    vi_tolerance: float = 1e-6
    workers: int = 1
    out: Optional[str] = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.cycles:
            raise ValueError("cycles grid must be nonempty")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def planner_config(self, cycles: int, gamma: float) -> PlannerConfig:
        return PlannerConfig(
            update_cycles=cycles, gamma=gamma, epsilon=self.epsilon,
            optimism_threshold=self.optimism_threshold, optimistic_value=self.optimistic_value,
            optimism_in_backups=self.optimism_in_backups, queue_cutoff=self.queue_cutoff,
            vi_tolerance=self.vi_tolerance,
        )

    def with_overrides(self, **values) -> "ExperimentConfig":
        values = {k: v for k, v in values.items() if v is not None}
        return dataclasses.replace(self, **values)


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


def _convert(name: str, raw: str):
    default = getattr(ExperimentConfig(), name)
    if name in ("alpha_grid", "d_grid"):
        return Grid.parse(raw)
    if name == "agents":
        return [t.strip() for t in raw.split(",") if t.strip()]
    if name == "cycles":
        return [int(t) for t in raw.split(",") if t.strip()]
    if name in ("maze_path", "out"):
        return raw or None
    if isinstance(default, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"{name}: expected a boolean, got {raw!r}")
    return type(default)(raw)


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, raw = (t.strip() for t in line.split("=", 1))
        name = key.replace("-", "_")
        if name not in _FIELDS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        try:
            values[name] = _convert(name, raw)
        except ValueError as exc:
            raise ValueError(f"config line {lineno}: {exc}") from None
    return values


def load_config(path, **overrides) -> ExperimentConfig:
    values = parse_config_text(Path(path).read_text(encoding="utf-8")) if path else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)
