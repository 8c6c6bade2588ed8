"""Grid mazes with a 15-outcome stochastic compass-move kernel.

Text format: one row per line, ``#`` wall, ``.`` free, ``S`` start, ``G`` goal.
Every action samples one of 15 equiprobable offsets from a 3-wide, 5-deep
block in front of the agent (lateral offset -1/0/+1, forward distance 0..4).
An offset is resolved by one lateral step followed by up to ``dy`` forward
steps; any step into a wall is skipped and ends the ray, and entering a goal
cell ends it too.  Offsets that resolve to the same cell pool their mass, so
probabilities stay multiples of 1/15.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from importlib import resources
from typing import NamedTuple

from ..model import ContractViolation, TrueMDP

WALL, FREE, START, GOAL = "#", ".", "S", "G"
GLYPHS = frozenset(WALL + FREE + START + GOAL)

NORTH, EAST, SOUTH, WEST = range(4)
ACTION_NAMES = ("N", "E", "S", "W")
FORWARD = ((-1, 0), (0, 1), (1, 0), (0, -1))
# "right-hand" direction for each heading
LATERAL = ((0, 1), (1, 0), (0, -1), (-1, 0))
KERNEL_SIZE = 15
MAX_FORWARD = 4

Cell = tuple[int, int]


class MazeError(ValueError):
    pass


class KernelOutcome(NamedTuple):
    cell: Cell
    count: int  # probability mass in units of 1/15

    @property
    def prob(self) -> Fraction:
        return Fraction(self.count, KERNEL_SIZE)


@dataclass(frozen=True)
class MazeSpec:
    rows: tuple[str, ...]
    step_reward: float = -1.0
    gamma: float = 0.99

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0])

    def glyph(self, cell: Cell) -> str:
        r, c = cell
        return self.rows[r][c]

    def is_wall(self, cell: Cell) -> bool:
        return self.glyph(cell) == WALL

    def is_goal(self, cell: Cell) -> bool:
        return self.glyph(cell) == GOAL

    @cached_property
    def cells(self) -> list[Cell]:
        """Non-wall cells in row-major order; list position is the state index."""
        return [(r, c) for r, row in enumerate(self.rows) for c, ch in enumerate(row) if ch != WALL]

    @cached_property
    def index(self) -> dict[Cell, int]:
        return {cell: i for i, cell in enumerate(self.cells)}

    @cached_property
    def start(self) -> int:
        return next(i for i, cell in enumerate(self.cells) if self.glyph(cell) == START)

    @cached_property
    def mdp(self) -> TrueMDP:
        outcomes = []
        terminal = []
        for cell in self.cells:
            if self.is_goal(cell):
                terminal.append(True)
                outcomes.append([[] for _ in FORWARD])
                continue
            terminal.append(False)
            outcomes.append([
                [(self.index[o.cell], o.count / KERNEL_SIZE, self.step_reward)
                 for o in maze_kernel(self, cell, a)]
                for a in range(len(FORWARD))
            ])
        return TrueMDP(len(self.cells), len(FORWARD), outcomes, self.gamma, tuple(terminal))


def _resolve(maze: MazeSpec, cell: Cell, action: int, dx: int, dy: int) -> Cell:
    r, c = cell
    if dx:
        lr, lc = LATERAL[action]
        nxt = (r + dx * lr, c + dx * lc)
        if maze.is_wall(nxt):
            return cell
        r, c = nxt
        if maze.is_goal(nxt):
            return nxt
    fr, fc = FORWARD[action]
    for _ in range(dy):
        nxt = (r + fr, c + fc)
        if maze.is_wall(nxt):
            break
        r, c = nxt
        if maze.is_goal(nxt):
            break
    return r, c


def maze_kernel(maze: MazeSpec, cell: Cell, action: int) -> list[KernelOutcome]:
    """Successor distribution of ``action`` from ``cell``, sorted by cell."""
    if maze.is_wall(cell) or maze.is_goal(cell):
        raise ContractViolation(f"kernel requested for non-free cell {cell}")
    if not 0 <= action < len(FORWARD):
        raise ContractViolation(f"unknown action {action}")
    mass = Counter(
        _resolve(maze, cell, action, dx, dy)
        for dx in (-1, 0, 1)
        for dy in range(MAX_FORWARD + 1)
    )
    return [KernelOutcome(c, k) for c, k in sorted(mass.items())]


def load_maze(text: str) -> MazeSpec:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MazeError("empty maze")
    width = len(lines[0])
    starts, goals = [], []
    for r, line in enumerate(lines):
        if len(line) != width:
            raise MazeError(f"line {r + 1}: row has {len(line)} columns, expected {width}")
        for c, ch in enumerate(line):
            if ch not in GLYPHS:
                raise MazeError(f"line {r + 1}, column {c + 1}: unknown glyph {ch!r}")
            on_border = r in (0, len(lines) - 1) or c in (0, width - 1)
            if on_border and ch != WALL:
                raise MazeError(f"line {r + 1}, column {c + 1}: outer boundary must be wall")
            if ch == START:
                starts.append((r, c))
            elif ch == GOAL:
                goals.append((r, c))
    if len(starts) != 1:
        raise MazeError(f"expected exactly one start cell, found {len(starts)}")
    if not goals:
        raise MazeError("maze has no goal cell")
    return MazeSpec(tuple(lines))


def save_maze(spec: MazeSpec) -> str:
    return "\n".join(spec.rows) + "\n"


def default_maze() -> MazeSpec:
    text = resources.files("smallbackups.envs").joinpath("data/maze25.txt").read_text(encoding="utf-8")
    return load_maze(text)
