"""Seed patterns, coloured tori, and their plain-text file format.

Both kinds of grid share one text layout: a ``<width> <height>`` header line
followed by `height` rows of `width` characters and a trailing newline.
Seed patterns use ``.``/``O``; torus dumps use ``.``/``R``/``B``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEAD = 0
RED = 1
BLUE = 2


class PatternFormatError(ValueError):
    """A seed or torus text block does not follow the file format."""


@dataclass(eq=False)
class SeedPattern:
    """A binary bounding-box pattern; the genome of one player."""

    cells: np.ndarray  # bool, shape (height, width)

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=bool)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise ValueError(f"seed pattern needs a 2-D box of at least 1x1, got shape {cells.shape}")
        self.cells = cells

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def live_count(self) -> int:
        return int(np.count_nonzero(self.cells))

    def rotated(self, quarter_turns: int) -> SeedPattern:
        """Rotate by 90-degree steps (counterclockwise)."""
        return SeedPattern(np.rot90(self.cells, quarter_turns % 4))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SeedPattern):
            return NotImplemented
        return np.array_equal(self.cells, other.cells)

    @classmethod
    def from_rows(cls, rows: list[str]) -> SeedPattern:
        """Build a pattern from ``.``/``O`` strings; handy in tests."""
        return cls(np.array([[ch == "O" for ch in row] for row in rows], dtype=bool))

    @classmethod
    def from_text(cls, text: str) -> SeedPattern:
        grid = _parse_grid(text, alphabet=".O")
        return cls(grid == 1)

    def to_text(self) -> str:
        return _format_grid(self.cells.astype(np.uint8), symbols=".O")


@dataclass(eq=False)
class Torus:
    """A finite toroidal grid of dead, red, and blue cells."""

    cells: np.ndarray  # uint8, shape (height, width), values in {0, 1, 2}

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=np.uint8)
        if cells.ndim != 2 or cells.shape[0] < 1 or cells.shape[1] < 1:
            raise ValueError(f"torus needs a 2-D grid of at least 1x1, got shape {cells.shape}")
        if cells.max(initial=0) > BLUE:
            raise ValueError("torus cells must be 0 (dead), 1 (red), or 2 (blue)")
        self.cells = cells

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    def live_count(self, color: int | None = None) -> int:
        """Number of live cells, optionally restricted to one colour."""
        if color is None:
            return int(np.count_nonzero(self.cells))
        if color not in (RED, BLUE):
            raise ValueError(f"colour must be RED or BLUE, got {color}")
        return int(np.count_nonzero(self.cells == color))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Torus):
            return NotImplemented
        return np.array_equal(self.cells, other.cells)

    @classmethod
    def from_text(cls, text: str) -> Torus:
        return cls(_parse_grid(text, alphabet=".RB"))

    def to_text(self) -> str:
        return _format_grid(self.cells, symbols=".RB")


def _parse_grid(text: str, alphabet: str) -> np.ndarray:
    """Parse the shared grid format into a small-int array.

    Character k of `alphabet` maps to cell value k. Strict: the header must
    carry exactly two positive integers, every row must have exactly `width`
    characters from `alphabet`, and the text must end with a newline.
    """
    if not text.endswith("\n"):
        raise PatternFormatError("grid text must end with a trailing newline")
    lines = text.split("\n")
    # split on a trailing \n leaves one empty string at the end
    lines = lines[:-1]
    if not lines:
        raise PatternFormatError("empty grid text")
    header = lines[0].split()
    if len(header) != 2:
        raise PatternFormatError(f"bad header {lines[0]!r}: expected '<width> <height>'")
    try:
        width, height = int(header[0]), int(header[1])
    except ValueError:
        raise PatternFormatError(f"bad header {lines[0]!r}: expected '<width> <height>'") from None
    if width < 1 or height < 1:
        raise PatternFormatError(f"grid dimensions must be positive, got {width}x{height}")
    rows = lines[1:]
    if len(rows) != height:
        raise PatternFormatError(f"expected {height} rows, got {len(rows)}")
    values = {ch: i for i, ch in enumerate(alphabet)}
    grid = np.zeros((height, width), dtype=np.uint8)
    for y, row in enumerate(rows):
        if len(row) != width:
            raise PatternFormatError(f"row {y + 1} has {len(row)} characters, expected {width}")
        for x, ch in enumerate(row):
            if ch not in values:
                raise PatternFormatError(f"bad character {ch!r} in row {y + 1}")
            grid[y, x] = values[ch]
    return grid


def _format_grid(grid: np.ndarray, symbols: str) -> str:
    lines = [f"{grid.shape[1]} {grid.shape[0]}"]
    for row in grid:
        lines.append("".join(symbols[v] for v in row))
    return "\n".join(lines) + "\n"


def load_seed(path: str) -> SeedPattern:
    with open(path, encoding="utf-8", newline="") as fh:
        return SeedPattern.from_text(fh.read())


def save_seed(path: str, seed: SeedPattern) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(seed.to_text())
