"""Deterministic two-colour Immigration Game engine.

Covers stepping a torus, placing two seeds for a game, running a game to its
time limit, and aggregating the eight placement variants of a match.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .patterns import BLUE, DEAD, RED, SeedPattern, Torus
from .rules import Rule

MIN_TORUS_SIDE = 32
TORUS_SCALE = 4  # torus side = 4x the seed extent it has to hold
MIN_TIME_LIMIT = 256
TIME_LIMIT_SCALE = 8  # steps per torus diameter

GAMES_PER_MATCH = 8

WIN = 1.0
TIE = 0.5


@dataclass(frozen=True)
class GameOutcome:
    """Scores of one game; the winner grew the most."""

    red_score: int
    blue_score: int

    @property
    def winner(self) -> str:
        if self.red_score > self.blue_score:
            return "Red"
        if self.blue_score > self.red_score:
            return "Blue"
        return "Tie"

    @property
    def red_points(self) -> float:
        if self.red_score > self.blue_score:
            return WIN
        return TIE if self.red_score == self.blue_score else 0.0

    @property
    def blue_points(self) -> float:
        return 1.0 - self.red_points


@dataclass(frozen=True)
class MatchResult:
    """Outcomes of the eight placement variants between two seeds."""

    games: tuple[GameOutcome, ...]

    @property
    def red_points(self) -> float:
        return sum(g.red_points for g in self.games)

    @property
    def blue_points(self) -> float:
        return sum(g.blue_points for g in self.games)


def step(torus: Torus, rule: Rule) -> Torus:
    """Advance the torus one step; the input is left unmodified.

    A dead cell with a birth-count of live neighbours takes the colour of the
    strict neighbour majority (odd counts cannot tie); a live cell with a
    survival count keeps its colour; every other cell is dead next step.
    """
    coded = kernels.encode(torus.cells)
    out = kernels.step_coded(coded, kernels.rule_table(rule))
    return Torus(kernels.decode(out))


def step_reference(torus: Torus, rule: Rule) -> Torus:
    """Plain-numpy stepper used to cross-check the compiled kernel."""
    cells = torus.cells
    red = (cells == RED).astype(np.uint8)
    blue = (cells == BLUE).astype(np.uint8)
    n_red = _wrap_neighbor_counts(red)
    n_blue = _wrap_neighbor_counts(blue)
    n = n_red + n_blue
    born_at = np.zeros(9, dtype=bool)
    born_at[list(rule.born)] = True
    survive_at = np.zeros(9, dtype=bool)
    survive_at[list(rule.survive)] = True
    alive = cells != DEAD
    births = ~alive & born_at[n]
    assert not np.any(births & (n_red == n_blue)), "tied birth under an odd-birth rule"
    keeps = alive & survive_at[n]
    out = np.where(keeps, cells, DEAD).astype(np.uint8)
    out[births] = np.where(n_red[births] > n_blue[births], RED, BLUE)
    return Torus(out)


def _wrap_neighbor_counts(plane: np.ndarray) -> np.ndarray:
    p = np.pad(plane, 1, mode="wrap")
    return (
        p[:-2, :-2] + p[:-2, 1:-1] + p[:-2, 2:]
        + p[1:-1, :-2] + p[1:-1, 2:]
        + p[2:, :-2] + p[2:, 1:-1] + p[2:, 2:]
    )


def merge_colors(torus: Torus) -> Torus:
    """Recolour every blue cell red; used for colour-blind equivalence checks."""
    return Torus(np.where(torus.cells == BLUE, RED, torus.cells).astype(np.uint8))


def _torus_size(left: SeedPattern, right: SeedPattern) -> tuple[int, int]:
    width = max(MIN_TORUS_SIDE, TORUS_SCALE * (left.width + right.width))
    height = max(MIN_TORUS_SIDE, TORUS_SCALE * max(left.height, right.height))
    return width, height


def place_seeds(red: SeedPattern, blue: SeedPattern, variant: int) -> Torus:
    """Stamp the two seeds onto a fresh torus sized to fit them.

    The torus is 4x the combined seed widths by 4x the taller seed (at least
    32x32), with one seed centred in each half. `variant` mod 4 rotates the
    right-hand seed by quarter turns; variants 4..7 swap which half each seed
    occupies. Rotating whichever seed sits on the right keeps the variant set
    closed under colour exchange, so a match and its colour-swapped mirror
    play game-for-game identical configurations.
    """
    if not 0 <= variant < GAMES_PER_MATCH:
        raise ValueError(f"placement variant must be 0..7, got {variant}")
    turns = variant % 4
    if variant < 4:
        left_seed, left_color = red, RED
        right_seed, right_color = blue.rotated(turns), BLUE
    else:
        left_seed, left_color = blue, BLUE
        right_seed, right_color = red.rotated(turns), RED
    width, height = _torus_size(left_seed, right_seed)
    cells = np.zeros((height, width), dtype=np.uint8)
    _stamp(cells, left_seed, width // 4, height // 2, left_color)
    _stamp(cells, right_seed, 3 * width // 4, height // 2, right_color)
    return Torus(cells)


def _stamp(cells: np.ndarray, seed: SeedPattern, cx: int, cy: int, color: int) -> None:
    x = cx - seed.width // 2
    y = cy - seed.height // 2
    region = cells[y : y + seed.height, x : x + seed.width]
    region[seed.cells] = color


def time_limit(red: SeedPattern, blue: SeedPattern) -> int:
    """Step budget for a game: 8 torus diameters, at least 256."""
    width, height = _torus_size(red, blue)
    return max(MIN_TIME_LIMIT, TIME_LIMIT_SCALE * max(width, height))


def score(initial: Torus, final: Torus) -> tuple[int, int]:
    """Per-colour growth from `initial` to `final`, clamped at zero."""
    if (initial.width, initial.height) != (final.width, final.height):
        raise ValueError(
            f"torus dimensions differ: {initial.width}x{initial.height} "
            f"vs {final.width}x{final.height}"
        )
    red = max(0, final.live_count(RED) - initial.live_count(RED))
    blue = max(0, final.live_count(BLUE) - initial.live_count(BLUE))
    return red, blue


def game_trace(
    red: SeedPattern, blue: SeedPattern, rule: Rule, variant: int
) -> tuple[Torus, Torus, GameOutcome]:
    """Run one game and keep the initial and final tori for inspection."""
    initial = place_seeds(red, blue, variant)
    limit = time_limit(red, blue)
    coded = kernels.encode(initial.cells)
    final_coded = kernels.run_coded(coded, kernels.rule_table(rule), limit)
    final = Torus(kernels.decode(final_coded))
    red_score, blue_score = score(initial, final)
    return initial, final, GameOutcome(red_score=red_score, blue_score=blue_score)


def play_game(red: SeedPattern, blue: SeedPattern, rule: Rule, variant: int) -> GameOutcome:
    """Place, run to the time limit (early exit at fixed points), and score."""
    return game_trace(red, blue, rule, variant)[2]


def play_match(red: SeedPattern, blue: SeedPattern, rule: Rule) -> MatchResult:
    """Play all eight placement variants between two seeds."""
    return MatchResult(
        games=tuple(play_game(red, blue, rule, variant) for variant in range(GAMES_PER_MATCH))
    )


def _match_task(args: tuple[np.ndarray, np.ndarray, Rule]) -> MatchResult:
    red_cells, blue_cells, rule = args
    return play_match(SeedPattern(red_cells), SeedPattern(blue_cells), rule)


class MatchRunner:
    """Evaluates batches of matches, optionally across worker processes.

    Results are returned in input order, so parallel evaluation cannot change
    any downstream value.
    """

    def __init__(self, workers: int = 1):
        self._pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None

    def run(self, pairs: list[tuple[SeedPattern, SeedPattern]], rule: Rule) -> list[MatchResult]:
        tasks = [(red.cells, blue.cells, rule) for red, blue in pairs]
        if self._pool is None or len(tasks) < 2:
            return [_match_task(t) for t in tasks]
        return list(self._pool.map(_match_task, tasks, chunksize=4))

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __enter__(self) -> MatchRunner:
        return self

    def __exit__(self, *exc) -> None:
        self.close()
