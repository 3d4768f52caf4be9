"""Shrink/stable/grow characterisation of a rule from random seed trials.

A trial drops a random 16x16 seed onto a large torus, runs 200 steps, and
compares the final live count with the initial one: below 80% is a shrink,
above 125% a grow, anything between is stable. Repeating the trial many times
yields the rule's triple, whose grow component predicts whether the rule can
support open-ended evolution.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .patterns import SeedPattern
from .rules import Rule

SHRINK = "shrink"
STABLE = "stable"
GROW = "grow"

CLASSIFY_GRID = 128
CLASSIFY_STEPS = 200
DEFAULT_TRIALS = 1000
DEFAULT_BOX = 16

# Trial seed density, calibrated once against the B3/S23 triple and frozen.
# A fixed density cannot reproduce the known triples (B3/S23 needs dense
# seeds to shrink 71% of the time, while rules like B37/S34567 only ever
# shrink from sparse seeds), so each trial draws its density uniformly from
# this range.
DEFAULT_DENSITY: tuple[float, float] = (0.15, 0.9)

_TRIAL_STREAM = 7  # substream tag separating trial draws from other uses


def density_bounds(density) -> tuple[float, float]:
    """Normalise a fixed density or a (low, high) range to a range."""
    if isinstance(density, tuple):
        low, high = density
    else:
        low = high = float(density)
    if not 0.0 <= low <= high <= 1.0:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    return low, high


def density_label(density) -> str:
    """Compact text form of a density spec, used in CSV output."""
    low, high = density_bounds(density)
    return f"{low:g}" if low == high else f"{low:g}-{high:g}"


@dataclass(frozen=True)
class Triple:
    """Per-category trial counts for one rule."""

    n_shrink: int
    n_stable: int
    n_grow: int

    @property
    def trials(self) -> int:
        return self.n_shrink + self.n_stable + self.n_grow

    @property
    def shrink(self) -> float:
        return 100.0 * self.n_shrink / self.trials

    @property
    def stable(self) -> float:
        return 100.0 * self.n_stable / self.trials

    @property
    def grow(self) -> float:
        return 100.0 * self.n_grow / self.trials

    def __str__(self) -> str:
        return f"[{self.shrink:.0f}% shrink, {self.stable:.0f}% stable, {self.grow:.0f}% grow]"


def random_boxed_seed(
    rng: np.random.Generator, box: int = DEFAULT_BOX, density: float = 0.5
) -> SeedPattern:
    """A box x box pattern with each cell independently alive at `density`."""
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    return SeedPattern(rng.random((box, box)) < density)


def classify_trial(rule: Rule, seed: SeedPattern) -> str:
    """Outcome of one trial: SHRINK, STABLE, or GROW.

    The seed is placed single-colour in the centre of a 128x128 torus and run
    for 200 steps. Thresholds compare exact cell counts, so 80% and 125% both
    land on STABLE.
    """
    initial = seed.live_count()
    if initial == 0:
        raise ValueError("cannot classify an empty seed; redraw it instead")
    if seed.width > CLASSIFY_GRID or seed.height > CLASSIFY_GRID:
        raise ValueError(f"seed exceeds the {CLASSIFY_GRID}x{CLASSIFY_GRID} classification torus")
    coded = np.zeros((CLASSIFY_GRID + 2, CLASSIFY_GRID + 2), dtype=np.uint8)
    y = 1 + (CLASSIFY_GRID - seed.height) // 2
    x = 1 + (CLASSIFY_GRID - seed.width) // 2
    coded[y : y + seed.height, x : x + seed.width] = seed.cells
    final = kernels.run_coded(
        coded, kernels.rule_table(rule), CLASSIFY_STEPS, settle_oscillators=True
    )
    count = int(np.count_nonzero(final[1:-1, 1:-1]))
    if 5 * count < 4 * initial:
        return SHRINK
    if 4 * count > 5 * initial:
        return GROW
    return STABLE


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    # one independent substream per trial keeps any execution order equivalent
    return np.random.default_rng([seed, _TRIAL_STREAM, index])


def _classify_range(
    rule: Rule, start: int, stop: int, density, seed: int
) -> tuple[int, int, int]:
    low, high = density_bounds(density)
    counts = {SHRINK: 0, STABLE: 0, GROW: 0}
    for index in range(start, stop):
        rng = _trial_rng(seed, index)
        d = low if low == high else low + (high - low) * rng.random()
        pattern = random_boxed_seed(rng, density=d)
        while pattern.live_count() == 0:
            pattern = random_boxed_seed(rng, density=d)
        counts[classify_trial(rule, pattern)] += 1
    return counts[SHRINK], counts[STABLE], counts[GROW]


def classify_rule(
    rule: Rule,
    trials: int = DEFAULT_TRIALS,
    density=DEFAULT_DENSITY,
    seed: int = 0,
    workers: int = 1,
) -> Triple:
    """Run `trials` independent trials and tally the triple.

    `density` is either one per-cell probability for every trial or a
    (low, high) range sampled uniformly per trial. Deterministic in
    (rule, trials, density, seed) no matter how the trials are spread over
    workers. Empty draws are redrawn, so an all-zero density is rejected.
    """
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    low, high = density_bounds(density)
    if high == 0.0:
        raise ValueError("density 0 can only produce empty seeds")
    if workers > 1 and trials >= 8:
        bounds = np.linspace(0, trials, workers * 4 + 1, dtype=int)
        spans = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if a < b]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(_classify_span, [(rule, a, b, density, seed) for a, b in spans])
            )
    else:
        parts = [_classify_range(rule, 0, trials, density, seed)]
    n_shrink = sum(p[0] for p in parts)
    n_stable = sum(p[1] for p in parts)
    n_grow = sum(p[2] for p in parts)
    return Triple(n_shrink=n_shrink, n_stable=n_stable, n_grow=n_grow)


def _classify_span(args: tuple[Rule, int, int, float, int]) -> tuple[int, int, int]:
    return _classify_range(*args)


def predict_open(triple: Triple) -> bool:
    """True when at least one trial grew; the open-ended evolution predictor."""
    return triple.n_grow > 0
