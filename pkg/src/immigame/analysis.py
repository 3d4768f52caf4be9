"""External fitness measurement and run classification.

External fitness pits an individual against freshly generated random seeds of
the same bounding box and live-cell count, so it is comparable across
populations and generations. It never feeds back into selection.
"""
from __future__ import annotations

import numpy as np

from .engine import GAMES_PER_MATCH, MatchRunner, play_match
from .patterns import SeedPattern
from .rules import Rule, format_rule, group1_rules

OPEN = "Open"
CLOSED = "Closed"
NONE = "None"

DEFAULT_OPPONENTS = 20

# classify_run thresholds: how far a flat curve may stray from the 50% mean,
# and what counts as "saturated early" for a closed run
NONE_BAND = 3.0
CLOSED_FINAL = 97.0
CLOSED_FLAT_GAIN = 1.0

REPORT_HEADER = "group,rule,evolution,pct_fitness,pct_shrink,pct_stable,pct_grow"


def random_opponent_like(seed: SeedPattern, rng: np.random.Generator) -> SeedPattern:
    """A random seed with the same box and exactly the same live-cell count."""
    live = seed.live_count()
    if live == 0:
        raise ValueError("cannot build an opponent for an empty seed")
    cells = np.zeros(seed.width * seed.height, dtype=bool)
    positions = rng.choice(cells.size, size=live, replace=False)
    cells[positions] = True
    return SeedPattern(cells.reshape(seed.height, seed.width))


def external_fitness(
    individual, rule: Rule, n_opponents: int, rng: np.random.Generator
) -> float:
    """Win fraction against `n_opponents` random look-alike seeds."""
    if n_opponents < 1:
        raise ValueError(f"n_opponents must be at least 1, got {n_opponents}")
    opponents = [random_opponent_like(individual.seed, rng) for _ in range(n_opponents)]
    points = sum(play_match(individual.seed, opp, rule).red_points for opp in opponents)
    return points / (GAMES_PER_MATCH * n_opponents)


def population_external_fitness(
    pop,
    rule: Rule,
    n_opponents: int,
    rng: np.random.Generator,
    runner: MatchRunner | None = None,
) -> float:
    """Mean external fitness of the top half of the population, in percent.

    Members are ranked by internal fitness (ties by id); opponents are drawn
    for each ranked member in turn, so the result matches per-member calls of
    :func:`external_fitness` on the same stream.
    """
    ranked = sorted(pop.members, key=lambda m: (-pop.internal_fitness(m.id), m.id))
    top = ranked[: len(ranked) // 2]
    pairs = []
    for member in top:
        for _ in range(n_opponents):
            pairs.append((member.seed, random_opponent_like(member.seed, rng)))
    if runner is None:
        results = [play_match(red, blue, rule) for red, blue in pairs]
    else:
        results = runner.run(pairs, rule)
    total = sum(result.red_points for result in results)
    return 100.0 * total / (len(top) * n_opponents * GAMES_PER_MATCH)


def classify_run(curve: list[float]) -> str:
    """Label a fitness curve OPEN, CLOSED, or NONE.

    NONE: every generation within 50 +/- 3 points. CLOSED: the final value is
    above 97 and the last quarter improved on the third quarter by less than
    one point (saturated early). Anything else is OPEN.
    """
    if len(curve) < 4:
        raise ValueError(f"need at least 4 generations to classify, got {len(curve)}")
    if all(abs(v - 50.0) <= NONE_BAND for v in curve):
        return NONE
    quarter = len(curve) // 4
    third = curve[2 * quarter : 3 * quarter]
    fourth = curve[3 * quarter :]
    gain = sum(fourth) / len(fourth) - sum(third) / len(third)
    if curve[-1] > CLOSED_FINAL and gain < CLOSED_FLAT_GAIN:
        return CLOSED
    return OPEN


def _group_label(rule: Rule) -> int:
    """Best-effort group attribution for report rows.

    Fixed-list rules are group 1; rules meeting the growth-and-decay sampling
    constraint are group 3; everything else is group 2.
    """
    if rule in group1_rules():
        return 1
    if 3 in rule.born and 1 not in rule.born:
        return 3
    return 2


def emit_table1_report(rules, verdicts, fitnesses, triples) -> str:
    """Combined per-rule summary CSV: verdict, final fitness, and triple."""
    if not len(rules) == len(verdicts) == len(fitnesses) == len(triples):
        raise ValueError("rules, verdicts, fitnesses, and triples must align")
    lines = [REPORT_HEADER]
    for rule, verdict, fitness, triple in zip(rules, verdicts, fitnesses, triples):
        lines.append(
            f"{_group_label(rule)},{format_rule(rule)},{verdict},{fitness:.1f},"
            f"{round(triple.shrink)},{round(triple.stable)},{round(triple.grow)}"
        )
    return "\n".join(lines) + "\n"


def curve_csv(records) -> str:
    """Fitness-curve CSV rows from per-generation records."""
    lines = ["generation,mean_top_half_external_fitness_pct"]
    for record in records:
        lines.append(f"{record.generation},{record.external_fitness_pct:.4f}")
    return "\n".join(lines) + "\n"
