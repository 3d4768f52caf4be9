"""Parsing, formatting, enumeration, and sampling of Immigration Game rules.

An Immigration Game rule is a life-like B<x>/S<y> rule whose birth counts are
all odd, so a newborn cell always sees a strict colour majority among its live
neighbours and no tie-breaking rule is needed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

VALID_BORN = frozenset({1, 3, 5, 7})
VALID_SURVIVE = frozenset(range(9))

IMMIGRATION_RULE_COUNT = 8192  # 2**13: four odd birth digits, nine survival digits
GROUP3_RULE_COUNT = 2048  # 2**11: birth must contain 3 and exclude 1

# The thirteen Turing-complete rules whose birth counts are all odd.
GROUP1_RULE_STRINGS = (
    "B3/S23",
    "B3/S236",
    "B3/S2367",
    "B3/S23678",
    "B3/S2368",
    "B3/S237",
    "B3/S2378",
    "B3/S238",
    "B35/S236",
    "B37/S23",
    "B37/S236",
    "B37/S237",
    "B37/S238",
)


class RuleError(ValueError):
    """Base class for rule parsing and validation failures."""


class RuleSyntaxError(RuleError):
    """The text does not have the B<digits>/S<digits> shape."""


class RuleValidationError(RuleError):
    """Digits are duplicated or outside the 0..8 neighbour-count range."""


class EvenBirthError(RuleError):
    """A birth count is even (including 0), so the majority colour could tie."""


@dataclass(frozen=True)
class Rule:
    """A B<x>/S<y> rule restricted to odd birth counts.

    `born` holds the neighbour counts at which a dead cell comes alive,
    `survive` the counts at which a live cell stays alive.
    """

    born: frozenset[int]
    survive: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "born", frozenset(self.born))
        object.__setattr__(self, "survive", frozenset(self.survive))
        bad = self.survive - VALID_SURVIVE
        if bad:
            raise RuleValidationError(f"survive counts out of range 0..8: {sorted(bad)}")
        out_of_range = {d for d in self.born if d not in VALID_SURVIVE}
        if out_of_range:
            raise RuleValidationError(f"born counts out of range 0..8: {sorted(out_of_range)}")
        even = {d for d in self.born if d % 2 == 0}
        if even:
            raise EvenBirthError(
                f"born counts must be odd, got {sorted(even)}: "
                "an even count allows a red/blue tie at birth"
            )

    def __str__(self) -> str:
        return format_rule(self)


_RULE_RE = re.compile(r"^B([0-9]*)/S([0-9]*)$")


def parse_rule(text: str) -> Rule:
    """Parse a rule string like ``B3/S23`` into a :class:`Rule`.

    Raises :class:`RuleSyntaxError` for malformed text,
    :class:`RuleValidationError` for duplicate or out-of-range digits, and
    :class:`EvenBirthError` when a birth digit is even (0 included).
    """
    match = _RULE_RE.match(text)
    if match is None:
        raise RuleSyntaxError(f"malformed rule {text!r}: expected B<digits>/S<digits>")
    born = _digit_set(match.group(1), "born")
    survive = _digit_set(match.group(2), "survive")
    return Rule(born=born, survive=survive)


def _digit_set(digits: str, part: str) -> frozenset[int]:
    values = [int(ch) for ch in digits]
    seen: set[int] = set()
    for v in values:
        if v in seen:
            raise RuleValidationError(f"duplicate digit {v} in {part} part")
        seen.add(v)
    return frozenset(values)


def format_rule(rule: Rule) -> str:
    """Canonical ascending-digit text form; inverse of :func:`parse_rule`."""
    born = "".join(str(d) for d in sorted(rule.born))
    survive = "".join(str(d) for d in sorted(rule.survive))
    return f"B{born}/S{survive}"


@lru_cache(maxsize=1)
def _universe() -> tuple[Rule, ...]:
    rules = []
    for born_bits in range(16):
        born = frozenset(d for i, d in enumerate((1, 3, 5, 7)) if born_bits >> i & 1)
        for survive_bits in range(512):
            survive = frozenset(d for d in range(9) if survive_bits >> d & 1)
            rules.append(Rule(born, survive))
    rules.sort(key=format_rule)
    return tuple(rules)


def enumerate_immigration_rules() -> list[Rule]:
    """All 8,192 Immigration rules, ordered by their canonical string."""
    return list(_universe())


def group1_rules() -> list[Rule]:
    """The fixed list of 13 Turing-complete Immigration rules."""
    return [parse_rule(s) for s in GROUP1_RULE_STRINGS]


def sample_group2(rng: np.random.Generator, n: int) -> list[Rule]:
    """Draw `n` distinct rules uniformly from the full 8,192-rule family."""
    universe = _universe()
    if n > len(universe):
        raise ValueError(f"cannot sample {n} rules from a family of {len(universe)}")
    indices = rng.choice(len(universe), size=n, replace=False)
    return [universe[i] for i in indices]


@lru_cache(maxsize=1)
def _group3_candidates() -> tuple[Rule, ...]:
    return tuple(r for r in _universe() if 3 in r.born and 1 not in r.born)


def group3_candidates() -> list[Rule]:
    """The 2,048 rules whose birth counts contain 3 and exclude 1."""
    return list(_group3_candidates())


def sample_group3(rng: np.random.Generator, n: int) -> list[Rule]:
    """Draw `n` distinct rules uniformly from the growth-and-decay subfamily."""
    candidates = _group3_candidates()
    if n > len(candidates):
        raise ValueError(f"cannot sample {n} rules from {len(candidates)} candidates")
    indices = rng.choice(len(candidates), size=n, replace=False)
    return [candidates[i] for i in indices]
