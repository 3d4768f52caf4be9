"""Steady-state coevolution of seed patterns under one Immigration rule.

A fixed-size population plays a full round robin of matches; each birth, one
offspring is produced by a tournament-selected parent (or pair of parents),
plays everyone, and the least fit of the enlarged population is removed.
Internal fitness is the win fraction against current members, so its
population mean is 0.5 by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import population_external_fitness
from .classifier import random_boxed_seed
from .engine import GAMES_PER_MATCH, GameOutcome, MatchResult, MatchRunner
from .patterns import SeedPattern
from .rules import Rule, format_rule, parse_rule

OPERATOR_NAMES = ("fixed", "variable", "sexual", "fusion")

_STREAM_EVOLUTION = 11
_STREAM_EXTERNAL = 12


@dataclass(frozen=True)
class EvolutionConfig:
    """Everything a run depends on; two equal configs give bit-equal runs."""

    rule: Rule
    master_seed: int
    capacity: int = 100
    generations: int = 50
    mutation_rate: float = 0.01
    operator_weights: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)
    initial_seed_box: int = 16
    initial_density: float = 0.375
    n_opponents: int = 20

    def __post_init__(self) -> None:
        if self.capacity < 2:
            raise ValueError(f"capacity must be at least 2, got {self.capacity}")
        if self.generations < 0:
            raise ValueError(f"generations must be non-negative, got {self.generations}")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        weights = tuple(self.operator_weights)
        if len(weights) != 4 or any(w < 0 for w in weights) or sum(weights) <= 0:
            raise ValueError(
                "operator_weights needs four non-negative values with a positive sum"
            )
        object.__setattr__(self, "operator_weights", weights)
        if self.initial_seed_box < 1:
            raise ValueError(f"initial_seed_box must be positive, got {self.initial_seed_box}")
        if not 0.0 <= self.initial_density <= 1.0:
            raise ValueError(f"initial_density must be in [0, 1], got {self.initial_density}")
        if self.n_opponents < 1:
            raise ValueError(f"n_opponents must be at least 1, got {self.n_opponents}")

    def to_dict(self) -> dict:
        return {
            "rule": format_rule(self.rule),
            "master_seed": self.master_seed,
            "capacity": self.capacity,
            "generations": self.generations,
            "mutation_rate": self.mutation_rate,
            "operator_weights": list(self.operator_weights),
            "initial_seed_box": self.initial_seed_box,
            "initial_density": self.initial_density,
            "n_opponents": self.n_opponents,
        }

    @classmethod
    def from_dict(cls, data: dict) -> EvolutionConfig:
        known = dict(data)
        rule = parse_rule(known.pop("rule"))
        weights = tuple(known.pop("operator_weights"))
        return cls(rule=rule, operator_weights=weights, **known)


@dataclass
class Individual:
    """One population member: an id, a genome, and when it was born."""

    id: int
    seed: SeedPattern
    birth_index: int

    def __post_init__(self) -> None:
        if self.seed.live_count() == 0:
            raise ValueError("an individual's seed must have at least one live cell")


@dataclass(frozen=True)
class BirthRecord:
    birth_index: int
    id: int
    operator: str
    parent_ids: tuple[int, ...]
    internal_fitness: float


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    external_fitness_pct: float


@dataclass
class RunLog:
    """Per-birth and per-generation history of a run."""

    births: list[BirthRecord] = field(default_factory=list)
    generations: list[GenerationRecord] = field(default_factory=list)

    def curve(self) -> list[float]:
        return [g.external_fitness_pct for g in self.generations]


def runlog_csv(log: RunLog) -> str:
    """Birth records as CSV, one row per birth."""
    lines = ["birth_index,id,operator,parent_ids,internal_fitness"]
    for r in log.births:
        parents = ";".join(str(p) for p in r.parent_ids)
        lines.append(f"{r.birth_index},{r.id},{r.operator},{parents},{r.internal_fitness:.6f}")
    return "\n".join(lines) + "\n"


class Population:
    """Fixed-capacity member list plus the full pairwise match matrix.

    Matches are cached per unordered pair with the lower id playing red;
    because the placement variants are closed under colour exchange, the
    cached points are identical whichever seed had played red.
    """

    def __init__(self, rule: Rule, capacity: int):
        self.rule = rule
        self.capacity = capacity
        self.members: list[Individual] = []
        self.births_so_far = 0
        self._pairwise: dict[tuple[int, int], MatchResult] = {}
        self._next_id = 0

    def allocate_id(self) -> int:
        new_id = self._next_id
        self._next_id += 1
        return new_id

    def pair_count(self) -> int:
        return len(self._pairwise)

    def match_between(self, a_id: int, b_id: int) -> MatchResult:
        return self._pairwise[(min(a_id, b_id), max(a_id, b_id))]

    def points_between(self, member_id: int, opponent_id: int) -> float:
        result = self.match_between(member_id, opponent_id)
        return result.red_points if member_id < opponent_id else result.blue_points

    def internal_fitness(self, member_id: int) -> float:
        """Win fraction of one member against every current member."""
        others = [m.id for m in self.members if m.id != member_id]
        if len(others) == len(self.members):
            raise ValueError(f"individual {member_id} is not in the population")
        points = sum(self.points_between(member_id, other) for other in others)
        return points / (GAMES_PER_MATCH * len(others))

    def mean_internal_fitness(self) -> float:
        """Population mean computed exactly; 0.5 whenever the matrix is complete."""
        n = len(self.members)
        total = sum(
            self.points_between(m.id, o.id)
            for m in self.members
            for o in self.members
            if m.id != o.id
        )
        return total / (GAMES_PER_MATCH * n * (n - 1))

    def _store_match(self, a_id: int, b_id: int, result: MatchResult) -> None:
        assert a_id < b_id
        self._pairwise[(a_id, b_id)] = result

    def _forget_member(self, member_id: int) -> None:
        self._pairwise = {
            key: value for key, value in self._pairwise.items() if member_id not in key
        }

    def insert(self, new: Individual, runner: MatchRunner | None = None) -> tuple[float, int]:
        """Match `new` against everyone, then drop the least fit individual.

        Returns the newcomer's internal fitness at decision time and the id of
        the removed member. Fitness ties are broken by removing the lowest id.
        """
        if len(self.members) != self.capacity:
            raise ValueError("population must be at capacity before an insertion")
        pairs = [(m.seed, new.seed) for m in self.members]
        results = _run_matches(pairs, self.rule, runner)
        for member, result in zip(self.members, results):
            self._store_match(member.id, new.id, result)

        candidates = self.members + [new]
        game_count = GAMES_PER_MATCH * (len(candidates) - 1)
        fitness = {
            c.id: sum(self.points_between(c.id, o.id) for o in candidates if o.id != c.id)
            / game_count
            for c in candidates
        }
        removed_id = min(fitness, key=lambda member_id: (fitness[member_id], member_id))
        new_fitness = fitness[new.id]

        if removed_id != new.id:
            self.members = [m for m in self.members if m.id != removed_id] + [new]
        self._forget_member(removed_id)
        self.births_so_far += 1
        return new_fitness, removed_id


def _run_matches(pairs, rule, runner: MatchRunner | None):
    if runner is None:
        runner = MatchRunner(workers=1)
    return runner.run(pairs, rule)


def internal_fitness(pop: Population, member: Individual) -> float:
    """Win fraction of `member` over all games against current members."""
    return pop.internal_fitness(member.id)


def init_population(
    config: EvolutionConfig, rng: np.random.Generator, runner: MatchRunner | None = None
) -> Population:
    """Random genomes for every slot, then the full pairwise round robin."""
    pop = Population(config.rule, config.capacity)
    for _ in range(config.capacity):
        seed = random_boxed_seed(rng, config.initial_seed_box, config.initial_density)
        while seed.live_count() == 0:
            seed = random_boxed_seed(rng, config.initial_seed_box, config.initial_density)
        pop.members.append(Individual(id=pop.allocate_id(), seed=seed, birth_index=0))
    pairs = []
    keys = []
    for i, a in enumerate(pop.members):
        for b in pop.members[i + 1 :]:
            pairs.append((a.seed, b.seed))
            keys.append((a.id, b.id))
    for key, result in zip(keys, _run_matches(pairs, config.rule, runner)):
        pop._store_match(key[0], key[1], result)
    return pop


def select_parent(pop: Population, rng: np.random.Generator) -> Individual:
    """Binary tournament: two distinct members, the fitter one wins."""
    return _tournament(pop, pop.members, rng)


def _tournament(pop: Population, candidates, rng: np.random.Generator) -> Individual:
    if len(candidates) == 1:
        return candidates[0]
    i, j = rng.choice(len(candidates), size=2, replace=False)
    a, b = candidates[int(i)], candidates[int(j)]
    fa, fb = pop.internal_fitness(a.id), pop.internal_fitness(b.id)
    if fa > fb:
        return a
    if fb > fa:
        return b
    return a if int(rng.integers(2)) == 0 else b


def _ensure_nonempty(cells: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    if not cells.any():
        cells.flat[int(rng.integers(cells.size))] = True
    return cells


def mutate_fixed(seed: SeedPattern, rate: float, rng: np.random.Generator) -> SeedPattern:
    """Flip each cell independently at `rate`; the box size is kept."""
    flips = rng.random(seed.cells.shape) < rate
    return SeedPattern(_ensure_nonempty(seed.cells ^ flips, rng))


def mutate_variable(seed: SeedPattern, rate: float, rng: np.random.Generator) -> SeedPattern:
    """Maybe grow or shrink the box by one row/column, then point-mutate.

    One third chance each: add a dead row/column on a uniformly chosen side,
    remove a boundary row/column (refused if a dimension would hit zero), or
    keep the box as is.
    """
    cells = seed.cells
    branch = rng.random()
    if branch < 1.0 / 3.0:
        side = int(rng.integers(4))
        h, w = cells.shape
        if side == 0:
            cells = np.hstack([np.zeros((h, 1), dtype=bool), cells])
        elif side == 1:
            cells = np.hstack([cells, np.zeros((h, 1), dtype=bool)])
        elif side == 2:
            cells = np.vstack([np.zeros((1, w), dtype=bool), cells])
        else:
            cells = np.vstack([cells, np.zeros((1, w), dtype=bool)])
    elif branch < 2.0 / 3.0:
        side = int(rng.integers(4))
        if side in (0, 1) and cells.shape[1] > 1:
            cells = cells[:, 1:] if side == 0 else cells[:, :-1]
        elif side in (2, 3) and cells.shape[0] > 1:
            cells = cells[1:, :] if side == 2 else cells[:-1, :]
        # otherwise the removal is refused and the box stays
    return mutate_fixed(SeedPattern(cells), rate, rng)


def crossover(a: SeedPattern, b: SeedPattern, rng: np.random.Generator) -> SeedPattern:
    """Vertical-cut recombination into the first parent's bounding box."""
    cut = 1 if a.width == 1 else int(rng.integers(1, a.width))
    child = np.zeros_like(a.cells)
    child[:, :cut] = a.cells[:, :cut]
    fitted = np.zeros_like(a.cells)
    h = min(a.height, b.height)
    w = min(a.width, b.width)
    fitted[:h, :w] = b.cells[:h, :w]
    child[:, cut:] = fitted[:, cut:]
    return SeedPattern(_ensure_nonempty(child, rng))


def fuse(a: SeedPattern, b: SeedPattern, rng: np.random.Generator) -> SeedPattern:
    """Concatenate the parents with a one-cell dead gap between them."""
    horizontal = int(rng.integers(2)) == 0
    if horizontal:
        height = max(a.height, b.height)
        child = np.zeros((height, a.width + 1 + b.width), dtype=bool)
        child[: a.height, : a.width] = a.cells
        child[: b.height, a.width + 1 :] = b.cells
    else:
        width = max(a.width, b.width)
        child = np.zeros((a.height + 1 + b.height, width), dtype=bool)
        child[: a.height, : a.width] = a.cells
        child[a.height + 1 :, : b.width] = b.cells
    return SeedPattern(child)


def spawn_offspring(
    pop: Population, config: EvolutionConfig, rng: np.random.Generator
) -> tuple[Individual, str, tuple[int, ...]]:
    """Produce one offspring; returns (individual, operator, parent ids)."""
    weights = np.asarray(config.operator_weights, dtype=float)
    operator = OPERATOR_NAMES[int(rng.choice(4, p=weights / weights.sum()))]
    first = select_parent(pop, rng)
    if operator in ("fixed", "variable"):
        parents = (first,)
        if operator == "fixed":
            seed = mutate_fixed(first.seed, config.mutation_rate, rng)
        else:
            seed = mutate_variable(first.seed, config.mutation_rate, rng)
    else:
        others = [m for m in pop.members if m.id != first.id]
        second = _tournament(pop, others, rng)
        parents = (first, second)
        if operator == "sexual":
            seed = crossover(first.seed, second.seed, rng)
        else:
            seed = fuse(first.seed, second.seed, rng)
        seed = mutate_fixed(seed, config.mutation_rate, rng)
    individual = Individual(
        id=pop.allocate_id(), seed=seed, birth_index=pop.births_so_far + 1
    )
    return individual, operator, tuple(p.id for p in parents)


def insert_individual(
    pop: Population, new: Individual, runner: MatchRunner | None = None
) -> Population:
    """Insert `new`, removing whoever is least fit afterwards."""
    pop.insert(new, runner)
    return pop


class EvolutionRun:
    """A resumable run: population, random stream, and log in one place."""

    def __init__(
        self,
        config: EvolutionConfig,
        rng: np.random.Generator,
        pop: Population,
        log: RunLog,
        generations_done: int,
        runner: MatchRunner | None = None,
    ):
        self.config = config
        self.rng = rng
        self.pop = pop
        self.log = log
        self.generations_done = generations_done
        self.runner = runner

    @classmethod
    def fresh(cls, config: EvolutionConfig, runner: MatchRunner | None = None) -> EvolutionRun:
        rng = np.random.default_rng([config.master_seed, _STREAM_EVOLUTION])
        pop = init_population(config, rng, runner)
        return cls(config, rng, pop, RunLog(), generations_done=0, runner=runner)

    @property
    def finished(self) -> bool:
        return self.generations_done >= self.config.generations

    def run_generation(self, on_birth=None) -> GenerationRecord:
        """One generation: `capacity` births, then an external fitness reading."""
        config = self.config
        for _ in range(config.capacity):
            individual, operator, parent_ids = spawn_offspring(self.pop, config, self.rng)
            fitness, _removed = self.pop.insert(individual, self.runner)
            self.log.births.append(
                BirthRecord(
                    birth_index=individual.birth_index,
                    id=individual.id,
                    operator=operator,
                    parent_ids=parent_ids,
                    internal_fitness=fitness,
                )
            )
            if on_birth is not None:
                on_birth(self.pop)
        generation = self.generations_done + 1
        # a separate substream per generation keeps the measurement invisible
        # to the evolution stream
        ext_rng = np.random.default_rng([config.master_seed, _STREAM_EXTERNAL, generation])
        pct = population_external_fitness(
            self.pop, config.rule, config.n_opponents, ext_rng, runner=self.runner
        )
        record = GenerationRecord(generation=generation, external_fitness_pct=pct)
        self.log.generations.append(record)
        self.generations_done = generation
        return record

    def to_state(self) -> dict:
        pairwise = [
            [a, b, [[g.red_score, g.blue_score] for g in result.games]]
            for (a, b), result in sorted(self.pop._pairwise.items())
        ]
        return {
            "config": self.config.to_dict(),
            "births_so_far": self.pop.births_so_far,
            "next_id": self.pop._next_id,
            "generations_done": self.generations_done,
            "rng_state": _plain(self.rng.bit_generator.state),
            "members": [
                {"id": m.id, "birth_index": m.birth_index, "seed": m.seed.to_text()}
                for m in self.pop.members
            ],
            "pairwise": pairwise,
            "births": [
                [r.birth_index, r.id, r.operator, list(r.parent_ids), r.internal_fitness]
                for r in self.log.births
            ],
            "curve": [[g.generation, g.external_fitness_pct] for g in self.log.generations],
        }

    @classmethod
    def from_state(cls, state: dict, runner: MatchRunner | None = None) -> EvolutionRun:
        config = EvolutionConfig.from_dict(state["config"])
        pop = Population(config.rule, config.capacity)
        pop.births_so_far = state["births_so_far"]
        pop._next_id = state["next_id"]
        for m in state["members"]:
            pop.members.append(
                Individual(
                    id=m["id"],
                    birth_index=m["birth_index"],
                    seed=SeedPattern.from_text(m["seed"]),
                )
            )
        for a, b, games in state["pairwise"]:
            result = MatchResult(
                games=tuple(GameOutcome(red_score=g[0], blue_score=g[1]) for g in games)
            )
            pop._store_match(a, b, result)
        log = RunLog(
            births=[
                BirthRecord(
                    birth_index=r[0],
                    id=r[1],
                    operator=r[2],
                    parent_ids=tuple(r[3]),
                    internal_fitness=r[4],
                )
                for r in state["births"]
            ],
            generations=[
                GenerationRecord(generation=g[0], external_fitness_pct=g[1])
                for g in state["curve"]
            ],
        )
        rng = np.random.default_rng()
        rng.bit_generator.state = state["rng_state"]
        return cls(
            config, rng, pop, log, generations_done=state["generations_done"], runner=runner
        )


def _plain(value):
    """Recursively convert numpy scalars so the state dict is JSON-safe."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def run_evolution(
    config: EvolutionConfig,
    runner: MatchRunner | None = None,
    on_birth=None,
    on_generation=None,
) -> RunLog:
    """Run a full configured evolution from scratch and return its log."""
    run = EvolutionRun.fresh(config, runner)
    while not run.finished:
        record = run.run_generation(on_birth=on_birth)
        if on_generation is not None:
            on_generation(run, record)
    return run.log
