import numpy as np
import pytest

from immigame.analysis import (
    CLOSED,
    NONE,
    OPEN,
    classify_run,
    curve_csv,
    emit_table1_report,
    external_fitness,
    population_external_fitness,
    random_opponent_like,
)
from immigame.classifier import Triple
from immigame.evolution import EvolutionConfig, GenerationRecord, Individual, init_population
from immigame.patterns import SeedPattern
from immigame.rules import parse_rule

LIFE = parse_rule("B3/S23")


def test_opponent_preserves_box_and_count():
    rng = np.random.default_rng(3)
    for _ in range(20):
        seed = SeedPattern(rng.random((rng.integers(1, 9), rng.integers(1, 9))) < 0.5)
        if seed.live_count() == 0:
            continue
        opponent = random_opponent_like(seed, rng)
        assert (opponent.width, opponent.height) == (seed.width, seed.height)
        assert opponent.live_count() == seed.live_count()


def test_opponent_of_full_seed_is_identical():
    seed = SeedPattern(np.ones((4, 5), dtype=bool))
    assert random_opponent_like(seed, np.random.default_rng(0)) == seed


def test_opponent_needs_a_live_cell():
    with pytest.raises(ValueError):
        random_opponent_like(SeedPattern(np.zeros((2, 2), dtype=bool)), np.random.default_rng(0))


def test_external_fitness_of_full_seed_is_exactly_half():
    # every opponent of a fully live square is the seed itself, and rotations
    # leave it unchanged, so all games tie
    ind = Individual(id=0, seed=SeedPattern(np.ones((4, 4), dtype=bool)), birth_index=0)
    assert external_fitness(ind, LIFE, n_opponents=3, rng=np.random.default_rng(1)) == 0.5


def test_external_fitness_is_deterministic():
    rng_seed = [9, 9]
    ind = Individual(
        id=0, seed=SeedPattern(np.random.default_rng(5).random((6, 6)) < 0.5), birth_index=0
    )
    a = external_fitness(ind, LIFE, 4, np.random.default_rng(rng_seed))
    b = external_fitness(ind, LIFE, 4, np.random.default_rng(rng_seed))
    assert a == b
    assert 0.0 <= a <= 1.0


def test_population_measurement_uses_top_half():
    config = EvolutionConfig(
        rule=LIFE, master_seed=3, capacity=2, generations=1,
        initial_seed_box=5, initial_density=0.4, n_opponents=3,
    )
    pop = init_population(config, np.random.default_rng([3, 11]))
    ranked = sorted(pop.members, key=lambda m: (-pop.internal_fitness(m.id), m.id))
    top = ranked[0]
    pct = population_external_fitness(pop, LIFE, 3, np.random.default_rng([5, 5]))
    solo = external_fitness(top, LIFE, 3, np.random.default_rng([5, 5]))
    assert pct == pytest.approx(100.0 * solo, rel=1e-12)


def test_population_measurement_is_deterministic():
    config = EvolutionConfig(
        rule=LIFE, master_seed=4, capacity=4, generations=1,
        initial_seed_box=5, initial_density=0.4, n_opponents=2,
    )
    pop = init_population(config, np.random.default_rng([4, 11]))
    a = population_external_fitness(pop, LIFE, 2, np.random.default_rng([6, 6]))
    b = population_external_fitness(pop, LIFE, 2, np.random.default_rng([6, 6]))
    assert a == b
    assert 0.0 <= a <= 100.0


def test_flat_random_curve_is_none():
    assert classify_run([50.0] * 10) == NONE
    assert classify_run([48.2, 51.9, 49.5, 50.0, 52.4, 47.1]) == NONE


def test_early_saturation_is_closed():
    curve = [50, 70, 90, 99, 99.6, 99.6, 99.6, 99.6, 99.6, 99.6, 99.6, 99.6]
    assert classify_run(curve) == CLOSED


def test_steady_rise_is_open():
    curve = [50, 55, 60, 64, 68, 72, 76, 80, 83, 86, 88, 90]
    assert classify_run(curve) == OPEN


def test_still_rising_near_top_is_open():
    curve = [50, 60, 70, 80, 85, 88, 91, 93, 95, 96, 97, 98.5]
    assert classify_run(curve) == OPEN


def test_short_curve_rejected():
    with pytest.raises(ValueError):
        classify_run([50.0, 50.0, 50.0])


def test_report_rows():
    rules = [parse_rule("B3/S23"), parse_rule("B13/S3456"), parse_rule("B35/S13456")]
    verdicts = [OPEN, OPEN, NONE]
    fitnesses = [90.0, 70.8, 50.0]
    triples = [Triple(710, 150, 140), Triple(0, 0, 1000), Triple(1000, 0, 0)]
    text = emit_table1_report(rules, verdicts, fitnesses, triples)
    lines = text.strip().split("\n")
    assert lines[0] == "group,rule,evolution,pct_fitness,pct_shrink,pct_stable,pct_grow"
    assert lines[1] == "1,B3/S23,Open,90.0,71,15,14"
    assert lines[2] == "2,B13/S3456,Open,70.8,0,0,100"
    assert lines[3] == "3,B35/S13456,None,50.0,100,0,0"


def test_report_header_only_when_empty():
    assert emit_table1_report([], [], [], []).strip() == (
        "group,rule,evolution,pct_fitness,pct_shrink,pct_stable,pct_grow"
    )


def test_report_rejects_misaligned_inputs():
    with pytest.raises(ValueError):
        emit_table1_report([parse_rule("B3/S23")], [], [], [])


def test_curve_csv_format():
    records = [GenerationRecord(1, 50.0), GenerationRecord(2, 62.5)]
    assert curve_csv(records) == (
        "generation,mean_top_half_external_fitness_pct\n1,50.0000\n2,62.5000\n"
    )
