import numpy as np
import pytest

from immigame.engine import (
    GameOutcome,
    MatchRunner,
    game_trace,
    merge_colors,
    place_seeds,
    play_game,
    play_match,
    score,
    step,
    step_reference,
    time_limit,
)
from immigame.patterns import BLUE, DEAD, RED, SeedPattern, Torus
from immigame.rules import parse_rule, sample_group2

LIFE = parse_rule("B3/S23")


def torus_of(rows):
    values = {".": DEAD, "R": RED, "B": BLUE}
    return Torus(np.array([[values[ch] for ch in row] for row in rows], dtype=np.uint8))


def random_torus(rng, height, width, density=0.35):
    live = rng.random((height, width)) < density
    colors = rng.integers(1, 3, size=(height, width)).astype(np.uint8)
    return Torus(np.where(live, colors, 0).astype(np.uint8))


def test_blinker_rotates():
    # hand-applied B3/S23: the horizontal triple becomes a vertical triple
    # around the centre cell
    t = Torus(np.zeros((8, 8), dtype=np.uint8))
    t.cells[4, 3:6] = RED
    out = step(t, LIFE)
    expected = Torus(np.zeros((8, 8), dtype=np.uint8))
    expected.cells[3:6, 4] = RED
    assert out == expected


def test_block_is_a_fixed_point():
    t = Torus(np.zeros((6, 6), dtype=np.uint8))
    t.cells[2:4, 2:4] = RED
    assert step(t, LIFE) == t


def test_lone_cell_dies():
    t = Torus(np.zeros((5, 5), dtype=np.uint8))
    t.cells[2, 2] = RED
    assert step(t, LIFE).live_count() == 0


def test_all_dead_stays_dead():
    t = Torus(np.zeros((6, 6), dtype=np.uint8))
    for rule in sample_group2(np.random.default_rng(5), 20):
        assert step(t, rule).live_count() == 0


def test_birth_takes_majority_color():
    t = torus_of(
        [
            ".....",
            ".RR..",
            ".B...",
            ".....",
            ".....",
        ]
    )
    out = step(t, LIFE)
    assert out.cells[1, 2] == RED or out.cells[2, 2] == RED
    # the cell with 2 red + 1 blue neighbours is (2, 2); it must be born red
    assert out.cells[2, 2] == RED


def test_birth_majority_blue():
    t = torus_of(
        [
            ".....",
            ".BB..",
            ".R...",
            ".....",
            ".....",
        ]
    )
    assert step(t, LIFE).cells[2, 2] == BLUE


def test_survivors_keep_their_color():
    rng = np.random.default_rng(11)
    for trial in range(20):
        t = random_torus(rng, 12, 12)
        out = step(t, LIFE)
        both_alive = (t.cells != DEAD) & (out.cells != DEAD)
        assert np.array_equal(t.cells[both_alive], out.cells[both_alive])


def test_step_is_pure_and_deterministic():
    rng = np.random.default_rng(3)
    t = random_torus(rng, 10, 14)
    before = t.cells.copy()
    a = step(t, LIFE)
    b = step(t, LIFE)
    assert np.array_equal(t.cells, before)
    assert a == b


def test_kernel_matches_reference_stepper():
    rng = np.random.default_rng(17)
    rules = sample_group2(rng, 12)
    for rule in rules:
        t = random_torus(rng, 13, 9)
        for _ in range(4):
            fast = step(t, rule)
            slow = step_reference(t, rule)
            assert fast == slow
            t = fast


def test_merge_colors_counts():
    t = random_torus(np.random.default_rng(2), 9, 9)
    merged = merge_colors(t)
    assert merged.live_count(RED) == t.live_count()
    assert merged.live_count(BLUE) == 0
    empty = Torus(np.zeros((4, 4), dtype=np.uint8))
    assert merge_colors(empty) == empty


def test_merge_commutes_with_step():
    rng = np.random.default_rng(23)
    for trial in range(25):
        rule = sample_group2(rng, 1)[0]
        t = random_torus(rng, 11, 11)
        assert merge_colors(step(t, rule)) == step(merge_colors(t), rule)


def test_translation_equivariance():
    rng = np.random.default_rng(31)
    t = random_torus(rng, 10, 12)
    shifted = Torus(np.roll(t.cells, (3, 5), axis=(0, 1)))
    assert step(shifted, LIFE).cells.tolist() == np.roll(
        step(t, LIFE).cells, (3, 5), axis=(0, 1)
    ).tolist()


def test_rotation_equivariance_on_square_torus():
    rng = np.random.default_rng(37)
    t = random_torus(rng, 12, 12)
    rotated = Torus(np.rot90(t.cells).copy())
    assert step(rotated, LIFE) == Torus(np.rot90(step(t, LIFE).cells).copy())


def figure1_seeds():
    rng = np.random.default_rng(1291)
    red = SeedPattern(rng.random((5, 11)) < 0.25)
    while red.live_count() != 13:
        red = SeedPattern(rng.random((5, 11)) < 0.25)
    blue = SeedPattern(rng.random((5, 17)) < 0.25)
    while blue.live_count() != 20:
        blue = SeedPattern(rng.random((5, 17)) < 0.25)
    return red, blue


def test_place_seeds_preserves_counts():
    red, blue = figure1_seeds()
    torus = place_seeds(red, blue, 0)
    assert torus.live_count(RED) == 13
    assert torus.live_count(BLUE) == 20
    assert (torus.width, torus.height) == (4 * (11 + 17), 32)


def test_place_seeds_counts_survive_rotation_variants():
    red, blue = figure1_seeds()
    for variant in range(8):
        torus = place_seeds(red, blue, variant)
        assert torus.live_count(RED) == 13
        assert torus.live_count(BLUE) == 20


def test_variant_swap_exchanges_halves():
    red, blue = figure1_seeds()
    t0 = place_seeds(red, blue, 0)
    t4 = place_seeds(red, blue, 4)
    left0 = t0.cells[:, : t0.width // 2]
    left4 = t4.cells[:, : t4.width // 2]
    assert (left0 == RED).sum() == 13 and (left0 == BLUE).sum() == 0
    assert (left4 == BLUE).sum() == 20 and (left4 == RED).sum() == 0


def test_identical_seeds_place_symmetrically():
    seed = SeedPattern.from_rows(["O.O", ".O.", "O.."])
    torus = place_seeds(seed, seed, 0)
    assert torus.live_count(RED) == torus.live_count(BLUE) == seed.live_count()


def test_minimum_torus_is_32():
    dot = SeedPattern.from_rows(["O"])
    torus = place_seeds(dot, dot, 0)
    assert (torus.width, torus.height) == (32, 32)


def test_variant_out_of_range():
    dot = SeedPattern.from_rows(["O"])
    with pytest.raises(ValueError):
        place_seeds(dot, dot, 8)
    with pytest.raises(ValueError):
        place_seeds(dot, dot, -1)


def test_time_limit_formula():
    square = SeedPattern(np.ones((16, 16), dtype=bool))
    assert time_limit(square, square) == 8 * 128
    dot = SeedPattern.from_rows(["O"])
    assert time_limit(dot, dot) == 256


def test_time_limit_monotone():
    dot = SeedPattern.from_rows(["O"])
    wide = SeedPattern(np.ones((1, 40), dtype=bool))
    wider = SeedPattern(np.ones((1, 60), dtype=bool))
    assert time_limit(dot, wide) <= time_limit(dot, wider)
    assert time_limit(dot, dot) <= time_limit(wide, dot)


def build_torus_with_counts(n_red, n_blue):
    cells = np.zeros(24 * 24, dtype=np.uint8)
    cells[:n_red] = RED
    cells[n_red : n_red + n_blue] = BLUE
    return Torus(cells.reshape(24, 24))


def test_score_matches_figure1_arithmetic():
    initial = build_torus_with_counts(13, 20)
    final = build_torus_with_counts(121, 43)
    assert score(initial, final) == (108, 23)
    assert GameOutcome(108, 23).winner == "Red"


def test_score_clamps_losses_to_zero():
    initial = build_torus_with_counts(10, 0)
    final = build_torus_with_counts(4, 0)
    assert score(initial, final) == (0, 0)


def test_score_unchanged_torus_ties():
    t = build_torus_with_counts(5, 5)
    assert score(t, t) == (0, 0)
    assert GameOutcome(0, 0).winner == "Tie"


def test_score_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        score(build_torus_with_counts(1, 1), Torus(np.zeros((4, 4), dtype=np.uint8)))


def test_empty_red_seed_never_scores():
    empty = SeedPattern(np.zeros((3, 3), dtype=bool))
    blue = SeedPattern(np.ones((3, 3), dtype=bool))
    outcome = play_game(empty, blue, parse_rule("B3/S236"), 0)
    assert outcome.red_score == 0


def test_identical_seeds_tie_at_variant_0():
    rng = np.random.default_rng(41)
    for trial in range(5):
        seed = SeedPattern(rng.random((4, 5)) < 0.5)
        if seed.live_count() == 0:
            continue
        outcome = play_game(seed, seed, LIFE, 0)
        assert outcome.winner == "Tie"


def test_play_game_is_deterministic():
    red, blue = figure1_seeds()
    assert play_game(red, blue, LIFE, 3) == play_game(red, blue, LIFE, 3)


def test_game_trace_exposes_both_ends():
    red, blue = figure1_seeds()
    initial, final, outcome = game_trace(red, blue, LIFE, 0)
    assert initial.live_count(RED) == 13
    assert score(initial, final) == (outcome.red_score, outcome.blue_score)


def test_match_has_eight_games_and_conserves_points():
    red, blue = figure1_seeds()
    match = play_match(red, blue, LIFE)
    assert len(match.games) == 8
    assert match.red_points + match.blue_points == 8.0


def test_match_color_swap_symmetry():
    rng = np.random.default_rng(43)
    for trial in range(6):
        a = SeedPattern(rng.random((rng.integers(1, 6), rng.integers(1, 6))) < 0.5)
        b = SeedPattern(rng.random((rng.integers(1, 6), rng.integers(1, 6))) < 0.5)
        forward = play_match(a, b, LIFE)
        backward = play_match(b, a, LIFE)
        assert forward.red_points == backward.blue_points
        assert forward.blue_points == backward.red_points


def test_match_runner_parallel_matches_serial():
    rng = np.random.default_rng(47)
    pairs = []
    for _ in range(6):
        pairs.append(
            (SeedPattern(rng.random((4, 4)) < 0.5), SeedPattern(rng.random((4, 4)) < 0.5))
        )
    serial = MatchRunner(workers=1).run(pairs, LIFE)
    with MatchRunner(workers=2) as runner:
        parallel = runner.run(pairs, LIFE)
    assert serial == parallel
