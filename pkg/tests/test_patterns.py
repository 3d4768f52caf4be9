import numpy as np
import pytest

from immigame.patterns import (
    BLUE,
    RED,
    PatternFormatError,
    SeedPattern,
    Torus,
)


def test_from_rows_and_counts():
    seed = SeedPattern.from_rows(["O.O", "...", ".O."])
    assert seed.width == 3
    assert seed.height == 3
    assert seed.live_count() == 3


def test_seed_text_round_trip():
    seed = SeedPattern.from_rows(["O.", ".O", "OO"])
    text = seed.to_text()
    assert text == "2 3\nO.\n.O\nOO\n"
    assert SeedPattern.from_text(text) == seed


def test_torus_text_round_trip():
    cells = np.array([[0, 1], [2, 0]], dtype=np.uint8)
    torus = Torus(cells)
    text = torus.to_text()
    assert text == "2 2\n.R\nB.\n"
    assert Torus.from_text(text) == torus


def test_missing_trailing_newline_rejected():
    with pytest.raises(PatternFormatError):
        SeedPattern.from_text("1 1\nO")


@pytest.mark.parametrize(
    "text",
    [
        "1 1\nX\n",  # bad character
        "2 1\nO\n",  # wrong row width
        "1 2\nO\n",  # missing row
        "1 1\nO\n.\n",  # extra row
        "one 1\nO\n",  # bad header
        "1\nO\n",  # header too short
        "0 1\n\n",  # zero dimension
    ],
)
def test_bad_seed_text_rejected(text):
    with pytest.raises(PatternFormatError):
        SeedPattern.from_text(text)


def test_torus_alphabet_is_strict():
    with pytest.raises(PatternFormatError):
        Torus.from_text("1 1\nO\n")


def test_seed_needs_a_box():
    with pytest.raises(ValueError):
        SeedPattern(np.zeros((0, 3), dtype=bool))


def test_torus_rejects_unknown_states():
    with pytest.raises(ValueError):
        Torus(np.full((2, 2), 3, dtype=np.uint8))


def test_live_count_per_color():
    cells = np.zeros((4, 4), dtype=np.uint8)
    cells[0, :3] = RED
    cells[1, :2] = BLUE
    torus = Torus(cells)
    assert torus.live_count() == 5
    assert torus.live_count(RED) == 3
    assert torus.live_count(BLUE) == 2


def test_rotation_quarter_turns():
    seed = SeedPattern.from_rows(["OO.", "..."])
    rotated = seed.rotated(1)
    assert (rotated.width, rotated.height) == (2, 3)
    assert seed.rotated(4) == seed
    assert seed.rotated(1).rotated(3) == seed


def test_empty_seed_is_allowed():
    seed = SeedPattern(np.zeros((2, 2), dtype=bool))
    assert seed.live_count() == 0
