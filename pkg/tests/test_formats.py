import random
from fractions import Fraction

import pytest

from helpers import FIXTURES, random_game, random_pa, random_ssg
from stratiter.formats import (
    GameFileError,
    InvariantError,
    emit,
    format_value,
    load,
    parse,
    parse_rational,
)


def test_parse_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-2") == -2
    for bad in ("0.5", "1e3", "3/0", "x", "1/-2"):
        with pytest.raises(GameFileError):
            parse_rational(bad)


def test_format_value():
    assert format_value(Fraction(3, 4)) == "3/4"
    assert format_value(Fraction(2)) == "2"
    assert format_value(float("inf")) == "inf"
    assert format_value(7) == "7"


@pytest.mark.parametrize("name", ["eps_sink.ssg", "two_max.ssg", "four_states.eg", "negative_cycle.eg", "three_states.pa"])
def test_fixtures_round_trip(name):
    kind, model, _ = load(FIXTURES / name)
    again = parse(emit(model))
    assert again[0] == kind and again[1] == model


def test_header_parameter():
    kind, g, params = load(FIXTURES / "eps_sink.ssg")
    assert params == {"eps": Fraction(1, 4)}
    assert g.payoff["eps"] == Fraction(1, 4)


@pytest.mark.parametrize("seed", range(10))
def test_random_round_trip(seed):
    rng = random.Random(seed)
    for model in (random_ssg(rng, 5), random_game(rng, 5, 4), random_pa(rng, 3)):
        assert parse(emit(model))[1] == model


@pytest.mark.parametrize("text, cls, line", [
    ("", GameFileError, None),
    ("ssg\n", GameFileError, 1),
    ("# only a comment\nenergy\n\n", GameFileError, 2),
    ("graph\nstate a 0\n", GameFileError, 1),
    ("ssg\nstate a sink 0.5\n", GameFileError, 2),
    ("ssg\nstate a sink 3/0\n", GameFileError, 2),
    ("ssg\nstate a sink 2\n", InvariantError, 2),
    ("ssg\nstate a max b\n", InvariantError, 2),
    ("ssg\nstate a max\n", InvariantError, 2),
    ("ssg\nstate a sink 1\nstate a sink 0\n", InvariantError, 3),
    ("ssg\nstate a av a:1/2\n", InvariantError, 2),
    ("ssg\nstate a chance a\n", GameFileError, 2),
    ("ssg\nstate a av a:1/2 a:1/2\n", GameFileError, 2),
    ("energy\nstate a 2\n", GameFileError, 2),
    ("energy\nstate a 0\nedge a a 1/2\n", GameFileError, 3),
    ("energy\nstate a 0\nedge a a 1\nedge a a 2\n", InvariantError, 4),
    ("energy\nstate a 0\nstate b 1\nedge a b 1\n", InvariantError, 3),
    ("energy\nstate a 0\nedge a b 1\n", InvariantError, 3),
    ("pa\nstate s a\n", InvariantError, 2),
    ("pa\nstate s a\ndist b s s:1/2\n", InvariantError, 3),
    ("pa\nstate s a\ndist b s s:1\ndist b s s:1\n", InvariantError, 4),
    ("pa\nstate s? a\n", GameFileError, 2),
    ("ssg x\nstate a sink 1\n", GameFileError, 1),
])
def test_errors_carry_line_numbers(text, cls, line):
    with pytest.raises(cls) as err:
        parse(text)
    assert err.value.line == line
    if line:
        assert str(err.value).startswith(f"line {line}:")


def test_comments_and_blank_lines():
    text = "energy  # header\n\n# a state\nstate a 0\nedge a a -1 # loop\n"
    kind, g, _ = parse(text)
    assert kind == "energy" and g.edges == (("a", "a", -1),)


def test_emit_rejects_unknown():
    with pytest.raises(TypeError):
        emit(object())
