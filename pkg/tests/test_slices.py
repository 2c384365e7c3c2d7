import random

import pytest
from hypothesis import given, settings

from torogram import canonical_serialize, find_refinement, parse_diagram, validate
from torogram.errors import InvalidDiagram, ParseError
from torogram.slices import (
    Cap,
    Cup,
    RealCross,
    SliceWord,
    VirtualCross,
    crossing_records,
    direction_levels,
    extract_tdiagram,
    parse_sliceword,
    represent_dgd,
    represent_tdiagram,
    serialize_sliceword,
    validate_sliceword,
)

from gen import random_dgd, random_tdiagram, t_diagrams

MARKED_THREE = """\
circle 2
arrows 3
seq M+ H1 T2 H3 M+ T1 H2 T3
arrow 1 sign + val 1
arrow 2 sign + val 1
arrow 3 sign + val 1
"""

TWISTED_THRICE = SliceWord((1, 1), (RealCross(1, 1), RealCross(1, 1), RealCross(1, 1)))

BARE_CIRCLE = SliceWord((), (Cap(1, -1), Cup(1)))


def test_three_positive_twists_extract_to_the_marked_diagram():
    assert validate_sliceword(TWISTED_THRICE).ok
    t = extract_tdiagram(TWISTED_THRICE)
    assert canonical_serialize(t) == MARKED_THREE


def test_bare_circle_round_trip():
    assert validate_sliceword(BARE_CIRCLE).ok
    t = extract_tdiagram(BARE_CIRCLE)
    assert t.base.n == 0
    assert t.base.circle_valuation == 0
    assert t.markings == ((),)


def test_crossing_records_for_the_twists():
    recs = crossing_records(TWISTED_THRICE)
    assert recs == ((1, 1, 1, 1), (2, 1, 1, 2), (3, 1, 1, 3))


def test_direction_levels_track_every_gap():
    word = SliceWord((1,), (Cap(2, -1), VirtualCross(2), Cup(2)))
    assert direction_levels(word) == [(1,), (1, -1, 1), (1, 1, -1), (1,)]


# -- the text format


def test_serialize_parse_round_trip():
    word = SliceWord(
        (1, -1),
        (Cap(3, 1), RealCross(2, -1), VirtualCross(1), Cup(3)),
    )
    text = serialize_sliceword(word)
    assert parse_sliceword(text) == word
    assert serialize_sliceword(parse_sliceword(text)) == text


def test_serialized_text_is_readable():
    assert serialize_sliceword(TWISTED_THRICE) == "bottom + +\ncross 1 +\ncross 1 +\ncross 1 +\n"
    assert serialize_sliceword(SliceWord((), ())) == "bottom\n"


def test_parse_accepts_comments_and_blanks():
    text = "# twisted\nbottom + +\n\ncross 1 +  # one twist\n"
    assert parse_sliceword(text) == SliceWord((1, 1), (RealCross(1, 1),))


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("cross 1 +\n", "bottom line must come first"),
        ("bottom +\nbottom -\n", "repeated bottom"),
        ("bottom ?\n", "expected + or -"),
        ("bottom +\ncross x +\n", "column number"),
        ("bottom +\ncross 0 +\n", "columns start at 1"),
        ("bottom +\ncross 1\n", "cross takes"),
        ("bottom +\nvirtual 1 +\n", "virtual takes"),
        ("bottom +\ncap 1\n", "cap takes"),
        ("bottom +\ncup 1 1\n", "cup takes"),
        ("bottom +\nslide 1\n", "unknown level"),
        ("", "missing bottom"),
    ],
)
def test_parse_rejections(text, fragment):
    with pytest.raises(ParseError) as exc:
        parse_sliceword(text)
    assert fragment in str(exc.value)


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as exc:
        parse_sliceword("bottom +\ncross 1 +\ncup 9 9\n")
    assert exc.value.line == 3


# -- validation


def test_validate_rejects_out_of_range_levels():
    report = validate_sliceword(SliceWord((1, -1), (RealCross(2, 1),)))
    assert not report.ok
    assert "level 1" in report.problems[0]


def test_validate_rejects_same_direction_cup():
    report = validate_sliceword(SliceWord((1, 1), (Cup(1),)))
    assert not report.ok
    assert "same way" in report.problems[0]


def test_validate_rejects_open_ends():
    report = validate_sliceword(SliceWord((1, -1), (VirtualCross(1),)))
    assert not report.ok
    assert "does not close up" in report.problems[0]


def test_validate_rejects_split_curves():
    report = validate_sliceword(SliceWord((1, 1), ()))
    assert not report.ok
    assert "2 closed curves" in report.problems[0]


def test_validate_rejects_empty_picture():
    report = validate_sliceword(SliceWord((), ()))
    assert not report.ok
    assert "draws nothing" in report.problems[0]


def test_extract_refuses_invalid_words():
    with pytest.raises(InvalidDiagram):
        extract_tdiagram(SliceWord((1, 1), ()))


def test_report_json():
    assert validate_sliceword(BARE_CIRCLE).to_json() == {"ok": True, "problems": []}


# -- representation


def test_two_upward_passages_need_one_virtual_letter():
    t = parse_diagram("circle 2\narrows 0\nseq M+ M+\n")
    word = represent_tdiagram(t)
    assert word.bottom == (1, 1)
    assert word.slices == (VirtualCross(1),)


def test_bare_circle_representation_is_cap_cup():
    g = parse_diagram("circle 0\narrows 0\nseq\n")
    assert represent_tdiagram(find_refinement(g)) == BARE_CIRCLE


def test_representation_round_trips_the_marked_diagram():
    t = parse_diagram(MARKED_THREE)
    word = represent_tdiagram(t)
    assert validate_sliceword(word).ok
    assert canonical_serialize(extract_tdiagram(word)) == MARKED_THREE


def test_representation_round_trips_random_tdiagrams():
    rng = random.Random(31)
    for _ in range(200):
        t = random_tdiagram(rng, max_arrows=5)
        word = represent_tdiagram(t)
        assert validate_sliceword(word).ok
        assert canonical_serialize(extract_tdiagram(word)) == canonical_serialize(t)


@settings(max_examples=80, deadline=None)
@given(t_diagrams())
def test_representation_round_trips_property(t):
    word = represent_tdiagram(t)
    assert validate_sliceword(word).ok
    assert canonical_serialize(extract_tdiagram(word)) == canonical_serialize(t)


def test_represent_dgd_uses_the_reference_refinement():
    rng = random.Random(32)
    for _ in range(100):
        g = random_dgd(rng, max_arrows=5)
        word = represent_dgd(g)
        assert canonical_serialize(extract_tdiagram(word)) == canonical_serialize(
            find_refinement(g)
        )


def test_extraction_is_deterministic():
    rng = random.Random(33)
    for _ in range(40):
        t = random_tdiagram(rng, max_arrows=4)
        word = represent_tdiagram(t)
        assert extract_tdiagram(word) == extract_tdiagram(word)
        assert represent_tdiagram(t) == word
