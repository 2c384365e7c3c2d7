import random

import pytest
from hypothesis import given, settings

from torogram import (
    Arrow,
    ArrowJump,
    CircleForward,
    DecoratedGaussDiagram,
    DiagramLoop,
    InvalidDiagram,
    ParseError,
    TDiagram,
    Token,
    assemble_tdiagram,
    canonical_serialize,
    check_loop,
    forget_markings,
    is_full,
    is_reduced,
    loop_from_json,
    loop_homology,
    loop_to_json,
    parse_diagram,
    validate,
)

from gen import dgd_diagrams, random_dgd, random_tdiagram, scrambled_copy, scrambled_tdiagram, t_diagrams

MARKED_THREE = """\
circle 2
arrows 3
seq M+ H1 T2 H3 M+ T1 H2 T3
arrow 1 sign + val 1
arrow 2 sign + val 1
arrow 3 sign + val 1
"""


def test_fixture_parses_to_marked_diagram():
    t = parse_diagram(MARKED_THREE)
    assert isinstance(t, TDiagram)
    assert t.base.n == 3
    assert t.marking_count == 2
    assert t.is_positive
    assert validate(t).ok


def test_fixture_serializes_byte_identically():
    t = parse_diagram(MARKED_THREE)
    assert canonical_serialize(t) == MARKED_THREE
    # and stays stable through another parse/serialize cycle
    assert canonical_serialize(parse_diagram(canonical_serialize(t))) == MARKED_THREE


def test_serialization_forgets_rotation_and_labels():
    rotated = """\
circle 2
arrows 3
seq M+ T3 H2 T1 M+ H3 T2 H1
arrow 3 sign + val 1
arrow 2 sign + val 1
arrow 1 sign + val 1
"""
    assert canonical_serialize(parse_diagram(rotated)) == MARKED_THREE


def test_unmarked_parse_returns_plain_diagram():
    g = parse_diagram("circle 1\narrows 1\nseq H1 T1\narrow 1 sign - val 1\n")
    assert isinstance(g, DecoratedGaussDiagram)
    assert g.arrow_map[1].sign == -1
    assert is_full(g)


def test_wrap_edge_merges_trailing_then_leading_markings():
    t = parse_diagram("circle 0\narrows 1\nseq M- H1 T1 M+\narrow 1 sign + val 0\n")
    assert isinstance(t, TDiagram)
    # edge 1 runs from the underpass back to the overpass through the seam
    assert t.markings == ((), (1, -1))
    assert canonical_serialize(t) == canonical_serialize(
        parse_diagram("circle 0\narrows 1\nseq M+ M- H1 T1\narrow 1 sign + val 0\n")
    )


def test_bare_circle_markings_are_cyclic():
    a = parse_diagram("circle 0\narrows 0\nseq M+ M-\n")
    b = parse_diagram("circle 0\narrows 0\nseq M- M+\n")
    assert canonical_serialize(a) == canonical_serialize(b)
    assert validate(a).ok


def test_comments_and_blank_lines_are_ignored():
    text = "# a knot\ncircle 2\n\narrows 0\nseq   # nothing here\n"
    g = parse_diagram(text)
    assert g.n == 0
    assert g.circle_valuation == 2


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("arrows 0\nseq\n", "missing 'circle'"),
        ("circle 1\nseq\n", "missing 'arrows'"),
        ("circle 1\narrows 0\n", "missing 'seq'"),
        ("circle 1\ncircle 2\narrows 0\nseq\n", "duplicate"),
        ("circle x\narrows 0\nseq\n", "integer"),
        ("circle 1\narrows 1\nseq H1 T1 H1\narrow 1 sign + val 0\n", "needs 2"),
        ("circle 1\narrows 1\nseq H1 H1\narrow 1 sign + val 0\n", "duplicate endpoint H1"),
        ("circle 1\narrows 1\nseq H1 T2\narrow 1 sign + val 0\n", "missing endpoint T1"),
        ("circle 1\narrows 1\nseq H1 T1\n", "missing 'arrow 1'"),
        ("circle 1\narrows 1\nseq H1 T1\narrow 1 sign ? val 0\n", "sign"),
        ("circle 1\narrows 1\nseq H1 T1\narrow 2 sign + val 0\n", "out of range"),
        ("circle 1\narrows 1\nseq Q1 T1 H1\narrow 1 sign + val 0\n", "unknown token"),
        ("circle 1\narrows 0\nseq\nbogus line\n", "unexpected line"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as exc:
        parse_diagram(text)
    assert fragment in str(exc.value)


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as exc:
        parse_diagram("circle 1\narrows 1\nseq H1 T1\narrow 1 sign + val x\n")
    assert exc.value.line == 4


def test_constructor_rejects_malformed_input():
    with pytest.raises(InvalidDiagram):
        DecoratedGaussDiagram((Token("H", 1), Token("H", 1)), (Arrow(1, 1, 0),), 0)
    with pytest.raises(InvalidDiagram):
        DecoratedGaussDiagram((Token("H", 1),), (Arrow(1, 1, 0),), 0)
    with pytest.raises(InvalidDiagram):
        DecoratedGaussDiagram((Token("H", 2), Token("T", 2)), (Arrow(2, 1, 0),), 0)
    with pytest.raises(InvalidDiagram):
        Arrow(1, 2, 0)
    g = DecoratedGaussDiagram((Token("H", 1), Token("T", 1)), (Arrow(1, 1, 0),), 0)
    with pytest.raises(InvalidDiagram):
        TDiagram(g, ((), (2,)))
    with pytest.raises(InvalidDiagram):
        TDiagram(g, ((),))


def test_reference_counts_solve_the_defining_equations():
    rng = random.Random(20260819)
    for _ in range(300):
        g = random_dgd(rng)
        counts = g.reference_counts
        assert len(counts) == g.edge_count
        assert sum(counts) == g.circle_valuation
        for a in g.arrows:
            h, t = g.positions[a.id]
            total, e = 0, h
            while e != t:
                total += counts[e]
                e = (e + 1) % (2 * g.n)
            assert total == a.valuation, (g, a)


@settings(max_examples=150)
@given(dgd_diagrams())
def test_loop_homology_of_named_loops(g):
    for a in g.arrows:
        assert loop_homology(g, g.distinguished_loop(a.id)) == a.valuation
    assert loop_homology(g, g.circle_loop()) == g.circle_valuation


@settings(max_examples=100)
@given(dgd_diagrams(max_arrows=4))
def test_canonical_serialization_is_rotation_invariant(g):
    rng = random.Random(7)
    for _ in range(3):
        assert canonical_serialize(scrambled_copy(g, rng)) == canonical_serialize(g)


@settings(max_examples=100)
@given(t_diagrams())
def test_marked_serialization_is_rotation_invariant(t):
    assert validate(t).ok
    rng = random.Random(11)
    for _ in range(3):
        assert canonical_serialize(scrambled_tdiagram(t, rng)) == canonical_serialize(t)


def test_assemble_reindexes_markings_to_stored_rotation():
    # token order given here starts at the underpass, so construction rotates;
    # the marking sits on the arc after T1, which is stored edge 1
    tokens = [("T", 1), ("H", 1)]
    t = assemble_tdiagram(tokens, (Arrow(1, 1, 0),), 1, [[1], []])
    assert t.base.tokens == (Token("H", 1), Token("T", 1))
    assert t.markings == ((), (1,))
    assert validate(t).ok


def test_validate_reports_what_is_off():
    t = parse_diagram(MARKED_THREE)
    broken = TDiagram(t.base, (t.markings[0], (1,)) + t.markings[2:])
    report = validate(broken)
    assert not report.ok
    assert (1, 1, 2) in report.arrow_violations
    assert report.circle_violation == (2, 3)
    data = report.to_json()
    assert data["ok"] is False
    assert data["circle"] == {"expected": 2, "actual": 3}


def test_forget_markings_drops_to_base():
    t = parse_diagram(MARKED_THREE)
    g = forget_markings(t)
    assert isinstance(g, DecoratedGaussDiagram)
    assert canonical_serialize(g) == canonical_serialize(t.base)


def test_is_full_checks_all_valuations():
    assert not is_full(parse_diagram("circle 0\narrows 1\nseq H1 T1\narrow 1 sign + val 0\n"))
    assert is_full(parse_diagram("circle 0\narrows 1\nseq H1 T1\narrow 1 sign + val 2\n"))
    assert is_full(parse_diagram("circle -1\narrows 0\nseq\n"))


def test_check_loop_rejects_disconnected_steps():
    g = parse_diagram("circle 0\narrows 2\nseq H1 H2 T1 T2\narrow 1 sign + val 0\narrow 2 sign + val 0\n")
    with pytest.raises(InvalidDiagram):
        check_loop(g, DiagramLoop((CircleForward(0), CircleForward(2))))
    with pytest.raises(InvalidDiagram):
        check_loop(g, DiagramLoop(()))
    with pytest.raises(InvalidDiagram):
        check_loop(g, DiagramLoop((CircleForward(0),)))  # open path, not a loop
    check_loop(g, g.distinguished_loop(2))


def test_is_reduced_spots_a_jump_followed_by_its_reverse():
    g = parse_diagram("circle 0\narrows 1\nseq H1 T1\narrow 1 sign + val 0\n")
    silly = DiagramLoop((ArrowJump(1, "tail"), ArrowJump(1, "head")))
    check_loop(g, silly)
    assert not is_reduced(g, silly)
    assert is_reduced(g, g.distinguished_loop(1))
    assert is_reduced(g, g.circle_loop())


def test_loop_json_round_trip():
    g = parse_diagram(MARKED_THREE).base
    loop = g.distinguished_loop(2)
    data = loop_to_json(loop)
    assert data[-1] == {"step": "arrow", "arrow": 2, "to": "head"}
    assert loop_from_json(data) == loop


def test_marking_first_generator_always_validates():
    rng = random.Random(99)
    for _ in range(200):
        t = random_tdiagram(rng)
        assert validate(t).ok
        if t.base.n:
            assert loop_homology(t.base, t.base.circle_loop()) == t.base.circle_valuation
