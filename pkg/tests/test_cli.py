import json

import pytest

from torogram import (
    canonical_serialize,
    check_loop,
    loop_from_json,
    move_from_json,
    parse_diagram,
    validate,
)
from torogram.braid import parse_braid, serialize_braid
from torogram.cli import main
from torogram.diagrams import TDiagram
from torogram.slices import extract_tdiagram, parse_sliceword

TREFOIL = """\
circle 2
arrows 3
seq H1 T2 H3 T1 H2 T3
arrow 1 sign + val 1
arrow 2 sign + val 1
arrow 3 sign + val 1
"""

ONE_ARROW_VAL0 = """\
circle 0
arrows 1
seq H1 T1
arrow 1 sign + val 0
"""

NEGATIVE_CIRCLE = "circle -1\narrows 0\nseq\n"


@pytest.fixture
def trefoil(tmp_path):
    p = tmp_path / "trefoil.gd"
    p.write_text(TREFOIL)
    return str(p)


@pytest.fixture
def val0(tmp_path):
    p = tmp_path / "one-arrow-val0.gd"
    p.write_text(ONE_ARROW_VAL0)
    return str(p)


def run(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_admissible_trefoil_is_affirmative(capsys, trefoil):
    code, out, _ = run(capsys, "admissible", trefoil)
    assert code == 0
    assert out.strip() == "admissible"


def test_braid_of_a_zero_valuation_arrow_fails_with_a_loop(capsys, val0, trefoil):
    code, out, _ = run(capsys, "braid", val0)
    assert code == 1
    loop = loop_from_json(json.loads(out.splitlines()[-1]))
    check_loop(parse_diagram(ONE_ARROW_VAL0), loop)


def test_validate_malformed_file_exits_two(capsys, tmp_path):
    p = tmp_path / "malformed.gd"
    p.write_text("circle zero\narrows 1\n")
    code, out, err = run(capsys, "validate", str(p))
    assert code == 2
    assert "error" in err


def test_missing_file_exits_two(capsys):
    code, _, err = run(capsys, "validate", "no-such-file.gd")
    assert code == 2
    assert "error" in err


def test_validate_accepts_the_trefoil(capsys, trefoil):
    code, out, _ = run(capsys, "validate", trefoil)
    assert (code, out.strip()) == (0, "ok")


def test_validate_flags_a_broken_refinement(capsys, tmp_path):
    p = tmp_path / "bad.gd"
    p.write_text(TREFOIL.replace("seq H1", "seq M+ H1"))
    code, out, _ = run(capsys, "validate", str(p), "--json")
    assert code == 1
    assert json.loads(out)["ok"] is False


def test_validate_flags_a_broken_sliceword(capsys, tmp_path):
    p = tmp_path / "bad.sw"
    p.write_text("bottom +\ncup 1\n")
    code, out, _ = run(capsys, "validate", str(p))
    assert code == 1
    assert out.strip()


def test_represent_then_extract_round_trips(capsys, trefoil, tmp_path):
    sw = tmp_path / "t.sw"
    code, _, _ = run(capsys, "represent", trefoil, "--out", str(sw))
    assert code == 0
    code, out, _ = run(capsys, "extract", str(sw))
    assert code == 0
    t = parse_diagram(out)
    assert isinstance(t, TDiagram)
    assert canonical_serialize(t.base) == canonical_serialize(parse_diagram(TREFOIL))


@pytest.mark.parametrize("mode", ["find", "minimal", "nonneg", "positive"])
def test_refine_outputs_a_valid_refinement(capsys, trefoil, mode):
    code, out, _ = run(capsys, "refine", trefoil, "--mode", mode)
    assert code == 0
    assert validate(parse_diagram(out)).ok


def test_refine_nonneg_fails_on_a_negative_circle(capsys, tmp_path):
    p = tmp_path / "neg.gd"
    p.write_text(NEGATIVE_CIRCLE)
    code, out, _ = run(capsys, "refine", str(p), "--mode", "nonneg", "--json")
    assert code == 1
    data = json.loads(out)
    assert data["class"] < 0
    check_loop(parse_diagram(NEGATIVE_CIRCLE), loop_from_json(data["loop"]))


def test_connect_relates_two_refinements(capsys, trefoil, tmp_path):
    ref = tmp_path / "ref.gd"
    fat = tmp_path / "fat.gd"
    run(capsys, "refine", trefoil, "--mode", "minimal", "--out", str(ref))
    t = parse_diagram(ref.read_text())
    padded = list(t.markings)
    padded[0] = (1, -1) + padded[0]
    fat.write_text(canonical_serialize(TDiagram(t.base, tuple(padded))))
    code, out, _ = run(capsys, "connect", str(ref), str(fat), "--json")
    assert code == 0
    moves = [move_from_json(m) for m in json.loads(out)["moves"]]
    assert moves


def test_connect_rejects_different_bases(capsys, trefoil, val0, tmp_path):
    a = tmp_path / "a.gd"
    b = tmp_path / "b.gd"
    run(capsys, "refine", trefoil, "--out", str(a))
    run(capsys, "refine", val0, "--mode", "minimal", "--out", str(b))
    code, _, err = run(capsys, "connect", str(a), str(b))
    assert code == 2
    assert "different" in err


def test_levels_of_the_trefoil(capsys, trefoil):
    code, out, _ = run(capsys, "levels", trefoil, "--json")
    assert code == 0
    assert json.loads(out)["levels"] == {"1": 1, "2": 2, "3": 3}


def test_levels_fail_without_admissibility(capsys, val0):
    code, out, _ = run(capsys, "levels", val0)
    assert code == 1


def test_braid_of_the_trefoil_is_three_positive_letters(capsys, trefoil):
    code, out, _ = run(capsys, "braid", trefoil)
    assert code == 0
    word = parse_braid(out)
    assert word.strands == 2
    assert serialize_braid(word) == "strands 2\ns 1\ns 1\ns 1\n"


def test_reconstruct_emits_the_real_drawing(capsys, trefoil):
    code, out, _ = run(capsys, "reconstruct", trefoil)
    assert code == 0
    word = parse_sliceword(out)
    base = extract_tdiagram(word).base
    assert canonical_serialize(base) == canonical_serialize(parse_diagram(TREFOIL))


def test_reconstruct_reports_unfull_input(capsys, val0):
    code, out, _ = run(capsys, "reconstruct", val0)
    assert code == 1
    assert "nonzero" in out


def test_reconstruct_reports_unreal_input(capsys, tmp_path):
    p = tmp_path / "double.gd"
    p.write_text("circle 2\narrows 0\nseq\n")
    code, out, _ = run(capsys, "reconstruct", str(p))
    assert code == 1
    assert "leftmost" in out


def test_whitney_of_the_trefoil(capsys, trefoil):
    code, out, _ = run(capsys, "whitney", trefoil)
    assert (code, out.strip()) == (0, "0")


def test_section_pipeline(capsys, trefoil, tmp_path):
    sw = tmp_path / "t.sw"
    marked = tmp_path / "marked.gd"
    run(capsys, "reconstruct", trefoil, "--out", str(sw))
    run(capsys, "extract", str(sw), "--out", str(marked))
    code, out, _ = run(capsys, "section", str(sw), str(marked), "--json")
    assert code == 0
    data = json.loads(out)
    kept = parse_diagram(data["kept"])
    assert validate(kept).ok
    assert data["crossings"] == [
        {"edge": 5, "index": 0, "sign": 1},
        {"edge": 2, "index": 0, "sign": 1},
    ]


def test_section_rejects_virtual_words(capsys, trefoil, tmp_path):
    sw = tmp_path / "virt.sw"
    marked = tmp_path / "marked.gd"
    run(capsys, "represent", trefoil, "--out", str(sw))
    run(capsys, "extract", str(sw), "--out", str(marked))
    code, _, err = run(capsys, "section", str(sw), str(marked))
    assert code == 2
    assert "virtual" in err


def test_render_writes_an_svg(capsys, trefoil, tmp_path):
    svg = tmp_path / "t.svg"
    code, out, _ = run(capsys, "render", trefoil, "--out", str(svg))
    assert code == 0
    assert out == ""
    assert svg.read_text().startswith("<svg")


def test_seed_flag_is_accepted(capsys, trefoil):
    code, out, _ = run(capsys, "whitney", trefoil, "--seed", "7")
    assert (code, out.strip()) == (0, "0")


def test_batch_directory_reports_every_file(capsys, tmp_path):
    (tmp_path / "a-trefoil.gd").write_text(TREFOIL)
    (tmp_path / "b-val0.gd").write_text(ONE_ARROW_VAL0)
    (tmp_path / "c-broken.gd").write_text("circle zero\n")
    code, out, _ = run(capsys, "admissible", str(tmp_path))
    assert code == 2
    assert out.count("==") == 6
    assert "a-trefoil.gd (exit 0)" in out
    assert "b-val0.gd (exit 1)" in out
    assert "c-broken.gd (exit 2)" in out


def test_batch_parallel_json_collects_results(capsys, tmp_path):
    (tmp_path / "a.gd").write_text(TREFOIL)
    (tmp_path / "b.gd").write_text(ONE_ARROW_VAL0)
    code, out, _ = run(capsys, "whitney", str(tmp_path), "--parallel", "2", "--json")
    assert code == 1
    rows = json.loads(out)
    assert [r["exit"] for r in rows] == [0, 1]
    assert rows[0]["result"]["whitney"] == 0


def test_batch_rejects_two_input_commands(capsys, tmp_path):
    (tmp_path / "a.gd").write_text(TREFOIL)
    code, _, err = run(capsys, "section", str(tmp_path), str(tmp_path))
    assert code == 2


def test_batch_of_an_empty_directory_is_an_error(capsys, tmp_path):
    code, _, err = run(capsys, "admissible", str(tmp_path))
    assert code == 2


def test_batch_does_not_take_out(capsys, tmp_path):
    (tmp_path / "a.gd").write_text(TREFOIL)
    code, _, err = run(capsys, "admissible", str(tmp_path), "--out", "x")
    assert code == 2


def test_no_command_is_a_usage_error(capsys):
    code = main([])
    capsys.readouterr()
    assert code == 2
