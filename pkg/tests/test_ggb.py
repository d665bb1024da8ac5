"""GeoGebra archive loading and conversion to pinned problems.

Fixture archives are authored inline: a .ggb is a zip holding
geogebra.xml, whose <construction> lists elements and commands in
construction order. Coordinates in fixtures are chosen so the expected
geometry is hand-checkable (the orthocenter of (0,0), (4,0), (1,3) is
(1,1)).
"""

import zipfile

import pytest

from straightedge.agents import run_agent
from straightedge.errors import (
    GoalNumericallyFalse,
    MalformedXml,
    MissingConstructionDocument,
    MissingGoalsFile,
    NotAnArchive,
    UnsupportedTool,
)
from straightedge.ggb import GgbElement, load_ggb, load_ggb_problem, to_problem
from straightedge.kernel import SOLVED, ProofState, initial_state
from straightedge.numerics import check_numerical
from straightedge.parsing import default_definitions, parse_problem
from straightedge.sketch import known_sketch_ids

DEFS = default_definitions(known_sketch_ids())


def point_el(label, x, y):
    return (f'<element type="point" label="{label}">'
            f'<coords x="{x}" y="{y}" z="1"/></element>')


def line_el(label):
    # a line's <coords> holds coefficients, not a location
    return (f'<element type="line" label="{label}">'
            f'<coords x="1" y="-1" z="0"/></element>')


def command(name, ins, outs):
    attrs = lambda refs: " ".join(f'a{i}="{r}"' for i, r in enumerate(refs))
    return (f'<command name="{name}"><input {attrs(ins)}/>'
            f'<output {attrs(outs)}/></command>')


def archive(tmp_path, xml, name="problem.ggb"):
    path = tmp_path / name
    with zipfile.ZipFile(path, "w") as z:
        z.writestr("geogebra.xml", xml)
    return path


def wrap(body):
    return f'<geogebra format="5.0"><construction>{body}</construction></geogebra>'


MIDPOINT_XML = wrap(
    point_el("A", 0, 0) + point_el("B", 2, 4) + point_el("C", 5, 1)
    + command("Midpoint", ["A", "B"], ["M"]) + point_el("M", 1, 2))

ORTHOCENTER_XML = wrap(
    point_el("A", 0, 0) + point_el("B", 4, 0) + point_el("C", 1, 3)
    + command("Line", ["A", "C"], ["f"]) + line_el("f")
    + command("Line", ["A", "B"], ["g"]) + line_el("g")
    + command("OrthogonalLine", ["B", "f"], ["p"]) + line_el("p")
    + command("OrthogonalLine", ["C", "g"], ["q"]) + line_el("q")
    + command("Intersect", ["p", "q", "1"], ["H"]) + point_el("H", 1, 1))


# ---------------------------------------------------------------------------
# archive loading


def test_minimal_fixture_loads_in_order(tmp_path):
    g = load_ggb(archive(tmp_path, MIDPOINT_XML))
    assert len(g.elements) == 4
    assert g.elements[3] == GgbElement("M", "Midpoint", ("A", "B"), (1.0, 2.0))
    assert [e.label for e in g.elements] == ["A", "B", "C", "M"]
    assert g.elements[0].tool == "FreePoint"


def test_non_zip_is_not_an_archive(tmp_path):
    path = tmp_path / "fake.ggb"
    path.write_text("not a zip")
    with pytest.raises(NotAnArchive):
        load_ggb(path)


def test_empty_archive_misses_the_construction_document(tmp_path):
    path = tmp_path / "empty.ggb"
    with zipfile.ZipFile(path, "w"):
        pass
    with pytest.raises(MissingConstructionDocument):
        load_ggb(path)


def test_broken_xml_is_malformed(tmp_path):
    with pytest.raises(MalformedXml):
        load_ggb(archive(tmp_path, "<geogebra><construction>"))


def test_duplicate_labels_are_malformed(tmp_path):
    xml = wrap(point_el("A", 0, 0) + point_el("A", 1, 1))
    with pytest.raises(MalformedXml):
        load_ggb(archive(tmp_path, xml))


def test_point_at_infinity_is_malformed(tmp_path):
    xml = wrap('<element type="point" label="A">'
               '<coords x="1" y="1" z="0"/></element>')
    with pytest.raises(MalformedXml):
        load_ggb(archive(tmp_path, xml))


def test_line_coefficients_are_not_coordinates(tmp_path):
    g = load_ggb(archive(tmp_path, ORTHOCENTER_XML))
    by_label = {e.label: e for e in g.elements}
    assert by_label["f"].coords is None
    assert by_label["H"].coords == (1.0, 1.0)


# ---------------------------------------------------------------------------
# conversion


def test_midpoint_maps_to_the_midpoint_clause(tmp_path):
    g = load_ggb(archive(tmp_path, MIDPOINT_XML))
    converted = to_problem(g, "cong m a m b", DEFS)
    texts = [c.text() for c in converted.problem.clauses]
    assert any(t.endswith("= midpoint m a b") for t in texts)
    assert converted.diagram.points["m"] == (1.0, 2.0)
    assert converted.diagram.branch_choices == []


def test_conversion_statements_check_on_pinned_coordinates(tmp_path):
    g = load_ggb(archive(tmp_path, ORTHOCENTER_XML))
    converted = to_problem(g, "perp A H B C", DEFS)
    assert converted.diagram.points == {
        "a": (0.0, 0.0), "b": (4.0, 0.0), "c": (1.0, 3.0), "h": (1.0, 1.0)}
    state = ProofState(converted.problem, DEFS, [], converted.diagram)
    for stmt in state.graph.statements():
        assert check_numerical(stmt, converted.diagram)


def test_unsupported_tool_is_named(tmp_path):
    xml = wrap(point_el("A", 0, 0) + point_el("B", 1, 0)
               + point_el("C", 0, 1) + point_el("D", 2, 3)
               + point_el("E", 3, 2)
               + command("Conic", ["A", "B", "C", "D", "E"], ["k"]))
    g = load_ggb(archive(tmp_path, xml))
    with pytest.raises(UnsupportedTool) as exc:
        to_problem(g, "", DEFS)
    assert "Conic" in str(exc.value)


def test_false_goal_fails_like_a_textual_problem(tmp_path):
    g = load_ggb(archive(tmp_path, MIDPOINT_XML))
    with pytest.raises(GoalNumericallyFalse):
        to_problem(g, "perp m a m b", DEFS, max_attempts=5)


def test_labels_are_sanitized_collision_free(tmp_path):
    xml = wrap(point_el("A", 0, 0) + point_el("A'", 1, 0)
               + point_el("M_{1}", 0, 1))
    g = load_ggb(archive(tmp_path, xml))
    converted = to_problem(g, "cong A A' A M_{1}", DEFS)
    assert converted.renames == {"A": "a", "A'": "a2", "M_{1}": "m_1"}
    assert converted.problem.goals[0].text() == "cong a a2 a m_1"


# ---------------------------------------------------------------------------
# problem folders and equivalence


def test_goals_file_is_required(tmp_path):
    path = archive(tmp_path, ORTHOCENTER_XML, name="ortho.ggb")
    with pytest.raises(MissingGoalsFile):
        load_ggb_problem(path, DEFS)
    (tmp_path / "goals.txt").write_text("perp A H B C\n")
    converted = load_ggb_problem(path, DEFS)
    assert converted.problem.name == "ortho"


def test_drawing_and_text_reach_the_same_statements(tmp_path):
    from straightedge.parsing import default_rules

    rules = default_rules()
    g = load_ggb(archive(tmp_path, ORTHOCENTER_XML))
    converted = to_problem(g, "perp a h b c", DEFS)
    drawn = ProofState(converted.problem, DEFS, rules, converted.diagram)
    assert run_agent("ddarn", drawn).status == SOLVED

    text = ("a@0.0_0.0 = free a; b@4.0_0.0 = free b; c@1.0_3.0 = free c; "
            "h@1.0_1.0 = on_tline h b a c, on_tline h c a b ? perp a h b c")
    typed = initial_state(parse_problem(text, "ortho_text", DEFS), DEFS, rules)
    assert run_agent("ddarn", typed).status == SOLVED

    drawn_texts = sorted(s.text() for s in drawn.graph.statements())
    typed_texts = sorted(s.text() for s in typed.graph.statements())
    assert drawn_texts == typed_texts
