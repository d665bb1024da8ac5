"""Parsers and the bundled data files."""

from fractions import Fraction

import pytest

from straightedge.errors import (
    DuplicatePoint,
    ParseError,
    UnboundConclusionVariable,
    UndeclaredPoint,
    UnknownDefinition,
    UnknownSketch,
)
from straightedge.parsing import (
    Clause,
    DefinitionSpec,
    ProblemSpec,
    RuleSpec,
    StatementTemplate,
    default_definitions,
    default_problems,
    default_rules,
    load_problems,
    parse_definitions,
    parse_problem,
    parse_rules,
)
from straightedge.statements import Statement, kind_of, statement


@pytest.fixture(scope="module")
def defs():
    return default_definitions()


@pytest.fixture(scope="module")
def problems(defs):
    return default_problems(defs)


# ---------------------------------------------------------------------------
# definitions


def test_bundled_definitions_load(defs):
    expected = {
        "free", "segment", "triangle", "iso_triangle0", "midpoint", "circle",
        "orthocenter", "incenter", "excenter", "foot", "reflect", "cc_tangent",
        "on_line", "on_tline", "on_pline", "on_pline0", "on_bline",
        "iso_triangle_vertex", "iso_triangle_vertex_angle", "angle_bisector",
        "angle_mirror", "on_aline", "on_aline0", "aconst", "s_angle",
        "on_circle", "eqdistance", "lconst", "rconst", "eqratio", "eqratio6",
        "rconst2",
    }
    assert set(defs) == expected


def test_midpoint_definition(defs):
    d = defs["midpoint"]
    assert d.outs == ("m",) and d.ins == ("a", "b")
    assert [t.text() for t in d.statements] == ["midp m a b"]
    assert d.sketch_id == "midpoint"
    assert not d.requirements


def test_circle_requires_noncollinear_inputs(defs):
    d = defs["circle"]
    assert [t.text() for t in d.requirements] == ["ncoll a b c"]
    assert [t.text() for t in d.statements] == ["circle o a b c"]


def test_bind_accepts_both_argument_forms(defs):
    d = defs["circle"]
    long_form, _ = d.bind(["o"], ["o", "c1", "c2", "b1"])
    short_form, _ = d.bind(["o"], ["c1", "c2", "b1"])
    assert long_form == short_form == {"o": "o", "a": "c1", "b": "c2", "c": "b1"}


def test_bind_rejects_mismatched_output_prefix(defs):
    with pytest.raises(ParseError):
        defs["circle"].bind(["o"], ["x", "c1", "c2", "b1"])
    with pytest.raises(ParseError):
        defs["circle"].bind(["o"], ["c1", "c2"])


def test_bind_splits_value_parameters(defs):
    d = defs["lconst"]
    assert d.params == ("l",)
    binding, values = d.bind(["b"], ["a", "3"])
    assert binding == {"x": "b", "a": "a"}
    assert values == {"l": "3"}


def test_value_parameter_instantiation(defs):
    d = defs["s_angle"]
    (tmpl,) = d.statements
    stmt = tmpl.instantiate({"a": "p", "b": "q", "x": "r"},
                            {"r": Fraction(1, 3)})
    assert stmt == statement("aconst", "p", "q", "q", "r",
                             value=Fraction(1, 3))


def test_template_rejects_unknown_value_parameter():
    with pytest.raises(ParseError):
        parse_definitions("bad x : a $l / lconst x a $oops / free x")


def test_definition_requirement_may_not_mention_outputs():
    with pytest.raises(ParseError):
        parse_definitions("bad x : a b / require coll x a b / free x")


def test_definition_statement_tokens_must_be_signature():
    with pytest.raises(ParseError):
        parse_definitions("bad x : a b / coll x a z / free x")


def test_unknown_sketch_id_rejected_when_registry_given():
    text = "ok x : a b / coll x a b / line_locus a b"
    parse_definitions(text, known_sketches=["line_locus"])
    with pytest.raises(UnknownSketch):
        parse_definitions(text, known_sketches=["free"])


def test_duplicate_definition_rejected():
    text = "a x : / free x\n\na x : / free x"
    with pytest.raises(ParseError):
        parse_definitions(text)


# ---------------------------------------------------------------------------
# rules


def test_bundled_rules_load():
    rules = default_rules()
    ids = [r.id for r in rules]
    assert len(ids) == len(set(ids)) == 48
    expected = (
        ["r01"] + [f"r{i:02d}" for i in range(3, 8)]
        + [f"r{i:02d}" for i in range(11, 30)]
        + ["r33", "r34", "r35", "r36", "r37", "r41", "r42", "r43", "r49", "r50"]
        + [f"r{i}" for i in range(51, 64)]
    )
    assert ids == expected


def test_unabridged_rules_are_a_superset():
    active = {r.id: r.text() for r in default_rules()}
    full = {r.id: r.text() for r in default_rules(unabridged=True)}
    assert len(full) == 66
    assert set(active) <= set(full)
    # same statement bodies wherever both files carry a rule
    assert all(active[i] == full[i] for i in active)


def test_rule_shapes():
    rules = {r.id: r for r in default_rules()}
    r03 = rules["r03"]
    assert [p.tag for p in r03.premises] == ["cyclic"]
    assert [c.tag for c in r03.conclusions] == ["eqangle"]
    r57 = rules["r57"]
    assert [p.tag for p in r57.premises] == ["pythagorean_premises"]
    assert [c.tag for c in r57.conclusions] == ["pythagorean_conclusions"]
    # value-bearing rule
    r51 = rules["r51"]
    assert r51.premises[0].tag == "midp"
    assert r51.conclusions[0].value == Fraction(1, 2)


def test_rule_text_round_trip():
    for rule in default_rules(unabridged=True):
        (again,) = parse_rules(f"{rule.title}\n{rule.text()}")
        assert again.premises == rule.premises
        assert again.conclusions == rule.conclusions


def test_rule_conclusion_variables_must_be_bound():
    with pytest.raises(UnboundConclusionVariable):
        parse_rules("rX broken\ncoll a b c => coll a b d")


def test_rule_rejects_check_only_conclusion():
    with pytest.raises(ParseError):
        parse_rules("rX broken\ncoll a b c => ncoll a b c")


def test_rule_line_needs_title():
    with pytest.raises(ParseError):
        parse_rules("coll a b c => coll a c b")


def test_no_rule_concludes_a_check_only_predicate():
    for rule in default_rules(unabridged=True):
        for concl in rule.conclusions:
            assert not kind_of(concl.tag).numeric_only, rule.id


# ---------------------------------------------------------------------------
# problems


def test_bundled_problems_load(problems):
    expected = {
        "orthocenter", "orthocenter_aux", "imo_2008_p1b", "imo_2008_p6",
        "imo_2011_p6", "imo_2021_p3", "midpoint_ratio", "medial_parallel",
        "medial_similar", "isosceles_base_angles", "isosceles_mirror",
        "concyclic_by_center", "thales_split", "pythagoras_345",
        "triangle_angles", "impossible_parallel",
    }
    assert set(problems) == expected


def test_orthocenter_problem_shape(problems):
    p = problems["orthocenter_aux"]
    assert p.points() == ["a", "b", "c", "d", "e"]
    assert p.goals == (statement("perp", "a", "d", "b", "c"),)
    assert p.clauses[1].constructions == (
        ("on_tline", ("d", "b", "a", "c")),
        ("on_tline", ("d", "c", "a", "b")),
    )


def test_pinned_coordinates_survive(problems):
    p = problems["imo_2008_p6"]
    first = p.clauses[0]
    assert first.new_points == ("x", "y", "z")
    assert first.pinned[0] == (4.96, -0.13)
    assert first.pinned[1] == (-1.0068968328888160, -1.2534881080682770)
    w_clause = p.clauses[2]
    assert w_clause.pinned == ((6.9090049230038776, -1.3884003936987552),)


def test_inputs_only_construction_form(problems):
    p = problems["imo_2021_p3"]
    by_name = {c.new_points: c for c in p.clauses}
    assert by_name[("o1",)].constructions == (("circle", ("a", "d", "c")),)
    assert by_name[("x",)].constructions == (
        ("on_bline", ("b", "c")), ("on_line", ("a", "c")))


def test_goal_statements_are_canonical(problems):
    goal = problems["imo_2008_p1b"].goals[0]
    assert goal == statement("cyclic", "a1", "a2", "b1", "b2", "c1", "c2")


def test_problem_text_round_trips(problems, defs):
    for name, spec in problems.items():
        again = parse_problem(spec.text(), name, defs)
        assert again == spec, name


def test_unknown_construction_rejected(defs):
    with pytest.raises(UnknownDefinition):
        parse_problem("a b c = trongle a b c ? coll a b c", "x", defs)


def test_point_use_before_construction_rejected(defs):
    with pytest.raises(UndeclaredPoint):
        parse_problem("a = free a; b = on_line b a c", "x", defs)


def test_duplicate_point_rejected(defs):
    with pytest.raises(DuplicatePoint):
        parse_problem("a = free a; a = free a", "x", defs)


def test_goal_over_unknown_points_rejected(defs):
    with pytest.raises(UndeclaredPoint):
        parse_problem("a b = segment a b ? coll a b z", "x", defs)


def test_problem_block_needs_body(defs):
    with pytest.raises(ParseError):
        load_problems("lonely_name\n\n", defs)


def test_duplicate_problem_name_rejected(defs):
    text = "p\na = free a ? coll a a a\n\np\na = free a ? coll a a a"
    with pytest.raises(ParseError):
        load_problems(text, defs)
