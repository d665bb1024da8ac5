"""Sketch engine: loci, intersections, and the seeded retry loop."""

import math

import numpy as np
import pytest

from straightedge.errors import (
    GoalNumericallyFalse,
    NoIntersection,
    SketchUnrealizable,
)
from straightedge.numerics import Diagram, check_numerical, distance
from straightedge.parsing import (
    default_definitions,
    default_problems,
    parse_problem,
)
from straightedge.sketch import (
    Circle,
    Line,
    _apollonius,
    build_diagram,
    choose_intersection,
    compile_problem,
    intersect,
    known_sketch_ids,
    locus_contains,
    sample_locus,
)


@pytest.fixture(scope="module")
def defs():
    return default_definitions()


@pytest.fixture(scope="module")
def problems(defs):
    return default_problems(defs)


def rng_at(seed=7):
    return np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))


# ---------------------------------------------------------------------------
# intersections


def test_unit_circle_pair_intersection():
    cands = intersect(Circle((0.0, 0.0), 1.0), Circle((1.0, 0.0), 1.0))
    ys = sorted(c[1] for c in cands)
    assert len(cands) == 2
    assert all(abs(c[0] - 0.5) < 1e-12 for c in cands)
    assert abs(ys[0] + math.sqrt(3) / 2) < 1e-12
    assert abs(ys[1] - math.sqrt(3) / 2) < 1e-12


def test_tangent_circles_collapse_to_one_point():
    (only,) = intersect(Circle((0.0, 0.0), 1.0), Circle((2.0, 0.0), 1.0))
    assert distance(only, (1.0, 0.0)) < 1e-9


def test_parallel_lines_do_not_intersect():
    with pytest.raises(NoIntersection):
        intersect(Line((0.0, 0.0), (1.0, 1.0)), Line((1.0, 0.0), (2.0, 2.0)))


def test_concentric_circles_rejected():
    with pytest.raises(NoIntersection):
        intersect(Circle((0.0, 0.0), 1.0), Circle((0.0, 0.0), 2.0))


def test_line_circle_cases():
    circle = Circle((0.0, 0.0), 1.0)
    two = intersect(Line((-2.0, 0.0), (1.0, 0.0)), circle)
    assert sorted(p[0] for p in two) == pytest.approx([-1.0, 1.0])
    (tangency,) = intersect(Line((-2.0, 1.0), (1.0, 0.0)), circle)
    assert distance(tangency, (0.0, 1.0)) < 1e-9
    with pytest.raises(NoIntersection):
        intersect(Line((-2.0, 2.0), (1.0, 0.0)), circle)


def test_choice_consumes_stream_only_for_real_pairs():
    one = ((3.0, 4.0),)
    assert choose_intersection(one, rng_at()) == ((3.0, 4.0), None)
    near = ((1.0, 1.0), (1.0, 1.0 + 1e-9))
    pt, idx = choose_intersection(near, rng_at())
    assert idx is None and pt == (1.0, 1.0)
    pair = ((0.0, 0.0), (1.0, 0.0))
    pt0, idx0 = choose_intersection(pair, rng_at())
    pt1, idx1 = choose_intersection(pair, rng_at())
    assert (pt0, idx0) == (pt1, idx1)
    assert idx0 in (0, 1) and pair[idx0] == pt0


def test_apollonius_closed_form():
    locus = _apollonius((0.0, 0.0), (3.0, 0.0), 2.0)
    assert isinstance(locus, Circle)
    assert distance(locus.center, (4.0, 0.0)) < 1e-12
    assert abs(locus.radius - 2.0) < 1e-12
    bline = _apollonius((0.0, 0.0), (3.0, 0.0), 1.0)
    assert isinstance(bline, Line)
    assert locus_contains(bline, (1.5, 7.0))


def test_sampled_points_lie_on_their_locus():
    rng = rng_at()
    loci = [
        Line((0.3, -0.2), (1.7, 0.4)),
        Circle((0.1, 0.9), 2.5),
        _apollonius((0.0, 0.0), (1.0, 0.0), 3.0),
    ]
    for locus in loci:
        for _ in range(25):
            assert locus_contains(locus, sample_locus(locus, rng))


# ---------------------------------------------------------------------------
# compilation


def test_every_bundled_sketch_id_is_known(defs):
    used = {d.sketch_id for d in defs.values()}
    assert used <= known_sketch_ids()


def test_partial_pins_rejected(defs):
    spec = parse_problem("a@0_0 b = segment a b ? cong a b a b", "x", defs)
    with pytest.raises(SketchUnrealizable):
        compile_problem(spec, defs)


def test_direct_construction_cannot_mix_with_loci(defs):
    spec = parse_problem(
        "a b c = triangle a b c; m = midpoint m a b, on_line m a c ? coll m a c",
        "x", defs)
    with pytest.raises(SketchUnrealizable):
        compile_problem(spec, defs)


# ---------------------------------------------------------------------------
# build_diagram


def test_midpoint_is_analytic(defs):
    spec = parse_problem("a@0_0 b@2_0 = segment a b; m = midpoint m a b ? midp m a b",
                         "mid", defs)
    d = build_diagram(spec, defs, seed=0)
    assert d.points["a"] == (0.0, 0.0)
    assert d.points["b"] == (2.0, 0.0)
    assert d.points["m"] == (1.0, 0.0)
    assert d.attempts == 1 and d.branch_choices == []


def test_same_seed_reproduces_bit_identical_diagrams(defs, problems):
    p = problems["orthocenter_aux"]
    d1 = build_diagram(p, defs, seed=0)
    d2 = build_diagram(p, defs, seed=0)
    assert d1.points == d2.points
    assert d1.attempts == d2.attempts
    assert d1.branch_choices == d2.branch_choices


def test_different_seeds_move_free_points(defs, problems):
    p = problems["orthocenter_aux"]
    d1 = build_diagram(p, defs, seed=0)
    d2 = build_diagram(p, defs, seed=1)
    assert d1.points != d2.points


def test_false_goal_exhausts_the_full_budget(defs, problems):
    # oracle: two triangle sides through one vertex are never parallel
    rng = rng_at()
    for _ in range(100):
        a, b, c = ((rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3))
        stmt_ok = abs((b[0] - a[0]) * (c[1] - a[1])
                      - (b[1] - a[1]) * (c[0] - a[0])) > 1e-3
        if stmt_ok:
            dia = Diagram(points={"a": a, "b": b, "c": c})
            from straightedge.statements import statement
            assert not check_numerical(statement("para", "a", "b", "a", "c"), dia)
    with pytest.raises(GoalNumericallyFalse) as exc:
        build_diagram(problems["impossible_parallel"], defs, seed=0)
    assert exc.value.attempts == 10000


def test_branch_choice_is_recorded_and_deterministic(defs):
    spec = parse_problem(
        "o a = segment o a; b = on_circle b o a, on_line b o a ? cong o a o b",
        "antipode", defs)
    d = build_diagram(spec, defs, seed=3)
    o, a, b = d.points["o"], d.points["a"], d.points["b"]
    antipode = (2 * o[0] - a[0], 2 * o[1] - a[1])
    assert distance(b, antipode) < 1e-9
    assert len(d.branch_choices) == 1
    assert d.branch_choices[0] in ("b=0", "b=1")
    again = build_diagram(spec, defs, seed=3)
    assert again.branch_choices == d.branch_choices


def test_lconst_lengths_are_exact_not_rescaled(defs, problems):
    d = build_diagram(problems["pythagoras_345"], defs, seed=0)
    a, b, c = d.points["a"], d.points["b"], d.points["c"]
    assert math.isclose(distance(a, b), 3.0, rel_tol=1e-12)
    assert math.isclose(distance(a, c), 4.0, rel_tol=1e-12)
    assert math.isclose(distance(b, c), 5.0, rel_tol=1e-9)


@pytest.mark.parametrize("name", [
    "orthocenter", "orthocenter_aux", "midpoint_ratio", "medial_parallel",
    "medial_similar", "isosceles_base_angles", "isosceles_mirror",
    "concyclic_by_center", "thales_split", "pythagoras_345", "triangle_angles",
])
def test_generated_statements_hold_on_final_diagram(defs, problems, name):
    spec = problems[name]
    diagram = build_diagram(spec, defs, seed=0)
    for plan in compile_problem(spec, defs):
        for step in plan.steps:
            for stmt in step.requirements + step.statements:
                assert check_numerical(stmt, diagram), stmt.text()
    for goal in spec.goals:
        assert check_numerical(goal, diagram), goal.text()


@pytest.mark.parametrize("name", [
    "imo_2008_p1b", "imo_2011_p6", "imo_2021_p3",
])
def test_contest_configurations_realize(defs, problems, name):
    spec = problems[name]
    diagram = build_diagram(spec, defs, seed=0)
    for plan in compile_problem(spec, defs):
        for step in plan.steps:
            for stmt in step.statements:
                assert check_numerical(stmt, diagram), stmt.text()


def test_pinned_coordinates_are_verbatim(defs, problems):
    d = build_diagram(problems["imo_2008_p6"], defs, seed=0)
    assert d.points["x"] == (4.96, -0.13)
    assert d.points["y"] == (-1.0068968328888160, -1.2534881080682770)
    assert d.points["z"] == (-2.8402847238575120, -4.9117762734006830)
    assert d.points["w"] == (6.9090049230038776, -1.3884003936987552)
    for goal in problems["imo_2008_p6"].goals:
        assert check_numerical(goal, d)
