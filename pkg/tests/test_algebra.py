"""Exact linear tables: compilation shapes, derivation, minimization, emission.

The dense oracle at the top is an independent textbook implementation
(full-matrix forward elimination, no provenance, no incrementality) used
to cross-check the sparse incremental engine on randomized systems.
"""

import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from straightedge.algebra import (
    PI,
    Equation,
    LinearTable,
    compile_for_tables,
    compile_statement,
    direction_symbol,
    factor_exponents,
    length_symbol,
    rational_from_exponents,
)
from straightedge.errors import InconsistentTable, NotDerivable, UnsupportedKind
from straightedge.numerics import Diagram
from straightedge.statements import statement

F = Fraction
F0 = Fraction(0)


# -- oracle (written first, independent of the engine) -----------------------


def _is_const(sym):
    return sym[0] in ("pi", "c")


def oracle_solve(equations, target):
    """("inconsistent", None) | ("ok", residual-or-None).

    Dense Gaussian elimination over every symbol at once. The residual is
    target minus its projection onto the row space, restricted to constant
    columns; None means the live part of the target is not spanned.
    """
    live = sorted(
        {s for eq in equations for s in eq if not _is_const(s)}
        | {s for s in target if not _is_const(s)}
    )
    consts = sorted(
        {s for eq in equations for s in eq if _is_const(s)}
        | {s for s in target if _is_const(s)}
    )
    cols = live + consts
    mat = [[eq.get(s, F0) for s in cols] for eq in equations]
    vec = [target.get(s, F0) for s in cols]
    rank = 0
    for c in range(len(live)):
        pivot = next((i for i in range(rank, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        head = mat[rank][c]
        mat[rank] = [x / head for x in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[rank])]
        if vec[c]:
            f = vec[c]
            vec = [x - f * y for x, y in zip(vec, mat[rank])]
        rank += 1
    for row in mat:
        if all(not row[i] for i in range(len(live))) and any(
            row[i] for i in range(len(live), len(cols))
        ):
            return "inconsistent", None
    if any(vec[i] for i in range(len(live))):
        return "ok", None
    residual = {
        cols[i]: vec[i] for i in range(len(live), len(cols)) if vec[i]
    }
    return "ok", residual


def test_oracle_self_check():
    x, y = ("d", "x", "x2"), ("d", "y", "y2")
    eqs = [{x: F(1), y: F(-1), PI: F(1, 2)}]
    # x - y + pi/2 = 0, so the value of x - y is minus a half pi
    status, residual = oracle_solve(eqs, {x: F(1), y: F(-1)})
    assert status == "ok" and residual == {PI: F(-1, 2)}
    status, residual = oracle_solve(eqs, {x: F(1)})
    assert status == "ok" and residual is None
    status, _ = oracle_solve([{PI: F(1)}], {})
    assert status == "inconsistent"


# -- compilation shapes -------------------------------------------------------


def square_diagram():
    # b above a, d diagonal: directions 0, 45, 90 degrees available
    return Diagram(
        points={
            "a": (0.0, 0.0),
            "b": (1.0, 0.0),
            "c": (0.0, 1.0),
            "d": (1.0, 1.0),
            "e": (2.0, 0.0),
            "f": (2.0, 1.0),
            "g": (3.0, 0.0),
            "h": (3.0, 1.0),
        }
    )


def coeffs_of(stmt, diagram=None):
    eqs = compile_statement(stmt, diagram)
    assert len(eqs) == 1
    return eqs[0].coeffs


def test_compile_cong_is_log_equality():
    got = coeffs_of(statement("cong", "a", "b", "c", "d"))
    assert got == {length_symbol("a", "b"): F(1), length_symbol("c", "d"): F(-1)}


def test_compile_cong_tautology_drops():
    assert compile_statement(statement("cong", "a", "b", "a", "b")) == []


def test_compile_lconst_factors_the_length():
    got = coeffs_of(statement("lconst", "a", "b", value=F(6)))
    assert got == {
        length_symbol("a", "b"): F(1),
        ("c", 2): F(-1),
        ("c", 3): F(-1),
    }


def test_compile_rconst_is_log_difference_with_constant():
    got = coeffs_of(statement("rconst", "a", "b", "c", "d", value=F(1, 2)))
    assert got[length_symbol("a", "b")] == F(1)
    assert got[length_symbol("c", "d")] == F(-1)
    assert got[("c", 2)] == F(1)  # minus log(1/2)


def test_compile_eqratio_is_four_term_log_identity():
    got = coeffs_of(statement("eqratio", "a", "b", "c", "d", "e", "f", "g", "h"))
    assert got == {
        length_symbol("a", "b"): F(1),
        length_symbol("c", "d"): F(-1),
        length_symbol("e", "f"): F(-1),
        length_symbol("g", "h"): F(1),
    }


def test_compile_para_is_direction_equality():
    got = coeffs_of(statement("para", "a", "b", "c", "d"))
    assert got == {direction_symbol("a", "b"): F(1), direction_symbol("c", "d"): F(-1)}


def test_compile_perp_offsets_by_half_pi():
    # ab horizontal, ac vertical: theta(ac) - theta(ab) = pi/2 exactly
    got = coeffs_of(statement("perp", "a", "b", "a", "c"), square_diagram())
    assert got[direction_symbol("a", "b")] == F(1)
    assert got[direction_symbol("a", "c")] == F(-1)
    assert got[PI] % 1 == F(1, 2)


def test_compile_aconst_pins_the_angle_constant():
    # theta(ad) = 45 degrees above theta(ab)
    got = coeffs_of(statement("aconst", "a", "b", "a", "d", value=F(1, 4)), square_diagram())
    assert got[PI] % 1 == F(1, 4)


def test_compile_eqangle_cancels_to_integer_pi():
    stmt = statement("eqangle", "a", "b", "a", "c", "e", "g", "e", "f")
    # both angles are 90 degrees in the square diagram
    eqs = compile_statement(stmt, square_diagram())
    assert len(eqs) == 1
    residual = {s: c for s, c in eqs[0].coeffs.items() if s != PI}
    assert all(abs(c) == 1 for c in residual.values())
    assert eqs[0].coeffs.get(PI, F0).denominator == 1


def test_compile_angle_statement_without_diagram_fails():
    with pytest.raises(UnsupportedKind):
        compile_statement(statement("perp", "a", "b", "c", "d"))


def test_compile_rejects_graph_kinds():
    with pytest.raises(UnsupportedKind):
        compile_statement(statement("midp", "m", "a", "b"))


def test_internal_compile_coll_equates_both_pairs():
    eqs = compile_for_tables(statement("coll", "a", "b", "c"))
    assert len(eqs) == 2
    union = {}
    for eq in eqs:
        assert eq.table == "angle"
        assert PI not in eq.coeffs
        union.update(eq.coeffs)
    assert set(union) == {
        direction_symbol("a", "b"),
        direction_symbol("a", "c"),
        direction_symbol("b", "c"),
    }


def test_internal_compile_eqratio3_splits_in_two():
    stmt = statement("eqratio3", "a", "b", "c", "d", "m", "n")
    eqs = compile_for_tables(stmt)
    assert len(eqs) == 2
    assert all(eq.table == "ratio" and eq.provenance == (stmt,) for eq in eqs)
    # both rows mention the shared-vertex segments ma and mc
    for eq in eqs:
        assert length_symbol("m", "a") in eq.coeffs
        assert length_symbol("m", "c") in eq.coeffs


# -- prime bookkeeping --------------------------------------------------------


def test_factor_exponents_round_trip():
    value = F(6, 5)
    exps = factor_exponents(value)
    assert exps == {("c", 2): F(1), ("c", 3): F(1), ("c", 5): F(-1)}
    assert rational_from_exponents(exps) == value
    assert factor_exponents(F(1)) == {}
    assert rational_from_exponents({}) == F(1)


def test_non_integer_exponents_have_no_rational():
    assert rational_from_exponents({("c", 2): F(1, 2)}) is None


# -- table behaviour ----------------------------------------------------------


def ratio_table(*stmts):
    table = LinearTable("ratio")
    for s in stmts:
        table.add_statement(s)
    return table


def test_chain_minimization_drops_the_unrelated_equation():
    e1 = statement("cong", "a", "b", "c", "d")
    e2 = statement("cong", "c", "d", "e", "f")
    e3 = statement("cong", "p", "q", "r", "s")
    table = ratio_table(e1, e2, e3)
    premises = table.minimize_premises(statement("cong", "a", "b", "e", "f"))
    assert premises == (e1, e2)


def test_not_derivable_raises():
    table = ratio_table(statement("cong", "a", "b", "c", "d"))
    with pytest.raises(NotDerivable):
        table.minimize_premises(statement("cong", "a", "b", "x", "y"))


def test_tautology_needs_no_premises():
    table = ratio_table()
    assert table.minimize_premises(statement("cong", "a", "b", "a", "b")) == ()


def test_ratio_inconsistency_is_trapped():
    table = ratio_table(statement("cong", "a", "b", "c", "d"))
    with pytest.raises(InconsistentTable):
        table.add_statement(statement("rconst", "a", "b", "c", "d", value=F(2)))


def test_angle_inconsistency_is_trapped():
    diagram = square_diagram()
    table = LinearTable("angle", diagram)
    table.add_statement(statement("perp", "a", "b", "a", "c"))  # true here
    with pytest.raises(InconsistentTable):
        table.add_statement(statement("para", "a", "b", "a", "c"))  # false


def test_pi_is_never_a_pivot():
    table = LinearTable("angle", square_diagram())
    table.add_statement(statement("perp", "a", "b", "a", "c"))
    table.add_statement(statement("aconst", "a", "b", "a", "d", value=F(1, 4)))
    assert PI not in table._pivot_row


def test_rconst_round_trip_through_lconsts():
    table = ratio_table(
        statement("lconst", "a", "b", value=F(3)),
        statement("lconst", "c", "d", value=F(4)),
    )
    premises = table.minimize_premises(
        statement("rconst", "a", "b", "c", "d", value=F(3, 4))
    )
    assert len(premises) == 2
    assert table.check(statement("rconst", "a", "b", "c", "d", value=F(1, 2))) is None


def test_angle_difference_of_two_constants():
    # theta(bc) is 60 and theta(bd) is 110 degrees above theta(ab)
    b = (1.0, 0.0)
    diagram = Diagram(
        points={
            "a": (0.0, 0.0),
            "b": b,
            "c": (b[0] + math.cos(math.pi / 3), b[1] + math.sin(math.pi / 3)),
            "d": (
                b[0] + math.cos(math.pi * 11 / 18),
                b[1] + math.sin(math.pi * 11 / 18),
            ),
        }
    )
    table = LinearTable("angle", diagram)
    s1 = statement("aconst", "a", "b", "b", "c", value=F(1, 3))
    s2 = statement("aconst", "a", "b", "b", "d", value=F(11, 18))
    table.add_statement(s1)
    table.add_statement(s2)
    target = statement("aconst", "b", "c", "b", "d", value=F(5, 18))
    assert table.minimize_premises(target) == (s1, s2)
    emitted = {stmt for stmt, _ in table.saturate(lambda s: s in (s1, s2))}
    assert target in emitted


# -- saturation ---------------------------------------------------------------


def test_saturate_emits_cong_rconst_lconst():
    known = {
        statement("lconst", "a", "b", value=F(3)),
        statement("lconst", "c", "d", value=F(4)),
        statement("lconst", "e", "f", value=F(3)),
    }
    table = ratio_table(*sorted(known, key=lambda s: s.text()))
    emitted = dict(table.saturate(lambda s: s in known))
    assert statement("cong", "a", "b", "e", "f") in emitted
    assert statement("rconst", "a", "b", "c", "d", value=F(3, 4)) in emitted
    for stmt, premises in emitted.items():
        assert premises  # every emission carries its minimized support


def test_saturate_emits_cross_pair_eqratio():
    # sides stay vertex-anchored, the shape every rule premise uses
    e1 = statement("eqratio", "m", "a", "m", "b", "n", "c", "n", "d")
    e2 = statement("eqratio", "m", "a", "m", "b", "p", "e", "p", "f")
    table = ratio_table(e1, e2)
    emitted = dict(table.saturate(lambda s: s in (e1, e2)))
    assert statement("eqratio", "n", "c", "n", "d", "p", "e", "p", "f") in emitted


def test_saturate_skips_unanchored_segment_pairs():
    # equal ratios among four mutually disjoint segments alias
    # quadratically across merged lines; nothing in the rules file can
    # consume such a statement, so the tables never mint one
    e1 = statement("eqratio", "a", "b", "c", "d", "e", "f", "g", "h")
    e2 = statement("eqratio", "a", "b", "c", "d", "i", "j", "k", "l")
    table = ratio_table(e1, e2)
    emitted = dict(table.saturate(lambda s: s in (e1, e2)))
    assert statement("eqratio", "e", "f", "g", "h",
                     "i", "j", "k", "l") not in emitted


def test_saturate_emits_coll_for_shared_point_and_skips_known():
    c1 = statement("coll", "a", "b", "c")
    c2 = statement("coll", "a", "b", "d")
    table = LinearTable("angle")
    table.add_statement(c1)
    table.add_statement(c2)
    known = {c1, c2}
    emitted = dict(table.saturate(lambda s: s in known))
    acd = statement("coll", "a", "c", "d")
    bcd = statement("coll", "b", "c", "d")
    assert acd in emitted and bcd in emitted
    assert set(emitted[acd]) == {c1, c2}
    assert c1 not in emitted


def test_saturate_is_deterministic():
    def build():
        table = LinearTable("angle", square_diagram())
        table.add_statement(statement("perp", "a", "b", "a", "c"))
        table.add_statement(statement("para", "a", "b", "e", "g"))
        table.add_statement(statement("coll", "a", "b", "e"))
        return [s.text() for s, _ in table.saturate(lambda s: False)]

    assert build() == build()


def test_saturate_emission_premises_are_subset_minimal():
    e1 = statement("cong", "a", "b", "c", "d")
    e2 = statement("cong", "c", "d", "e", "f")
    e3 = statement("cong", "e", "f", "g", "h")
    table = ratio_table(e1, e2, e3)
    known = {e1, e2, e3}
    for stmt, premises in table.saturate(lambda s: s in known):
        for k in range(len(premises)):
            subset = premises[:k] + premises[k + 1:]
            scratch = ratio_table(*subset)
            assert scratch.check(stmt) is None, (stmt.text(), premises)


# -- randomized equivalence against the dense oracle --------------------------


def random_system(rng, n_symbols, n_equations, with_pi):
    symbols = [direction_symbol(f"p{i}", f"q{i}") for i in range(n_symbols)]
    equations = []
    for _ in range(n_equations):
        coeffs = {}
        for sym in rng.sample(symbols, rng.randint(2, min(4, n_symbols))):
            c = F(rng.randint(-3, 3), rng.choice((1, 2, 3)))
            if c:
                coeffs[sym] = c
        if with_pi and rng.random() < 0.4:
            coeffs[PI] = F(rng.randint(-2, 2), rng.choice((1, 2)))
        if coeffs:
            equations.append(coeffs)
    return symbols, equations


def test_query_matches_dense_oracle_on_200_random_systems():
    rng = random.Random(20260816)
    checked_pairs = 0
    for trial in range(200):
        n_symbols = rng.randint(2, 8)
        n_equations = rng.randint(1, 12)
        symbols, equations = random_system(rng, n_symbols, n_equations, True)
        table = LinearTable("angle")
        fed = []
        inconsistent = False
        for i, coeffs in enumerate(equations):
            prov = statement("para", f"w{i}", f"x{i}", f"y{i}", f"z{i}")
            try:
                table.add_equation(Equation("angle", dict(coeffs), (prov,)))
            except InconsistentTable:
                status, _ = oracle_solve(fed + [coeffs], {})
                assert status == "inconsistent"
                inconsistent = True
                break
            fed.append(coeffs)
            status, _ = oracle_solve(fed, {})
            assert status == "ok"
        if inconsistent:
            continue
        for s1, s2 in combinations(symbols, 2):
            target = {s1: F(1), s2: F(-1)}
            hit = table.query(dict(target))
            _, expect = oracle_solve(fed, target)
            if expect is None:
                assert hit is None
            else:
                assert hit is not None
                assert {s: c for s, c in hit[0].items() if c} == expect
            checked_pairs += 1
    assert checked_pairs > 1000


def test_minimized_premises_are_subset_minimal_exhaustively():
    rng = random.Random(77)
    segments = [("s%d" % i, "t%d" % i) for i in range(7)]
    trials = 0
    while trials < 40:
        stmts = []
        for _ in range(rng.randint(3, 10)):
            (a, b), (c, d) = rng.sample(segments, 2)
            stmts.append(statement("cong", a, b, c, d))
        table = ratio_table(*stmts)
        (a, b), (c, d) = rng.sample(segments, 2)
        target = statement("cong", a, b, c, d)
        got = table.check(target)
        if got is None or not got:
            continue
        trials += 1
        # no proper subset of the returned premises still derives the target
        for k in range(len(got)):
            for subset in combinations(got, k):
                scratch = ratio_table(*subset)
                assert scratch.check(target) is None, (target.text(), got)


def test_emitted_constant_relations_match_oracle():
    rng = random.Random(5150)
    for _ in range(40):
        n_symbols = rng.randint(2, 6)
        symbols, equations = random_system(rng, n_symbols, rng.randint(1, 8), True)
        table = LinearTable("angle")
        fed = []
        try:
            for i, coeffs in enumerate(equations):
                prov = statement("para", f"w{i}", f"x{i}", f"y{i}", f"z{i}")
                table.add_equation(Equation("angle", dict(coeffs), (prov,)))
                fed.append(coeffs)
        except InconsistentTable:
            continue
        emitted = [s for s, _ in table.saturate(lambda s: False)]
        for s1, s2 in combinations(symbols, 2):
            _, residual = oracle_solve(fed, {s1: F(1), s2: F(-1)})
            related = [
                s for s in emitted
                if set(s.args) >= {s1[1], s1[2], s2[1], s2[2]}
                and s.kind in ("para", "perp", "aconst", "coll")
            ]
            if residual is not None:
                assert related, (s1, s2)
            else:
                assert not related


def test_dump_mentions_symbols_and_rows():
    table = LinearTable("angle", square_diagram())
    table.add_statement(statement("perp", "a", "b", "a", "c"))
    text = table.dump()
    assert "angle table" in text
    assert "d(ab)" in text and "pi" in text
