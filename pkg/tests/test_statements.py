from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from straightedge.errors import MalformedStatement, UnknownPredicate
from straightedge.statements import (
    Statement,
    canonicalize,
    format_angle,
    format_fraction,
    kind_of,
    orbit,
    parse_angle,
    parse_statement_text,
    pretty,
    statement,
)


def test_rconst_canonical_prefers_smaller_constant():
    # both spellings of the same ratio fact collapse to the 1/2 form
    s1 = parse_statement_text("rconst m a a b 1/2")
    s2 = parse_statement_text("rconst a b a m 2")
    assert s1 == s2 == Statement("rconst", ("a", "m", "a", "b"), Fraction(1, 2))


def test_aconst_canonical_prefers_smaller_constant():
    s1 = parse_statement_text("aconst a b c d 150o")
    s2 = parse_statement_text("aconst c d a b 30o")
    assert s1 == s2
    assert s1.value == Fraction(30, 180)


def test_cong_canonical_sorts_pairs():
    assert statement("cong", "b", "a", "d", "c").args == ("a", "b", "c", "d")
    assert statement("cong", "d", "c", "b", "a").args == ("a", "b", "c", "d")


def test_set_like_kinds_sort_args():
    assert statement("coll", "c", "a", "b").args == ("a", "b", "c")
    assert statement("cyclic", "d", "c", "b", "a").args == ("a", "b", "c", "d")
    assert statement("cyclic", "e", "d", "c", "b", "a").args == ("a", "b", "c", "d", "e")


def test_circle_center_is_fixed():
    s = statement("circle", "o", "c", "b", "a")
    assert s.args[0] == "o"
    assert s.args == ("o", "a", "b", "c")


def test_midp_swaps_endpoints_only():
    assert statement("midp", "m", "b", "a") == statement("midp", "m", "a", "b")
    assert statement("midp", "m", "a", "b").args[0] == "m"


def test_eqangle_orbit_size():
    forms = set(orbit("eqangle", ("a", "b", "c", "d", "e", "f", "g", "h")))
    assert len(forms) == 128


def test_sameclock_single_swap_is_distinct():
    base = statement("sameclock", "a", "b", "c", "d", "e", "f")
    swapped = statement("sameclock", "a", "c", "b", "d", "e", "f")
    both = statement("sameclock", "a", "c", "b", "d", "f", "e")
    assert base != swapped
    assert base == both


def test_sameclock_rotation_and_side_swap():
    base = statement("sameclock", "a", "b", "c", "d", "e", "f")
    assert statement("sameclock", "b", "c", "a", "d", "e", "f") == base
    assert statement("sameclock", "d", "e", "f", "a", "b", "c") == base


def test_eqratio3_symmetries():
    base = statement("eqratio3", "a", "b", "c", "d", "m", "n")
    assert statement("eqratio3", "b", "a", "d", "c", "n", "m") == base
    assert statement("eqratio3", "c", "d", "a", "b", "m", "n") == base


def test_simtri_rotation_and_side_swap():
    base = statement("simtri", "a", "b", "c", "p", "q", "r")
    assert statement("simtri", "b", "c", "a", "q", "r", "p") == base
    assert statement("simtri", "p", "q", "r", "a", "b", "c") == base
    # vertex correspondence matters
    assert statement("simtri", "a", "c", "b", "p", "q", "r") != base


def test_pythagorean_aliases():
    s = parse_statement_text("PythagoreanPremises a b c")
    assert s.kind == "pythagorean_premises"
    assert kind_of("PythagoreanConclusions").tag == "pythagorean_conclusions"


def test_validation_rejects_bad_statements():
    with pytest.raises(MalformedStatement):
        statement("perp", "a", "b", "c")            # arity
    with pytest.raises(MalformedStatement):
        statement("perp", "a", "a", "c", "d")       # degenerate pair
    with pytest.raises(MalformedStatement):
        statement("coll", "a", "b", "b")            # repeated set member
    with pytest.raises(MalformedStatement):
        statement("cong", "a", "b", "c", "d", value=Fraction(2))
    with pytest.raises(MalformedStatement):
        statement("rconst", "a", "b", "c", "d")     # missing constant
    with pytest.raises(UnknownPredicate):
        statement("frobnicate", "a", "b")


def test_angle_constant_parsing():
    assert parse_angle("90o") == Fraction(1, 2)
    assert parse_angle("60o") == Fraction(1, 3)
    assert parse_angle("pi/3") == Fraction(1, 3)
    assert parse_angle("2pi/3") == Fraction(2, 3)
    assert parse_angle("0") == Fraction(0)
    assert parse_angle("270o") == Fraction(1, 2)    # mod pi
    with pytest.raises(MalformedStatement):
        parse_angle("banana")
    with pytest.raises(MalformedStatement):
        parse_angle("pi*3")


def test_angle_formatting():
    assert format_angle(Fraction(1, 2)) == "90o"
    assert format_angle(Fraction(1, 3)) == "60o"
    assert format_angle(Fraction(1, 7)) == "pi/7"
    assert format_angle(Fraction(2, 7)) == "2pi/7"
    assert format_angle(Fraction(0)) == "0o"


def test_fraction_formatting():
    assert format_fraction(Fraction(3)) == "3"
    assert format_fraction(Fraction(1, 2)) == "1/2"


@given(st.fractions(min_value=0, max_value=1).filter(lambda f: f < 1))
def test_angle_format_round_trip(v):
    assert parse_angle(format_angle(v)) == v


_names = st.lists(
    st.sampled_from("abcdefgh"), min_size=8, max_size=8, unique=True
).map(tuple)


@settings(max_examples=200)
@given(_names, st.sampled_from(
    ["para", "perp", "cong", "eqangle", "eqratio", "simtri", "contrir",
     "sameclock", "sameside", "eqratio3", "midp", "circle", "coll", "cyclic"]))
def test_canonical_form_is_orbit_invariant(names, tag):
    kind = kind_of(tag)
    args = names[: kind.arity]
    base = canonicalize(tag, args)
    for alt_args, _ in orbit(tag, args):
        assert canonicalize(tag, alt_args) == base
    # canonical args are themselves reachable
    if not kind.set_like:
        assert base.args in {a for a, _ in orbit(tag, args)}


@settings(max_examples=100)
@given(_names, st.fractions(min_value=Fraction(1, 100), max_value=100),
       st.sampled_from(["rconst", "aconst"]))
def test_valued_canonical_form_is_orbit_invariant(names, raw, tag):
    value = raw % 1 if tag == "aconst" else raw
    if tag == "aconst" and value == 0:
        value = Fraction(1, 4)
    base = canonicalize(tag, names[:4], value)
    for alt_args, alt_value in orbit(tag, names[:4], value):
        assert canonicalize(tag, alt_args, alt_value) == base


@settings(max_examples=100)
@given(_names, st.sampled_from(["perp", "cong", "eqangle", "coll", "simtri"]))
def test_text_round_trip(names, tag):
    kind = kind_of(tag)
    s = canonicalize(tag, names[: kind.arity])
    assert parse_statement_text(s.text()) == s


def test_text_round_trip_with_constants():
    for text in ["rconst a m a b 1/2", "aconst a b c d 30o", "lconst a b 5"]:
        s = parse_statement_text(text)
        assert parse_statement_text(s.text()) == s


def test_pretty_uses_vertex_form_when_lines_share_a_point():
    s = Statement("eqangle", ("e", "a", "e", "b", "e", "d", "e", "c"))
    assert pretty(s) == "∠AEB = ∠DEC"


def test_pretty_subscripts_numbered_points():
    s = Statement("coll", ("o1", "o2", "y"))
    assert pretty(s) == "O_1,O_2,Y are collinear"


def test_pretty_assorted():
    assert pretty(statement("perp", "a", "d", "b", "c")) == "AD ⟂ BC"
    assert pretty(statement("midp", "m", "a", "b")) == "M is midpoint of AB"
    assert pretty(statement("circle", "o", "a", "b", "c")) == (
        "O is the circumcenter of △ABC")
    assert "~" in pretty(statement("simtri", "a", "b", "c", "p", "q", "r"))
    assert "mirror" in pretty(statement("simtrir", "a", "b", "c", "p", "q", "r"))
