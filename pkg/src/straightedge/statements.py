"""Canonical statement model.

A statement is a predicate tag applied to a tuple of point names, possibly
carrying an exact constant (an angle as a rational multiple of pi, a ratio, or
a length). Each predicate kind owns a symmetry group; two argument tuples in
the same orbit denote the same fact, and the canonical form is the orbit
minimum. For constant-bearing kinds the minimum is taken over (constant, args)
pairs, constant first, so e.g. `rconst m a a b 1/2` canonicalises to
`rconst a m a b 1/2` rather than to the inverted `rconst a b a m 2`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import MalformedStatement, UnknownPredicate

Value = Optional[Fraction]
ArgsValue = tuple[tuple[str, ...], Value]


@dataclass(frozen=True)
class PredicateKind:
    tag: str
    arity: int
    variadic: bool = False
    value: str | None = None          # None | "angle" | "ratio" | "length"
    numeric_only: bool = False        # checked against the diagram, never derived
    compute: bool = False             # goal-only "find the constant" kinds
    table: str | None = None          # "angle" | "ratio" when AR-compilable
    set_like: bool = False            # args form an unordered set


_KINDS: list[PredicateKind] = [
    PredicateKind("coll", 3, variadic=True, set_like=True),
    PredicateKind("ncoll", 3, variadic=True, numeric_only=True, set_like=True),
    PredicateKind("para", 4, table="angle"),
    PredicateKind("npara", 4, numeric_only=True),
    PredicateKind("perp", 4, table="angle"),
    PredicateKind("cong", 4, table="ratio"),
    PredicateKind("cyclic", 4, variadic=True, set_like=True),
    PredicateKind("circle", 4),
    PredicateKind("midp", 3),
    PredicateKind("eqangle", 8, table="angle"),
    PredicateKind("eqratio", 8, table="ratio"),
    PredicateKind("eqratio3", 6, table="ratio"),
    PredicateKind("sameside", 6, numeric_only=True),
    PredicateKind("nsameside", 6, numeric_only=True),
    PredicateKind("sameclock", 6, numeric_only=True),
    PredicateKind("simtri", 6),
    PredicateKind("simtrir", 6),
    PredicateKind("contri", 6),
    PredicateKind("contrir", 6),
    PredicateKind("aconst", 4, value="angle", table="angle"),
    PredicateKind("rconst", 4, value="ratio", table="ratio"),
    PredicateKind("lconst", 2, value="length", table="ratio"),
    PredicateKind("acompute", 4, compute=True),
    PredicateKind("rcompute", 4, compute=True),
    PredicateKind("lcompute", 2, compute=True),
    PredicateKind("pythagorean_premises", 3),
    PredicateKind("pythagorean_conclusions", 3),
]

KINDS: dict[str, PredicateKind] = {k.tag: k for k in _KINDS}

# rules.txt spells the Pythagorean pair in CamelCase; the shorter Pythagoras
# spelling floats around older rule files, accept it too.
KIND_ALIASES = {
    "PythagoreanPremises": "pythagorean_premises",
    "PythagoreanConclusions": "pythagorean_conclusions",
    "PythagorasPremises": "pythagorean_premises",
    "PythagorasConclusions": "pythagorean_conclusions",
}


def kind_of(tag: str) -> PredicateKind:
    tag = KIND_ALIASES.get(tag, tag)
    try:
        return KINDS[tag]
    except KeyError:
        raise UnknownPredicate(f"unknown predicate {tag!r}") from None


# ---------------------------------------------------------------------------
# symmetry groups
#
# Each kind maps to a list of (permutation, value transform) pairs. The
# permutation is a tuple of source indices; variadic set-like kinds and the
# parity-linked sameclock group are generated on demand from the actual arity.


def _ident(v: Value) -> Value:
    return v


def _neg_mod1(v: Value) -> Value:
    return None if v is None else (-v) % 1


def _invert(v: Value) -> Value:
    return None if v is None else 1 / v


Perm = tuple[int, ...]
GroupElement = tuple[Perm, Callable[[Value], Value]]

# the eight line-slot permutations preserving d2 - d1 = d4 - d3 (pair indices)
_PAIR_SLOT_PERMS: list[tuple[int, int, int, int]] = [
    (0, 1, 2, 3), (2, 3, 0, 1), (1, 0, 3, 2), (3, 2, 1, 0),
    (0, 2, 1, 3), (1, 3, 0, 2), (2, 0, 3, 1), (3, 1, 2, 0),
]


def _pairs8_group() -> list[GroupElement]:
    out: list[GroupElement] = []
    for slots in _PAIR_SLOT_PERMS:
        for mask in range(16):
            perm: list[int] = []
            for pos, slot in enumerate(slots):
                a, b = 2 * slot, 2 * slot + 1
                if mask >> pos & 1:
                    a, b = b, a
                perm.extend((a, b))
            out.append((tuple(perm), _ident))
    return out


def _pairs4_group(flip: Callable[[Value], Value]) -> list[GroupElement]:
    out: list[GroupElement] = []
    for swap_pairs in (False, True):
        for s1 in (False, True):
            for s2 in (False, True):
                p1 = (1, 0) if s1 else (0, 1)
                p2 = (3, 2) if s2 else (2, 3)
                if swap_pairs:
                    out.append((p2 + p1, flip))
                else:
                    out.append((p1 + p2, _ident))
    return out


def _triangles_group() -> list[GroupElement]:
    out: list[GroupElement] = []
    for sigma in permutations((0, 1, 2)):
        first = sigma + tuple(i + 3 for i in sigma)
        out.append((first, _ident))
        out.append((tuple(i + 3 for i in sigma) + sigma, _ident))
    return out


def _parity(perm: Sequence[int]) -> int:
    inv = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
    return inv % 2


def _sameclock_group() -> list[GroupElement]:
    out: list[GroupElement] = []
    for sigma in permutations((0, 1, 2)):
        for tau in permutations((0, 1, 2)):
            if _parity(sigma) != _parity(tau):
                continue
            a = sigma + tuple(i + 3 for i in tau)
            out.append((a, _ident))
            out.append((tuple(i + 3 for i in tau) + sigma, _ident))
    return out


def _sameside_group() -> list[GroupElement]:
    out: list[GroupElement] = []
    for t1 in ((0, 1, 2), (0, 2, 1)):
        for t2 in ((3, 4, 5), (3, 5, 4)):
            out.append((t1 + t2, _ident))
            out.append((t2 + t1, _ident))
    return out


_STATIC_GROUPS: dict[str, list[GroupElement]] = {
    "para": _pairs4_group(_ident),
    "npara": _pairs4_group(_ident),
    "perp": _pairs4_group(_ident),
    "cong": _pairs4_group(_ident),
    "aconst": _pairs4_group(_neg_mod1),
    "rconst": _pairs4_group(_invert),
    "eqangle": _pairs8_group(),
    "eqratio": _pairs8_group(),
    "eqratio3": [
        ((0, 1, 2, 3, 4, 5), _ident),
        ((1, 0, 3, 2, 5, 4), _ident),
        ((2, 3, 0, 1, 4, 5), _ident),
        ((3, 2, 1, 0, 5, 4), _ident),
    ],
    "midp": [((0, 1, 2), _ident), ((0, 2, 1), _ident)],
    "circle": [((0,) + p, _ident) for p in permutations((1, 2, 3))],
    "simtri": _triangles_group(),
    "simtrir": _triangles_group(),
    "contri": _triangles_group(),
    "contrir": _triangles_group(),
    "sameclock": _sameclock_group(),
    "sameside": _sameside_group(),
    "nsameside": _sameside_group(),
    "lconst": [((0, 1), _ident), ((1, 0), _ident)],
    "acompute": [((0, 1, 2, 3), _ident), ((1, 0, 2, 3), _ident),
                 ((0, 1, 3, 2), _ident), ((1, 0, 3, 2), _ident)],
    "rcompute": [((0, 1, 2, 3), _ident), ((1, 0, 2, 3), _ident),
                 ((0, 1, 3, 2), _ident), ((1, 0, 3, 2), _ident)],
    "lcompute": [((0, 1), _ident), ((1, 0), _ident)],
    "pythagorean_premises": [((0, 1, 2), _ident), ((0, 2, 1), _ident)],
    "pythagorean_conclusions": [((0, 1, 2), _ident), ((0, 2, 1), _ident)],
}


def group_elements(tag: str, arity: int) -> list[GroupElement]:
    """Symmetry group for a kind at a concrete arity (set-like kinds scale)."""
    kind = kind_of(tag)
    if kind.set_like:
        return [(p, _ident) for p in permutations(range(arity))]
    return _STATIC_GROUPS[kind.tag]


def orbit(tag: str, args: Sequence[str], value: Value = None) -> Iterator[ArgsValue]:
    """All (args, value) forms equivalent to the given one. May repeat."""
    args = tuple(args)
    for perm, transform in group_elements(tag, len(args)):
        yield tuple(args[i] for i in perm), transform(value)


# ---------------------------------------------------------------------------
# statements


@dataclass(frozen=True, order=True)
class Statement:
    kind: str
    args: tuple[str, ...]
    value: Value = None

    def text(self) -> str:
        parts = [self.kind, *self.args]
        if self.value is not None:
            parts.append(format_value(KINDS[self.kind].value, self.value))
        return " ".join(parts)

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.text()


def _validate(kind: PredicateKind, args: tuple[str, ...], value: Value) -> None:
    if kind.variadic:
        if len(args) < kind.arity:
            raise MalformedStatement(
                f"{kind.tag} needs at least {kind.arity} points, got {len(args)}")
    elif len(args) != kind.arity:
        raise MalformedStatement(
            f"{kind.tag} takes {kind.arity} points, got {len(args)}")
    if kind.set_like and len(set(args)) != len(args):
        raise MalformedStatement(f"{kind.tag} arguments must be distinct: {args}")
    for a in args:
        if not a or not a[0].isalpha():
            raise MalformedStatement(f"bad point name {a!r}")
    if (value is not None) != bool(kind.value):
        want = "a constant" if kind.value else "no constant"
        raise MalformedStatement(f"{kind.tag} takes {want}")
    if kind.value == "angle" and value is not None and not 0 <= value < 1:
        raise MalformedStatement(f"angle constant {value} not normalised to [0, 1)")
    if kind.value in ("ratio", "length") and value is not None and value <= 0:
        raise MalformedStatement(f"{kind.tag} constant must be positive, got {value}")
    # pair-based kinds need both endpoints of each pair distinct
    if kind.tag in ("para", "npara", "perp", "cong", "eqangle", "eqratio",
                    "aconst", "rconst", "acompute", "rcompute"):
        for i in range(0, len(args), 2):
            if args[i] == args[i + 1]:
                raise MalformedStatement(
                    f"{kind.tag} has a degenerate pair ({args[i]} {args[i + 1]})")
    if kind.tag in ("lconst", "lcompute") and args[0] == args[1]:
        raise MalformedStatement(f"{kind.tag} has a degenerate segment")
    if kind.tag in ("midp", "circle") and len(set(args)) != len(args):
        raise MalformedStatement(f"{kind.tag} arguments must be distinct")
    if kind.tag in ("pythagorean_premises", "pythagorean_conclusions") and len(set(args)) != 3:
        raise MalformedStatement(f"{kind.tag} arguments must be distinct")


def canonicalize(tag: str, args: Sequence[str], value: Value = None) -> Statement:
    kind = kind_of(tag)
    args = tuple(args)
    _validate(kind, args, value)
    if kind.value == "angle" and value is not None:
        value = value % 1
    if kind.set_like:
        return Statement(kind.tag, tuple(sorted(args)), value)
    if value is None:
        best_args = min(cand for cand, _ in orbit(kind.tag, args, value))
        return Statement(kind.tag, best_args, None)
    best_value, best_args = min((v, a) for a, v in orbit(kind.tag, args, value))
    return Statement(kind.tag, best_args, best_value)


def statement(tag: str, *args: str, value: Value = None) -> Statement:
    return canonicalize(tag, args, value)


# ---------------------------------------------------------------------------
# constant parsing / formatting


def parse_angle(text: str) -> Fraction:
    """`90o` (degrees) or `pi/3` / `2pi/3` (rational multiple of pi) or `0`."""
    text = text.strip()
    try:
        if text.endswith("o"):
            return (Fraction(text[:-1]) / 180) % 1
        if "pi" in text:
            head, _, tail = text.partition("pi")
            num = Fraction(head) if head else Fraction(1)
            if tail.startswith("/"):
                num /= Fraction(tail[1:])
            elif tail:
                raise ValueError(tail)
            return num % 1
        if Fraction(text) == 0:
            return Fraction(0)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedStatement(f"bad angle constant {text!r}") from exc
    raise MalformedStatement(f"bad angle constant {text!r}")


def parse_ratio(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedStatement(f"bad ratio constant {text!r}") from exc
    if v <= 0:
        raise MalformedStatement(f"ratio constant must be positive: {text!r}")
    return v


def parse_length(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedStatement(f"bad length constant {text!r}") from exc
    if v <= 0:
        raise MalformedStatement(f"length constant must be positive: {text!r}")
    return v


def parse_value(value_kind: str, text: str) -> Fraction:
    if value_kind == "angle":
        return parse_angle(text)
    if value_kind == "ratio":
        return parse_ratio(text)
    return parse_length(text)


def format_angle(v: Fraction) -> str:
    v = v % 1
    if v == 0:
        return "0o"
    deg = v * 180
    if deg.denominator == 1:
        return f"{deg.numerator}o"
    if v.numerator == 1:
        return f"pi/{v.denominator}"
    return f"{v.numerator}pi/{v.denominator}"


def format_fraction(v: Fraction) -> str:
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def format_value(value_kind: str | None, v: Fraction) -> str:
    if value_kind == "angle":
        return format_angle(v)
    return format_fraction(v)


def parse_statement_text(text: str) -> Statement:
    """Parse `kind p1 p2 ... [constant]` into a canonical Statement."""
    tokens = text.split()
    if not tokens:
        raise MalformedStatement("empty statement")
    kind = kind_of(tokens[0])
    rest = tokens[1:]
    value: Value = None
    if kind.value:
        if not rest:
            raise MalformedStatement(f"{kind.tag} misses its constant")
        value = parse_value(kind.value, rest[-1])
        rest = rest[:-1]
    return canonicalize(kind.tag, rest, value)


# ---------------------------------------------------------------------------
# pretty printing (proof text style)


def pretty_point(name: str) -> str:
    head, tail = name[0].upper(), name[1:]
    if tail.isdigit():
        return f"{head}_{tail}"
    return head + tail


def _seg(a: str, b: str) -> str:
    return pretty_point(a) + pretty_point(b)


def _angle_side(a: str, b: str, c: str, d: str) -> str:
    # prefer the vertex form when the two lines share a point
    if b == c:
        return "".join(map(pretty_point, (a, b, d)))
    if b == d:
        return "".join(map(pretty_point, (a, b, c)))
    if a == c:
        return "".join(map(pretty_point, (b, a, d)))
    if a == d:
        return "".join(map(pretty_point, (b, a, c)))
    return f"({_seg(a, b)}-{_seg(c, d)})"


def pretty_angle_value(v: Fraction) -> str:
    deg = (v % 1) * 180
    if deg.denominator == 1:
        return f"{deg.numerator}°"
    if v.numerator == 1:
        return f"π/{v.denominator}"
    return f"{v.numerator}π/{v.denominator}"


def pretty(stmt: Statement) -> str:
    k, a, v = stmt.kind, stmt.args, stmt.value
    pts = [pretty_point(x) for x in a]
    if k == "coll":
        return ",".join(pts) + " are collinear"
    if k == "ncoll":
        return ",".join(pts) + " are not collinear"
    if k == "cyclic":
        return ",".join(pts) + " are concyclic"
    if k == "para":
        return f"{_seg(a[0], a[1])} ∥ {_seg(a[2], a[3])}"
    if k == "npara":
        return f"{_seg(a[0], a[1])} ∦ {_seg(a[2], a[3])}"
    if k == "perp":
        return f"{_seg(a[0], a[1])} ⟂ {_seg(a[2], a[3])}"
    if k == "cong":
        return f"{_seg(a[0], a[1])} = {_seg(a[2], a[3])}"
    if k == "circle":
        return f"{pts[0]} is the circumcenter of △{''.join(pts[1:])}"
    if k == "midp":
        return f"{pts[0]} is midpoint of {_seg(a[1], a[2])}"
    if k == "eqangle":
        return f"∠{_angle_side(*a[:4])} = ∠{_angle_side(*a[4:])}"
    if k == "eqratio":
        return (f"{_seg(a[0], a[1])}:{_seg(a[2], a[3])} = "
                f"{_seg(a[4], a[5])}:{_seg(a[6], a[7])}")
    if k == "eqratio3":
        m, n = pts[4], pts[5]
        return (f"{m}{pts[0]}:{m}{pts[2]} = {n}{pts[1]}:{n}{pts[3]} = "
                f"{_seg(a[0], a[1])}:{_seg(a[2], a[3])}")
    if k == "sameside":
        return (f"{pts[0]} splits {pts[1]},{pts[2]} as "
                f"{pts[3]} splits {pts[4]},{pts[5]}")
    if k == "nsameside":
        return (f"{pts[0]} splits {pts[1]},{pts[2]} unlike "
                f"{pts[3]} splits {pts[4]},{pts[5]}")
    if k == "sameclock":
        return (f"{pts[0]},{pts[1]},{pts[2]} and {pts[3]},{pts[4]},{pts[5]} "
                "have the same orientation")
    if k == "simtri":
        return f"△{''.join(pts[:3])} ~ △{''.join(pts[3:])}"
    if k == "simtrir":
        return f"△{''.join(pts[:3])} ~ △{''.join(pts[3:])} (mirror)"
    if k == "contri":
        return f"△{''.join(pts[:3])} ≅ △{''.join(pts[3:])}"
    if k == "contrir":
        return f"△{''.join(pts[:3])} ≅ △{''.join(pts[3:])} (mirror)"
    if k == "aconst":
        return f"∠({_seg(a[0], a[1])}-{_seg(a[2], a[3])}) = {pretty_angle_value(v)}"
    if k == "rconst":
        return f"{_seg(a[0], a[1])}:{_seg(a[2], a[3])} = {format_fraction(v)}"
    if k == "lconst":
        return f"{_seg(a[0], a[1])} = {format_fraction(v)}"
    if k == "acompute":
        return f"∠({_seg(a[0], a[1])}-{_seg(a[2], a[3])}) = ?"
    if k == "rcompute":
        return f"{_seg(a[0], a[1])}:{_seg(a[2], a[3])} = ?"
    if k == "lcompute":
        return f"{_seg(a[0], a[1])} = ?"
    if k == "pythagorean_premises":
        return f"{_seg(a[0], a[1])} ⟂ {_seg(a[0], a[2])} with two sides known"
    if k == "pythagorean_conclusions":
        return (f"{_seg(a[0], a[1])}² + {_seg(a[0], a[2])}² = "
                f"{_seg(a[1], a[2])}²")
    raise UnknownPredicate(k)
