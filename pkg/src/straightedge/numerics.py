"""Floating-point side of the system: diagrams and statement checks.

Every derived statement must hold in the numeric diagram; these checks are the
other half of the dual-route design (exact symbols in `algebra`, floats here)
and are deliberately kept separate from the symbolic machinery.

Tolerance policy: ATOL = 1e-6 with a relative guard for large magnitudes;
1e-9 is the degeneracy threshold used when a check stops being meaningful
(coincident points, zero-length segments). Degenerate checks raise
DegenerateConfiguration: the answer is "undefined", not "false".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .errors import DegenerateConfiguration, MissingPoint, UnknownPredicate
from .statements import Statement, kind_of

ATOL = 1e-6
DEGEN = 1e-9

Point = tuple[float, float]


@dataclass
class Diagram:
    """Coordinates for every constructed point, plus build metadata."""

    points: dict[str, Point] = field(default_factory=dict)
    seed: int = 0
    attempts: int = 0
    branch_choices: list[str] = field(default_factory=list)

    def coords(self, name: str) -> Point:
        try:
            return self.points[name]
        except KeyError:
            raise MissingPoint(f"point {name!r} is not in the diagram") from None

    def names(self) -> list[str]:
        return list(self.points)


def close(a: float, b: float) -> bool:
    return abs(a - b) <= ATOL * (1 + max(abs(a), abs(b)))


def close_mod_pi(a: float, b: float) -> bool:
    d = (a - b) % math.pi
    return min(d, math.pi - d) <= ATOL


def distance(p: Point, q: Point) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def direction(p: Point, q: Point) -> float:
    """Angle of line pq in [0, pi). Degenerate when the points coincide."""
    if distance(p, q) < DEGEN:
        raise DegenerateConfiguration(f"coincident points {p} {q}")
    return math.atan2(q[1] - p[1], q[0] - p[0]) % math.pi


def cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def dot(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[0] - o[0]) + (a[1] - o[1]) * (b[1] - o[1])


def _collinear(ps: list[Point]) -> bool:
    o, a = ps[0], ps[1]
    if distance(o, a) < DEGEN:
        raise DegenerateConfiguration("collinearity needs two distinct anchors")
    scale = max(distance(o, p) for p in ps) + 1
    return all(abs(cross(o, a, p)) <= ATOL * scale * distance(o, a) for p in ps[2:])


def circumcenter(a: Point, b: Point, c: Point) -> Point:
    d = 2 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if abs(d) < DEGEN:
        raise DegenerateConfiguration("circumcenter of collinear points")
    a2, b2, c2 = a[0] ** 2 + a[1] ** 2, b[0] ** 2 + b[1] ** 2, c[0] ** 2 + c[1] ** 2
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    return (ux, uy)


def _orientation_sign(a: Point, b: Point, c: Point) -> int:
    v = cross(a, b, c)
    scale = max(distance(a, b), distance(a, c), 1.0)
    if abs(v) <= DEGEN * scale:
        raise DegenerateConfiguration("orientation of collinear points")
    return 1 if v > 0 else -1


def _sameside_sign(a: Point, b: Point, c: Point) -> int:
    v = dot(a, b, c)
    scale = max(distance(a, b) * distance(a, c), 1.0)
    if abs(v) <= DEGEN * scale:
        raise DegenerateConfiguration("sameside is undefined at a right split")
    return 1 if v > 0 else -1


# ---------------------------------------------------------------------------
# per-kind checks


def _check_coll(ps: list[Point]) -> bool:
    return _collinear(ps)


def _check_ncoll(ps: list[Point]) -> bool:
    return not _collinear(ps)


def _check_para(ps: list[Point]) -> bool:
    a, b, c, d = ps
    return close_mod_pi(direction(a, b), direction(c, d))


def _check_npara(ps: list[Point]) -> bool:
    return not _check_para(ps)


def _check_perp(ps: list[Point]) -> bool:
    a, b, c, d = ps
    return close_mod_pi(direction(a, b) + math.pi / 2, direction(c, d))


def _check_cong(ps: list[Point]) -> bool:
    a, b, c, d = ps
    return close(distance(a, b), distance(c, d))


def _check_cyclic(ps: list[Point]) -> bool:
    o = circumcenter(ps[0], ps[1], ps[2])
    r = distance(o, ps[0])
    return all(close(distance(o, p), r) for p in ps[3:])


def _check_circle(ps: list[Point]) -> bool:
    o = ps[0]
    r = distance(o, ps[1])
    if r < DEGEN:
        raise DegenerateConfiguration("zero-radius circle")
    return all(close(distance(o, p), r) for p in ps[2:])


def _check_midp(ps: list[Point]) -> bool:
    m, a, b = ps
    return close(m[0], (a[0] + b[0]) / 2) and close(m[1], (a[1] + b[1]) / 2)


def _angle_between(ps: list[Point]) -> float:
    a, b, c, d = ps
    return (direction(c, d) - direction(a, b)) % math.pi


def _check_eqangle(ps: list[Point]) -> bool:
    return close_mod_pi(_angle_between(ps[:4]), _angle_between(ps[4:]))


def _check_eqratio(ps: list[Point]) -> bool:
    ab, cd = distance(ps[0], ps[1]), distance(ps[2], ps[3])
    ef, gh = distance(ps[4], ps[5]), distance(ps[6], ps[7])
    if min(ab, cd, ef, gh) < DEGEN:
        raise DegenerateConfiguration("eqratio over a degenerate segment")
    return close(ab * gh, cd * ef)


def _check_eqratio3(ps: list[Point]) -> bool:
    a, b, c, d, m, n = ps
    return (_check_eqratio([m, a, m, c, n, b, n, d])
            and _check_eqratio([m, a, m, c, a, b, c, d]))


def _check_sameside(ps: list[Point]) -> bool:
    return _sameside_sign(*ps[:3]) == _sameside_sign(*ps[3:])


def _check_nsameside(ps: list[Point]) -> bool:
    return not _check_sameside(ps)


def _check_sameclock(ps: list[Point]) -> bool:
    return _orientation_sign(*ps[:3]) == _orientation_sign(*ps[3:])


def _tri_sides(ps: list[Point]) -> tuple[float, float, float]:
    a, b, c = ps
    return distance(a, b), distance(b, c), distance(c, a)


def _check_simtri(ps: list[Point], mirror: bool, congruent: bool) -> bool:
    s1, s2 = _tri_sides(ps[:3]), _tri_sides(ps[3:])
    if min(*s1, *s2) < DEGEN:
        raise DegenerateConfiguration("similarity of a degenerate triangle")
    if congruent:
        ratios_ok = all(close(x, y) for x, y in zip(s1, s2))
    else:
        ratios_ok = (close(s1[0] * s2[1], s1[1] * s2[0])
                     and close(s1[1] * s2[2], s1[2] * s2[1]))
    if not ratios_ok:
        return False
    same = _orientation_sign(*ps[:3]) == _orientation_sign(*ps[3:])
    return same != mirror


def _check_aconst(ps: list[Point], value: float) -> bool:
    return close_mod_pi(_angle_between(ps), value * math.pi)


def _check_rconst(ps: list[Point], value: float) -> bool:
    ab, cd = distance(ps[0], ps[1]), distance(ps[2], ps[3])
    if min(ab, cd) < DEGEN:
        raise DegenerateConfiguration("rconst over a degenerate segment")
    return close(ab, value * cd)


def _check_lconst(ps: list[Point], value: float) -> bool:
    return close(distance(ps[0], ps[1]), value)


def _check_pythagorean(ps: list[Point]) -> bool:
    # right angle at the first point; the conclusions kind checks the same
    # relation since the two are numerically equivalent
    a, b, c = ps
    if min(distance(a, b), distance(a, c)) < DEGEN:
        raise DegenerateConfiguration("degenerate right triangle")
    scale = distance(a, b) * distance(a, c)
    return abs(dot(a, b, c)) <= ATOL * (1 + scale)


def _check_compute(ps: list[Point]) -> bool:
    # compute goals ask for a value; numerically they only require the
    # measured quantity to exist
    if len(ps) == 2:
        return distance(ps[0], ps[1]) > DEGEN
    _angle_between(ps) if len(ps) == 4 else None
    return True


def check_numerical(stmt: Statement, diagram: Diagram) -> bool:
    """True when the statement holds for the diagram's coordinates."""
    kind = kind_of(stmt.kind)
    ps = [diagram.coords(a) for a in stmt.args]
    k = kind.tag
    if k == "coll":
        return _check_coll(ps)
    if k == "ncoll":
        return _check_ncoll(ps)
    if k == "para":
        return _check_para(ps)
    if k == "npara":
        return _check_npara(ps)
    if k == "perp":
        return _check_perp(ps)
    if k == "cong":
        return _check_cong(ps)
    if k == "cyclic":
        return _check_cyclic(ps)
    if k == "circle":
        return _check_circle(ps)
    if k == "midp":
        return _check_midp(ps)
    if k == "eqangle":
        return _check_eqangle(ps)
    if k == "eqratio":
        return _check_eqratio(ps)
    if k == "eqratio3":
        return _check_eqratio3(ps)
    if k == "sameside":
        return _check_sameside(ps)
    if k == "nsameside":
        return _check_nsameside(ps)
    if k == "sameclock":
        return _check_sameclock(ps)
    if k == "simtri":
        return _check_simtri(ps, mirror=False, congruent=False)
    if k == "simtrir":
        return _check_simtri(ps, mirror=True, congruent=False)
    if k == "contri":
        return _check_simtri(ps, mirror=False, congruent=True)
    if k == "contrir":
        return _check_simtri(ps, mirror=True, congruent=True)
    if k == "aconst":
        return _check_aconst(ps, float(stmt.value))
    if k == "rconst":
        return _check_rconst(ps, float(stmt.value))
    if k == "lconst":
        return _check_lconst(ps, float(stmt.value))
    if k in ("acompute", "rcompute", "lcompute"):
        return _check_compute(ps)
    if k in ("pythagorean_premises", "pythagorean_conclusions"):
        return _check_pythagorean(ps)
    raise UnknownPredicate(k)
