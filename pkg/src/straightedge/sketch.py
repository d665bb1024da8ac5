"""Seeded numeric realization of problems.

Every construction resolves to either a direct point routine (midpoint,
circumcenter, ...) or a locus (a line or a circle) that the new point must
lie on. One locus is sampled, two are intersected, extra loci filter the
candidates. When an intersection yields two usable candidates the branch is
chosen from the random stream and recorded on the diagram, so a run can be
replayed and audited.

Randomness: attempt k of build_diagram draws from a Philox counter-based
generator keyed by (seed, k), making every retry a pure function of those
two integers. Within an attempt the stream is consumed in clause order.
An attempt is discarded (and counted against the 10000 budget) when a
requirement fails, a locus degenerates, candidates run out, two points land
within 1e-9 of each other, a generated statement fails its numeric check,
or a goal checks false; there is deliberately no distinction between "goal
is false" and "diagram was degenerate" at this level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    DegenerateConfiguration,
    GoalNumericallyFalse,
    NoIntersection,
    SketchUnrealizable,
    UnknownSketch,
)
from .numerics import ATOL, DEGEN, Diagram, Point, check_numerical, distance
from .parsing import Clause, DefinitionSpec, ProblemSpec, StatementTemplate
from .statements import Statement, kind_of, parse_value

MAX_ATTEMPTS = 10000

# two intersection candidates closer than this collapse into a tangency
_COINCIDENT = 1e-7


# ---------------------------------------------------------------------------
# small vector helpers (plain tuples, same conventions as numerics)


def _vec(p: Point, q: Point) -> Point:
    return (q[0] - p[0], q[1] - p[1])


def _at(p: Point, v: Point, t: float = 1.0) -> Point:
    return (p[0] + t * v[0], p[1] + t * v[1])


def _perp(v: Point) -> Point:
    return (-v[1], v[0])


def _norm(v: Point) -> float:
    return math.hypot(v[0], v[1])


def _unit(v: Point) -> Point:
    n = _norm(v)
    if n < DEGEN:
        raise DegenerateConfiguration("zero direction vector")
    return (v[0] / n, v[1] / n)


def _dir(theta: float) -> Point:
    return (math.cos(theta), math.sin(theta))


def _cross2(u: Point, v: Point) -> float:
    return u[0] * v[1] - u[1] * v[0]


def _dot2(u: Point, v: Point) -> float:
    return u[0] * v[0] + u[1] * v[1]


def _heading(p: Point, q: Point) -> float:
    if distance(p, q) < DEGEN:
        raise DegenerateConfiguration("direction of coincident points")
    return math.atan2(q[1] - p[1], q[0] - p[0])


# ---------------------------------------------------------------------------
# loci


@dataclass(frozen=True)
class Line:
    anchor: Point
    direction: Point

    def __post_init__(self):
        if _norm(self.direction) < DEGEN:
            raise DegenerateConfiguration("line needs a nonzero direction")


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        if not self.radius > DEGEN:
            raise DegenerateConfiguration("circle needs a positive radius")


Locus = Union[Line, Circle]


def sample_locus(locus: Locus, rng: np.random.Generator) -> Point:
    if isinstance(locus, Line):
        t = float(rng.uniform(-0.5, 1.5))
        return _at(locus.anchor, locus.direction, t)
    phi = float(rng.uniform(0.0, 2.0 * math.pi))
    return _at(locus.center, _dir(phi), locus.radius)


def locus_contains(locus: Locus, p: Point) -> bool:
    if isinstance(locus, Line):
        u = _unit(locus.direction)
        off = _vec(locus.anchor, p)
        return abs(_cross2(off, u)) <= ATOL * (1 + _norm(off))
    d = distance(locus.center, p)
    return abs(d - locus.radius) <= ATOL * (1 + locus.radius)


def intersect(a: Locus, b: Locus) -> list[Point]:
    """Intersection candidates, one or two. NoIntersection when empty or
    underdetermined (parallel or concentric inputs)."""
    if isinstance(a, Circle) and isinstance(b, Line):
        a, b = b, a
    if isinstance(a, Line) and isinstance(b, Line):
        denom = _cross2(a.direction, b.direction)
        if abs(denom) <= 1e-12 * (_norm(a.direction) * _norm(b.direction)):
            raise NoIntersection("parallel lines requested")
        t = _cross2(_vec(a.anchor, b.anchor), b.direction) / denom
        return [_at(a.anchor, a.direction, t)]
    if isinstance(a, Line):
        u = _unit(a.direction)
        t0 = _dot2(_vec(a.anchor, b.center), u)
        foot = _at(a.anchor, u, t0)
        h2 = b.radius**2 - distance(foot, b.center) ** 2
        return _chord(foot, u, h2, b.radius)
    d = distance(a.center, b.center)
    if d < DEGEN:
        raise NoIntersection("concentric circles requested")
    u = _unit(_vec(a.center, b.center))
    along = (d * d + a.radius**2 - b.radius**2) / (2 * d)
    foot = _at(a.center, u, along)
    h2 = a.radius**2 - along**2
    return _chord(foot, _perp(u), h2, min(a.radius, b.radius))


def _chord(foot: Point, u: Point, h2: float, scale: float) -> list[Point]:
    tol2 = (_COINCIDENT * (1 + scale)) ** 2
    if h2 < -tol2:
        raise NoIntersection("loci do not meet")
    if h2 <= tol2:
        return [foot]
    h = math.sqrt(h2)
    return [_at(foot, u, h), _at(foot, u, -h)]


def choose_intersection(candidates: Sequence[Point],
                        rng: np.random.Generator) -> tuple[Point, Optional[int]]:
    """Pick one candidate; the index is recorded only when the stream was
    actually consulted (tangency pairs collapse without consuming it)."""
    if not candidates:
        raise NoIntersection("no candidates left")
    if len(candidates) == 1:
        return candidates[0], None
    p, q = candidates
    if distance(p, q) <= _COINCIDENT * (1 + _norm(p)):
        return p, None
    idx = int(rng.integers(0, 2))
    return candidates[idx], idx


# ---------------------------------------------------------------------------
# point routines: direct constructions


def _sk_free(rng: np.random.Generator, args) -> tuple[Point, ...]:
    x, y = rng.uniform(-1.0, 1.0, 2)
    return ((float(x), float(y)),)


def _spread(points: Sequence[Point]) -> None:
    # reject cramped or flat samples so downstream checks stay meaningful
    for i, p in enumerate(points):
        for q in points[i + 1:]:
            if distance(p, q) < 0.1:
                raise SketchUnrealizable("sampled points too close")
    if len(points) >= 3:
        a, b, c = points[:3]
        if abs(_cross2(_vec(a, b), _vec(a, c))) < 0.05:
            raise SketchUnrealizable("sampled triangle too flat")


def _sk_segment(rng, args) -> tuple[Point, ...]:
    pts = ((_sk_free(rng, ())[0]), (_sk_free(rng, ())[0]))
    _spread(pts)
    return pts


def _sk_triangle(rng, args) -> tuple[Point, ...]:
    pts = tuple(_sk_free(rng, ())[0] for _ in range(3))
    _spread(pts)
    return pts


def _sk_iso_triangle0(rng, args) -> tuple[Point, ...]:
    apex = _sk_free(rng, ())[0]
    leg = float(rng.uniform(0.3, 1.0))
    t1, t2 = (float(x) for x in rng.uniform(0.0, 2.0 * math.pi, 2))
    pts = (apex, _at(apex, _dir(t1), leg), _at(apex, _dir(t2), leg))
    _spread(pts)
    return pts


def _sk_midpoint(rng, args) -> tuple[Point, ...]:
    a, b = args
    return (((a[0] + b[0]) / 2, (a[1] + b[1]) / 2),)


def _sk_circumcenter(rng, args) -> tuple[Point, ...]:
    from .numerics import circumcenter

    return (circumcenter(*args),)


def _sk_orthocenter(rng, args) -> tuple[Point, ...]:
    a, b, c = args
    alt_b = Line(b, _perp(_vec(a, c)))
    alt_c = Line(c, _perp(_vec(a, b)))
    return (intersect(alt_b, alt_c)[0],)


def _incenter_weights(a: Point, b: Point, c: Point) -> tuple[float, float, float]:
    return distance(b, c), distance(c, a), distance(a, b)


def _sk_incenter(rng, args) -> tuple[Point, ...]:
    a, b, c = args
    wa, wb, wc = _incenter_weights(a, b, c)
    s = wa + wb + wc
    return (((wa * a[0] + wb * b[0] + wc * c[0]) / s,
             (wa * a[1] + wb * b[1] + wc * c[1]) / s),)


def _sk_excenter(rng, args) -> tuple[Point, ...]:
    # excenter opposite the first input
    a, b, c = args
    wa, wb, wc = _incenter_weights(a, b, c)
    s = -wa + wb + wc
    if abs(s) < DEGEN:
        raise DegenerateConfiguration("excenter undefined")
    return (((-wa * a[0] + wb * b[0] + wc * c[0]) / s,
             (-wa * a[1] + wb * b[1] + wc * c[1]) / s),)


def _foot_point(p: Point, a: Point, b: Point) -> Point:
    u = _unit(_vec(a, b))
    return _at(a, u, _dot2(_vec(a, p), u))


def _sk_foot(rng, args) -> tuple[Point, ...]:
    p, a, b = args
    return (_foot_point(p, a, b),)


def _sk_reflect(rng, args) -> tuple[Point, ...]:
    p, a, b = args
    f = _foot_point(p, a, b)
    return ((2 * f[0] - p[0], 2 * f[1] - p[1]),)


def _sk_cc_tangent(rng, args) -> tuple[Point, ...]:
    """Touch points of the two external common tangents of circles
    (center o, through a) and (center w, through b): q,t on one tangent,
    p,s on the other."""
    o, a, w, b = args
    r1, r2 = distance(o, a), distance(w, b)
    d = distance(o, w)
    if d < DEGEN or d <= abs(r1 - r2):
        raise DegenerateConfiguration("external tangents do not exist")
    theta = _heading(o, w)
    beta = math.acos((r1 - r2) / d)
    q = _at(o, _dir(theta + beta), r1)
    t = _at(w, _dir(theta + beta), r2)
    p = _at(o, _dir(theta - beta), r1)
    s = _at(w, _dir(theta - beta), r2)
    return (q, t, p, s)


# ---------------------------------------------------------------------------
# locus routines


def _lk_line(a, b) -> Locus:
    return Line(a, _vec(a, b))


def _lk_tline(a, b, c) -> Locus:
    return Line(a, _perp(_vec(b, c)))


def _lk_pline(a, b, c) -> Locus:
    return Line(a, _vec(b, c))


def _lk_bline(a, b) -> Locus:
    mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
    return Line(mid, _perp(_vec(a, b)))


def _lk_bisector(a, b, c) -> Locus:
    # internal bisector at vertex b
    u, v = _unit(_vec(b, a)), _unit(_vec(b, c))
    return Line(b, (u[0] + v[0], u[1] + v[1]))


def _lk_mirror(a, b, c) -> Locus:
    # ray ba reflected across line bc
    u, v = _vec(b, a), _unit(_vec(b, c))
    k = 2 * _dot2(u, v)
    return Line(b, (k * v[0] - u[0], k * v[1] - u[1]))


def _lk_aline(a, b, c, d, e) -> Locus:
    theta = _heading(a, b) + _heading(d, c) - _heading(d, e)
    return Line(a, _dir(theta))


def _lk_aline0(a, b, c, d, e, f, g) -> Locus:
    theta = _heading(c, d) - _heading(a, b) + _heading(e, f)
    return Line(g, _dir(theta))


def _angle_radians(raw: str) -> float:
    return float(parse_value("angle", raw)) * math.pi


def _lk_aconst(a, b, c, r) -> Locus:
    return Line(c, _dir(_heading(a, b) + _angle_radians(r)))


def _lk_s_angle(a, b, r) -> Locus:
    return Line(b, _dir(_heading(a, b) + _angle_radians(r)))


def _lk_circle(o, a) -> Locus:
    return Circle(o, distance(o, a))


def _lk_eqdistance(a, b, c) -> Locus:
    return Circle(a, distance(b, c))


def _lk_lconst(a, l) -> Locus:
    return Circle(a, float(parse_value("length", l)))


def _lk_rconst(a, b, c, r) -> Locus:
    return Circle(c, distance(a, b) / float(parse_value("ratio", r)))


def _lk_eqratio(a, b, c, d, e, f, g) -> Locus:
    ab = distance(a, b)
    if ab < DEGEN:
        raise DegenerateConfiguration("zero reference segment")
    return Circle(g, distance(e, f) * distance(c, d) / ab)


def _apollonius(a: Point, b: Point, rho: float) -> Locus:
    """Points x with |xa| / |xb| = rho."""
    if rho <= 0 or not math.isfinite(rho):
        raise DegenerateConfiguration("ratio must be positive")
    if abs(rho - 1.0) < 1e-9:
        return _lk_bline(a, b)
    v = _vec(a, b)
    inner = _at(a, v, rho / (1 + rho))
    outer = _at(a, v, rho / (rho - 1))
    center = ((inner[0] + outer[0]) / 2, (inner[1] + outer[1]) / 2)
    return Circle(center, distance(inner, outer) / 2)


def _lk_apollonius(a, b, c, d, e, f) -> Locus:
    ef = distance(e, f)
    if ef < DEGEN:
        raise DegenerateConfiguration("zero reference segment")
    return _apollonius(a, b, distance(c, d) / ef)


def _lk_ratio_split(a, b, r) -> Locus:
    return _apollonius(a, b, float(parse_value("ratio", r)))


# id -> (outputs produced, routine); locus routines produce 0 points
_POINT_ROUTINES: dict[str, tuple[int, Callable]] = {
    "free": (1, _sk_free),
    "segment": (2, _sk_segment),
    "triangle": (3, _sk_triangle),
    "iso_triangle0": (3, _sk_iso_triangle0),
    "midpoint": (1, _sk_midpoint),
    "circumcenter": (1, _sk_circumcenter),
    "orthocenter": (1, _sk_orthocenter),
    "incenter": (1, _sk_incenter),
    "excenter": (1, _sk_excenter),
    "foot": (1, _sk_foot),
    "reflect": (1, _sk_reflect),
    "cc_tangent": (4, _sk_cc_tangent),
}

_LOCUS_ROUTINES: dict[str, Callable] = {
    "line_locus": _lk_line,
    "tline_locus": _lk_tline,
    "pline_locus": _lk_pline,
    "bline_locus": _lk_bline,
    "bisector_locus": _lk_bisector,
    "mirror_locus": _lk_mirror,
    "aline_locus": _lk_aline,
    "aline0_locus": _lk_aline0,
    "aconst_locus": _lk_aconst,
    "s_angle_locus": _lk_s_angle,
    "circle_locus": _lk_circle,
    "eqdistance_locus": _lk_eqdistance,
    "lconst_locus": _lk_lconst,
    "rconst_locus": _lk_rconst,
    "eqratio_locus": _lk_eqratio,
    "apollonius_locus": _lk_apollonius,
    "ratio_split_locus": _lk_ratio_split,
}


def known_sketch_ids() -> set[str]:
    return set(_POINT_ROUTINES) | set(_LOCUS_ROUTINES)


# ---------------------------------------------------------------------------
# problem compilation: resolve bindings and instantiate statements once


@dataclass(frozen=True)
class ClauseStep:
    construction: str
    sketch_id: str
    requirements: tuple[Statement, ...]
    statements: tuple[Statement, ...]
    # ("point", concrete name) | ("value", raw text)
    sketch_args: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class ClausePlan:
    points: tuple[str, ...]
    pinned: tuple[Optional[Point], ...]
    steps: tuple[ClauseStep, ...]

    @property
    def all_pinned(self) -> bool:
        return all(p is not None for p in self.pinned)


def _instantiate(tmpl: StatementTemplate, binding: Mapping[str, str],
                 raw: Mapping[str, str]) -> Statement:
    values = None
    if isinstance(tmpl.value, str):
        kind = kind_of(tmpl.tag)
        values = {tmpl.value: parse_value(kind.value, raw[tmpl.value])}
    return tmpl.instantiate(binding, values)


def compile_clause(clause: Clause,
                   definitions: Mapping[str, DefinitionSpec]) -> ClausePlan:
    """Bind one clause: concrete requirement and generated statements plus
    resolved sketch arguments. Structural errors surface here, before any
    sketch attempt."""
    if any(p is not None for p in clause.pinned) and not all(
            p is not None for p in clause.pinned):
        raise SketchUnrealizable(
            f"clause for {clause.new_points} pins only some of its points")
    steps = []
    for cname, args in clause.constructions:
        defn = definitions[cname]
        if defn.sketch_id not in known_sketch_ids():
            raise UnknownSketch(f"{cname}: no sketch routine {defn.sketch_id!r}")
        binding, raw = defn.bind(clause.new_points, args)
        reqs = tuple(_instantiate(t, binding, raw) for t in defn.requirements)
        gens = tuple(_instantiate(t, binding, raw) for t in defn.statements)
        sk_args = tuple(
            ("value", raw[tok]) if tok in defn.params else ("point", binding[tok])
            for tok in defn.sketch_args)
        steps.append(ClauseStep(cname, defn.sketch_id, reqs, gens, sk_args))
    n_point_outs = [
        _POINT_ROUTINES[s.sketch_id][0]
        for s in steps if s.sketch_id in _POINT_ROUTINES
    ]
    if n_point_outs:
        if len(steps) > 1:
            raise SketchUnrealizable(
                f"{clause.new_points}: a direct construction cannot be "
                "combined with other constraints")
        if n_point_outs[0] != len(clause.new_points):
            raise SketchUnrealizable(
                f"{clause.new_points}: construction produces "
                f"{n_point_outs[0]} points")
    elif len(clause.new_points) != 1:
        raise SketchUnrealizable(
            f"{clause.new_points}: locus constraints determine one point")
    return ClausePlan(clause.new_points, clause.pinned, tuple(steps))


def compile_problem(problem: ProblemSpec,
                    definitions: Mapping[str, DefinitionSpec],
                    ) -> tuple[ClausePlan, ...]:
    return tuple(compile_clause(c, definitions) for c in problem.clauses)


# ---------------------------------------------------------------------------
# the attempt loop


def _check(stmt: Statement, coords: dict[str, Point]) -> bool:
    return check_numerical(stmt, Diagram(points=coords))


def _place(coords: dict[str, Point], names: Sequence[str],
           pts: Sequence[Point]) -> None:
    for name, p in zip(names, pts):
        if not (math.isfinite(p[0]) and math.isfinite(p[1])):
            raise SketchUnrealizable(f"{name} has no finite coordinates")
        for other in coords.values():
            if distance(p, other) < DEGEN:
                raise DegenerateConfiguration(f"{name} collides with another point")
        coords[name] = p


def _resolve(step: ClauseStep, coords: Mapping[str, Point]) -> tuple:
    return tuple(coords[v] if kind == "point" else v
                 for kind, v in step.sketch_args)


def _realize_clause(plan: ClausePlan, coords: dict[str, Point],
                    rng: np.random.Generator, branches: list[str]) -> None:
    for step in plan.steps:
        for req in step.requirements:
            if not _check(req, coords):
                raise SketchUnrealizable(f"requirement {req.text()} fails")
    if plan.all_pinned:
        _place(coords, plan.points, plan.pinned)
    else:
        first = plan.steps[0]
        if first.sketch_id in _POINT_ROUTINES:
            fn = _POINT_ROUTINES[first.sketch_id][1]
            _place(coords, plan.points, fn(rng, _resolve(first, coords)))
        else:
            loci = [
                _LOCUS_ROUTINES[s.sketch_id](*_resolve(s, coords))
                for s in plan.steps
            ]
            if len(loci) == 1:
                pt = sample_locus(loci[0], rng)
            else:
                cands = [c for c in intersect(loci[0], loci[1])
                         if all(locus_contains(l, c) for l in loci[2:])]
                pt, idx = choose_intersection(cands, rng)
                if idx is not None:
                    branches.append(f"{plan.points[0]}={idx}")
            _place(coords, plan.points, (pt,))
    for step in plan.steps:
        for stmt in step.statements:
            if not _check(stmt, coords):
                raise SketchUnrealizable(f"generated {stmt.text()} fails")


def build_diagram(problem: ProblemSpec,
                  definitions: Mapping[str, DefinitionSpec],
                  seed: int = 0,
                  max_attempts: int = MAX_ATTEMPTS) -> Diagram:
    """Retry seeded sketches until every goal checks numerically.

    Deterministic for a fixed (problem, seed): the accepted diagram is the
    lowest-index attempt that realizes every clause and goal.
    """
    plans = compile_problem(problem, definitions)
    for attempt in range(max_attempts):
        rng = np.random.Generator(
            np.random.Philox(key=np.array([seed, attempt], dtype=np.uint64)))
        coords: dict[str, Point] = {}
        branches: list[str] = []
        try:
            for plan in plans:
                _realize_clause(plan, coords, rng, branches)
            diagram = Diagram(points=coords, seed=seed, attempts=attempt + 1,
                              branch_choices=branches)
            if all(check_numerical(g, diagram) for g in problem.goals):
                return diagram
        except (SketchUnrealizable, DegenerateConfiguration):
            continue
    raise GoalNumericallyFalse(
        f"no diagram realized {problem.name!r} in {max_attempts} attempts",
        attempts=max_attempts)


def extend_diagram(diagram: Diagram, plans: Sequence[ClausePlan],
                   max_attempts: int = MAX_ATTEMPTS) -> Diagram:
    """Realize additional clauses on top of an existing diagram, in place.

    Existing points keep their coordinates; only the new clauses resample
    on failure. The RNG stream is keyed off the base seed and the number
    of points already placed, so an extension never replays the base
    diagram's stream and repeated extensions stay deterministic. The
    diagram mutates only on success: every holder of the reference sees
    the new points at once, and a failed extension changes nothing.
    """
    base = len(diagram.points)
    for attempt in range(max_attempts):
        rng = np.random.Generator(np.random.Philox(
            key=np.array([diagram.seed + 1000003 * base, attempt],
                         dtype=np.uint64)))
        coords = dict(diagram.points)
        branches = list(diagram.branch_choices)
        try:
            for plan in plans:
                _realize_clause(plan, coords, rng, branches)
        except (SketchUnrealizable, DegenerateConfiguration):
            continue
        diagram.points = coords
        diagram.branch_choices = branches
        return diagram
    new_points = [p for plan in plans for p in plan.points]
    # no goal is involved here, so exhaustion means the construction
    # itself cannot be realised against the pinned base points
    raise SketchUnrealizable(
        f"no extension placed {new_points} in {max_attempts} attempts")
