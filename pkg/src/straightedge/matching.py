"""Rule matching with a persistent numeric cache.

A rule fires when every premise unifies with a statement that is
symbolically established; purely numeric side conditions (ncoll,
sameclock, ...) are checked against the diagram instead. Premises are
evaluated in file order so a cheap failing premise prunes the search
before the expensive ones run. Numeric answers are memoized in a
MatchCache keyed by a problem fingerprint and persisted between runs,
which is where the warm-run speedup comes from: a repeated run at the
same fingerprint executes zero fresh numeric checks.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterable, Iterator, Protocol, Sequence

from .errors import (
    CacheIoFailure,
    DegenerateConfiguration,
    MalformedStatement,
    StalePremise,
)
from .depgraph import Dependency
from .numerics import Diagram, check_numerical
from .parsing import RuleSpec, StatementTemplate
from .statements import Statement, kind_of, orbit, statement

# ---------------------------------------------------------------------------
# numeric cache


def problem_fingerprint(problem_text: str, seed: int) -> str:
    blob = f"{problem_text}\n#seed={seed}".encode()
    return hashlib.sha256(blob).hexdigest()[:16]


_CACHE_HEADER = "# match cache v1 "

# Kinds cheap enough to enumerate exhaustively up front: plain point
# tuples and segment pairs. Everything else (the pair-of-pair kinds and
# the orientation predicates) is memoized on demand; enumerating ordered
# 6- and 8-tuples would dwarf the deduction itself.
_EAGER_KINDS = ("coll", "ncoll", "midp", "circle", "cyclic",
                "para", "perp", "cong")


class MatchCache:
    """Memoized numeric truth per canonical statement, persistable.

    The disk format is one statement text per line, sorted, with a ``!``
    prefix on statements that checked false; the header line carries the
    problem fingerprint. A fingerprint mismatch discards the file.
    """

    def __init__(self, fingerprint: str = "", path: Path | str | None = None):
        self.fingerprint = fingerprint
        self.path = Path(path) if path is not None else None
        self._true: dict[str, set[str]] = {}
        self._false: dict[str, set[str]] = {}
        self.checks_executed = 0
        self.dirty = False

    def check(self, stmt: Statement, diagram: Diagram) -> bool:
        text = stmt.text()
        kind = stmt.kind
        if text in self._true.get(kind, ()):
            return True
        if text in self._false.get(kind, ()):
            return False
        try:
            ok = check_numerical(stmt, diagram)
        except DegenerateConfiguration:
            ok = False
        self.checks_executed += 1
        self.record(stmt, ok)
        return ok

    def record(self, stmt: Statement, ok: bool) -> None:
        store = self._true if ok else self._false
        store.setdefault(stmt.kind, set()).add(stmt.text())
        self.dirty = True

    def candidates(self, kind: str) -> frozenset[str]:
        """Texts of the numerically true statements seen for a kind."""
        return frozenset(self._true.get(kind, ()))

    def __len__(self) -> int:
        return (sum(len(v) for v in self._true.values())
                + sum(len(v) for v in self._false.values()))

    def save(self) -> None:
        if self.path is None or not self.dirty:
            return
        lines = [_CACHE_HEADER + self.fingerprint]
        for store, prefix in ((self._true, ""), (self._false, "!")):
            for kind in store:
                lines.extend(prefix + text for text in store[kind])
        # header first, then sorted by (kind, text); texts start with
        # their kind token so a plain sort already groups them
        body = sorted(lines[1:], key=lambda s: s.lstrip("!"))
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self.path.write_text("\n".join([lines[0]] + body) + "\n")
        except OSError as exc:
            raise CacheIoFailure(f"cannot write {self.path}: {exc}") from exc
        self.dirty = False

    @classmethod
    def load(cls, path: Path | str, fingerprint: str) -> "MatchCache | None":
        """The persisted cache, or None when missing, stale, or corrupt."""
        path = Path(path)
        try:
            text = path.read_text()
        except OSError:
            return None
        lines = text.splitlines()
        if not lines or lines[0] != _CACHE_HEADER + fingerprint:
            return None
        cache = cls(fingerprint, path)
        for line in lines[1:]:
            if not line.strip():
                continue
            ok = not line.startswith("!")
            body = line.lstrip("!")
            kind = body.split(" ", 1)[0]
            try:
                kind_of(kind)
            except Exception:
                return None
            store = cache._true if ok else cache._false
            store.setdefault(kind, set()).add(body)
        cache.dirty = False
        return cache


def build_cache(diagram: Diagram, points: Sequence[str],
                kinds: Iterable[str], *, fingerprint: str = "",
                path: Path | str | None = None) -> MatchCache:
    """Load or build the numeric cache for a (problem, seed) pair.

    A persisted cache with the right fingerprint is returned untouched,
    with zero checks executed. Otherwise the cheap kinds among ``kinds``
    are enumerated over canonical point tuples and checked; the rest
    fill in lazily through MatchCache.check. IO trouble degrades to an
    in-memory cache.
    """
    if path is not None:
        cached = MatchCache.load(path, fingerprint)
        if cached is not None:
            return cached
    cache = MatchCache(fingerprint, path)
    pts = sorted(points)
    wanted = set(kinds)
    for kind in (k for k in _EAGER_KINDS if k in wanted):
        for stmt in _enumerate_kind(kind, pts):
            cache.check(stmt, diagram)
    return cache


def _enumerate_kind(kind: str, pts: Sequence[str]) -> Iterator[Statement]:
    if kind in ("coll", "ncoll"):
        for tri in combinations(pts, 3):
            yield statement(kind, *tri)
    elif kind == "midp":
        for m in pts:
            for a, b in combinations([p for p in pts if p != m], 2):
                yield statement("midp", m, a, b)
    elif kind == "circle":
        for o in pts:
            for tri in combinations([p for p in pts if p != o], 3):
                yield statement("circle", o, *tri)
    elif kind == "cyclic":
        for quad in combinations(pts, 4):
            yield statement("cyclic", *quad)
    else:  # para / perp / cong: unordered pairs of segments
        segs = list(combinations(pts, 2))
        for s1, s2 in combinations(segs, 2):
            try:
                yield statement(kind, *s1, *s2)
            except MalformedStatement:  # pragma: no cover - segs distinct
                continue


# ---------------------------------------------------------------------------
# matching


class MatchState(Protocol):
    """What the matcher needs from a proof state."""

    diagram: Diagram
    cache: MatchCache

    def statements_of_kind(self, kind: str) -> Sequence[Statement]: ...

    def has_statement(self, stmt: Statement) -> bool: ...

    def variadic_candidates(self, kind: str,
                            arity: int) -> Iterable[Statement]: ...


@dataclass
class MatchProfiler:
    """Wall-clock share of matching time per premise kind."""

    seconds: dict[str, float] = field(default_factory=dict)

    def add(self, kind: str, dt: float) -> None:
        self.seconds[kind] = self.seconds.get(kind, 0.0) + dt

    def total(self) -> float:
        return sum(self.seconds.values())

    def report(self) -> str:
        total = self.total() or 1.0
        rows = sorted(self.seconds.items(), key=lambda kv: -kv[1])
        lines = ["matching time by premise kind:"]
        for kind, sec in rows:
            lines.append(f"  {kind:<12} {100 * sec / total:5.1f}%  {sec:.4f}s")
        return "\n".join(lines)


@dataclass(frozen=True)
class Match:
    """One way a rule fires: a substitution plus its premise statements.

    ``premises`` holds the symbolic premises only, in premise file
    order; numeric side conditions passed at match time and are not
    recorded (the diagram never changes, so they cannot go stale).
    """

    rule: RuleSpec
    binding: tuple[tuple[str, str], ...]
    premises: tuple[Statement, ...]

    def substitution(self) -> dict[str, str]:
        return dict(self.binding)


def _unify(tmpl: StatementTemplate, cand: Statement,
           binding: dict[str, str]) -> Iterator[dict[str, str]]:
    """Extensions of ``binding`` mapping the template onto the candidate."""
    if len(tmpl.vars) != len(cand.args):
        return
    want = tmpl.value if isinstance(tmpl.value, Fraction) else None
    seen: set[tuple[tuple[str, str], ...]] = set()
    for args, value in orbit(cand.kind, cand.args, cand.value):
        if want is not None and value != want:
            continue
        new = dict(binding)
        for var, point in zip(tmpl.vars, args):
            if new.setdefault(var, point) != point:
                break
        else:
            key = tuple(sorted(new.items()))
            if key not in seen:
                seen.add(key)
                yield new


def _instantiate(tmpl: StatementTemplate,
                 binding: dict[str, str]) -> Statement | None:
    try:
        return tmpl.instantiate(binding)
    except MalformedStatement:
        return None  # degenerate point collision; prune this branch


def _candidates(tmpl: StatementTemplate,
                state: MatchState) -> Iterable[Statement]:
    kind = kind_of(tmpl.tag)
    if kind.variadic and len(tmpl.vars) > kind.arity:
        return state.variadic_candidates(kind.tag, len(tmpl.vars))
    return state.statements_of_kind(kind.tag)


def _evaluation_plan(rule: RuleSpec) -> list[StatementTemplate] | None:
    """Premises in evaluation order, or None when the rule cannot bind.

    File order is kept, except that a numeric side condition whose
    variables are not yet bound at its slot slides to the first point
    where they are; numeric checks need concrete points. Shipped rule
    files already order their premises this way, so this only matters
    for deliberately permuted rules.
    """
    plan: list[StatementTemplate] = []
    pending: list[StatementTemplate] = []
    bound: set[str] = set()
    for tmpl in rule.premises:
        if kind_of(tmpl.tag).numeric_only and not set(tmpl.vars) <= bound:
            pending.append(tmpl)
            continue
        plan.append(tmpl)
        bound |= set(tmpl.vars)
        for t in [t for t in pending if set(t.vars) <= bound]:
            plan.append(t)
            pending.remove(t)
    if pending:
        return None  # some variable never appears in a symbolic premise
    return plan


def _established(stmt: Statement, tmpl: StatementTemplate,
                 kind, state: MatchState) -> bool:
    if kind.variadic and len(tmpl.vars) > kind.arity:
        return any(c == stmt for c in
                   state.variadic_candidates(kind.tag, len(tmpl.vars)))
    return state.has_statement(stmt)


def match_rule(rule: RuleSpec, state: MatchState,
               profiler: MatchProfiler | None = None) -> list[Match]:
    """Every current way the rule fires, in substitution order."""
    plan = _evaluation_plan(rule)
    if plan is None:
        return []
    partial: list[tuple[dict[str, str], tuple[Statement, ...]]] = [({}, ())]
    for tmpl in plan:
        if not partial:
            break
        t0 = time.perf_counter()
        kind = kind_of(tmpl.tag)
        grown: list[tuple[dict[str, str], tuple[Statement, ...]]] = []
        if tmpl.tag == "pythagorean_premises":
            pyth = list(_pythagorean_candidates(state))
        for binding, prems in partial:
            if kind.numeric_only:
                stmt = _instantiate(tmpl, binding)
                if stmt is not None and state.cache.check(stmt, state.diagram):
                    grown.append((binding, prems))
                continue
            if tmpl.tag == "pythagorean_premises":
                for cand, backing in pyth:
                    for ext in _unify(tmpl, cand, binding):
                        grown.append((ext, prems + backing))
                continue
            unbound = [v for v in tmpl.vars if v not in binding]
            if not unbound:
                stmt = _instantiate(tmpl, binding)
                if stmt is not None and _established(stmt, tmpl, kind, state):
                    grown.append((binding, prems + (stmt,)))
                continue
            for cand in _candidates(tmpl, state):
                for ext in _unify(tmpl, cand, binding):
                    grown.append((ext, prems + (cand,)))
        partial = grown
        if profiler is not None:
            profiler.add(kind.tag, time.perf_counter() - t0)

    out: dict[tuple[tuple[str, str], ...], Match] = {}
    for binding, prems in partial:
        key = tuple(sorted(binding.items()))
        if key not in out:
            deduped = tuple(dict.fromkeys(prems))
            out[key] = Match(rule, key, deduped)
    return [out[key] for key in sorted(out)]


# ---------------------------------------------------------------------------
# the Pythagoras rule needs resolved side lengths, not just a pattern


def _sqrt_fraction(value: Fraction) -> Fraction | None:
    """Exact square root, or None when it is irrational."""
    if value <= 0:
        return None
    num = math.isqrt(value.numerator)
    den = math.isqrt(value.denominator)
    if num * num != value.numerator or den * den != value.denominator:
        return None
    return Fraction(num, den)


def _right_angle_vertex(perp: Statement) -> tuple[str, str, str] | None:
    a, b, c, d = perp.args
    first, second = {a, b}, {c, d}
    shared = first & second
    if len(shared) != 1:
        return None
    (v,) = shared
    (p,) = first - shared
    (q,) = second - shared
    return (v,) + tuple(sorted((p, q)))


def _pythagorean_candidates(
        state: MatchState) -> Iterator[tuple[Statement, tuple[Statement, ...]]]:
    """(pythagorean_premises statement, its backing statements) pairs.

    A candidate exists where a right angle sits at a shared vertex and
    at least two of the triangle's sides have established lconst
    lengths. The backing tuple carries the perp and those lconsts; they
    become the premises of the eventual r57 dependency.
    """
    lengths: dict[tuple[str, str], Statement] = {}
    for lc in state.statements_of_kind("lconst"):
        lengths.setdefault((lc.args[0], lc.args[1]), lc)
    emitted: set[Statement] = set()
    for perp in state.statements_of_kind("perp"):
        corner = _right_angle_vertex(perp)
        if corner is None:
            continue
        v, p, q = corner
        sides = [tuple(sorted(s)) for s in ((v, p), (v, q), (p, q))]
        known = [lengths[s] for s in sides if s in lengths]
        if len(known) < 2:
            continue
        cand = statement("pythagorean_premises", v, p, q)
        if cand in emitted:
            continue
        emitted.add(cand)
        yield cand, (perp,) + tuple(known)


def _resolve_pythagorean(conclusion: Statement, backing: Sequence[Statement],
                         reason: str) -> list[Dependency]:
    """The missing side's lconst, when its length is exactly rational.

    With all three sides known there is nothing to add; an irrational
    hypotenuse stays silent because lconst carries rationals only.
    """
    v, p, q = conclusion.args
    lengths: dict[tuple[str, str], tuple[Statement, Fraction]] = {}
    for stmt in backing:
        if stmt.kind == "lconst":
            lengths[(stmt.args[0], stmt.args[1])] = (stmt, stmt.value)
    legs = [tuple(sorted((v, p))), tuple(sorted((v, q)))]
    hyp = tuple(sorted((p, q)))
    missing = [s for s in legs + [hyp] if s not in lengths]
    if len(missing) != 1:
        return []
    (target,) = missing
    if target == hyp:
        square = sum(lengths[s][1] ** 2 for s in legs)
    else:
        (other,) = [s for s in legs if s != target]
        square = lengths[hyp][1] ** 2 - lengths[other][1] ** 2
    side = _sqrt_fraction(square)
    if side is None:
        return []
    new = statement("lconst", *target, value=side)
    premises = tuple(dict.fromkeys(backing))
    return [Dependency(premises, new, reason)]


# ---------------------------------------------------------------------------
# application


def _materialize(stmt: Statement, state: MatchState) -> list[Dependency]:
    """Dependencies establishing a wide variadic premise from state facts.

    Only concyclicity needs this: a six-point cyclic premise is backed
    by the four-point cyclic statements that share its first three
    points, all of which the intrinsic closure keeps established.
    """
    if stmt.kind != "cyclic":
        raise StalePremise(f"{stmt.text()} vanished from the state")
    base, rest = stmt.args[:3], stmt.args[3:]
    covering = []
    for extra in rest:
        part = statement("cyclic", *base, extra)
        if not state.has_statement(part):
            raise StalePremise(
                f"{part.text()} backing {stmt.text()} is not established")
        covering.append(part)
    return [Dependency(tuple(covering), stmt, "i-cyclic")]


def apply_match(match: Match, state: MatchState) -> list[Dependency]:
    """Dependencies this match contributes, conclusions last.

    Premises are re-verified; with a monotonic state they can only have
    been strengthened, so a missing one means the match came from a
    different state and is refused. Conclusions that fail the diagram
    are dropped: the rule file states side conditions numerically rather
    than spelling each one out, so a degenerate binding surfaces as a
    false conclusion here, not as an unsound addition to the state.
    """
    deps: list[Dependency] = []
    for prem in match.premises:
        if state.has_statement(prem):
            continue
        kind = kind_of(prem.kind)
        if kind.variadic and len(prem.args) > kind.arity:
            deps.extend(_materialize(prem, state))
        else:
            raise StalePremise(f"{prem.text()} vanished from the state")
    binding = match.substitution()
    for tmpl in match.rule.conclusions:
        if tmpl.tag == "pythagorean_conclusions":
            shape = _instantiate(tmpl, binding)
            if shape is not None:
                deps.extend(_resolve_pythagorean(
                    shape, match.premises, match.rule.id))
            continue
        stmt = _instantiate(tmpl, binding)
        if stmt is None:
            continue  # degenerate under this substitution
        if not state.cache.check(stmt, state.diagram):
            continue
        deps.append(Dependency(match.premises, stmt, match.rule.id))
    return deps
