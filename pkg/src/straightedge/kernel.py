"""The proof state and its saturation loop.

One round = algebraic saturation of both linear tables, then every
current match of every rule in file order, then the intrinsic closure.
An agent repeats rounds until the goals are established or a round adds
nothing, so the state is a fixpoint of deduction, not of any particular
visit order.

Every statement enters through ``add``: the dependency graph audits it
numerically (through the match cache, so audits memoize and persist
across runs), the by-kind index feeds the matcher, the linear tables
pick up whatever they can compile, and the symbols graph tracks line
and circle membership. Nothing is ever retracted.

The intrinsic families, each a labeled reason in the graph:

* ``i-coll``   zero-angle identifications and the triple closure of
  merged lines (a line node with k points stands for all C(k,3) colls).
* ``i-cyclic`` quadruple closure of merged circles, and the covering
  step that turns four-point facts into a wide concyclicity.
* ``i-subst``  an angle-table emission that used a collinearity, i.e. a
  known statement with an argument pair rewritten along its line.
* ``i-circle`` center bookkeeping: a circle statement yields the center
  equidistances, and equidistances from a common point yield circle
  statements. Recognition never invents equidistance for points that
  merely share a circle node; that deduction belongs to the rules file.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .algebra import (
    PI,
    LinearTable,
    direction_symbol,
    length_symbol,
    rational_from_exponents,
)
from .depgraph import Dependency, DependencyGraph
from .errors import DegenerateConfiguration, UnknownRule
from .matching import (
    MatchProfiler,
    apply_match,
    build_cache,
    match_rule,
    problem_fingerprint,
)
from .numerics import Diagram, check_numerical
from .parsing import (
    Clause,
    DefinitionSpec,
    ProblemSpec,
    RuleSpec,
    parse_clause,
)
from .sketch import (
    MAX_ATTEMPTS,
    build_diagram,
    compile_clause,
    compile_problem,
    extend_diagram,
)
from .statements import Statement, kind_of, statement
from .symbols import SymbolsGraph

HALF = Fraction(1, 2)

RUNNING = "running"
SOLVED = "solved"
SATURATED = "saturated"

INTRINSIC_IDS = ("i-coll", "i-cyclic", "i-subst", "i-circle")
AR_TAGS = ("AR-angle", "AR-ratio")


@dataclass(frozen=True)
class StepReport:
    """What one step did: new statements, status, wall time.

    ``action`` echoes the action script line that caused the step, so a
    report history replays verbatim. Read-only actions park their answer
    in ``detail``.
    """

    action: str
    new_statements: tuple[Statement, ...]
    status: str
    seconds: float
    detail: dict | None = None


@dataclass(frozen=True)
class ProofOutcome:
    """Answer for a single goal.

    ``resolved`` is the statement that stands for the goal in the graph:
    the goal itself for plain goals, the located constant statement for
    compute goals. ``numeric`` carries the diagram answer for check-only
    goals, which never enter the graph.
    """

    goal: Statement
    proven: bool
    resolved: Statement | None = None
    numeric: bool | None = None


class ProofState:
    """Single-writer deduction state over one diagram."""

    def __init__(self, problem: ProblemSpec,
                 definitions: Mapping[str, DefinitionSpec],
                 rules: Sequence[RuleSpec], diagram: Diagram, *,
                 cache_path: Path | str | None = None):
        self.problem = problem
        self.definitions = dict(definitions)
        self.rules = list(rules)
        self.diagram = diagram
        self.goals: list[Statement] = list(problem.goals)
        self.added_clauses: list[Clause] = []
        self.fingerprint = problem_fingerprint(problem.text(), diagram.seed)
        kinds = {kind_of(t.tag).tag for r in self.rules for t in r.premises}
        kinds.update(g.kind for g in self.goals if kind_of(g.kind).numeric_only)
        self.cache = build_cache(diagram, sorted(diagram.points), kinds,
                                 fingerprint=self.fingerprint, path=cache_path)
        self.graph = DependencyGraph(diagram, audit=self._audit)
        self.symbols = SymbolsGraph(diagram)
        self.angle = LinearTable("angle", diagram)
        self.ratio = LinearTable("ratio", diagram)
        self.profiler = MatchProfiler()
        self.status = RUNNING
        self.rounds = 0
        self._by_kind: dict[str, list[Statement]] = {}
        self._line_supports: dict[int, list[Statement]] = {}
        self._circle_supports: dict[int, list[Statement]] = {}
        for plan in compile_problem(problem, self.definitions):
            for step in plan.steps:
                for stmt in step.statements:
                    self.add(Dependency((), stmt, "construction"))
        self._update_status(before=-1)
        self.cache.save()

    def _audit(self, stmt: Statement) -> bool:
        return self.cache.check(stmt, self.diagram)

    # -- the MatchState protocol ------------------------------------------

    def statements_of_kind(self, kind: str) -> Sequence[Statement]:
        return self._by_kind.get(kind, [])

    def has_statement(self, stmt: Statement) -> bool:
        return stmt in self.graph

    def variadic_candidates(self, kind: str, arity: int) -> list[Statement]:
        if kind == "cyclic":
            nodes = self.symbols.circles()
        elif kind == "coll":
            nodes = self.symbols.lines()
        else:
            return []
        out: list[Statement] = []
        for node in sorted(nodes, key=lambda n: n.ident):
            if len(node.points) < arity:
                continue
            for combo in combinations(sorted(node.points), arity):
                out.append(statement(kind, *combo))
        return out

    # -- growth -----------------------------------------------------------

    def add(self, dep: Dependency) -> bool:
        """Record one derivation; on a new conclusion, feed every index."""
        if not self.graph.add_dependency(dep):
            return False
        stmt = dep.conclusion
        self._by_kind.setdefault(stmt.kind, []).append(stmt)
        kind = stmt.kind
        if kind in ("coll", "para", "perp", "aconst", "eqangle"):
            self.angle.add_statement(stmt)
        elif kind in ("cong", "lconst", "rconst", "eqratio", "eqratio3"):
            self.ratio.add_statement(stmt)
        if kind == "coll":
            events = self.symbols.note_collinear(*stmt.args, justification=dep)
            self._track_support(self._line_supports, events, stmt,
                                self.symbols.line_through(*stmt.args[:2]).ident)
        elif kind == "cyclic":
            base = stmt.args[:3]
            events = []
            for extra in stmt.args[3:]:
                events += self.symbols.note_concyclic(*base, extra,
                                                      justification=dep)
            node = self.symbols.circle_through(*base)
            self._track_support(self._circle_supports, events, stmt, node.ident)
        elif kind == "circle":
            events = self.symbols.note_circle(*stmt.args, justification=dep)
            node = self.symbols.circle_through(*stmt.args[1:])
            self._track_support(self._circle_supports, events, stmt, node.ident)
        return True

    @staticmethod
    def _track_support(supports: dict[int, list[Statement]], events,
                       stmt: Statement, ident: int) -> None:
        for ev in events:
            supports.setdefault(ev.survivor, []).extend(
                supports.pop(ev.absorbed, []))
        supports.setdefault(ident, []).append(stmt)

    # -- one full round -----------------------------------------------------

    def saturation_step(self) -> StepReport:
        """AR saturation, then all rule matches, then intrinsic closure."""
        t0 = time.perf_counter()
        before = len(self.graph)
        for table in (self.angle, self.ratio):
            for stmt, premises in table.saturate(self.has_statement):
                self.add(Dependency(premises, stmt,
                                    self._table_reason(table.tag, stmt.kind,
                                                       premises)))
        for rule in self.rules:
            for match in match_rule(rule, self, self.profiler):
                for dep in apply_match(match, self):
                    self.add(dep)
        self._close_intrinsic()
        self.rounds += 1
        self._update_status(before)
        self.cache.save()
        new = tuple(list(self.graph.statements())[before:])
        return StepReport("step", new, self.status,
                          time.perf_counter() - t0)

    def rule_step(self, rule_id: str) -> StepReport:
        """Apply every current match of one rule, then intrinsic closure.

        The agent-selectable sibling of a full round: no table
        saturation, and no saturated verdict, since one matchless rule
        says nothing about the fixpoint.
        """
        t0 = time.perf_counter()
        for rule in self.rules:
            if rule.id == rule_id:
                break
        else:
            raise UnknownRule(f"{rule_id} is not in the active rule set")
        before = len(self.graph)
        for match in match_rule(rule, self, self.profiler):
            for dep in apply_match(match, self):
                self.add(dep)
        self._close_intrinsic()
        new = tuple(list(self.graph.statements())[before:])
        if self.goals and all(self.check_goal(g).proven for g in self.goals):
            self.status = SOLVED
        elif new and self.status == SATURATED:
            self.status = RUNNING
        self.cache.save()
        return StepReport(f"match {rule_id}", new, self.status,
                          time.perf_counter() - t0)

    def _close_intrinsic(self) -> None:
        while any([self.add(dep) for dep in self._intrinsic_once()]):
            pass

    @staticmethod
    def _table_reason(tag: str, kind: str,
                      premises: Iterable[Statement]) -> str:
        if kind == "coll":
            return "i-coll"
        if tag == "angle" and any(p.kind == "coll" for p in premises):
            return "i-subst"
        return f"AR-{tag}"

    def _intrinsic_once(self) -> list[Dependency]:
        deps: list[Dependency] = []
        emitted: set[Statement] = set()

        def fresh(stmt: Statement) -> bool:
            if stmt in emitted or self.has_statement(stmt):
                return False
            emitted.add(stmt)
            return True

        for node in sorted(self.symbols.lines(), key=lambda n: n.ident):
            if len(node.points) < 4:
                continue
            support = tuple(dict.fromkeys(self._line_supports[node.ident]))
            for tri in combinations(sorted(node.points), 3):
                stmt = statement("coll", *tri)
                if fresh(stmt):
                    deps.append(Dependency(support, stmt, "i-coll"))
        for node in sorted(self.symbols.circles(), key=lambda n: n.ident):
            if len(node.points) < 5:
                continue
            support = tuple(dict.fromkeys(self._circle_supports[node.ident]))
            for quad in combinations(sorted(node.points), 4):
                stmt = statement("cyclic", *quad)
                if fresh(stmt):
                    deps.append(Dependency(support, stmt, "i-cyclic"))
        for circ in self.statements_of_kind("circle"):
            o, a, b, c = circ.args
            for p, q in ((a, b), (b, c)):
                stmt = statement("cong", o, p, o, q)
                if fresh(stmt):
                    deps.append(Dependency((circ,), stmt, "i-circle"))
        deps.extend(self._recognized_circles(fresh))
        return deps

    def _recognized_circles(self, fresh) -> list[Dependency]:
        """Circle statements for every point seen equidistant from 3+ others.

        Components form over cong statements sharing exactly one
        endpoint; each emission cites the congs that built its component.
        Only explicit equidistance counts, so removing the recognition
        rules from the rules file genuinely severs cyclic-to-center
        reasoning instead of being papered over here.
        """
        by_center: dict[str, list[tuple[str, str, Statement]]] = {}
        for cg in self.statements_of_kind("cong"):
            a, b, c, d = cg.args
            shared = {a, b} & {c, d}
            if len(shared) != 1:
                continue
            (o,) = shared
            (p,) = {a, b} - shared
            (q,) = {c, d} - shared
            by_center.setdefault(o, []).append((p, q, cg))
        deps: list[Dependency] = []
        for o in sorted(by_center):
            parent: dict[str, str] = {}

            def find(x: str) -> str:
                parent.setdefault(x, x)
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            spans: dict[str, list[Statement]] = {}
            for p, q, cg in by_center[o]:
                rp, rq = find(p), find(q)
                if rp == rq:
                    continue
                keep, drop = sorted((rp, rq))
                parent[drop] = keep
                spans.setdefault(keep, []).extend(spans.pop(drop, []))
                spans[keep].append(cg)
            members: dict[str, list[str]] = {}
            for x in sorted(parent):
                members.setdefault(find(x), []).append(x)
            for root in sorted(members):
                points = members[root]
                if len(points) < 3:
                    continue
                support = tuple(dict.fromkeys(spans[root]))
                for tri in combinations(points, 3):
                    stmt = statement("circle", o, *tri)
                    if fresh(stmt):
                        deps.append(Dependency(support, stmt, "i-circle"))
        return deps

    # -- goals --------------------------------------------------------------

    def check_goal(self, goal: Statement) -> ProofOutcome:
        kind = kind_of(goal.kind)
        if kind.numeric_only:
            ok = self.cache.check(goal, self.diagram)
            return ProofOutcome(goal, ok, None, ok)
        if kind.compute:
            resolved = self._resolve_compute(goal)
            return ProofOutcome(goal, resolved is not None, resolved)
        if self.has_statement(goal):
            return ProofOutcome(goal, True, goal)
        if kind.variadic and len(goal.args) > kind.arity and self._cover_wide(goal):
            return ProofOutcome(goal, True, goal)
        return ProofOutcome(goal, False)

    def _cover_wide(self, stmt: Statement) -> bool:
        # a wide coll/cyclic holds when one merged node contains every
        # argument; the covering facts then materialize it in the graph
        points = set(stmt.args)
        if stmt.kind == "cyclic":
            nodes, reason = self.symbols.circles(), "i-cyclic"
        else:
            nodes, reason = self.symbols.lines(), "i-coll"
        if not any(points <= node.points for node in nodes):
            return False
        base = stmt.args[:kind_of(stmt.kind).arity - 1]
        covering = []
        for extra in stmt.args[len(base):]:
            part = statement(stmt.kind, *base, extra)
            if not self.has_statement(part):
                return False
            covering.append(part)
        self.add(Dependency(tuple(covering), stmt, reason))
        return True

    def _resolve_compute(self, goal: Statement) -> Statement | None:
        """The constant statement a compute goal asks for, if derivable.

        The located statement becomes the goal internally: it is added
        to the graph with its minimized algebraic premises.
        """
        args = goal.args
        if goal.kind == "acompute":
            table = self.angle
            coeffs = {direction_symbol(*args[:2]): Fraction(1),
                      direction_symbol(*args[2:]): Fraction(-1)}
            hit = table.query(coeffs)
            if hit is None:
                return None
            # the residual reads theta(ab) - theta(cd) in pi units
            value = (-hit[0].get(PI, Fraction(0))) % 1
            if value == 0:
                distinct = sorted(set(args))
                resolved = (statement("coll", *distinct) if len(distinct) == 3
                            else statement("para", *args))
            elif value == HALF:
                resolved = statement("perp", *args)
            else:
                resolved = statement("aconst", *args, value=value)
        else:
            table = self.ratio
            if goal.kind == "lcompute":
                coeffs = {length_symbol(*args): Fraction(1)}
            else:
                coeffs = {length_symbol(*args[:2]): Fraction(1),
                          length_symbol(*args[2:]): Fraction(-1)}
            hit = table.query(coeffs)
            if hit is None:
                return None
            value = rational_from_exponents(hit[0])
            if value is None:
                return None  # the length exists but is not rational
            if goal.kind == "lcompute":
                resolved = statement("lconst", *args, value=value)
            elif value == 1:
                resolved = statement("cong", *args)
            else:
                resolved = statement("rconst", *args, value=value)
        if not self.has_statement(resolved):
            premises = table.minimize_premises(resolved)
            self.add(Dependency(premises, resolved,
                                self._table_reason(table.tag, resolved.kind,
                                                   premises)))
        return resolved

    def _update_status(self, before: int) -> None:
        if self.goals:
            outcomes = [self.check_goal(g) for g in self.goals]
            if all(o.proven for o in outcomes):
                self.status = SOLVED
                return
        self.status = RUNNING if len(self.graph) > before else SATURATED

    # -- agent-facing operations ---------------------------------------------

    def expand_clause(self, text: str) -> list[Dependency]:
        """Sketch one construction clause mid-run and root its statements."""
        clause = parse_clause(text, self.definitions, set(self.diagram.points))
        plan = compile_clause(clause, self.definitions)
        extend_diagram(self.diagram, (plan,))
        self.added_clauses.append(clause)
        # the cache file must not outlive its problem: a different
        # expansion could reuse point names at other coordinates
        expanded = "; ".join([self.problem.text()]
                             + [c.text() for c in self.added_clauses])
        self.fingerprint = problem_fingerprint(expanded, self.diagram.seed)
        self.cache.fingerprint = self.fingerprint
        self.cache.dirty = True
        self.cache.save()
        deps = []
        for step in plan.steps:
            for stmt in step.statements:
                dep = Dependency((), stmt, "construction")
                if self.add(dep):
                    deps.append(dep)
        if self.goals and all(self.check_goal(g).proven for g in self.goals):
            self.status = SOLVED
        elif deps and self.status == SATURATED:
            self.status = RUNNING
        return deps

    def check_statement(self, stmt: Statement) -> tuple[bool, bool]:
        """(symbolically established, numerically true on the diagram)."""
        kind = kind_of(stmt.kind)
        numeric = self.cache.check(stmt, self.diagram)
        if kind.numeric_only:
            return False, numeric
        symbolic = self.has_statement(stmt)
        if not symbolic and kind.variadic and len(stmt.args) > kind.arity:
            points = set(stmt.args)
            nodes = (self.symbols.circles() if stmt.kind == "cyclic"
                     else self.symbols.lines())
            symbolic = any(points <= node.points for node in nodes)
        return symbolic, numeric

    def audit_state(self) -> dict:
        """Independent soundness sweep: no cache, no trust in reasons.

        Every established statement is re-checked against the diagram
        directly, and every dependency's reason must be a rule id, an
        intrinsic family, an AR tag, or the construction marker.
        """
        allowed = {rule.id for rule in self.rules}
        allowed.update(INTRINSIC_IDS)
        allowed.update(AR_TAGS)
        allowed.add("construction")
        failures: list[str] = []
        for stmt in self.graph.statements():
            try:
                ok = check_numerical(stmt, self.diagram)
            except DegenerateConfiguration:
                ok = False
            if not ok:
                failures.append(stmt.text())
        unknown = sorted({d.reason for d in self.graph.dependencies()} - allowed)
        return {"statements": len(self.graph),
                "numeric_failures": failures,
                "unknown_reasons": unknown}


def initial_state(problem: ProblemSpec,
                  definitions: Mapping[str, DefinitionSpec],
                  rules: Sequence[RuleSpec], seed: int = 0, *,
                  cache_path: Path | str | None = None,
                  max_attempts: int = MAX_ATTEMPTS) -> ProofState:
    """Sketch the problem and seed a proof state with its roots."""
    diagram = build_diagram(problem, definitions, seed=seed,
                            max_attempts=max_attempts)
    return ProofState(problem, definitions, rules, diagram,
                      cache_path=cache_path)
