"""Justification bookkeeping: which statements hold and why.

Every established statement owns the first dependency that produced it;
later re-derivations are logged but never replace the original. Proof
extraction walks first-dependencies backward from a goal, which keeps
reduced proofs deterministic given a deterministic derivation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import (
    DegenerateConfiguration,
    GoalNotProven,
    MalformedStatement,
    NumericallyFalseConclusion,
    UnjustifiedPremise,
)
from .numerics import Diagram, check_numerical
from .statements import Statement, kind_of

# Reasons that mark a dependency as a proof root rather than a step.
CONSTRUCTION = "construction"


@dataclass(frozen=True)
class Dependency:
    """One derivation: premises and a reason justify the conclusion.

    ``reason`` is a rule id (``r12``), an intrinsic family id (``i-coll``,
    ``i-cyclic``, ``i-subst``, ``i-circle``), an algebraic tag
    (``AR-angle``, ``AR-ratio``), or ``construction`` for clause roots.
    Premises list only established statements; numeric side conditions of
    a rule are not recorded here.
    """

    premises: tuple[Statement, ...]
    conclusion: Statement
    reason: str

    def __post_init__(self) -> None:
        if kind_of(self.conclusion.kind).numeric_only:
            raise MalformedStatement(
                f"{self.conclusion.kind} is check-only and cannot be established"
            )


@dataclass(frozen=True)
class ReducedProof:
    """Backward slice of the graph that establishes one goal."""

    goal: Statement
    roots: tuple[Statement, ...]
    steps: tuple[Dependency, ...]

    def width_profile(self) -> list[int]:
        """Live derived-statement count after each step.

        A statement is live while some later step (or the goal itself)
        still cites it. Gives a rough memory-pressure shape of the proof.
        """
        last_use: dict[Statement, int] = {}
        for i, step in enumerate(self.steps):
            for premise in step.premises:
                last_use[premise] = i
        last_use[self.goal] = len(self.steps)
        profile = []
        live: set[Statement] = set()
        for i, step in enumerate(self.steps):
            live.add(step.conclusion)
            live = {s for s in live if last_use.get(s, -1) > i}
            profile.append(len(live))
        return profile


class DependencyGraph:
    """Insertion-ordered statement store with one chosen dependency each.

    When a diagram is attached, every accepted conclusion is audited
    against it; a failed check raises immediately since a symbolic
    derivation from true premises can only produce true statements.
    """

    def __init__(self, diagram: Diagram | None = None,
                 audit: Callable[[Statement], bool] | None = None):
        # `audit` overrides the direct diagram check so callers can route
        # the numeric work through a memoizing cache.
        self.diagram = diagram
        self._audit_fn = audit
        self._first: dict[Statement, Dependency] = {}
        self._order: dict[Statement, int] = {}
        self._log: list[Dependency] = []
        self._seen: set[Dependency] = set()

    def __contains__(self, stmt: Statement) -> bool:
        return stmt in self._first

    def __len__(self) -> int:
        return len(self._first)

    def statements(self) -> Iterator[Statement]:
        """All established statements, oldest first."""
        return iter(self._order)

    def index_of(self, stmt: Statement) -> int:
        return self._order[stmt]

    def dependency_of(self, stmt: Statement) -> Dependency:
        return self._first[stmt]

    def dependencies(self) -> Iterator[Dependency]:
        """Every accepted dependency, including unchosen re-derivations."""
        return iter(self._log)

    def add_dependency(self, dep: Dependency) -> bool:
        """Record ``dep``; return True when its conclusion is new.

        Exact duplicates are ignored. Alternative derivations of a known
        statement are logged but the first one keeps ownership, so the
        caller can trigger per-statement side effects exactly once, on a
        True return.
        """
        if dep in self._seen:
            return False
        for premise in dep.premises:
            if premise not in self._first:
                raise UnjustifiedPremise(
                    f"premise {premise.text()} of {dep.conclusion.text()} "
                    f"({dep.reason}) is not established"
                )
        self._audit(dep)
        self._seen.add(dep)
        self._log.append(dep)
        if dep.conclusion in self._first:
            return False
        self._first[dep.conclusion] = dep
        self._order[dep.conclusion] = len(self._order)
        return True

    def _audit(self, dep: Dependency) -> None:
        if self._audit_fn is not None:
            if not self._audit_fn(dep.conclusion):
                raise NumericallyFalseConclusion(
                    f"{dep.conclusion.text()} derived by {dep.reason} "
                    "fails the diagram"
                )
            return
        if self.diagram is None:
            return
        try:
            ok = check_numerical(dep.conclusion, self.diagram)
        except DegenerateConfiguration as exc:
            raise NumericallyFalseConclusion(
                f"{dep.conclusion.text()} ({dep.reason}): degenerate check: {exc}"
            ) from exc
        if not ok:
            raise NumericallyFalseConclusion(
                f"{dep.conclusion.text()} derived by {dep.reason} fails the diagram"
            )

    def traceback(self, goal: Statement) -> ReducedProof:
        """Reduced proof of ``goal``: first-dependency backward closure.

        Steps come out in insertion order, which is automatically
        topological because premises are always established before their
        conclusions. A goal that is itself a construction root yields an
        empty step list.
        """
        if goal not in self._first:
            raise GoalNotProven(f"{goal.text()} is not established")
        needed: set[Statement] = set()
        stack = [goal]
        while stack:
            stmt = stack.pop()
            if stmt in needed:
                continue
            needed.add(stmt)
            stack.extend(self._first[stmt].premises)
        ordered = sorted(needed, key=self._order.__getitem__)
        roots = tuple(s for s in ordered if not self._first[s].premises)
        steps = tuple(self._first[s] for s in ordered if self._first[s].premises)
        return ReducedProof(goal=goal, roots=roots, steps=steps)

    def export_full_graph(self) -> dict:
        """JSON-ready dump of every statement and dependency.

        Available whether or not any goal is proven; the unsolved case
        simply has no distinguished goal node.
        """
        statements = [
            {"index": idx, "text": stmt.text(), "kind": stmt.kind}
            for stmt, idx in self._order.items()
        ]
        dependencies = [
            {
                "conclusion": dep.conclusion.text(),
                "premises": [p.text() for p in dep.premises],
                "reason": dep.reason,
                "chosen": self._first[dep.conclusion] is dep,
            }
            for dep in self._log
        ]
        return {"statements": statements, "dependencies": dependencies}
