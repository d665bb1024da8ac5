"""Maximal collinear and concyclic point sets, maintained incrementally.

The graph tracks one LineNode per maximal known-collinear set and one
CircleNode per maximal known-concyclic set. Nodes only ever grow or get
absorbed into a survivor; absorbed nodes stay readable so merge history
can be replayed. Node content is a pure function of the collinearity and
concyclicity facts fed in, never of coordinates: the diagram, when
attached, acts purely as a bug trap that rejects memberships it
contradicts.

Direction bookkeeping lives in the algebra tables, not here; this module
only answers "which points are known to share a line or circle" and
feeds candidate enumeration, intrinsic closure and the graph view.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator

from .depgraph import Dependency
from .errors import NumericConflict
from .numerics import Diagram, check_numerical
from .statements import statement


@dataclass
class LineNode:
    ident: int
    points: set[str]
    live: bool = True


@dataclass
class CircleNode:
    ident: int
    points: set[str]
    centers: set[str] = field(default_factory=set)
    live: bool = True


@dataclass(frozen=True)
class MergeEvent:
    """An absorbed node, the survivor, and the fact that forced the union."""

    kind: str  # "line" | "circle"
    survivor: int
    absorbed: int
    justification: Dependency


class SymbolsGraph:
    """Union-find over lines (two shared points) and circles (three)."""

    def __init__(self, diagram: Diagram | None = None):
        self.diagram = diagram
        self._lines: dict[int, LineNode] = {}
        self._circles: dict[int, CircleNode] = {}
        self._pair_line: dict[frozenset[str], int] = {}
        self._triple_circle: dict[frozenset[str], int] = {}
        self._merge_log: list[MergeEvent] = []
        self._next_id = 0

    # -- queries ---------------------------------------------------------

    def lines(self) -> Iterator[LineNode]:
        return (n for n in self._lines.values() if n.live)

    def circles(self) -> Iterator[CircleNode]:
        return (n for n in self._circles.values() if n.live)

    def all_lines(self) -> Iterator[LineNode]:
        return iter(self._lines.values())

    def all_circles(self) -> Iterator[CircleNode]:
        return iter(self._circles.values())

    def merge_log(self) -> tuple[MergeEvent, ...]:
        return tuple(self._merge_log)

    def line_through(self, p: str, q: str) -> LineNode | None:
        """The live line known to contain both points, if any."""
        ident = self._pair_line.get(frozenset((p, q)))
        return self._lines[ident] if ident is not None else None

    def circle_through(self, p: str, q: str, r: str) -> CircleNode | None:
        ident = self._triple_circle.get(frozenset((p, q, r)))
        return self._circles[ident] if ident is not None else None

    # -- updates ---------------------------------------------------------

    def note_collinear(
        self, a: str, b: str, c: str, justification: Dependency
    ) -> list[MergeEvent]:
        """Record that a, b, c share a line; merge every node this implies."""
        points = {a, b, c}
        if len(points) != 3:
            raise NumericConflict(f"collinear note needs 3 distinct points: {a} {b} {c}")
        self._guard(statement("coll", a, b, c))
        return self._absorb(points, justification, "line")

    def note_concyclic(
        self, a: str, b: str, c: str, d: str, justification: Dependency
    ) -> list[MergeEvent]:
        """Record that a, b, c, d share a circle."""
        points = {a, b, c, d}
        if len(points) != 4:
            raise NumericConflict(f"concyclic note needs 4 distinct points: {a} {b} {c} {d}")
        self._guard(statement("cyclic", a, b, c, d))
        return self._absorb(points, justification, "circle")

    def note_circle(
        self, center: str, a: str, b: str, c: str, justification: Dependency
    ) -> list[MergeEvent]:
        """Record a circle through a, b, c with a known center.

        Centers only ever arrive through explicit circle statements (the
        recognition rules conclude those); they are never inferred from
        coordinates.
        """
        points = {a, b, c}
        if len(points) != 3 or center in points:
            raise NumericConflict("circle note needs a center and 3 distinct points")
        self._guard(statement("circle", center, a, b, c))
        events = self._absorb(points, justification, "circle")
        node = self._circles[self._triple_circle[frozenset(points)]]
        node.centers.add(center)
        return events

    # -- internals -------------------------------------------------------

    def _guard(self, stmt) -> None:
        # Symbolic facts must agree with the diagram; a mismatch is a bug
        # in the caller, not a provable configuration.
        if self.diagram is not None and not check_numerical(stmt, self.diagram):
            raise NumericConflict(f"{stmt.text()} contradicts the diagram")

    def _family(self, kind: str):
        if kind == "line":
            return self._lines, self._pair_line, 2
        return self._circles, self._triple_circle, 3

    def _absorb(
        self, new_points: set[str], justification: Dependency, kind: str
    ) -> list[MergeEvent]:
        """Grow-or-merge fixpoint keeping maximal sets disjoint.

        Any live node sharing `overlap` points with the accumulating union
        must describe the same line/circle, so it is absorbed; repeat until
        nothing else overlaps. The surviving node is the oldest involved.
        """
        nodes, index, overlap = self._family(kind)
        union = set(new_points)
        involved: set[int] = set()
        while True:
            found = {
                index[key]
                for key in map(frozenset, combinations(sorted(union), overlap))
                if key in index
            } - involved
            if not found:
                break
            involved |= found
            for ident in found:
                union |= nodes[ident].points

        events: list[MergeEvent] = []
        if involved:
            survivor_id = min(involved)
        else:
            survivor_id = self._next_id
            self._next_id += 1
            node = (
                LineNode(survivor_id, set())
                if kind == "line"
                else CircleNode(survivor_id, set())
            )
            nodes[survivor_id] = node
        survivor = nodes[survivor_id]
        for ident in sorted(involved):
            if ident == survivor_id:
                continue
            absorbed = nodes[ident]
            absorbed.live = False
            if kind == "circle":
                survivor.centers |= absorbed.centers  # type: ignore[union-attr]
            events.append(MergeEvent(kind, survivor_id, ident, justification))
        survivor.points = union
        for key in map(frozenset, combinations(sorted(union), overlap)):
            index[key] = survivor_id
        self._merge_log.extend(events)
        return events

    # -- export ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "lines": [
                {"id": n.ident, "points": sorted(n.points), "live": n.live}
                for n in self._lines.values()
            ],
            "circles": [
                {
                    "id": n.ident,
                    "points": sorted(n.points),
                    "centers": sorted(n.centers),
                    "live": n.live,
                }
                for n in self._circles.values()
            ],
            "merges": [
                {
                    "kind": e.kind,
                    "survivor": e.survivor,
                    "absorbed": e.absorbed,
                    "because": e.justification.conclusion.text(),
                }
                for e in self._merge_log
            ],
        }
