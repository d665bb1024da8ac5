"""Exception types shared across the package."""

from __future__ import annotations


class StraightedgeError(Exception):
    """Base class for all package errors."""


class UnknownPredicate(StraightedgeError):
    """Statement tag is not in the predicate registry."""


class MalformedStatement(StraightedgeError):
    """Arity, point or constant validation failed."""


class MissingPoint(StraightedgeError):
    """A statement references a point absent from the diagram."""


class DegenerateConfiguration(StraightedgeError):
    """The numeric check is undefined for these coordinates (not false)."""


class ParseError(StraightedgeError):
    """Problem / rules / defs text could not be parsed."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + where)
        self.line = line
        self.column = column


class UnknownDefinition(ParseError):
    """A clause names a construction that defs.txt does not declare."""


class UndeclaredPoint(ParseError):
    """A construction argument or goal uses a point no clause introduced."""


class DuplicatePoint(ParseError):
    """A clause re-introduces an existing point name."""


class UnboundConclusionVariable(ParseError):
    """A rule conclusion uses a variable absent from every premise."""


class UnknownSketch(ParseError):
    """A definition names a sketch routine the engine does not provide."""


class UnknownRule(StraightedgeError):
    """An action names a rule id absent from the active rule set."""


class SketchUnrealizable(StraightedgeError):
    """A construction could not be realised numerically."""


class NoIntersection(SketchUnrealizable):
    """Requested loci do not intersect (or are parallel / disjoint)."""


class GoalNumericallyFalse(StraightedgeError):
    """Every sketch attempt within budget failed the goal / degeneracy checks."""

    def __init__(self, message: str, attempts: int):
        super().__init__(message)
        self.attempts = attempts


class InconsistentTable(StraightedgeError):
    """An exact linear table received mutually contradictory equations (bug trap)."""


class NotDerivable(StraightedgeError):
    """Premise minimization was asked for a target the table cannot derive."""


class UnsupportedKind(StraightedgeError):
    """Statement kind has no linear-table compilation."""


class NumericallyFalseConclusion(StraightedgeError):
    """A derived statement failed its diagram check (bug trap, soundness audit)."""


class NumericConflict(StraightedgeError):
    """A symbolic membership claim contradicts the diagram (bug trap)."""


class UnjustifiedPremise(StraightedgeError):
    """A dependency cites a premise that is not an established statement."""


class GoalNotProven(StraightedgeError):
    """Traceback was requested for a statement the state does not contain."""


class StalePremise(StraightedgeError):
    """A queued match cites premises no longer jointly sufficient."""


class CacheIoFailure(StraightedgeError):
    """Match cache could not be read or written (non-fatal, falls back to memory)."""


class UnsupportedTool(StraightedgeError):
    """GeoGebra construction uses a tool outside the supported subset."""


class NotAnArchive(StraightedgeError):
    """The .ggb path does not point at a zip archive."""


class MissingConstructionDocument(StraightedgeError):
    """The .ggb archive holds no geogebra.xml."""


class MalformedXml(StraightedgeError):
    """The construction document cannot be interpreted."""


class MissingGoalsFile(StraightedgeError):
    """A .ggb problem folder lacks its goals.txt."""


class InvalidProof(StraightedgeError):
    """A proof step cites a statement not established before that step."""


class IoFailure(StraightedgeError):
    """An output artifact could not be written."""
