"""GeoGebra constructions as problems.

A ``.ggb`` file is a zip archive whose ``geogebra.xml`` lists the
construction in order: free elements carry their coordinates, derived
elements name the tool and its inputs. The conversion walks that list
and rewrites each point-producing tool as a construction clause with
the stored coordinates pinned (``h@1.0_1.0 = ...``), so the regular
problem pipeline does the rest: the grammar validates the clause, the
diagram builder places the pinned points verbatim while still checking
every generated statement and goal, and the proof state never learns
the problem came from a drawing.

Line-producing tools never become clauses. They register a locus
condition instead, and the condition is spent when a point lands on the
line (Intersect output, mirror axis, perpendicular reference). The
stored coordinates of an intersection pin its branch, so none of the
sketcher's random choices survive the conversion.

Supported tools: free points, Midpoint, Line, Segment, Circle by
center and point, PerpendicularLine, ParallelLine, PerpendicularBisector,
AngleBisector on three points, Reflect of a point over a line, and
Intersect of the registered loci. Perpendicular and parallel references
must be two-point lines (Line or Segment), since the formal statements
express those constraints through a pair of defining points. Everything
else raises UnsupportedTool with the offending name.

Goals come from a sibling ``goals.txt``, one statement per line, with
GeoGebra labels accepted and rewritten through the same renaming map
the construction used (labels are lowercased and sanitized to the
grammar's identifier rules, collisions numbered in construction order).
"""

from __future__ import annotations

import math
import re
import zipfile
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping
from xml.etree import ElementTree

from .errors import (
    MalformedXml,
    MissingConstructionDocument,
    MissingGoalsFile,
    NotAnArchive,
    UnsupportedTool,
)
from .numerics import Diagram
from .parsing import DefinitionSpec, ProblemSpec, parse_problem
from .sketch import MAX_ATTEMPTS, build_diagram

CONSTRUCTION_XML = "geogebra.xml"

# XML command names as written by current and older GeoGebra versions
_ALIASES = {
    "OrthogonalLine": "PerpendicularLine",
    "LineBisector": "PerpendicularBisector",
    "AngularBisector": "AngleBisector",
    "Mirror": "Reflect",
}


@dataclass(frozen=True)
class GgbElement:
    """One construction element; ``coords`` only for points."""

    label: str
    tool: str
    inputs: tuple[str, ...]
    coords: tuple[float, float] | None = None


@dataclass(frozen=True)
class GgbConstruction:
    elements: tuple[GgbElement, ...]


@dataclass(frozen=True)
class GgbProblem:
    """Conversion result: the problem, its pinned diagram, and the
    label renaming applied (recorded in run info)."""

    problem: ProblemSpec
    diagram: Diagram
    renames: dict[str, str]


def _ordered_refs(node: ElementTree.Element, what: str) -> tuple[str, ...]:
    # attributes are a0, a1, ...; lexicographic order breaks past a9
    try:
        items = sorted(node.attrib.items(), key=lambda kv: int(kv[0][1:]))
    except ValueError:
        raise MalformedXml(f"unexpected {what} attributes {node.attrib}")
    return tuple(v for _, v in items)


def load_ggb(path: Path | str) -> GgbConstruction:
    """Read the construction list out of a ``.ggb`` archive."""
    try:
        archive = zipfile.ZipFile(path)
    except zipfile.BadZipFile as exc:
        raise NotAnArchive(f"{path}: {exc}") from exc
    except (IsADirectoryError, PermissionError) as exc:
        raise NotAnArchive(f"{path}: {exc}") from exc
    with archive:
        if CONSTRUCTION_XML not in archive.namelist():
            raise MissingConstructionDocument(
                f"{path} contains no {CONSTRUCTION_XML}")
        payload = archive.read(CONSTRUCTION_XML)
    try:
        root = ElementTree.fromstring(payload)
    except ElementTree.ParseError as exc:
        raise MalformedXml(f"{path}: {exc}") from exc
    section = root.find("construction")
    if section is None:
        raise MalformedXml(f"{path}: no <construction> section")

    order: list[str] = []
    tool_of: dict[str, tuple[str, tuple[str, ...]]] = {}
    coords: dict[str, tuple[float, float]] = {}
    element_seen: set[str] = set()

    def claim(label: str, tool: str, inputs: tuple[str, ...]) -> None:
        if not label:
            raise MalformedXml("element without a label")
        if label in tool_of:
            raise MalformedXml(f"duplicate label {label!r}")
        tool_of[label] = (tool, inputs)
        order.append(label)

    for node in section:
        if node.tag == "command":
            name = node.get("name", "")
            inp, out = node.find("input"), node.find("output")
            if inp is None or out is None:
                raise MalformedXml(f"command {name!r} misses input or output")
            inputs = _ordered_refs(inp, "input")
            for label in _ordered_refs(out, "output"):
                claim(label, _ALIASES.get(name, name), inputs)
        elif node.tag == "element":
            label = node.get("label", "")
            etype = node.get("type", "")
            if label in element_seen:
                raise MalformedXml(f"duplicate label {label!r}")
            element_seen.add(label)
            if label not in tool_of:
                claim(label, "Free" + etype.capitalize(), ())
            if etype != "point":
                continue  # a line's <coords> holds its coefficients
            c = node.find("coords")
            if c is None:
                raise MalformedXml(f"point {label!r} has no coordinates")
            try:
                x, y, z = (float(c.get(k, "nan")) for k in ("x", "y", "z"))
            except ValueError as exc:
                raise MalformedXml(f"point {label!r}: {exc}") from exc
            if not all(map(math.isfinite, (x, y, z))) or z == 0:
                raise MalformedXml(f"point {label!r} is not a finite point")
            coords[label] = (x / z, y / z)

    return GgbConstruction(tuple(
        GgbElement(label, *tool_of[label], coords.get(label))
        for label in order))


def _safe_names(labels: list[str]) -> dict[str, str]:
    """Grammar-safe, collision-free point names in construction order."""
    renames: dict[str, str] = {}
    used: set[str] = set()
    for label in labels:
        base = re.sub(r"[^a-z0-9_]", "", label.lower())
        if not base or not base[0].isalpha():
            base = "p" + base
        name, n = base, 1
        while name in used:
            n += 1
            name = f"{base}{n}"
        used.add(name)
        renames[label] = name
    return renames


def to_problem(construction: GgbConstruction, goals_text: str,
               definitions: Mapping[str, DefinitionSpec], *,
               name: str = "ggb", seed: int = 0,
               max_attempts: int = MAX_ATTEMPTS) -> GgbProblem:
    """Rewrite the construction as a pinned problem and realise it.

    The goal check and the numeric verification of every generated
    statement still run against the pinned coordinates, so a drawing
    whose goals fail raises GoalNumericallyFalse exactly like a textual
    problem would.
    """
    point_labels = [e.label for e in construction.elements
                    if e.coords is not None]
    renames = _safe_names(point_labels)
    points: dict[str, str] = dict(renames)
    # label -> (definition, argument points); spent when a point lands on it
    loci: dict[str, tuple[str, tuple[str, ...]]] = {}
    clauses: list[str] = []

    def point_arg(tool: str, label: str) -> str:
        if label not in points:
            raise UnsupportedTool(f"{tool} needs point inputs, got {label!r}")
        return points[label]

    def two_point_line(tool: str, label: str) -> tuple[str, str]:
        locus = loci.get(label)
        if locus is None or locus[0] != "on_line":
            raise UnsupportedTool(
                f"{tool} reference {label!r} is not a two-point line")
        return locus[1]

    def pin(e: GgbElement) -> str:
        if e.coords is None:
            raise MalformedXml(f"point {e.label!r} has no coordinates")
        x, y = e.coords
        return f"{points[e.label]}@{x!r}_{y!r}"

    for e in construction.elements:
        tool = e.tool
        if tool == "FreePoint":
            clauses.append(f"{pin(e)} = free {points[e.label]}")
        elif tool == "Midpoint":
            p, q = (point_arg(tool, l) for l in e.inputs)
            clauses.append(f"{pin(e)} = midpoint {points[e.label]} {p} {q}")
        elif tool in ("Line", "Segment"):
            p, q = (point_arg(tool, l) for l in e.inputs)
            loci[e.label] = ("on_line", (p, q))
        elif tool == "PerpendicularLine":
            c = point_arg(tool, e.inputs[0])
            a, b = two_point_line(tool, e.inputs[1])
            loci[e.label] = ("on_tline", (c, a, b))
        elif tool == "ParallelLine":
            c = point_arg(tool, e.inputs[0])
            a, b = two_point_line(tool, e.inputs[1])
            loci[e.label] = ("on_pline0", (c, a, b))
        elif tool == "PerpendicularBisector":
            p, q = (point_arg(tool, l) for l in e.inputs)
            loci[e.label] = ("on_bline", (p, q))
        elif tool == "AngleBisector":
            if len(e.inputs) != 3:
                raise UnsupportedTool(f"{tool} of {len(e.inputs)} inputs")
            a, b, c = (point_arg(tool, l) for l in e.inputs)
            loci[e.label] = ("angle_bisector", (a, b, c))
        elif tool == "Circle":
            if len(e.inputs) != 2:
                raise UnsupportedTool(f"{tool} of {len(e.inputs)} inputs")
            o, p = (point_arg(tool, l) for l in e.inputs)
            loci[e.label] = ("on_circle", (o, p))
        elif tool == "Intersect":
            refs = [l for l in e.inputs if l in loci]
            if len(refs) != 2:
                raise UnsupportedTool(f"{tool} needs two registered loci")
            out = points[e.label]
            parts = ", ".join(f"{d} {out} {' '.join(args)}"
                              for d, args in (loci[r] for r in refs))
            clauses.append(f"{pin(e)} = {parts}")
        elif tool == "Reflect":
            p = point_arg(tool, e.inputs[0])
            a, b = two_point_line(tool, e.inputs[1])
            clauses.append(f"{pin(e)} = reflect {points[e.label]} {p} {a} {b}")
        else:
            raise UnsupportedTool(tool)

    goals: list[str] = []
    for raw in goals_text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        goals.append(" ".join(
            [tokens[0]] + [renames.get(t, t) for t in tokens[1:]]))

    text = "; ".join(clauses)
    if goals:
        text += " ? " + "; ".join(goals)
    problem = parse_problem(text, name, definitions)
    diagram = build_diagram(problem, definitions, seed=seed,
                            max_attempts=max_attempts)
    return GgbProblem(problem, diagram, renames)


def load_ggb_problem(ggb_path: Path | str,
                     definitions: Mapping[str, DefinitionSpec], *,
                     seed: int = 0) -> GgbProblem:
    """Problem-folder entry point: ``x.ggb`` plus its sibling goals.txt."""
    ggb_path = Path(ggb_path)
    goals_path = ggb_path.with_name("goals.txt")
    if not goals_path.exists():
        raise MissingGoalsFile(f"{goals_path} is required next to {ggb_path.name}")
    construction = load_ggb(ggb_path)
    return to_problem(construction, goals_path.read_text(),
                      definitions, name=ggb_path.stem, seed=seed)
