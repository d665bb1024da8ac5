"""Parsers for the three text formats the solver consumes.

* problem files: named blocks of `clause; clause; ... ? goal[; goal]`
* rule files: a title line followed by `premises => conclusions`
* definition files: one definition per line,
  `name outs : ins / [require] stmt / ... / sketch-id args`

All parsers are pure; `#` starts a line comment in every format.

A construction inside a clause may spell its arguments two ways: outputs
followed by inputs (`o = circle o c1 c2 b1`) or inputs alone
(`o1 = circle a d c`). Both are accepted; `DefinitionSpec.bind` resolves
either into one binding of signature names to concrete points.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Collection, Iterable, Mapping, Optional, Sequence

from .errors import (
    DuplicatePoint,
    MalformedStatement,
    ParseError,
    UnboundConclusionVariable,
    UndeclaredPoint,
    UnknownDefinition,
    UnknownSketch,
)
from .statements import (
    Statement,
    canonicalize,
    format_value,
    kind_of,
    parse_statement_text,
    parse_value,
)

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*$")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


# ---------------------------------------------------------------------------
# statement templates (shared by rules and definitions)


@dataclass(frozen=True)
class StatementTemplate:
    """A statement over variable tokens, with an optional constant.

    The constant is either a literal Fraction or the name of a definition
    value parameter to be filled in at instantiation time.
    """

    tag: str
    vars: tuple[str, ...]
    value: Fraction | str | None = None

    def instantiate(self, binding: Mapping[str, str],
                    values: Mapping[str, Fraction] | None = None) -> Statement:
        args = tuple(binding[v] for v in self.vars)
        value = self.value
        if isinstance(value, str):
            value = (values or {})[value]
        return canonicalize(self.tag, args, value)

    def text(self) -> str:
        parts = [self.tag, *self.vars]
        if isinstance(self.value, str):
            parts.append("$" + self.value)
        elif self.value is not None:
            parts.append(format_value(kind_of(self.tag).value, self.value))
        return " ".join(parts)


def _parse_template(text: str, params: Sequence[str] = (),
                    line: int | None = None) -> StatementTemplate:
    tokens = text.split()
    if not tokens:
        raise ParseError("empty statement", line)
    kind = kind_of(tokens[0])
    rest = tokens[1:]
    value: Fraction | str | None = None
    if kind.value:
        if not rest:
            raise ParseError(f"{kind.tag} misses its constant", line)
        tail = rest[-1]
        if tail.startswith("$"):
            name = tail[1:]
            if name not in params:
                raise ParseError(f"unknown value parameter ${name}", line)
            value = name
        else:
            value = parse_value(kind.value, tail)
        rest = rest[:-1]
    for tok in rest:
        if not _NAME.match(tok):
            raise ParseError(f"bad variable token {tok!r}", line)
    # arity check; point distinctness is deferred to instantiation
    if kind.variadic:
        if len(rest) < kind.arity:
            raise ParseError(f"{kind.tag} needs ≥{kind.arity} arguments", line)
    elif len(rest) != kind.arity:
        raise ParseError(
            f"{kind.tag} takes {kind.arity} arguments, got {len(rest)}", line)
    return StatementTemplate(kind.tag, tuple(rest), value)


# ---------------------------------------------------------------------------
# definitions


@dataclass(frozen=True)
class DefinitionSpec:
    name: str
    outs: tuple[str, ...]
    ins: tuple[str, ...]                    # point inputs
    params: tuple[str, ...]                 # trailing value inputs
    requirements: tuple[StatementTemplate, ...]
    statements: tuple[StatementTemplate, ...]
    sketch_id: str
    sketch_args: tuple[str, ...]            # signature tokens, points or params

    def bind(self, clause_outs: Sequence[str], args: Sequence[str],
             ) -> tuple[dict[str, str], dict[str, str]]:
        """Resolve call arguments to {signature point: concrete point} plus
        raw value tokens; accepts the outs-prefixed and inputs-only forms."""
        n_par = len(self.params)
        point_args, value_args = list(args[: len(args) - n_par]), args[len(args) - n_par:]
        if len(point_args) == len(self.outs) + len(self.ins):
            if tuple(point_args[: len(self.outs)]) != tuple(clause_outs):
                raise ParseError(
                    f"{self.name}: leading arguments {point_args[:len(self.outs)]} "
                    f"do not match the clause outputs {list(clause_outs)}")
            point_args = point_args[len(self.outs):]
        elif len(point_args) != len(self.ins):
            raise ParseError(
                f"{self.name} takes {len(self.ins)} inputs "
                f"(or {len(self.outs) + len(self.ins)} with outputs repeated), "
                f"got {len(point_args)}")
        if len(clause_outs) != len(self.outs):
            raise ParseError(
                f"{self.name} constructs {len(self.outs)} points, "
                f"clause declares {len(clause_outs)}")
        binding = dict(zip(self.outs, clause_outs))
        binding.update(zip(self.ins, point_args))
        return binding, dict(zip(self.params, value_args))


def parse_definitions(text: str, known_sketches: Iterable[str] | None = None,
                      ) -> dict[str, DefinitionSpec]:
    known = set(known_sketches) if known_sketches is not None else None
    defs: dict[str, DefinitionSpec] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        segments = [s.strip() for s in line.split("/")]
        head = segments[0]
        if ":" not in head:
            raise ParseError("definition head needs `name outs : ins`", lineno)
        left, _, right = head.partition(":")
        head_tokens = left.split()
        if not head_tokens:
            raise ParseError("definition misses its name", lineno)
        name, outs = head_tokens[0], tuple(head_tokens[1:])
        ins_tokens = right.split()
        params = tuple(t[1:] for t in ins_tokens if t.startswith("$"))
        ins = tuple(t for t in ins_tokens if not t.startswith("$"))
        for tok in (name, *outs, *ins, *params):
            if not _NAME.match(tok):
                raise ParseError(f"bad token {tok!r} in definition head", lineno)
        if not outs:
            raise ParseError(f"{name} constructs no points", lineno)
        if len(segments) < 2:
            raise ParseError(f"{name} misses its sketch segment", lineno)
        *body, sketch = segments[1:]
        requirements: list[StatementTemplate] = []
        statements: list[StatementTemplate] = []
        signature = set(outs) | set(ins) | set(params)
        for seg in body:
            if not seg:
                continue
            is_req = seg.startswith("require ")
            tmpl = _parse_template(seg[8:] if is_req else seg, params, lineno)
            unknown = set(tmpl.vars) - signature
            if unknown:
                raise ParseError(
                    f"{name}: statement uses non-signature tokens {sorted(unknown)}",
                    lineno)
            if is_req:
                if set(tmpl.vars) & set(outs):
                    raise ParseError(
                        f"{name}: requirements may only mention inputs", lineno)
                requirements.append(tmpl)
            else:
                statements.append(tmpl)
        sketch_tokens = sketch.split()
        if not sketch_tokens:
            raise ParseError(f"{name} misses its sketch id", lineno)
        sketch_id = sketch_tokens[0]
        sketch_args = tuple(t.lstrip("$") for t in sketch_tokens[1:])
        bad = [t for t in sketch_args if t not in signature]
        if bad:
            raise ParseError(f"{name}: sketch args {bad} not in signature", lineno)
        if known is not None and sketch_id not in known:
            raise UnknownSketch(f"{name}: no sketch routine {sketch_id!r}", lineno)
        if name in defs:
            raise ParseError(f"duplicate definition {name!r}", lineno)
        defs[name] = DefinitionSpec(name, outs, ins, params,
                                    tuple(requirements), tuple(statements),
                                    sketch_id, sketch_args)
    return defs


# ---------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class RuleSpec:
    id: str
    title: str
    premises: tuple[StatementTemplate, ...]
    conclusions: tuple[StatementTemplate, ...]

    def text(self) -> str:
        return (", ".join(p.text() for p in self.premises)
                + " => "
                + ", ".join(c.text() for c in self.conclusions))


def parse_rules(text: str) -> list[RuleSpec]:
    rules: list[RuleSpec] = []
    title: str | None = None
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if "=>" not in line:
            title = line
            continue
        if title is None:
            raise ParseError("rule line without a preceding title line", lineno)
        left, _, right = line.partition("=>")
        premises = tuple(_parse_template(p, (), lineno)
                         for p in left.split(",") if p.strip())
        conclusions = tuple(_parse_template(c, (), lineno)
                            for c in right.split(",") if c.strip())
        if not premises or not conclusions:
            raise ParseError("rule needs premises and conclusions", lineno)
        bound = {v for p in premises for v in p.vars}
        for c in conclusions:
            if kind_of(c.tag).numeric_only:
                raise ParseError(
                    f"{c.tag} is check-only and cannot be concluded", lineno)
            free = set(c.vars) - bound
            if free:
                raise UnboundConclusionVariable(
                    f"conclusion uses unbound variables {sorted(free)}", lineno)
        rule_id = title.split()[0]
        if rule_id in seen:
            raise ParseError(f"duplicate rule id {rule_id!r}", lineno)
        seen.add(rule_id)
        rules.append(RuleSpec(rule_id, title, premises, conclusions))
        title = None
    return rules


# ---------------------------------------------------------------------------
# problems


@dataclass(frozen=True)
class Clause:
    new_points: tuple[str, ...]
    pinned: tuple[Optional[tuple[float, float]], ...]
    constructions: tuple[tuple[str, tuple[str, ...]], ...]

    def text(self) -> str:
        outs = []
        for name, pin in zip(self.new_points, self.pinned):
            outs.append(name if pin is None else f"{name}@{pin[0]!r}_{pin[1]!r}")
        cons = ", ".join(f"{n} {' '.join(a)}" for n, a in self.constructions)
        return f"{' '.join(outs)} = {cons}"


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    clauses: tuple[Clause, ...]
    goals: tuple[Statement, ...]

    def points(self) -> list[str]:
        return [p for c in self.clauses for p in c.new_points]

    def text(self) -> str:
        body = "; ".join(c.text() for c in self.clauses)
        if self.goals:
            body += " ? " + "; ".join(g.text() for g in self.goals)
        return body


def _parse_out_token(token: str, lineno: int | None,
                     ) -> tuple[str, Optional[tuple[float, float]]]:
    if "@" not in token:
        if not _NAME.match(token):
            raise ParseError(f"bad point name {token!r}", lineno)
        return token, None
    name, _, coords = token.partition("@")
    parts = coords.split("_")
    if not _NAME.match(name) or len(parts) != 2:
        raise ParseError(f"bad pinned point {token!r}", lineno)
    try:
        x, y = float(parts[0]), float(parts[1])
    except ValueError:
        raise ParseError(f"bad pinned coordinates in {token!r}", lineno) from None
    return name, (x, y)


def parse_clause(chunk: str, definitions: Mapping[str, DefinitionSpec],
                 declared: Collection[str]) -> Clause:
    """Parse one construction clause against already-declared points."""
    chunk = chunk.strip()
    if "=" not in chunk:
        raise ParseError(f"clause {chunk!r} misses `=`")
    left, _, right = chunk.partition("=")
    outs: list[str] = []
    pins: list[Optional[tuple[float, float]]] = []
    for token in left.split():
        pname, pin = _parse_out_token(token, None)
        if pname in declared or pname in outs:
            raise DuplicatePoint(f"point {pname!r} already constructed")
        outs.append(pname)
        pins.append(pin)
    if not outs:
        raise ParseError(f"clause {chunk!r} constructs no points")
    constructions: list[tuple[str, tuple[str, ...]]] = []
    for part in right.split(","):
        tokens = part.split()
        if not tokens:
            raise ParseError(f"empty construction in clause {chunk!r}")
        cname, args = tokens[0], tuple(tokens[1:])
        if cname not in definitions:
            raise UnknownDefinition(f"unknown construction {cname!r}")
        defn = definitions[cname]
        binding, _values = defn.bind(outs, args)  # arity / form check
        for src in defn.ins:
            point = binding[src]
            if point not in declared:
                raise UndeclaredPoint(
                    f"{cname} in clause {chunk!r} uses {point!r} "
                    "before construction")
        constructions.append((cname, args))
    return Clause(tuple(outs), tuple(pins), tuple(constructions))


def parse_problem(text: str, name: str,
                  definitions: Mapping[str, DefinitionSpec]) -> ProblemSpec:
    text = " ".join(_strip_comment(l) for l in text.splitlines()).strip()
    if not text:
        raise ParseError("empty problem text")
    head, _, goal_text = text.partition("?")
    clauses: list[Clause] = []
    declared: set[str] = set()
    for chunk in head.split(";"):
        if not chunk.strip():
            continue
        clause = parse_clause(chunk, definitions, declared)
        declared.update(clause.new_points)
        clauses.append(clause)
    if not clauses:
        raise ParseError("problem constructs no points")
    goals: list[Statement] = []
    for g in goal_text.split(";"):
        g = g.strip()
        if not g:
            continue
        try:
            stmt = parse_statement_text(g)
        except MalformedStatement as exc:
            raise ParseError(f"bad goal {g!r}: {exc}") from exc
        missing = set(stmt.args) - declared
        if missing:
            raise UndeclaredPoint(f"goal {g!r} uses unknown points {sorted(missing)}")
        goals.append(stmt)
    return ProblemSpec(name, tuple(clauses), tuple(goals))


def load_problems(text: str,
                  definitions: Mapping[str, DefinitionSpec]) -> dict[str, ProblemSpec]:
    """Problem files hold named blocks separated by blank lines: a name on
    the first line, the problem text on the following line(s)."""
    problems: dict[str, ProblemSpec] = {}
    block: list[str] = []

    def flush(end_line: int) -> None:
        if not block:
            return
        name = block[0].strip()
        if len(block) < 2:
            raise ParseError(f"problem {name!r} has no body", end_line)
        if not _NAME.match(name):
            raise ParseError(f"bad problem name {name!r}", end_line)
        if name in problems:
            raise ParseError(f"duplicate problem name {name!r}", end_line)
        problems[name] = parse_problem(" ".join(block[1:]), name, definitions)
        block.clear()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw).strip()
        if not line:
            flush(lineno)
        else:
            block.append(line)
    flush(len(text.splitlines()))
    return problems


# ---------------------------------------------------------------------------
# bundled data files


def data_text(filename: str) -> str:
    return (resources.files("straightedge.data") / filename).read_text()


def default_definitions(known_sketches: Iterable[str] | None = None,
                        ) -> dict[str, DefinitionSpec]:
    return parse_definitions(data_text("defs.txt"), known_sketches)


def default_rules(unabridged: bool = False) -> list[RuleSpec]:
    return parse_rules(
        data_text("unabridged_rules.txt" if unabridged else "rules.txt"))


def default_problems(definitions: Mapping[str, DefinitionSpec] | None = None,
                     ) -> dict[str, ProblemSpec]:
    if definitions is None:
        definitions = default_definitions()
    return load_problems(data_text("problems.txt"), definitions)
