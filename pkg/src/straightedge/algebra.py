"""Exact linear deduction over line directions and segment log-lengths.

Two tables share one engine. The angle table works over direction
symbols, one per unordered point pair, with a designated pi column:
every angle statement is compiled into an exactly-true equation over the
reals by choosing the integer pi offset from the diagram once, after
which all row operations are plain rational arithmetic (no modular
scaling pitfalls, no floats). The ratio table works over log-length
symbols plus one log-prime column per prime factor appearing in a
stated constant; primes are multiplicatively independent, so constant
arithmetic stays exact and a nonzero constant residual is a genuine
contradiction in either table.

Collinearity feeds the angle table as pairwise direction equalities,
which is what makes direction symbols of merged lines provably equal
with the collinearity facts as premises. Each equation remembers the
statements that produced it; premise sets for anything the tables derive
are minimized by greedy re-solving and are subset-minimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .errors import DegenerateConfiguration, InconsistentTable, NotDerivable, UnsupportedKind
from .numerics import Diagram, check_numerical, direction
from .statements import Statement, statement

Symbol = tuple
Coeffs = dict[Symbol, Fraction]

PI: Symbol = ("pi",)

ONE = Fraction(1)
HALF = Fraction(1, 2)

# Statement kinds each table accepts through compile_statement.
ANGLE_KINDS = frozenset({"para", "perp", "aconst", "eqangle"})
RATIO_KINDS = frozenset({"cong", "lconst", "rconst", "eqratio"})
# The kernel additionally routes these through the internal compiler.
TABLE_FEED_KINDS = ANGLE_KINDS | RATIO_KINDS | {"coll", "eqratio3"}


def direction_symbol(p: str, q: str) -> Symbol:
    return ("d",) + tuple(sorted((p, q)))


def length_symbol(p: str, q: str) -> Symbol:
    return ("l",) + tuple(sorted((p, q)))


def _is_const(sym: Symbol) -> bool:
    return sym[0] in ("pi", "c")


def factor_exponents(value: Fraction) -> Coeffs:
    """Prime exponent decomposition of a positive rational, as log terms."""
    if value <= 0:
        raise UnsupportedKind(f"length constants must be positive, got {value}")
    exps: Coeffs = {}
    for part, sign in ((value.numerator, 1), (value.denominator, -1)):
        n, p = part, 2
        while p * p <= n:
            while n % p == 0:
                exps[("c", p)] = exps.get(("c", p), Fraction(0)) + sign
                n //= p
            p += 1
        if n > 1:
            exps[("c", n)] = exps.get(("c", n), Fraction(0)) + sign
    return {s: c for s, c in exps.items() if c}


def rational_from_exponents(exps: Coeffs) -> Fraction | None:
    """Rebuild the rational whose log the exponents encode, if one exists.

    Non-integer exponents mean the constant is irrational; callers skip
    emission then. The reconstruction is confirmed numerically, which can
    only fail on an engine bug.
    """
    value = Fraction(1)
    for sym, exp in exps.items():
        if exp.denominator != 1:
            return None
        value *= Fraction(sym[1]) ** int(exp)
    check = sum(float(e) * math.log(s[1]) for s, e in exps.items())
    if abs(check - math.log(float(value))) > 1e-9:
        raise InconsistentTable(f"log-constant resolution drifted: {exps}")
    return value


def _add_term(coeffs: Coeffs, sym: Symbol, coeff: Fraction) -> None:
    total = coeffs.get(sym, Fraction(0)) + coeff
    if total:
        coeffs[sym] = total
    else:
        coeffs.pop(sym, None)


@dataclass
class Equation:
    table: str
    coeffs: Coeffs
    provenance: tuple[Statement, ...]


def _pair_diff(p1: tuple[str, str], p2: tuple[str, str], make) -> Coeffs:
    coeffs: Coeffs = {}
    _add_term(coeffs, make(*p1), ONE)
    _add_term(coeffs, make(*p2), -ONE)
    return coeffs


def _angle_offset(diagram: Diagram, coeffs: Coeffs, fractional: Fraction) -> Fraction:
    """Integer k making `coeffs + (fractional + k) pi = 0` exactly true.

    The diagram is consulted once per statement; every direction lies in
    [0, pi), so k is a small integer and anything far from one means the
    statement contradicts the coordinates.
    """
    total = 0.0
    for sym, coeff in coeffs.items():
        total += float(coeff) * direction(diagram.coords(sym[1]), diagram.coords(sym[2]))
    x = -total / math.pi - float(fractional)
    k = round(x)
    if abs(x - k) > 0.01:
        raise InconsistentTable(f"pi offset {x} is not near an integer")
    return Fraction(k)


def compile_statement(stmt: Statement, diagram: Diagram | None = None) -> list[Equation]:
    """Linear form(s) of one statement for its table.

    Statements already true by symmetry (cong a b a b) compile to nothing.
    Angle statements with a constant part need the diagram to pin the
    integer pi offset that makes the equation exact over the reals.
    """
    k = stmt.kind
    a = stmt.args
    if k == "para":
        coeffs = _pair_diff((a[0], a[1]), (a[2], a[3]), direction_symbol)
        return [Equation("angle", coeffs, (stmt,))] if coeffs else []
    if k == "perp":
        return [_with_pi(stmt, _pair_diff((a[0], a[1]), (a[2], a[3]), direction_symbol),
                         HALF, diagram)]
    if k == "aconst":
        return [_with_pi(stmt, _pair_diff((a[0], a[1]), (a[2], a[3]), direction_symbol),
                         stmt.value, diagram)]
    if k == "eqangle":
        coeffs = _pair_diff((a[0], a[1]), (a[2], a[3]), direction_symbol)
        for sym, c in _pair_diff((a[6], a[7]), (a[4], a[5]), direction_symbol).items():
            _add_term(coeffs, sym, c)
        if not coeffs:
            return []
        return [_with_pi(stmt, coeffs, Fraction(0), diagram)]
    if k == "cong":
        coeffs = _pair_diff((a[0], a[1]), (a[2], a[3]), length_symbol)
        return [Equation("ratio", coeffs, (stmt,))] if coeffs else []
    if k == "lconst":
        coeffs: Coeffs = {length_symbol(a[0], a[1]): ONE}
        for sym, e in factor_exponents(stmt.value).items():
            _add_term(coeffs, sym, -e)
        return [Equation("ratio", coeffs, (stmt,))]
    if k == "rconst":
        coeffs = _pair_diff((a[0], a[1]), (a[2], a[3]), length_symbol)
        if not coeffs and stmt.value != 1:
            raise InconsistentTable(f"{stmt.text()} equates a segment with itself")
        for sym, e in factor_exponents(stmt.value).items():
            _add_term(coeffs, sym, -e)
        return [Equation("ratio", coeffs, (stmt,))] if coeffs else []
    if k == "eqratio":
        coeffs = _pair_diff((a[0], a[1]), (a[2], a[3]), length_symbol)
        for sym, c in _pair_diff((a[6], a[7]), (a[4], a[5]), length_symbol).items():
            _add_term(coeffs, sym, c)
        return [Equation("ratio", coeffs, (stmt,))] if coeffs else []
    raise UnsupportedKind(f"{k} has no linear compilation")


def _with_pi(stmt: Statement, coeffs: Coeffs, fractional: Fraction,
             diagram: Diagram | None) -> Equation:
    table = "angle"
    if not coeffs and fractional == 0:
        return Equation(table, {}, (stmt,))
    if diagram is None:
        raise UnsupportedKind(
            f"{stmt.kind} needs a diagram to fix its pi offset")
    offset = fractional + _angle_offset(diagram, coeffs, fractional)
    if offset:
        coeffs = dict(coeffs)
        coeffs[PI] = offset
    return Equation(table, coeffs, (stmt,))


def compile_for_tables(stmt: Statement, diagram: Diagram | None = None) -> list[Equation]:
    """Internal superset of compile_statement used by the proof state.

    coll feeds the angle table as direction equalities (three collinear
    points put both pairs on one line, exactly, with no pi offset);
    eqratio3 splits into its two plain ratio rows.
    """
    k = stmt.kind
    if k == "coll":
        a, b, c = stmt.args
        eqs = []
        for p2 in ((a, c), (b, c)):
            coeffs = _pair_diff((a, b), p2, direction_symbol)
            eqs.append(Equation("angle", coeffs, (stmt,)))
        return eqs
    if k == "eqratio3":
        a, b, c, d, m, n = stmt.args
        parts = []
        for args in ((m, a, m, c, n, b, n, d), (m, a, m, c, a, b, c, d)):
            eq = compile_statement(statement("eqratio", *args), diagram)
            parts.extend(Equation("ratio", e.coeffs, (stmt,)) for e in eq)
        return parts
    return compile_statement(stmt, diagram)


# -- query forms ------------------------------------------------------------


@dataclass(frozen=True)
class QueryForm:
    """Constant-free coefficients plus what their residual must reduce to."""

    table: str
    coeffs: tuple[tuple[Symbol, Fraction], ...]
    # angle: required value of the residual pi coefficient, mod 1
    # ratio: required prime-exponent residual, exactly
    requirement: tuple


def query_forms(stmt: Statement) -> list[QueryForm]:
    """Alternative linear readings of one statement; any one derives it.

    Only coll has more than one: three collinear points are witnessed by
    equal directions of any two of the three pairs, and the table may
    know one pairing without ever having met the third symbol.
    """
    if stmt.kind == "coll":
        a, b, c = stmt.args
        forms = []
        for p1, p2 in (((a, b), (a, c)), ((a, b), (b, c)), ((a, c), (b, c))):
            coeffs = _pair_diff(p1, p2, direction_symbol)
            forms.append(QueryForm("angle", tuple(sorted(coeffs.items())),
                                   ("mod1", Fraction(0))))
        return forms
    return [query_form(stmt)]


def query_form(stmt: Statement) -> QueryForm:
    k = stmt.kind
    a = stmt.args
    if k in ("para", "coll", "perp", "aconst", "eqangle"):
        if k == "coll":
            coeffs = _pair_diff((a[0], a[1]), (a[0], a[2]), direction_symbol)
            need = Fraction(0)
        elif k == "eqangle":
            coeffs = _pair_diff((a[0], a[1]), (a[2], a[3]), direction_symbol)
            for sym, c in _pair_diff((a[6], a[7]), (a[4], a[5]),
                                     direction_symbol).items():
                _add_term(coeffs, sym, c)
            need = Fraction(0)
        else:
            coeffs = _pair_diff((a[0], a[1]), (a[2], a[3]), direction_symbol)
            need = {"para": Fraction(0), "perp": HALF}.get(k)
            if need is None:
                need = (-stmt.value) % 1  # residual reads theta(ab) - theta(cd)
        return QueryForm("angle", tuple(sorted(coeffs.items())), ("mod1", need))
    if k in ("cong", "eqratio", "rconst", "lconst", "eqratio3"):
        if k == "lconst":
            coeffs = {length_symbol(a[0], a[1]): ONE}
            need = factor_exponents(stmt.value)
        elif k == "eqratio":
            coeffs = _pair_diff((a[0], a[1]), (a[2], a[3]), length_symbol)
            for sym, c in _pair_diff((a[6], a[7]), (a[4], a[5]),
                                     length_symbol).items():
                _add_term(coeffs, sym, c)
            need = {}
        elif k == "eqratio3":
            raise UnsupportedKind("eqratio3 splits into two eqratio queries")
        else:
            coeffs = _pair_diff((a[0], a[1]), (a[2], a[3]), length_symbol)
            need = factor_exponents(stmt.value) if k == "rconst" else {}
        return QueryForm("ratio", tuple(sorted(coeffs.items())),
                         tuple(sorted(need.items())))
    raise UnsupportedKind(f"{k} is not a table statement")


# -- the table ---------------------------------------------------------------


class LinearTable:
    """Incremental reduced row echelon form with per-equation provenance.

    Constant columns (pi, log-primes) are never chosen as pivots, so a
    fully reduced query either leaves a pure-constant residual (the
    relation's value) or a mix that means "not derivable".
    """

    def __init__(self, tag: str, diagram: Diagram | None = None):
        self.tag = tag
        self.diagram = diagram
        self.equations: list[Equation] = []
        self._rows: list[tuple[Coeffs, dict[int, Fraction]]] = []
        self._pivot_row: dict[Symbol, int] = {}
        self._symbols: set[Symbol] = set()

    # - feeding -

    def add_statement(self, stmt: Statement) -> None:
        for eq in compile_for_tables(stmt, self.diagram):
            if eq.table == self.tag:
                self.add_equation(eq)

    def add_equation(self, eq: Equation) -> None:
        if eq.table != self.tag:
            raise UnsupportedKind(f"{self.tag} table fed a {eq.table} equation")
        coeffs = {s: c for s, c in eq.coeffs.items() if c}
        index = len(self.equations)
        self.equations.append(eq)
        self._symbols.update(s for s in coeffs if not _is_const(s))
        residual, combo = self._reduce(coeffs, {index: ONE})
        live = {s for s in residual if not _is_const(s)}
        if not live:
            if residual:
                raise InconsistentTable(
                    f"{self.tag} table: 0 = {residual} from "
                    + " & ".join(p.text() for p in eq.provenance))
            return  # redundant but kept for provenance alternatives
        pivot = min(live)
        scale = residual[pivot]
        row = {s: c / scale for s, c in residual.items()}
        row_combo = {i: c / scale for i, c in combo.items() if c}
        # eliminate the new pivot from every older row
        for coeffs, old_combo in self._rows:
            c = coeffs.get(pivot)
            if not c:
                continue
            for sym, rc in row.items():
                _add_term(coeffs, sym, -c * rc)
            for i, rc in row_combo.items():
                old = old_combo.get(i, Fraction(0)) - c * rc
                if old:
                    old_combo[i] = old
                else:
                    old_combo.pop(i, None)
        self._pivot_row[pivot] = len(self._rows)
        self._rows.append((row, row_combo))

    def _reduce(self, coeffs: Coeffs, combo: dict[int, Fraction]):
        for sym in sorted(s for s in coeffs if s in self._pivot_row):
            c = coeffs.get(sym)
            if not c:
                continue
            row, row_combo = self._rows[self._pivot_row[sym]]
            for rsym, rc in row.items():
                _add_term(coeffs, rsym, -c * rc)
            for i, rc in row_combo.items():
                total = combo.get(i, Fraction(0)) - c * rc
                if total:
                    combo[i] = total
                else:
                    combo.pop(i, None)
        return coeffs, combo

    # - queries -

    def query(self, coeffs: Coeffs):
        """(constant residual, supporting equation indices) or None."""
        residual, combo = self._reduce(
            {s: c for s, c in coeffs.items() if c}, {})
        if any(not _is_const(s) for s in residual):
            return None
        return residual, sorted(combo)

    def _requirement_met(self, residual: Coeffs, requirement: tuple) -> bool:
        if self.tag == "angle":
            got = residual.get(PI, Fraction(0)) % 1
            return got == requirement[1] % 1
        return tuple(sorted(residual.items())) == requirement

    def check(self, stmt: Statement) -> tuple[Statement, ...] | None:
        """Premises deriving stmt, minimized, or None when not derivable."""
        try:
            forms = query_forms(stmt)
        except UnsupportedKind:
            return None
        for form in forms:
            if form.table != self.tag:
                return None
            coeffs = dict(form.coeffs)
            if not coeffs:
                if self._requirement_met({}, form.requirement):
                    return ()
                continue
            hit = self.query(coeffs)
            if hit is None or not self._requirement_met(hit[0], form.requirement):
                continue
            return self._minimize(coeffs, form.requirement, hit[1])
        return None

    def minimize_premises(self, stmt: Statement) -> tuple[Statement, ...]:
        premises = self.check(stmt)
        if premises is None:
            raise NotDerivable(f"{stmt.text()} is not derivable from the {self.tag} table")
        return premises

    def _derivable_from(self, indices, coeffs: Coeffs, requirement: tuple) -> bool:
        scratch = LinearTable(self.tag)
        for i in indices:
            eq = self.equations[i]
            scratch.add_equation(Equation(eq.table, dict(eq.coeffs), eq.provenance))
        hit = scratch.query(coeffs)
        return hit is not None and scratch._requirement_met(hit[0], requirement)

    def _minimize(self, coeffs: Coeffs, requirement: tuple,
                  support: list[int]) -> tuple[Statement, ...]:
        # greedy left-to-right deletion keeps the result subset-minimal
        keep = list(support)
        for i in list(keep):
            trial = [j for j in keep if j != i]
            if self._derivable_from(trial, coeffs, requirement):
                keep = trial
        premises: list[Statement] = []
        for i in keep:
            for p in self.equations[i].provenance:
                if p not in premises:
                    premises.append(p)
        return tuple(premises)

    # - saturation -

    def _expressions(self):
        """Solved form of every live symbol over free symbols and constants."""
        exprs: dict[Symbol, tuple[Coeffs, frozenset[int]]] = {}
        for sym in sorted(self._symbols):
            if sym in self._pivot_row:
                row, combo = self._rows[self._pivot_row[sym]]
                expr = {s: -c for s, c in row.items() if s != sym}
                exprs[sym] = (expr, frozenset(combo))
            else:
                exprs[sym] = ({sym: ONE}, frozenset())
        return exprs

    def saturate(self, is_known: Callable[[Statement], bool]):
        """Every derivable pair or constant relation not yet known.

        Returns (statement, minimized premises) tuples in a deterministic
        order: symbols are scanned sorted, so equal inputs give equal
        output bytes. Constant-diff pairs become coll/para/perp/aconst or
        cong/rconst; equal non-constant diff classes meet as eqangle or
        eqratio across pairs. Nothing is emitted twice in one call.
        """
        exprs = self._expressions()
        symbols = sorted(self._symbols)
        out: list[tuple[Statement, tuple[Statement, ...]]] = []
        seen: set[Statement] = set()

        def offer(stmt: Statement):
            if stmt in seen or is_known(stmt):
                return
            seen.add(stmt)
            premises = self.check(stmt)
            if premises is None:  # pragma: no cover - emission implies derivable
                raise InconsistentTable(f"emitted {stmt.text()} is not derivable")
            out.append((stmt, premises))

        if self.tag == "ratio":
            for sym in symbols:
                expr, _ = exprs[sym]
                if all(_is_const(s) for s in expr):
                    value = rational_from_exponents(expr)
                    if value is not None:
                        offer(statement("lconst", sym[1], sym[2], value=value))

        classes: dict[tuple, list[Symbol]] = {}
        for i, s1 in enumerate(symbols):
            e1, _ = exprs[s1]
            for s2 in symbols[i + 1:]:
                e2, _ = exprs[s2]
                delta: Coeffs = dict(e1)
                for sym, c in e2.items():
                    _add_term(delta, sym, -c)
                const = {s: c for s, c in delta.items() if _is_const(s)}
                live = {s: c for s, c in delta.items() if not _is_const(s)}
                if not live:
                    self._emit_constant_pair(s1, s2, const, offer)
                    # constant pairs still join their class: two pairs with
                    # the same constant difference witness an eqangle or
                    # eqratio. Zero angle differences stay out; coll and
                    # para already say everything a 0=0 eqangle would.
                    if self.tag == "angle" and const.get(PI, Fraction(0)) % 1 == 0:
                        continue
                if not set(s1[1:]) & set(s2[1:]):
                    # class members must share a point: rules state every
                    # eqangle/eqratio premise vertex-anchored, and pairs
                    # of unrelated segments would alias quadratically
                    # across merged lines without being consumable
                    continue
                # both orientations join: a bisector-style equality
                # d(b)-d(a) = d(c)-d(b) pairs one difference with the
                # mirror of another, and single-orientation keys would
                # file them under r and -r separately
                flipped = {s: -c for s, c in delta.items()}
                for a, b, diff in ((s1, s2, delta), (s2, s1, flipped)):
                    if self.tag == "angle":
                        key = (
                            tuple(sorted((s, c) for s, c in diff.items()
                                         if not _is_const(s))),
                            diff.get(PI, Fraction(0)) % 1)
                    else:
                        key = (
                            tuple(sorted((s, c) for s, c in diff.items()
                                         if not _is_const(s))),
                            tuple(sorted((s, c) for s, c in diff.items()
                                         if _is_const(s))))
                    classes.setdefault(key, []).append((a, b))

        for members in classes.values():
            for i, (s1, s2) in enumerate(members):
                for s3, s4 in members[i + 1:]:
                    if {s1, s2} == {s3, s4}:
                        continue  # its own mirror says nothing new
                    if self.tag == "angle":
                        offer(statement("eqangle", s2[1], s2[2], s1[1], s1[2],
                                        s4[1], s4[2], s3[1], s3[2]))
                    else:
                        offer(statement("eqratio", s1[1], s1[2], s2[1], s2[2],
                                        s3[1], s3[2], s4[1], s4[2]))
        return out

    def _emit_constant_pair(self, s1: Symbol, s2: Symbol, const: Coeffs, offer):
        # value of s1 - value of s2 equals the constant residual exactly
        p1 = (s1[1], s1[2])
        p2 = (s2[1], s2[2])
        if self.tag == "angle":
            r = const.get(PI, Fraction(0)) % 1
            if r == 0:
                shared = set(p1) & set(p2)
                if shared:
                    points = sorted(set(p1) | set(p2))
                    if len(points) == 3:
                        offer(statement("coll", *points))
                elif not self._segments_collinear(p1, p2):
                    # equal directions on one line are collinearity, not
                    # parallelism; a para here would satisfy the parallel
                    # premises of the intercept rules degenerately and
                    # license false ratio conclusions
                    offer(statement("para", *p1, *p2))
            elif r == HALF:
                offer(statement("perp", *p1, *p2))
            else:
                offer(statement("aconst", *p2, *p1, value=r))
            return
        value = rational_from_exponents(const)
        if value is None:
            return
        if value == 1:
            offer(statement("cong", *p1, *p2))
        else:
            offer(statement("rconst", *p1, *p2, value=value))

    def _segments_collinear(self, p1: tuple, p2: tuple) -> bool:
        if self.diagram is None:
            return False
        try:
            return check_numerical(statement("coll", *p1, *p2), self.diagram)
        except DegenerateConfiguration:
            return True

    # - introspection -

    def dump(self) -> str:
        """Readable matrix of the reduced rows, columns sorted."""
        columns = sorted(self._symbols) + sorted(
            {s for row, _ in self._rows for s in row if _is_const(s)})
        lines = [self.tag + " table: " + " | ".join(map(_sym_text, columns))]
        for row, combo in self._rows:
            cells = [str(row.get(c, Fraction(0))) for c in columns]
            lines.append(" | ".join(cells) + "   <- eqs " +
                         ",".join(map(str, sorted(combo))))
        return "\n".join(lines)


def _sym_text(sym: Symbol) -> str:
    if sym == PI:
        return "pi"
    if sym[0] == "c":
        return f"log{sym[1]}"
    return f"{sym[0]}({sym[1]}{sym[2]})"


def saturate(table: LinearTable, is_known: Callable[[Statement], bool]):
    return table.saturate(is_known)
