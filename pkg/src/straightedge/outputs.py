"""Run artifacts: proof text, SVG figures, graph pages, run metadata.

Everything a run leaves behind lands in one problem folder:

    problem1/
    |-- html/
    |   |-- index.html
    |   |-- symbols_graph.html
    |   |-- dependency_graph.html
    |   |-- figure.svg
    |-- goals.txt
    |-- construction_figure.svg
    |-- run_infos.txt
    |-- proof_steps.txt
    |-- proof_figure.txt (+ proof_figure.svg)

Proof text shape, abridged:

    ==========================
     * From theorem premises:
    A B C D : Points
    BD ⟂ AC [00]
    CD ⟂ AB [01]

     * Proof steps:
    001. BD ⟂ AC [00] & CD ⟂ AB [01] (r43)⇒  AD ⟂ BC
    ==========================

Statements are cited by bracket index in order of first listing, indices
zero padded to two digits. The closing step concludes the goal and
carries no index. Construction roots split into theorem premises and
auxiliary constructions by clause position: the shortest prefix of the
problem's clauses that places every goal point is the theorem statement,
anything constructed after it is auxiliary.

The html pages embed their graph JSON and renderer script directly, so
they open offline. ``read_proof`` re-parses a proof file and re-checks
that every step cites only earlier statements, which keeps the text
format honest as a proof record rather than a display artifact.
"""

from __future__ import annotations

import html
import json
import re
from pathlib import Path

from .depgraph import ReducedProof
from .errors import DegenerateConfiguration, InvalidProof, IoFailure
from .numerics import Diagram, Point, circumcenter, distance
from .parsing import ProblemSpec
from .statements import pretty, pretty_point

SEPARATOR = "=" * 26

# ---------------------------------------------------------------------------
# proof text


def _idx(i: int) -> str:
    return f"{i:02d}"


def _proof_points(reduced: ReducedProof) -> list[str]:
    """Every point the proof mentions, in first-use order."""
    seen: dict[str, None] = {}
    statements = [*reduced.roots, *(s.conclusion for s in reduced.steps),
                  reduced.goal]
    for stmt in statements:
        for p in stmt.args:
            seen.setdefault(p)
    return list(seen)


def _premise_prefix(problem: ProblemSpec) -> set[str]:
    """Points placed by the shortest clause prefix covering all goals."""
    goal_points = {p for g in problem.goals for p in g.args}
    placed: set[str] = set()
    for clause in problem.clauses:
        placed.update(clause.new_points)
        if goal_points <= placed:
            break
    return placed


def proof_text(reduced: ReducedProof, problem: ProblemSpec | None = None) -> str:
    """Render a reduced proof in the sectioned bracket-index format.

    ``problem`` drives the premises / auxiliary split; without it every
    root counts as a theorem premise. Raises InvalidProof when a step
    cites a statement that is not a root or an earlier conclusion, or
    when the last step does not conclude the goal.
    """
    used = _proof_points(reduced)
    if problem is not None:
        prefix = _premise_prefix(problem)
        order = {p: i for i, p in enumerate(problem.points())}
        used.sort(key=lambda p: order.get(p, len(order)))
    else:
        prefix = set(used)
    premise_points = [p for p in used if p in prefix]
    aux_points = [p for p in used if p not in prefix]
    premise_roots = [r for r in reduced.roots if set(r.args) <= prefix]
    aux_roots = [r for r in reduced.roots if not set(r.args) <= prefix]

    if reduced.steps and reduced.steps[-1].conclusion != reduced.goal:
        raise InvalidProof("last step does not conclude the goal")
    if not reduced.steps and reduced.roots != (reduced.goal,):
        raise InvalidProof("a proof with no steps must have the goal as"
                           " its only root")

    index: dict = {}
    lines = [SEPARATOR, " * From theorem premises:"]
    if premise_points:
        lines.append(" ".join(pretty_point(p) for p in premise_points)
                     + " : Points")
    for root in premise_roots:
        index[root] = len(index)
        lines.append(f"{pretty(root)} [{_idx(index[root])}]")

    if aux_roots or aux_points:
        lines.append("")
        lines.append(" * Auxiliary Constructions:")
        if aux_points:
            lines.append(" ".join(pretty_point(p) for p in aux_points)
                         + " : Points")
        for root in aux_roots:
            index[root] = len(index)
            lines.append(f"{pretty(root)} [{_idx(index[root])}]")

    if reduced.steps:
        lines.append("")
        lines.append(" * Proof steps:")
        last = len(reduced.steps) - 1
        for n, step in enumerate(reduced.steps):
            cited = []
            for premise in step.premises:
                if premise not in index:
                    raise InvalidProof(
                        f"step {n + 1:03d} cites {premise.text()!r} before"
                        " it is established")
                cited.append(f"{pretty(premise)} [{_idx(index[premise])}]")
            if step.conclusion in index:
                raise InvalidProof(
                    f"step {n + 1:03d} re-concludes {step.conclusion.text()!r}")
            if n == last:
                conclusion = pretty(step.conclusion)
            else:
                index[step.conclusion] = len(index)
                conclusion = (f"{pretty(step.conclusion)}"
                              f" [{_idx(index[step.conclusion])}]")
            lines.append(f"{n + 1:03d}. {' & '.join(cited)}"
                         f" ({step.reason})⇒  {conclusion}")

    lines.append(SEPARATOR)
    return "\n".join(lines) + "\n"


def write_proof(reduced: ReducedProof, path,
                problem: ProblemSpec | None = None) -> None:
    _write(path, proof_text(reduced, problem))


_ROOT_LINE = re.compile(r"^(.*) \[(\d+)\]$")
_STEP_LINE = re.compile(r"^(\d{3})\. (.*) \(([^()]*)\)$")


def read_proof(text: str) -> dict:
    """Parse a proof file back into sections and validate its step order.

    Checks, from the text alone: indices are dense and increasing in
    order of appearance, step numbers run 001..N, every cited premise
    index is already assigned, and only the final step lacks an index.
    Returns {"premises": [...], "aux": [...], "steps": [...], "goal": str}
    with statements as (index, text) pairs and steps as
    {"premises": [indices], "reason": str, "conclusion": index | None,
    "text": str}.
    """
    lines = text.splitlines()
    if not lines or lines[0] != SEPARATOR or lines[-1] != SEPARATOR:
        raise InvalidProof("missing proof separators")
    section = None
    premises: list[tuple[int, str]] = []
    aux: list[tuple[int, str]] = []
    steps: list[dict] = []
    assigned = -1

    def take_root(line: str, into: list) -> None:
        nonlocal assigned
        m = _ROOT_LINE.match(line)
        if not m:
            raise InvalidProof(f"unparseable premise line {line!r}")
        idx = int(m.group(2))
        if idx != assigned + 1:
            raise InvalidProof(f"index [{m.group(2)}] out of order")
        assigned = idx
        into.append((idx, m.group(1)))

    for line in lines[1:-1]:
        if not line:
            continue
        if line == " * From theorem premises:":
            section = premises
            continue
        if line == " * Auxiliary Constructions:":
            section = aux
            continue
        if line == " * Proof steps:":
            section = steps
            continue
        if section is None:
            raise InvalidProof(f"content before any section: {line!r}")
        if line.endswith(" : Points"):
            continue
        if section is not steps:
            take_root(line, section)
            continue
        left, arrow, right = line.partition("⇒  ")
        m = _STEP_LINE.match(left)
        if not arrow or not m:
            raise InvalidProof(f"unparseable step line {line!r}")
        if int(m.group(1)) != len(steps) + 1:
            raise InvalidProof(f"step number {m.group(1)} out of sequence")
        cited = []
        for part in m.group(2).split(" & "):
            pm = _ROOT_LINE.match(part)
            if not pm:
                raise InvalidProof(f"unparseable premise {part!r}")
            idx = int(pm.group(2))
            if idx > assigned:
                raise InvalidProof(
                    f"step {m.group(1)} cites [{pm.group(2)}] before it is"
                    " established")
            cited.append(idx)
        cm = _ROOT_LINE.match(right)
        if cm:
            if int(cm.group(2)) != assigned + 1:
                raise InvalidProof(f"index [{cm.group(2)}] out of order")
            assigned += 1
            steps.append({"premises": cited, "reason": m.group(3),
                          "conclusion": assigned, "text": cm.group(1)})
        else:
            steps.append({"premises": cited, "reason": m.group(3),
                          "conclusion": None, "text": right})

    unindexed = [s for s in steps if s["conclusion"] is None]
    if steps and (len(unindexed) != 1 or steps[-1]["conclusion"] is not None):
        raise InvalidProof("exactly the final step must lack an index")
    goal = steps[-1]["text"] if steps else (premises + aux)[-1][1]
    return {"premises": premises, "aux": aux, "steps": steps, "goal": goal}


# ---------------------------------------------------------------------------
# figures

_CANVAS = 640.0
_MARGIN = 48.0


def _viewport(points: dict[str, Point]):
    xs = [p[0] for p in points.values()]
    ys = [p[1] for p in points.values()]
    x0, y0 = min(xs, default=0.0), min(ys, default=0.0)
    extent = max(max(xs, default=1.0) - x0, max(ys, default=1.0) - y0, 1e-6)
    scale = (_CANVAS - 2 * _MARGIN) / extent

    def to_svg(p: Point) -> tuple[float, float]:
        # svg y grows downward, diagram y grows upward
        return (_MARGIN + (p[0] - x0) * scale,
                _CANVAS - _MARGIN - (p[1] - y0) * scale)

    return to_svg, scale


def _drawable_symbols(state, names: set[str]) -> tuple[list, list]:
    """Live lines and circles whose members are in ``names``."""
    if state is None:
        return [], []
    doc = state.symbols.to_json()
    lines = [n for n in doc["lines"]
             if n["live"] and len([p for p in n["points"] if p in names]) >= 2]
    circles = [n for n in doc["circles"] if n["live"]
               and (len([p for p in n["points"] if p in names]) >= 3
                    or (any(c in names for c in n["centers"])
                        and any(p in names for p in n["points"])))]
    return (sorted(lines, key=lambda n: n["id"]),
            sorted(circles, key=lambda n: n["id"]))


def figure_svg(diagram: Diagram, state=None,
               only: set[str] | None = None) -> str:
    """Deterministic SVG of the diagram with every point labeled.

    ``state`` contributes the known lines and circles from its symbols
    registry; without it only points are drawn. ``only`` restricts the
    picture to a subset of points (used for the proof figure).
    """
    points = {name: xy for name, xy in diagram.points.items()
              if only is None or name in only}
    to_svg, scale = _viewport(points)
    lines, circles = _drawable_symbols(state, set(points))

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" '
             f'viewBox="0 0 {_CANVAS:.0f} {_CANVAS:.0f}">',
             f'<rect width="{_CANVAS:.0f}" height="{_CANVAS:.0f}"'
             ' fill="white"/>']
    for node in lines:
        members = [p for p in node["points"] if p in points]
        ends = max(((a, b) for a in members for b in members),
                   key=lambda ab: distance(points[ab[0]], points[ab[1]]))
        (x1, y1), (x2, y2) = to_svg(points[ends[0]]), to_svg(points[ends[1]])
        parts.append(f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}"'
                     f' y2="{y2:.2f}" stroke="#5b8dd9" stroke-width="1.5"/>')
    for node in circles:
        members = [p for p in node["points"] if p in points]
        centers = [c for c in node["centers"] if c in points]
        if centers:
            center = points[centers[0]]
        else:
            try:
                center = circumcenter(*(points[p] for p in members[:3]))
            except DegenerateConfiguration:
                continue
        radius = distance(center, points[members[0]])
        (cx, cy), _ = to_svg(center), None
        _, scale = _viewport(points)
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}"'
                     f' r="{radius * scale:.2f}" fill="none"'
                     ' stroke="#c98b3d" stroke-width="1.5"/>')
    for name, xy in points.items():
        x, y = to_svg(xy)
        parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="#222"/>')
        parts.append(f'<text x="{x + 6:.2f}" y="{y - 6:.2f}"'
                     f' font-family="sans-serif" font-size="14">'
                     f'{html.escape(pretty_point(name))}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_figure(diagram: Diagram, state, path) -> None:
    _write(path, figure_svg(diagram, state))


def proof_figure_text(reduced: ReducedProof, diagram: Diagram, state) -> str:
    """Text companion of proof_figure.svg naming what the figure shows."""
    used = _proof_points(reduced)
    lines, circles = _drawable_symbols(state, set(used))
    out = ["proof figure (text form; the drawing is proof_figure.svg)",
           f"goal: {pretty(reduced.goal)}",
           "points: " + " ".join(pretty_point(p) for p in used)]
    for node in lines:
        members = [p for p in node["points"] if p in used]
        out.append("line " + "-".join(pretty_point(p) for p in members))
    for node in circles:
        members = [pretty_point(p) for p in node["points"] if p in used]
        centers = [pretty_point(c) for c in node["centers"] if c in used]
        tail = f" centered {centers[0]}" if centers else ""
        out.append("circle " + " ".join(members) + tail)
    out.append(f"steps: {len(reduced.steps)}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# run metadata

WALL_CLOCK_MARKER = "--- wall clock ---"


def run_infos_text(state, timings: dict[str, float] | None = None) -> str:
    """Key: value run record; wall-clock lines sit below a marker line.

    Everything above the marker is reproducible for a fixed seed, so two
    runs compare equal after truncating at the marker.
    """
    by_kind: dict[str, int] = {}
    for stmt in state.graph.statements():
        by_kind[stmt.kind] = by_kind.get(stmt.kind, 0) + 1
    graph = state.graph.export_full_graph()
    roots = sum(1 for d in graph["dependencies"]
                if d["chosen"] and d["reason"] == "construction")
    proven = [g for g in state.goals if state.check_goal(g).proven]
    d = state.diagram
    lines = [
        f"problem: {state.problem.name}",
        f"status: {state.status}",
        f"seed: {d.seed}",
        f"attempts_used: {d.attempts}",
        f"rounds: {state.rounds}",
        f"statements: {len(state.graph)}",
        f"construction_roots: {roots}",
        "statements_by_kind: " + " ".join(
            f"{k}={n}" for k, n in sorted(by_kind.items())),
        "branch_choices: " + (",".join(d.branch_choices) or "(none)"),
        "goals: " + ("; ".join(g.text() for g in state.goals) or "(none)"),
        "proven: " + ("; ".join(g.text() for g in proven) or "(none)"),
        WALL_CLOCK_MARKER,
    ]
    for key, seconds in (timings or {}).items():
        lines.append(f"{key}_seconds: {seconds:.3f}")
    lines.append(state.profiler.report())
    return "\n".join(lines) + "\n"


def write_run_infos(state, timings, path) -> None:
    _write(path, run_infos_text(state, timings))


# ---------------------------------------------------------------------------
# graph pages

# Graph JSON schema (shared with any UI built on these pages):
#   statements:   [{index, text, kind}]                017 text is canonical
#   dependencies: [{conclusion, premises, reason, chosen}]   by statement text
#   reduced:      {goal, roots: [text], steps: [{premises, conclusion,
#                  reason}]} or null when no goal is proven

_PAGE = """<meta charset="utf-8">
<title>{title}</title>
<style>
  body {{ font-family: sans-serif; margin: 1.2rem; background: #fafafa; }}
  h1 {{ font-size: 1.1rem; }}
  .meta {{ color: #555; margin-bottom: .6rem; }}
  svg {{ background: white; border: 1px solid #ddd; }}
  nav a {{ margin-right: 1rem; }}
  table {{ border-collapse: collapse; margin-top: 1rem; }}
  td, th {{ border: 1px solid #ccc; padding: 2px 8px; font-size: .85rem; }}
</style>
<nav><a href="index.html">index</a><a href="symbols_graph.html">symbols</a>
<a href="dependency_graph.html">dependencies</a></nav>
<h1>{title}</h1>
{body}
<script type="application/json" id="data">{data}</script>
<script>
/* renderer vendored in-page so the file opens offline */
{script}
</script>
"""

_DEP_SCRIPT = """
const doc = JSON.parse(document.getElementById("data").textContent);
const byText = new Map(doc.statements.map(s => [s.text, s.index]));
const chosen = doc.dependencies.filter(d => d.chosen);
const depth = new Map();
for (const s of doc.statements) depth.set(s.index, 0);
let changed = true;
while (changed) {
  changed = false;
  for (const d of chosen) {
    const c = byText.get(d.conclusion);
    const want = 1 + Math.max(0, ...d.premises.map(p => depth.get(byText.get(p))));
    if (d.premises.length && want > depth.get(c)) { depth.set(c, want); changed = true; }
  }
}
const reducedSet = new Set();
if (doc.reduced) {
  doc.reduced.roots.forEach(t => reducedSet.add(byText.get(t)));
  doc.reduced.steps.forEach(s => reducedSet.add(byText.get(s.conclusion)));
}
const colors = {construction: "#3a7d44", "AR-angle": "#c98b3d",
                "AR-ratio": "#c98b3d"};
function colorOf(reason) {
  if (reason in colors) return colors[reason];
  return reason.startsWith("i-") ? "#888" : "#5b8dd9";
}
function draw(reducedOnly) {
  const keep = i => !reducedOnly || reducedSet.has(i);
  const rows = new Map();
  for (const s of doc.statements) {
    if (!keep(s.index)) continue;
    const d = depth.get(s.index);
    if (!rows.has(d)) rows.set(d, []);
    rows.get(d).push(s);
  }
  const pos = new Map(), W = 210, H = 54;
  let maxCols = 1;
  for (const [d, row] of rows) {
    maxCols = Math.max(maxCols, row.length);
    row.forEach((s, i) => pos.set(s.index, [20 + i * W, 20 + d * H]));
  }
  const svg = document.getElementById("canvas");
  svg.setAttribute("width", 40 + maxCols * W);
  svg.setAttribute("height", 40 + (Math.max(0, ...rows.keys()) + 1) * H);
  let out = "";
  for (const d of chosen) {
    const c = byText.get(d.conclusion);
    if (!keep(c) || !d.premises.length) continue;
    const [cx, cy] = pos.get(c);
    for (const p of d.premises) {
      const pi = byText.get(p);
      if (!keep(pi)) continue;
      const [px, py] = pos.get(pi);
      out += `<line x1="${px + 90}" y1="${py + 30}" x2="${cx + 90}" y2="${cy + 4}" stroke="#bbb"/>`;
    }
  }
  for (const s of doc.statements) {
    if (!keep(s.index)) continue;
    const [x, y] = pos.get(s.index);
    const dep = chosen.find(d => byText.get(d.conclusion) === s.index);
    const reason = dep ? dep.reason : "construction";
    out += `<g><rect x="${x}" y="${y}" width="180" height="30" rx="5" fill="white" ` +
           `stroke="${colorOf(reason)}" stroke-width="1.5"><title>[${s.index}] ${s.text} (${reason})</title></rect>` +
           `<text x="${x + 6}" y="${y + 19}" font-size="11">${s.text.slice(0, 28)}</text></g>`;
  }
  svg.innerHTML = out;
}
const box = document.getElementById("reduced-only");
if (doc.reduced) box.addEventListener("change", () => draw(box.checked));
else box.parentElement.style.display = "none";
draw(false);
"""

_SYM_SCRIPT = """
const doc = JSON.parse(document.getElementById("data").textContent);
const pts = [...new Set([
  ...doc.lines.flatMap(l => l.points),
  ...doc.circles.flatMap(c => [...c.points, ...c.centers])])].sort();
const nodes = [...doc.lines.filter(l => l.live),
               ...doc.circles.filter(c => c.live)];
const rowOf = new Map(pts.map((p, i) => [p, i]));
const H = 30, LEFT = 80, RIGHT = 320;
const svg = document.getElementById("canvas");
svg.setAttribute("width", RIGHT + 260);
svg.setAttribute("height", 30 + Math.max(pts.length, nodes.length) * H);
let out = "";
nodes.forEach((n, j) => {
  const y = 20 + j * H;
  const members = [...(n.points || [])];
  for (const p of members) {
    out += `<line x1="${LEFT + 4}" y1="${20 + rowOf.get(p) * H}" x2="${RIGHT - 4}" y2="${y}" stroke="#ccc"/>`;
  }
  for (const c of n.centers || []) {
    out += `<line x1="${LEFT + 4}" y1="${20 + rowOf.get(c) * H}" x2="${RIGHT - 4}" y2="${y}" stroke="#c98b3d" stroke-dasharray="4 3"/>`;
  }
});
pts.forEach((p, i) => {
  out += `<circle cx="${LEFT}" cy="${20 + i * H}" r="4" fill="#222"/>` +
         `<text x="${LEFT - 10}" y="${24 + i * H}" text-anchor="end" font-size="12">${p}</text>`;
});
nodes.forEach((n, j) => {
  const circle = "centers" in n;
  out += `<rect x="${RIGHT}" y="${8 + j * H}" width="200" height="22" rx="5" fill="white" ` +
         `stroke="${circle ? "#c98b3d" : "#5b8dd9"}"/>` +
         `<text x="${RIGHT + 8}" y="${23 + j * H}" font-size="11">${n.id}: ${n.points.join(" ")}</text>`;
});
svg.innerHTML = out;
"""


def reduced_graph_json(reduced: ReducedProof | None) -> dict | None:
    if reduced is None:
        return None
    return {
        "goal": reduced.goal.text(),
        "roots": [r.text() for r in reduced.roots],
        "steps": [{"premises": [p.text() for p in s.premises],
                   "conclusion": s.conclusion.text(),
                   "reason": s.reason} for s in reduced.steps],
    }


def _embed(doc: dict) -> str:
    # "</script>" inside the payload would end the tag early
    return json.dumps(doc, separators=(",", ":")).replace("</", "<\\/")


def dependency_page(state, reduced: ReducedProof | None = None) -> str:
    doc = state.graph.export_full_graph()
    doc["reduced"] = reduced_graph_json(reduced)
    body = ('<div class="meta">{n} statements, {m} dependencies</div>\n'
            '<label><input type="checkbox" id="reduced-only"> show the'
            ' reduced proof only</label>\n<svg id="canvas"></svg>').format(
                n=len(doc["statements"]), m=len(doc["dependencies"]))
    return _PAGE.format(title=f"{state.problem.name}: dependency graph",
                        body=body, data=_embed(doc), script=_DEP_SCRIPT)


def symbols_page(state) -> str:
    doc = state.symbols.to_json()
    merges = "".join(
        f"<tr><td>{m['kind']}</td><td>{m['absorbed']} → {m['survivor']}</td>"
        f"<td>{html.escape(m['because'])}</td></tr>"
        for m in doc["merges"])
    body = ('<div class="meta">{ln} lines, {c} circles, {mg} merges</div>\n'
            '<svg id="canvas"></svg>\n'
            '<table><tr><th>merge</th><th>nodes</th><th>because</th></tr>'
            '{rows}</table>').format(
                ln=len(doc["lines"]), c=len(doc["circles"]),
                mg=len(doc["merges"]), rows=merges)
    return _PAGE.format(title=f"{state.problem.name}: symbols graph",
                        body=body, data=_embed(doc), script=_SYM_SCRIPT)


def index_page(state, reduced: ReducedProof | None = None) -> str:
    goals = "".join(f"<li>{html.escape(pretty(g))}</li>" for g in state.goals)
    solved = "" if reduced is None else (
        f"<p>proof: {len(reduced.steps)} steps from"
        f" {len(reduced.roots)} construction roots</p>")
    body = (f'<div class="meta">status: {state.status} after'
            f' {state.rounds} rounds, {len(state.graph)} statements</div>\n'
            f"<ul>{goals}</ul>{solved}\n"
            '<p><img src="figure.svg" alt="figure" width="480"></p>')
    return _PAGE.format(title=f"problem {state.problem.name}", body=body,
                        data="{}", script="")


# ---------------------------------------------------------------------------
# the problem folder


def write_problem_outputs(folder, state, reduced: ReducedProof | None = None,
                          timings: dict[str, float] | None = None,
                          construction_svg: str | None = None) -> list[Path]:
    """Write the full output tree for one problem under ``folder``.

    ``construction_svg`` should be rendered before any deduction runs so
    it shows the bare construction; omitted, the final state is used.
    The unsolved case skips the proof files. Returns the written paths.
    """
    folder = Path(folder)
    html_dir = folder / "html"
    try:
        html_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {html_dir}: {exc}") from exc

    full = figure_svg(state.diagram, state)
    written = [
        _write(folder / "goals.txt",
               "".join(g.text() + "\n" for g in state.goals)),
        _write(folder / "construction_figure.svg", construction_svg or full),
        _write(folder / "run_infos.txt", run_infos_text(state, timings)),
        _write(html_dir / "figure.svg", full),
        _write(html_dir / "index.html", index_page(state, reduced)),
        _write(html_dir / "symbols_graph.html", symbols_page(state)),
        _write(html_dir / "dependency_graph.html",
               dependency_page(state, reduced)),
    ]
    if reduced is not None:
        written.append(_write(folder / "proof_steps.txt",
                              proof_text(reduced, state.problem)))
        # the documented tree names proof_figure.txt, yet the role is a
        # figure: ship the drawing as .svg and keep .txt as its summary
        written.append(_write(folder / "proof_figure.svg",
                              figure_svg(state.diagram, state,
                                         set(_proof_points(reduced)))))
        written.append(_write(
            folder / "proof_figure.txt",
            proof_figure_text(reduced, state.diagram, state)))
    return written


def _write(path, text: str) -> Path:
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path
