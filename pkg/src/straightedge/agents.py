"""Driving a proof state: the action vocabulary and the built-in agents.

An agent is whatever decides the next action; the kernel stays the only
writer. Actions are small text records (verb plus optional argument) so
the same vocabulary serves the interactive session API, headless script
replay, and the run history that tests diff. One line per action:

    match r13
    step
    clause e = on_line e a c, on_line e b d
    check perp a d b c
    graphs
    stop

Three agents ship. ``ddarn`` repeats full saturation rounds until the
goals are proven or a round adds nothing. ``human`` executes actions
from a source, one at a time, in order; the source may be a parsed
script or a blocking queue fed by the session API. ``flemmard`` stops
without deducing anything, which exercises everything around the
reasoning (sketching, outputs, exit codes).

Budget violations are an outcome, not an exception: the run reports
what it managed before the cap. State is monotonic, so an agent can
never retract; a wrong turn costs time, not soundness.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import ParseError
from .kernel import RUNNING, ProofState, StepReport
from .statements import parse_statement_text

DDARN = "ddarn"
HUMAN = "human"
FLEMMARD = "flemmard"
AGENT_KINDS = (DDARN, HUMAN, FLEMMARD)

# verb -> needs an argument
VERBS = {
    "match": True,   # apply all current matches of one rule id
    "step": False,   # one full saturation round
    "clause": True,  # construct new points mid-run
    "check": True,   # query one statement, symbolically and numerically
    "graphs": False, # snapshot both proof graphs
    "stop": False,
}


@dataclass(frozen=True)
class AgentAction:
    """One agent decision; validated at construction, executed later."""

    verb: str
    argument: str = ""

    def __post_init__(self) -> None:
        if self.verb not in VERBS:
            raise ParseError(f"unknown action verb {self.verb!r}")
        if VERBS[self.verb] and not self.argument:
            raise ParseError(f"action {self.verb!r} needs an argument")
        if not VERBS[self.verb] and self.argument:
            raise ParseError(f"action {self.verb!r} takes no argument")

    def text(self) -> str:
        return f"{self.verb} {self.argument}".strip()


def parse_action(line: str) -> AgentAction:
    head, _, tail = line.strip().partition(" ")
    return AgentAction(head, tail.strip())


def parse_script(text: str) -> list[AgentAction]:
    """One action per line; blank lines and # comments are skipped."""
    actions = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            actions.append(parse_action(line))
    return actions


@dataclass(frozen=True)
class Budget:
    """Effort cap for one run: deduction steps plus wall-clock seconds."""

    max_rounds: int = 10000
    timeout: float | None = None


@dataclass(frozen=True)
class RunOutcome:
    """How a run ended. ``budget_exceeded`` names the cap that cut it."""

    status: str
    reports: tuple[StepReport, ...]
    budget_exceeded: str | None = None
    seconds: float = 0.0


def execute_action(action: AgentAction, state: ProofState) -> StepReport:
    """Run one action against the state and report what it did.

    Mutating verbs raise before touching anything when the action is
    invalid for this state (unknown rule id, clause that fails to
    parse), so a rejected action leaves no trace.
    """
    if action.verb == "step":
        return state.saturation_step()
    if action.verb == "match":
        return state.rule_step(action.argument)
    t0 = time.perf_counter()
    new: tuple = ()
    detail: dict | None = None
    if action.verb == "clause":
        new = tuple(d.conclusion for d in state.expand_clause(action.argument))
    elif action.verb == "check":
        stmt = parse_statement_text(action.argument)
        established, numeric = state.check_statement(stmt)
        detail = {"statement": stmt.text(),
                  "established": established,
                  "numeric": numeric}
    elif action.verb == "graphs":
        detail = {"symbols": state.symbols.to_json(),
                  "dependency": state.graph.export_full_graph()}
    return StepReport(action.text(), new, state.status,
                      time.perf_counter() - t0, detail)


def run_agent(kind: str, state: ProofState, budget: Budget | None = None,
              actions: Iterable[AgentAction] | None = None,
              on_report: Callable[[StepReport], None] | None = None,
              ) -> RunOutcome:
    """Drive the state until solved, saturated, stopped, or out of budget.

    ``actions`` is the human agent's source and is consumed lazily, so a
    generator draining a queue blocks the run exactly when no action is
    pending. ``on_report`` sees every report as it happens (logging, the
    session history).
    """
    if kind not in AGENT_KINDS:
        raise ValueError(f"unknown agent kind {kind!r}")
    budget = budget or Budget()
    t0 = time.perf_counter()
    reports: list[StepReport] = []

    def cap() -> str | None:
        if len(reports) >= budget.max_rounds:
            return "max-rounds"
        if budget.timeout is not None:
            if time.perf_counter() - t0 >= budget.timeout:
                return "timeout"
        return None

    exceeded = None

    def emit(report: StepReport) -> None:
        reports.append(report)
        if on_report is not None:
            on_report(report)

    if kind == DDARN:
        while state.status == RUNNING:
            exceeded = cap()
            if exceeded:
                break
            emit(state.saturation_step())
    elif kind == HUMAN:
        if actions is None:
            raise ValueError("human agent needs an action source")
        for action in actions:
            exceeded = cap()
            if exceeded:
                break
            emit(execute_action(action, state))
            if action.verb == "stop":
                break
    return RunOutcome(state.status, tuple(reports), exceeded,
                      time.perf_counter() - t0)
