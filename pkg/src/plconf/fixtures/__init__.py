"""Bundled example models, catalogs, and replayable scenario scripts."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..engine import DecisionState, Outcome
from ..model import FeatureModel, parse_model
from ..recommend import Catalog, parse_catalog
from ..session import (
    Session,
    SessionStatus,
    apply_recommendation,
    decide,
    new_session,
    recommendations,
    retract,
)

__all__ = [
    "FIXTURE_NAMES",
    "ScenarioError",
    "ScenarioScript",
    "ScenarioStep",
    "fixture_path",
    "load_fixture",
    "parse_scenarios",
    "run_scenario",
]

FIXTURE_NAMES = ("fig1", "dell")

_DIR = Path(__file__).parent


@dataclass(frozen=True)
class ScenarioStep:
    """One scripted operation or assertion.

    op is one of decide / retract / recommend / apply / expect-state /
    expect-status; args are the operation tokens, expect the tokens after
    `->` (outcome, violations, recommendation ids, ...).
    """

    op: str
    args: tuple[str, ...]
    expect: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScenarioScript:
    name: str
    steps: tuple[ScenarioStep, ...]


class ScenarioError(AssertionError):
    def __init__(self, script: str, step: ScenarioStep, message: str):
        self.script = script
        self.step = step
        super().__init__(f"scenario {script}, step '{step.op} {' '.join(step.args)}': {message}")


def fixture_path(name: str, suffix: str) -> Path:
    path = _DIR / f"{name}.{suffix}"
    if not path.exists():
        raise KeyError(f"no fixture file {name}.{suffix}")
    return path


def parse_scenarios(text: str) -> list[ScenarioScript]:
    scripts: list[ScenarioScript] = []
    name: str | None = None
    steps: list[ScenarioStep] = []

    def flush() -> None:
        nonlocal name, steps
        if name is not None:
            scripts.append(ScenarioScript(name, tuple(steps)))
        name, steps = None, []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "scenario":
            if len(tokens) != 2:
                raise ValueError(f"line {lineno}: scenario line needs a name")
            flush()
            name = tokens[1]
            continue
        if name is None:
            raise ValueError(f"line {lineno}: step before any scenario line")
        if "->" in tokens:
            cut = tokens.index("->")
            head, expect = tokens[:cut], tuple(tokens[cut + 1:])
        else:
            head, expect = tokens, ()
        if not head:
            raise ValueError(f"line {lineno}: empty step")
        steps.append(ScenarioStep(head[0], tuple(head[1:]), expect))
    flush()
    return scripts


def load_fixture(name: str) -> tuple[FeatureModel, Catalog, list[ScenarioScript]]:
    """Load one bundled fixture by name ("fig1" or "dell")."""
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}")
    model = parse_model(fixture_path(name, "fm").read_text())
    catalog = parse_catalog(fixture_path(name, "catalog").read_text(), model)
    scripts = parse_scenarios(fixture_path(name, "scenario").read_text())
    return model, catalog, scripts


def run_scenario(
    script: ScenarioScript,
    model: FeatureModel,
    catalog: Catalog,
    facet: str | None = None,
    observer: Callable[[ScenarioStep, str], None] | None = None,
) -> Session:
    """Replay a script on a fresh session, checking every expectation.

    Raises ScenarioError at the first mismatch; returns the final session.
    """
    s = new_session(model, catalog, facet=facet)

    def note(step: ScenarioStep, outcome: str) -> None:
        if observer is not None:
            observer(step, outcome)

    for step in script.steps:
        if step.op == "decide":
            feature, choice = step.args
            result = decide(s, feature, DecisionState(choice))
            want = step.expect[0]
            got = "conflict" if result.outcome is Outcome.CONFLICT else "consistent"
            if got != want:
                raise ScenarioError(script.name, step, f"expected {want}, got {got}")
            if want == "conflict":
                texts = [v.describe() for v in result.violations]
                if list(step.expect[1:]) != texts:
                    raise ScenarioError(script.name, step, f"expected violations {list(step.expect[1:])}, got {texts}")
            note(step, got)
        elif step.op == "retract":
            retract(s, step.args[0])
            note(step, "consistent")
        elif step.op == "recommend":
            recs = recommendations(s, int(step.args[0]))
            ids = [r.config_id for r in recs]
            if ids != list(step.expect):
                raise ScenarioError(script.name, step, f"expected {list(step.expect)}, got {ids}")
            note(step, " ".join(ids) if ids else "(none)")
        elif step.op == "apply":
            apply_recommendation(s, step.args[0])
            if step.expect and step.expect[0] != s.status.value:
                raise ScenarioError(script.name, step, f"expected status {step.expect[0]}, got {s.status.value}")
            note(step, s.status.value)
        elif step.op == "expect-state":
            feature, want = step.args
            got = s.config.state(feature).value
            if got != want:
                raise ScenarioError(script.name, step, f"{feature} is {got}, expected {want}")
            note(step, got)
        elif step.op == "expect-status":
            want = step.args[0]
            if s.status is not SessionStatus(want):
                raise ScenarioError(script.name, step, f"status is {s.status.value}, expected {want}")
            note(step, s.status.value)
        else:
            raise ScenarioError(script.name, step, f"unknown scenario op {step.op!r}")
    return s
