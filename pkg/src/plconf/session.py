"""Interactive configuration sessions: decide / retract / recommend / apply
with an append-only event log.

Every mutating operation re-propagates from the full surviving user-decision
set, so the session state is always a pure function of those decisions; a
conflicting decision is logged but rolled back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

from .engine import (
    DecisionState,
    Outcome,
    PartialConfiguration,
    PropagationResult,
    Provenance,
    check_full,
    propagate,
)
from .model import (
    ALL_FACET,
    ConstraintKind,
    FeatureModel,
    ModelValidationError,
    UnknownFeatureError,
    facet_members,
    validate_wellformed,
)
from .recommend import Catalog, Recommendation, recommend_valid

__all__ = [
    "Session",
    "SessionClosedError",
    "SessionError",
    "SessionEvent",
    "SessionStatus",
    "StaleRecommendationError",
    "apply_recommendation",
    "decide",
    "export_log",
    "new_session",
    "recommendations",
    "retract",
    "suggest_next",
]

SELECTED = DecisionState.SELECTED
REJECTED = DecisionState.REJECTED
UNDECIDED = DecisionState.UNDECIDED

DEFAULT_FACET = "functional"


class SessionStatus(str, Enum):
    OPEN = "open"
    COMPLETE = "complete"
    CONFLICTED = "conflicted"


class SessionError(Exception):
    pass


class SessionClosedError(SessionError):
    pass


class StaleRecommendationError(SessionError):
    pass


# Event kind tokens; these appear verbatim in the exported log.
DECIDE = "Decide"
RETRACT = "Retract"
PROPAGATED = "Propagated"
RECOMMENDATION_SHOWN = "RecommendationShown"
RECOMMENDATION_APPLIED = "RecommendationApplied"
CONFLICT_REPORTED = "ConflictReported"


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    kind: str
    payload: tuple[str, ...]


@dataclass
class Session:
    id: str
    model: FeatureModel
    catalog: Catalog
    config: PartialConfiguration
    facet: str
    status: SessionStatus = SessionStatus.OPEN
    log: list[SessionEvent] = field(default_factory=list)
    last_shown: tuple[str, ...] = ()

    def append_event(self, kind: str, payload: tuple[str, ...]) -> None:
        self.log.append(SessionEvent(len(self.log) + 1, kind, payload))


_session_counter = itertools.count(1)


def _default_facet(model: FeatureModel) -> str:
    if any(f.name == DEFAULT_FACET for f in model.facets):
        return DEFAULT_FACET
    return ALL_FACET


def new_session(
    model: FeatureModel,
    catalog: Catalog,
    session_id: str | None = None,
    facet: str | None = None,
) -> Session:
    """Fresh session: root Selected, mandatory closure propagated, empty log
    except for the initial derivations.  An empty catalog is fine."""
    diagnostics = validate_wellformed(model)
    if diagnostics:
        raise ModelValidationError(diagnostics)
    if facet is None:
        facet = _default_facet(model)
    else:
        facet_members(model, facet)  # raises UnknownFacetError early
    config = PartialConfiguration(model)
    result = propagate(config)
    s = Session(
        id=session_id if session_id is not None else f"s{next(_session_counter)}",
        model=model,
        catalog=catalog,
        config=config,
        facet=facet,
    )
    if result.derived:
        s.append_event(PROPAGATED, _delta_tokens(result.derived))
    _update_status(s, result.outcome)
    return s


def _delta_tokens(delta: tuple[tuple[str, DecisionState], ...]) -> tuple[str, ...]:
    return tuple(f"{fid}={st.value}" for fid, st in delta)


def _diff(old: dict[str, DecisionState], new: dict[str, DecisionState]) -> tuple[tuple[str, DecisionState], ...]:
    return tuple((fid, new[fid]) for fid in old if new[fid] is not old[fid])


def _update_status(s: Session, last_outcome: Outcome) -> None:
    if last_outcome is Outcome.CONFLICT:
        s.status = SessionStatus.CONFLICTED
    elif s.config.is_complete() and not check_full(s.model, s.config.selected()):
        s.status = SessionStatus.COMPLETE
    else:
        s.status = SessionStatus.OPEN


def _adopt(s: Session, candidate: PartialConfiguration, old_map: dict[str, DecisionState]) -> tuple[tuple[str, DecisionState], ...]:
    s.config = candidate
    return _diff(old_map, candidate.state_map())


def decide(s: Session, feature: str, choice: DecisionState) -> PropagationResult:
    """Record a user decision and re-propagate from the full user-decision
    set.  On conflict the decision is logged with its violations but the
    state rolls back to the pre-decision fixpoint."""
    if s.status is not SessionStatus.OPEN:
        raise SessionClosedError(f"session is {s.status.value}; decisions need an open session")
    if feature not in s.model.by_id:
        raise UnknownFeatureError(feature)
    if feature == s.model.root:
        raise SessionError("the root feature is fixed and cannot be decided")
    if choice not in (SELECTED, REJECTED):
        raise SessionError(f"choice must be selected or rejected, got {choice}")

    old_map = s.config.state_map()
    users = s.config.user_decisions()
    users[feature] = choice
    candidate = PartialConfiguration(s.model, user=users)
    result = propagate(candidate)
    s.append_event(DECIDE, (feature, choice.value))
    if result.outcome is Outcome.CONFLICT:
        s.append_event(CONFLICT_REPORTED, tuple(v.describe() for v in result.violations))
        _update_status(s, Outcome.CONFLICT)
        return PropagationResult(Outcome.CONFLICT, (), result.violations)
    delta = _adopt(s, candidate, old_map)
    # The user's own decision is reported separately by callers; the delta
    # holds the downstream changes.
    delta = tuple((fid, st) for fid, st in delta if fid != feature)
    if delta:
        s.append_event(PROPAGATED, _delta_tokens(delta))
    _update_status(s, Outcome.CONSISTENT)
    return PropagationResult(Outcome.CONSISTENT, delta, ())


def retract(s: Session, feature: str) -> PropagationResult:
    """Drop one user decision and re-propagate from the survivors.  Equivalent
    to replaying the surviving decisions onto a fresh session."""
    if feature not in s.model.by_id:
        raise UnknownFeatureError(feature)
    if s.config.provenance(feature) is not Provenance.USER:
        raise SessionError(f"{feature} is not a user decision")
    old_map = s.config.state_map()
    users = s.config.user_decisions()
    del users[feature]
    candidate = PartialConfiguration(s.model, user=users)
    result = propagate(candidate)
    if result.outcome is Outcome.CONFLICT:  # pragma: no cover - shrinking a consistent set cannot conflict
        raise SessionError("retraction produced a conflict; model state is inconsistent")
    delta = _adopt(s, candidate, old_map)
    s.append_event(RETRACT, (feature,))
    if delta:
        s.append_event(PROPAGATED, _delta_tokens(delta))
    _update_status(s, Outcome.CONSISTENT)
    return PropagationResult(Outcome.CONSISTENT, delta, ())


def _constraint_unresolved(s: Session, c, state) -> bool:
    if c.kind is ConstraintKind.REQUIRES:
        return not (state(c.b) is SELECTED or state(c.a) is REJECTED)
    return not (state(c.a) is REJECTED or state(c.b) is REJECTED)


def suggest_next(s: Session) -> str | None:
    """The Undecided feature touching the most still-unresolved constraints
    (group membership plus requires/excludes incidences); declaration order
    breaks ties.  None when nothing is Undecided."""
    state = s.config.state
    best: str | None = None
    best_score = -1
    for f in s.model.features:
        if state(f.id) is not UNDECIDED:
            continue
        score = 0
        g = s.model.group_of.get(f.id)
        if g is not None and state(g.parent) is not REJECTED:
            score += 1
        for c in s.model.constraints_of.get(f.id, ()):
            if _constraint_unresolved(s, c, state):
                score += 1
        if score > best_score:
            best, best_score = f.id, score
    return best


def recommendations(s: Session, k: int) -> list[Recommendation]:
    """Rank the catalog against the current selection restricted to the
    session facet; only valid entries are returned.  Allowed while Open or
    Conflicted; the shown ids are logged and remembered for apply."""
    if s.status is SessionStatus.COMPLETE:
        raise SessionClosedError("session is complete; nothing left to recommend")
    if not s.catalog.entries:
        s.last_shown = ()
        s.append_event(RECOMMENDATION_SHOWN, ())
        return []
    query = s.config.selected() & facet_members(s.model, s.facet)
    recs = recommend_valid(query, s.catalog, s.facet, s.model, k)
    s.last_shown = tuple(r.config_id for r in recs)
    s.append_event(RECOMMENDATION_SHOWN, s.last_shown)
    return recs


def apply_recommendation(s: Session, config_id: str) -> PropagationResult:
    """Adopt a recommended configuration wholesale: Selected on its features,
    Rejected everywhere else, then re-propagate (must stay consistent).  The
    session becomes Complete."""
    if config_id not in s.last_shown:
        raise StaleRecommendationError(f"{config_id} was not in the last shown recommendations")
    entry = s.catalog.get(config_id)
    violations = check_full(s.model, entry.features)
    if violations:
        raise StaleRecommendationError(f"{config_id} no longer checks valid")
    old_map = s.config.state_map()
    users = {}
    for f in s.model.features:
        if f.id == s.model.root:
            continue
        users[f.id] = SELECTED if f.id in entry.features else REJECTED
    candidate = PartialConfiguration(s.model, user=users)
    result = propagate(candidate)
    if result.outcome is Outcome.CONFLICT:  # pragma: no cover - a valid entry propagates cleanly
        raise SessionError(f"applying {config_id} conflicted despite passing validation")
    delta = _adopt(s, candidate, old_map)
    s.append_event(RECOMMENDATION_APPLIED, (config_id,))
    if delta:
        s.append_event(PROPAGATED, _delta_tokens(delta))
    _update_status(s, Outcome.CONSISTENT)
    return PropagationResult(Outcome.CONSISTENT, delta, ())


def export_log(s: Session) -> str:
    """One line per event: `<seq> <kind> <payload tokens>`."""
    lines = []
    for e in s.log:
        line = f"{e.seq} {e.kind}"
        if e.payload:
            line += " " + " ".join(e.payload)
        lines.append(line)
    return "\n".join(lines) + ("\n" if lines else "")
