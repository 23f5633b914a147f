"""Decision engine: three-valued configuration state, constraint checking,
unit propagation to a least fixpoint, exhaustive enumeration, backbone.

Propagation is sound but deliberately incomplete: it only applies local unit
rules, so it never derives a wrong state (checked against the enumeration
backbone in the test suite) but may leave some forced features Undecided.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

from .model import (
    ConstraintKind,
    FeatureModel,
    Group,
    UnknownFeatureError,
    Variability,
)

__all__ = [
    "Backbone",
    "DecisionState",
    "Outcome",
    "PartialConfiguration",
    "PropagationResult",
    "Provenance",
    "Violation",
    "backbone",
    "check_full",
    "decided_violations",
    "enumerate_valid",
    "is_complete",
    "is_valid",
    "propagate",
]


class DecisionState(str, Enum):
    SELECTED = "selected"
    REJECTED = "rejected"
    UNDECIDED = "undecided"


class Provenance(str, Enum):
    USER = "user"
    PROPAGATED = "propagated"
    ROOT = "root"


class Outcome(str, Enum):
    CONSISTENT = "consistent"
    CONFLICT = "conflict"


class Backbone(str, Enum):
    FORCED_SELECTED = "forced-selected"
    FORCED_REJECTED = "forced-rejected"
    FREE = "free"
    NO_COMPLETION = "no-completion"


SELECTED = DecisionState.SELECTED
REJECTED = DecisionState.REJECTED
UNDECIDED = DecisionState.UNDECIDED


@dataclass(frozen=True)
class Violation:
    """One violated relationship: kind, participating ids, and the decided
    states that jointly witness the violation.  Undecided features are never
    cited."""

    kind: str
    features: tuple[str, ...]
    witness: tuple[tuple[str, DecisionState], ...]
    text: str

    def describe(self) -> str:
        return self.text


def _v(kind: str, features: tuple[str, ...], witness: tuple[tuple[str, DecisionState], ...], text: str) -> Violation:
    return Violation(kind, features, witness, text)


def decided_violations(m: FeatureModel, state: Mapping[str, DecisionState]) -> list[Violation]:
    """Constraints already violated outright by the decided states in `state`.

    Emission order is fixed for reproducibility: root, parent links, mandatory
    links (both by child declaration order), then cross constraints and groups
    in declaration order.  A partial state map is fine; features missing from
    it count as Undecided and are never cited.
    """
    get = lambda fid: state.get(fid, UNDECIDED)  # noqa: E731
    out: list[Violation] = []

    if m.root is not None and get(m.root) is REJECTED:
        out.append(_v("root", (m.root,), ((m.root, REJECTED),), f"root({m.root})"))

    for f in m.features:
        if f.parent is None:
            continue
        if get(f.id) is SELECTED and get(f.parent) is REJECTED:
            out.append(_v(
                "parent", (f.id, f.parent),
                ((f.id, SELECTED), (f.parent, REJECTED)),
                f"parent({f.id},{f.parent})",
            ))

    for f in m.features:
        if f.variability is not Variability.MANDATORY or f.parent is None:
            continue
        if get(f.parent) is SELECTED and get(f.id) is REJECTED:
            out.append(_v(
                "mandatory", (f.parent, f.id),
                ((f.parent, SELECTED), (f.id, REJECTED)),
                f"mandatory({f.parent},{f.id})",
            ))

    for c in m.cross_constraints:
        if c.kind is ConstraintKind.REQUIRES:
            if get(c.a) is SELECTED and get(c.b) is REJECTED:
                out.append(_v(
                    "requires", (c.a, c.b),
                    ((c.a, SELECTED), (c.b, REJECTED)),
                    f"requires({c.a},{c.b})",
                ))
        else:
            if get(c.a) is SELECTED and get(c.b) is SELECTED:
                out.append(_v(
                    "excludes", (c.a, c.b),
                    ((c.a, SELECTED), (c.b, SELECTED)),
                    f"excludes({c.a},{c.b})",
                ))

    for g in m.groups:
        if get(g.parent) is not SELECTED:
            # A rejected parent with selected members surfaces as parent-link
            # violations above; nothing extra to report here.
            continue
        sel = [mid for mid in g.members if get(mid) is SELECTED]
        und = [mid for mid in g.members if get(mid) is UNDECIDED]
        text = f"group({g.parent},{g.lower}..{g.upper})"
        if len(sel) > g.upper:
            witness = ((g.parent, SELECTED),) + tuple((mid, SELECTED) for mid in sel)
            out.append(_v("group", (g.parent,) + g.members, witness, text))
        elif len(sel) + len(und) < g.lower:
            rej = [mid for mid in g.members if get(mid) is REJECTED]
            witness = ((g.parent, SELECTED),) + tuple((mid, REJECTED) for mid in rej)
            out.append(_v("group", (g.parent,) + g.members, witness, text))

    return out


def check_full(m: FeatureModel, selected: Iterable[str]) -> list[Violation]:
    """Validate a full configuration: `selected` is the selected set, every
    other feature counts as Rejected.  Returns all violations (empty = valid)."""
    chosen = set(selected)
    for fid in chosen:
        if fid not in m.by_id:
            raise UnknownFeatureError(fid)
    state = {f.id: (SELECTED if f.id in chosen else REJECTED) for f in m.features}
    return decided_violations(m, state)


def is_valid(m: FeatureModel, selected: Iterable[str]) -> bool:
    """check_full(m, selected) == [] without building the violation list."""
    return _is_valid_mask(m, _mask_of(m, selected))


def _mask_tables(m: FeatureModel) -> dict:
    """Integer-mask tables for the full-configuration checks (cached)."""
    tables = m._cache.get("mask_tables")
    if tables is not None:
        return tables
    pos = m.position
    parent_pairs = []
    mandatory_pairs = []
    for f in m.features:
        if f.parent is None or f.parent not in pos:
            continue
        parent_pairs.append((1 << pos[f.id], 1 << pos[f.parent]))
        if f.variability is Variability.MANDATORY:
            mandatory_pairs.append((1 << pos[f.parent], 1 << pos[f.id]))
    requires_pairs = []
    excludes_pairs = []
    for c in m.cross_constraints:
        if c.a not in pos or c.b not in pos:
            continue
        if c.kind is ConstraintKind.REQUIRES:
            requires_pairs.append((1 << pos[c.a], 1 << pos[c.b]))
        else:
            excludes_pairs.append((1 << pos[c.a], 1 << pos[c.b]))
    group_rows = []
    for g in m.groups:
        if g.parent not in pos:
            continue
        member_mask = 0
        for mid in g.members:
            if mid in pos:
                member_mask |= 1 << pos[mid]
        group_rows.append((1 << pos[g.parent], member_mask, g.lower, g.upper))
    tables = {
        "root_bit": 1 << pos[m.root] if m.root in pos else 0,
        "parent_pairs": parent_pairs,
        "mandatory_pairs": mandatory_pairs,
        "requires_pairs": requires_pairs,
        "excludes_pairs": excludes_pairs,
        "group_rows": group_rows,
    }
    m._cache["mask_tables"] = tables
    return tables


def _mask_of(m: FeatureModel, selected: Iterable[str]) -> int:
    mask = 0
    pos = m.position
    for fid in selected:
        if fid not in pos:
            raise UnknownFeatureError(fid)
        mask |= 1 << pos[fid]
    return mask


def _is_valid_mask(m: FeatureModel, mask: int) -> bool:
    t = _mask_tables(m)
    if not mask & t["root_bit"]:
        return False
    for child_bit, parent_bit in t["parent_pairs"]:
        if mask & child_bit and not mask & parent_bit:
            return False
    for parent_bit, child_bit in t["mandatory_pairs"]:
        if mask & parent_bit and not mask & child_bit:
            return False
    for a_bit, b_bit in t["requires_pairs"]:
        if mask & a_bit and not mask & b_bit:
            return False
    for a_bit, b_bit in t["excludes_pairs"]:
        if mask & a_bit and mask & b_bit:
            return False
    for parent_bit, member_mask, lower, upper in t["group_rows"]:
        if mask & parent_bit:
            n = (mask & member_mask).bit_count()
            if n < lower or n > upper:
                return False
    return True


class PartialConfiguration:
    """Three-valued decision state over one model.  Single writer at a time;
    hand off between threads only at operation boundaries."""

    def __init__(self, model: FeatureModel, user: Mapping[str, DecisionState] | None = None):
        self.model = model
        self._state: dict[str, DecisionState] = {f.id: UNDECIDED for f in model.features}
        self._prov: dict[str, Provenance] = {}
        if model.root in self._state:
            self._state[model.root] = SELECTED
            self._prov[model.root] = Provenance.ROOT
        if user:
            for fid, st in user.items():
                self.set_user(fid, st)

    def state(self, feature_id: str) -> DecisionState:
        if feature_id not in self._state:
            raise UnknownFeatureError(feature_id)
        return self._state[feature_id]

    def provenance(self, feature_id: str) -> Provenance | None:
        if feature_id not in self._state:
            raise UnknownFeatureError(feature_id)
        return self._prov.get(feature_id)

    def state_map(self) -> dict[str, DecisionState]:
        return dict(self._state)

    def user_decisions(self) -> dict[str, DecisionState]:
        return {fid: self._state[fid] for fid, p in self._prov.items() if p is Provenance.USER}

    def selected(self) -> set[str]:
        return {fid for fid, st in self._state.items() if st is SELECTED}

    def set_user(self, feature_id: str, state: DecisionState) -> None:
        """Record a user decision (Selected or Rejected); overwrites any
        previous state of the feature.  The root is fixed and cannot be
        decided."""
        if feature_id not in self._state:
            raise UnknownFeatureError(feature_id)
        if state not in (SELECTED, REJECTED):
            raise ValueError(f"user decision must be selected or rejected, got {state}")
        if feature_id == self.model.root:
            raise ValueError("the root feature is fixed and cannot be decided")
        self._state[feature_id] = state
        self._prov[feature_id] = Provenance.USER

    def clear_user(self, feature_id: str) -> None:
        if feature_id not in self._state:
            raise UnknownFeatureError(feature_id)
        if self._prov.get(feature_id) is not Provenance.USER:
            raise ValueError(f"{feature_id} is not a user decision")
        self._state[feature_id] = UNDECIDED
        del self._prov[feature_id]

    def reset_propagated(self) -> None:
        for fid, p in list(self._prov.items()):
            if p is Provenance.PROPAGATED:
                self._state[fid] = UNDECIDED
                del self._prov[fid]

    def is_complete(self) -> bool:
        return UNDECIDED not in self._state.values()

    def clone(self) -> "PartialConfiguration":
        twin = PartialConfiguration.__new__(PartialConfiguration)
        twin.model = self.model
        twin._state = dict(self._state)
        twin._prov = dict(self._prov)
        return twin


def is_complete(config: PartialConfiguration) -> bool:
    return config.is_complete()


@dataclass(frozen=True)
class PropagationResult:
    """Outcome of one propagation (or of a session-level operation).

    `derived` lists state changes in derivation order.  From propagate()
    proper every entry is a newly Propagated state; session operations reuse
    the type for their delta, which may include reversions to Undecided.
    `violations` is non-empty exactly when outcome is Conflict.
    """

    outcome: Outcome
    derived: tuple[tuple[str, DecisionState], ...] = ()
    violations: tuple[Violation, ...] = ()


class _ConflictSignal(Exception):
    pass


def propagate(config: PartialConfiguration) -> PropagationResult:
    """Extend `config` to the least fixpoint of the unit rules.

    On success the derived states are applied to `config` with Propagated
    provenance and listed in the result.  On Conflict `config` is left
    untouched and the result carries every constraint violated outright by
    the states derived up to the contradiction.
    """
    m = config.model
    state = dict(config._state)
    changed: list[str] = []
    queue: deque[str] = deque(fid for fid in (f.id for f in m.features) if state[fid] is not UNDECIDED)

    def assign(fid: str, new: DecisionState) -> None:
        cur = state[fid]
        if cur is new:
            return
        if cur is not UNDECIDED:
            raise _ConflictSignal
        state[fid] = new
        changed.append(fid)
        queue.append(fid)

    def eval_group(g: Group) -> None:
        if state.get(g.parent) is not SELECTED:
            return
        sel = 0
        und: list[str] = []
        for mid in g.members:
            st = state[mid]
            if st is SELECTED:
                sel += 1
            elif st is UNDECIDED:
                und.append(mid)
        if sel > g.upper or sel + len(und) < g.lower:
            raise _ConflictSignal
        if und:
            if sel == g.upper:
                for mid in und:
                    assign(mid, REJECTED)
            elif sel + len(und) == g.lower:
                for mid in und:
                    assign(mid, SELECTED)

    try:
        while queue:
            fid = queue.popleft()
            st = state[fid]
            feature = m.by_id[fid]
            if st is SELECTED:
                if feature.parent is not None:
                    assign(feature.parent, SELECTED)
                for cid in m.mandatory_children.get(fid, ()):
                    assign(cid, SELECTED)
                for c in m.constraints_of.get(fid, ()):
                    if c.kind is ConstraintKind.REQUIRES:
                        if c.a == fid:
                            assign(c.b, SELECTED)
                    else:
                        assign(c.b if c.a == fid else c.a, REJECTED)
                for g in m.groups_by_parent.get(fid, ()):
                    eval_group(g)
                if fid in m.group_of:
                    eval_group(m.group_of[fid])
            elif st is REJECTED:
                for cid in m.children.get(fid, ()):
                    assign(cid, REJECTED)
                if feature.variability is Variability.MANDATORY and feature.parent is not None:
                    assign(feature.parent, REJECTED)
                for c in m.constraints_of.get(fid, ()):
                    if c.kind is ConstraintKind.REQUIRES and c.b == fid:
                        assign(c.a, REJECTED)
                if fid in m.group_of:
                    eval_group(m.group_of[fid])
    except _ConflictSignal:
        violations = decided_violations(m, state)
        return PropagationResult(Outcome.CONFLICT, (), tuple(violations))

    derived = tuple((fid, state[fid]) for fid in changed)
    for fid, st in derived:
        config._state[fid] = st
        config._prov[fid] = Provenance.PROPAGATED
    return PropagationResult(Outcome.CONSISTENT, derived, ())


def enumerate_valid(m: FeatureModel, limit: int | None = None) -> list[frozenset[str]]:
    """All full configurations accepted by check_full, exhaustively.

    Exhaustive search over assignments in declaration order with pruning on
    constraints already violated by the decided prefix (such violations
    persist under any completion, so no valid configuration is lost).  The
    result is sorted ascending by selection mask with the first-declared
    feature as the least significant bit; `limit` truncates that order.
    Intended for desk-scale models.
    """
    n = len(m.features)
    if n == 0 or (limit is not None and limit <= 0):
        return []
    ids = [f.id for f in m.features]
    pos = m.position
    root_pos = pos.get(m.root, -1)

    # Pairwise checks fire at whichever participant is assigned later:
    # (kind, a_pos, b_pos) where the kind names the violating decided pattern.
    checks: dict[int, list[tuple[str, int, int]]] = {i: [] for i in range(n)}
    for f in m.features:
        if f.parent is None or f.parent not in pos:
            continue
        c_pos, p_pos = pos[f.id], pos[f.parent]
        checks[max(c_pos, p_pos)].append(("parent", c_pos, p_pos))
        if f.variability is Variability.MANDATORY:
            checks[max(c_pos, p_pos)].append(("mandatory", p_pos, c_pos))
    for c in m.cross_constraints:
        if c.a not in pos or c.b not in pos:
            continue
        a_pos, b_pos = pos[c.a], pos[c.b]
        kind = "requires" if c.kind is ConstraintKind.REQUIRES else "excludes"
        checks[max(a_pos, b_pos)].append((kind, a_pos, b_pos))

    # Group bookkeeping: member positions plus the parent position; bounds are
    # re-examined whenever a participant is assigned.
    group_info = []
    for g in m.groups:
        if g.parent not in pos:
            continue
        member_pos = [pos[mid] for mid in g.members if mid in pos]
        group_info.append((pos[g.parent], member_pos, g.lower, g.upper))
    groups_at: dict[int, list[int]] = {i: [] for i in range(n)}
    for gi, (p_pos, member_pos, _, _) in enumerate(group_info):
        groups_at[p_pos].append(gi)
        for mp in member_pos:
            groups_at[mp].append(gi)

    TRUE, FALSE, UNSET = 1, 0, -1
    val = [UNSET] * n
    sel_count = [0] * len(group_info)
    und_count = [len(gmembers) for _, gmembers, _, _ in group_info]
    results: list[int] = []

    def group_ok(gi: int) -> bool:
        p_pos, _, lower, upper = group_info[gi]
        if val[p_pos] != TRUE:
            return True
        if sel_count[gi] > upper:
            return False
        if sel_count[gi] + und_count[gi] < lower:
            return False
        return True

    def consistent_after(i: int) -> bool:
        if i == root_pos and val[i] == FALSE:
            return False
        for kind, a_pos, b_pos in checks[i]:
            if kind == "parent":
                if val[a_pos] == TRUE and val[b_pos] == FALSE:
                    return False
            elif kind == "mandatory":
                if val[a_pos] == TRUE and val[b_pos] == FALSE:
                    return False
            elif kind == "requires":
                if val[a_pos] == TRUE and val[b_pos] == FALSE:
                    return False
            else:
                if val[a_pos] == TRUE and val[b_pos] == TRUE:
                    return False
        for gi in groups_at[i]:
            if not group_ok(gi):
                return False
        return True

    def walk(i: int, mask: int) -> None:
        if i == n:
            results.append(mask)
            return
        member_groups = [gi for gi in groups_at[i] if i != group_info[gi][0]]
        for choice in (FALSE, TRUE):
            val[i] = choice
            for gi in member_groups:
                und_count[gi] -= 1
                if choice == TRUE:
                    sel_count[gi] += 1
            if consistent_after(i):
                walk(i + 1, mask | (1 << i) if choice == TRUE else mask)
            for gi in member_groups:
                und_count[gi] += 1
                if choice == TRUE:
                    sel_count[gi] -= 1
            val[i] = UNSET

    walk(0, 0)
    results.sort()
    out: list[frozenset[str]] = []
    for mask in results:
        chosen = frozenset(ids[i] for i in range(n) if mask & (1 << i))
        if not check_full(m, chosen):
            out.append(chosen)
            if limit is not None and len(out) >= limit:
                break
    return out


def backbone(m: FeatureModel, config: PartialConfiguration) -> dict[str, Backbone]:
    """Per-feature verdicts from enumerating every valid full completion
    consistent with the configuration's user decisions."""
    user = config.user_decisions()
    completions = [
        s for s in enumerate_valid(m)
        if all((fid in s) == (st is SELECTED) for fid, st in user.items())
    ]
    if not completions:
        return {f.id: Backbone.NO_COMPLETION for f in m.features}
    out: dict[str, Backbone] = {}
    for f in m.features:
        in_all = all(f.id in s for s in completions)
        in_none = all(f.id not in s for s in completions)
        if in_all:
            out[f.id] = Backbone.FORCED_SELECTED
        elif in_none:
            out[f.id] = Backbone.FORCED_REJECTED
        else:
            out[f.id] = Backbone.FREE
    return out
