"""Feature model core: types, text format, well-formedness checking.

A feature model is a tree of features (mandatory / optional / grouped
children) plus cardinality groups, requires/excludes cross-tree constraints,
named facets, and per-feature attribute domains.  Instances should be treated
as immutable once built; all derived lookup tables are computed eagerly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

__all__ = [
    "ALL_FACET",
    "Attribute",
    "ConstraintKind",
    "CrossConstraint",
    "Diagnostic",
    "Facet",
    "Feature",
    "FeatureModel",
    "Group",
    "ModelParseError",
    "ModelValidationError",
    "UnknownFacetError",
    "UnknownFeatureError",
    "Variability",
    "facet_members",
    "parse_model",
    "serialize_model",
    "validate_wellformed",
]

# Feature, facet, and attribute names share one token alphabet.
ID_RE = re.compile(r"[A-Za-z0-9_+$.\-]+\Z")

FORMAT_HEADER = ("fm", "1")

# Pseudo-facet that always resolves to every feature id.
ALL_FACET = "all"


class Variability(str, Enum):
    ROOT = "root"
    MANDATORY = "mandatory"
    OPTIONAL = "optional"
    GROUPED = "grouped"


class ConstraintKind(str, Enum):
    REQUIRES = "requires"
    EXCLUDES = "excludes"


class ModelParseError(Exception):
    """Raised for syntax or reference errors in the model text format."""

    def __init__(self, lineno: int, message: str):
        self.lineno = lineno
        self.message = message
        super().__init__(f"line {lineno}: {message}")


class ModelValidationError(Exception):
    """Raised when a parsed model fails well-formedness checking."""

    def __init__(self, diagnostics: list["Diagnostic"]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))


class UnknownFeatureError(KeyError):
    def __init__(self, feature_id: str):
        self.feature_id = feature_id
        super().__init__(f"unknown feature: {feature_id}")


class UnknownFacetError(KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown facet: {name}")


@dataclass(frozen=True)
class Attribute:
    """Attribute domain attached to a feature.

    kind is "int" (closed range lo..hi) or "enum" (explicit values).
    Attributes are carried through parse/serialize but never reasoned over.
    """

    name: str
    kind: str
    lo: int | None = None
    hi: int | None = None
    values: tuple[str, ...] = ()


@dataclass(frozen=True)
class Feature:
    id: str
    parent: str | None
    variability: Variability
    attributes: tuple[Attribute, ...] = ()


@dataclass(frozen=True)
class Group:
    """Cardinality group <lower..upper> over grouped children of one parent."""

    parent: str
    lower: int
    upper: int
    members: tuple[str, ...]


@dataclass(frozen=True)
class CrossConstraint:
    """requires(a, b): a -> b.  excludes(a, b): stored once, symmetric."""

    kind: ConstraintKind
    a: str
    b: str


@dataclass(frozen=True)
class Facet:
    """Named feature subset; member order follows the declaration."""

    name: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class Diagnostic:
    """One well-formedness finding: violated invariant plus offending ids."""

    code: str
    message: str
    ids: tuple[str, ...] = ()


@dataclass(eq=True)
class FeatureModel:
    """Feature tree plus groups, cross constraints, facets.

    Structural fields participate in equality (round-trip identity tests rely
    on this); the lookup tables below them are derived and ignored.
    """

    features: tuple[Feature, ...]
    groups: tuple[Group, ...] = ()
    cross_constraints: tuple[CrossConstraint, ...] = ()
    facets: tuple[Facet, ...] = ()
    root: str | None = None

    by_id: dict = field(default_factory=dict, init=False, compare=False, repr=False)
    position: dict = field(default_factory=dict, init=False, compare=False, repr=False)
    children: dict = field(default_factory=dict, init=False, compare=False, repr=False)
    mandatory_children: dict = field(default_factory=dict, init=False, compare=False, repr=False)
    groups_by_parent: dict = field(default_factory=dict, init=False, compare=False, repr=False)
    group_of: dict = field(default_factory=dict, init=False, compare=False, repr=False)
    constraints_of: dict = field(default_factory=dict, init=False, compare=False, repr=False)
    _cache: dict = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        self.features = tuple(self.features)
        self.groups = tuple(self.groups)
        self.cross_constraints = tuple(self.cross_constraints)
        self.facets = tuple(self.facets)
        # Lookup tables tolerate malformed input; validate_wellformed reports it.
        for i, f in enumerate(self.features):
            if f.id not in self.by_id:
                self.by_id[f.id] = f
                self.position[f.id] = i
            self.children.setdefault(f.id, [])
            self.mandatory_children.setdefault(f.id, [])
        for f in self.features:
            if f.parent is not None:
                self.children.setdefault(f.parent, []).append(f.id)
                if f.variability is Variability.MANDATORY:
                    self.mandatory_children.setdefault(f.parent, []).append(f.id)
        for g in self.groups:
            self.groups_by_parent.setdefault(g.parent, []).append(g)
            for mid in g.members:
                self.group_of.setdefault(mid, g)
        for c in self.cross_constraints:
            self.constraints_of.setdefault(c.a, []).append(c)
            if c.b != c.a:
                self.constraints_of.setdefault(c.b, []).append(c)

    def feature_ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.features)

    def __contains__(self, feature_id: str) -> bool:
        return feature_id in self.by_id


def facet_members(m: FeatureModel, name: str) -> set[str]:
    """Resolve a facet name to its member set; "all" covers every feature."""
    if name == ALL_FACET:
        return set(m.by_id)
    for facet in m.facets:
        if facet.name == name:
            return set(facet.members)
    raise UnknownFacetError(name)


def _check_token(lineno: int, token: str, what: str) -> str:
    if not ID_RE.match(token):
        raise ModelParseError(lineno, f"invalid {what} token: {token!r}")
    return token


def _int_token(lineno: int, token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ModelParseError(lineno, f"{what} must be an integer, got {token!r}") from None


def parse_model(text: str) -> FeatureModel:
    """Parse the line-oriented model format into a validated FeatureModel.

    Raises ModelParseError (with line number) for syntax and reference
    problems, ModelValidationError when the assembled model breaks a
    structural invariant the line checks cannot see (cycles etc.).
    """
    header_seen = False
    feature_rows: list[tuple[int, str, str | None, Variability]] = []
    group_rows: list[tuple[int, str, int, int, tuple[str, ...]]] = []
    constraint_rows: list[tuple[int, ConstraintKind, str, str]] = []
    facet_rows: list[tuple[int, str, tuple[str, ...]]] = []
    attr_rows: list[tuple[int, str, Attribute]] = []
    declared: dict[str, int] = {}
    root_line: int | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if not header_seen:
            if tuple(tokens) != FORMAT_HEADER:
                raise ModelParseError(lineno, f"expected header 'fm 1', got {line!r}")
            header_seen = True
            continue
        directive = tokens[0]
        if directive == "feature":
            if len(tokens) == 3 and tokens[2] == "root":
                fid = _check_token(lineno, tokens[1], "feature id")
                if fid in declared:
                    raise ModelParseError(lineno, f"duplicate feature id: {fid}")
                if root_line is not None:
                    raise ModelParseError(lineno, f"multiple roots: {fid}")
                declared[fid] = lineno
                root_line = lineno
                feature_rows.append((lineno, fid, None, Variability.ROOT))
            elif len(tokens) == 4:
                fid = _check_token(lineno, tokens[1], "feature id")
                parent = _check_token(lineno, tokens[2], "parent id")
                if tokens[3] not in ("mandatory", "optional", "grouped"):
                    raise ModelParseError(lineno, f"unknown variability: {tokens[3]!r}")
                if fid in declared:
                    raise ModelParseError(lineno, f"duplicate feature id: {fid}")
                declared[fid] = lineno
                feature_rows.append((lineno, fid, parent, Variability(tokens[3])))
            else:
                raise ModelParseError(lineno, "feature line needs '<id> root' or '<id> <parent> <variability>'")
        elif directive == "group":
            if len(tokens) < 6:
                raise ModelParseError(lineno, "group line needs '<parent> <n> <m> <member> <member> ...'")
            parent = _check_token(lineno, tokens[1], "group parent")
            lower = _int_token(lineno, tokens[2], "group lower bound")
            upper = _int_token(lineno, tokens[3], "group upper bound")
            members = tuple(_check_token(lineno, t, "group member") for t in tokens[4:])
            if len(set(members)) != len(members):
                raise ModelParseError(lineno, f"duplicate group member under {parent}")
            if lower < 0:
                raise ModelParseError(lineno, f"group lower bound negative: {lower}")
            if upper < 1:
                raise ModelParseError(lineno, f"group upper bound below 1: {upper}")
            if lower > upper:
                raise ModelParseError(lineno, f"group bounds inverted: {lower} > {upper}")
            if upper > len(members):
                raise ModelParseError(lineno, f"group upper bound {upper} exceeds member count {len(members)}")
            group_rows.append((lineno, parent, lower, upper, members))
        elif directive in ("requires", "excludes"):
            if len(tokens) != 3:
                raise ModelParseError(lineno, f"{directive} line needs exactly two feature ids")
            a = _check_token(lineno, tokens[1], "feature id")
            b = _check_token(lineno, tokens[2], "feature id")
            if a == b:
                raise ModelParseError(lineno, f"self-{'exclusion' if directive == 'excludes' else 'requirement'}: {a}")
            constraint_rows.append((lineno, ConstraintKind(directive), a, b))
        elif directive == "facet":
            if len(tokens) < 3:
                raise ModelParseError(lineno, "facet line needs '<name> <member> ...'")
            name = _check_token(lineno, tokens[1], "facet name")
            seen: list[str] = []
            for t in tokens[2:]:
                t = _check_token(lineno, t, "facet member")
                if t not in seen:
                    seen.append(t)
            facet_rows.append((lineno, name, tuple(seen)))
        elif directive == "attr":
            if len(tokens) < 4:
                raise ModelParseError(lineno, "attr line needs '<feature> <name> <int|enum> ...'")
            fid = _check_token(lineno, tokens[1], "feature id")
            name = _check_token(lineno, tokens[2], "attribute name")
            if tokens[3] == "int":
                if len(tokens) != 6:
                    raise ModelParseError(lineno, "int attr needs '<lo> <hi>'")
                lo = _int_token(lineno, tokens[4], "attr lower bound")
                hi = _int_token(lineno, tokens[5], "attr upper bound")
                if lo > hi:
                    raise ModelParseError(lineno, f"attr range inverted: {lo} > {hi}")
                attr_rows.append((lineno, fid, Attribute(name, "int", lo=lo, hi=hi)))
            elif tokens[3] == "enum":
                if len(tokens) < 5:
                    raise ModelParseError(lineno, "enum attr needs at least one value")
                values = tuple(_check_token(lineno, t, "enum value") for t in tokens[4:])
                attr_rows.append((lineno, fid, Attribute(name, "enum", values=values)))
            else:
                raise ModelParseError(lineno, f"unknown attr kind: {tokens[3]!r}")
        else:
            raise ModelParseError(lineno, f"unknown directive: {directive!r}")

    if not header_seen:
        raise ModelParseError(1, "missing header 'fm 1'")
    if root_line is None:
        raise ModelParseError(1, "no root feature declared")

    # Resolve references now that all declarations are known (forward
    # references are legal in the file format).
    def resolve(lineno: int, fid: str, what: str) -> str:
        if fid not in declared:
            raise ModelParseError(lineno, f"unknown {what}: {fid}")
        return fid

    attrs_by_feature: dict[str, list[Attribute]] = {}
    for lineno, fid, attr in attr_rows:
        resolve(lineno, fid, "feature in attr")
        attrs_by_feature.setdefault(fid, []).append(attr)

    features = []
    root_id = None
    for lineno, fid, parent, variability in feature_rows:
        if parent is not None:
            resolve(lineno, parent, "parent")
        else:
            root_id = fid
        features.append(Feature(fid, parent, variability, tuple(attrs_by_feature.get(fid, ()))))

    groups = []
    for lineno, parent, lower, upper, members in group_rows:
        resolve(lineno, parent, "group parent")
        for mid in members:
            resolve(lineno, mid, "group member")
        groups.append(Group(parent, lower, upper, members))

    constraints = []
    for lineno, kind, a, b in constraint_rows:
        resolve(lineno, a, "feature in constraint")
        resolve(lineno, b, "feature in constraint")
        constraints.append(CrossConstraint(kind, a, b))

    facets = []
    for lineno, name, members in facet_rows:
        for mid in members:
            resolve(lineno, mid, "facet member")
        facets.append(Facet(name, members))

    model = FeatureModel(
        features=tuple(features),
        groups=tuple(groups),
        cross_constraints=tuple(constraints),
        facets=tuple(facets),
        root=root_id,
    )
    diagnostics = validate_wellformed(model)
    if diagnostics:
        raise ModelValidationError(diagnostics)
    return model


def serialize_model(m: FeatureModel) -> str:
    """Render a model back into the text format (canonical declaration order)."""
    lines = ["fm 1"]
    for f in m.features:
        if f.variability is Variability.ROOT:
            lines.append(f"feature {f.id} root")
        else:
            lines.append(f"feature {f.id} {f.parent} {f.variability.value}")
    for g in m.groups:
        lines.append(f"group {g.parent} {g.lower} {g.upper} " + " ".join(g.members))
    for c in m.cross_constraints:
        lines.append(f"{c.kind.value} {c.a} {c.b}")
    for facet in m.facets:
        lines.append(f"facet {facet.name} " + " ".join(facet.members))
    for f in m.features:
        for a in f.attributes:
            if a.kind == "int":
                lines.append(f"attr {f.id} {a.name} int {a.lo} {a.hi}")
            else:
                lines.append(f"attr {f.id} {a.name} enum " + " ".join(a.values))
    return "\n".join(lines) + "\n"


def validate_wellformed(m: FeatureModel) -> list[Diagnostic]:
    """Check every structural invariant; total, returns findings, never raises."""
    out: list[Diagnostic] = []

    def bad(code: str, message: str, *ids: str) -> None:
        out.append(Diagnostic(code, message, tuple(ids)))

    seen: set[str] = set()
    for f in m.features:
        if f.id in seen:
            bad("duplicate-id", f"duplicate feature id {f.id}", f.id)
        seen.add(f.id)

    roots = [f for f in m.features if f.variability is Variability.ROOT]
    if not roots:
        bad("no-root", "no feature has root variability")
    elif len(roots) > 1:
        bad("multiple-roots", "multiple root features: " + ", ".join(f.id for f in roots), *[f.id for f in roots])
    if m.root is None:
        bad("no-root", "model root id is unset")
    elif m.root not in m.by_id:
        bad("unknown-root", f"root id {m.root} is not a declared feature", m.root)
    elif roots and roots[0].id != m.root:
        bad("root-mismatch", f"root id {m.root} does not match root-variability feature {roots[0].id}", m.root)

    for f in m.features:
        if f.variability is Variability.ROOT:
            if f.parent is not None:
                bad("root-has-parent", f"root {f.id} declares parent {f.parent}", f.id)
        else:
            if f.parent is None:
                bad("missing-parent", f"non-root feature {f.id} has no parent", f.id)
            elif f.parent not in m.by_id:
                bad("unknown-parent", f"feature {f.id} has unknown parent {f.parent}", f.id, f.parent)

    # Parent links must form a tree: walk up from each feature, watching for
    # cycles (the duplicate/unknown cases above already cover the rest).
    for f in m.features:
        slow: str | None = f.id
        trail: set[str] = set()
        while slow is not None and slow in m.by_id:
            if slow in trail:
                bad("parent-cycle", f"parent cycle through {slow}", slow)
                break
            trail.add(slow)
            slow = m.by_id[slow].parent

    grouped_members: set[str] = set()
    for g in m.groups:
        gid = f"{g.parent}<{g.lower}..{g.upper}>"
        if g.parent not in m.by_id:
            bad("unknown-group-parent", f"group parent {g.parent} is not declared", g.parent)
        if len(g.members) < 2:
            bad("group-too-small", f"group under {g.parent} has {len(g.members)} member(s), needs >= 2", g.parent)
        if len(set(g.members)) != len(g.members):
            bad("duplicate-group-member", f"group under {g.parent} repeats a member", g.parent)
        if g.lower < 0 or g.upper < 1:
            bad("group-bounds", f"group under {g.parent} has bounds {g.lower}..{g.upper}", g.parent)
        if g.lower > g.upper:
            bad("group-bounds", f"group bounds inverted under {g.parent}: {g.lower} > {g.upper}", g.parent)
        if g.upper > len(g.members):
            bad("group-bounds", f"group under {g.parent} allows up to {g.upper} of {len(g.members)} members", g.parent)
        for mid in g.members:
            if mid not in m.by_id:
                bad("unknown-group-member", f"group member {mid} is not declared ({gid})", mid)
                continue
            member = m.by_id[mid]
            if member.parent != g.parent:
                bad("group-parent-mismatch", f"group member {mid} has parent {member.parent}, group parent is {g.parent}", mid, g.parent)
            if member.variability is not Variability.GROUPED:
                bad("group-member-variability", f"group member {mid} has variability {member.variability.value}, expected grouped", mid)
            if mid in grouped_members:
                bad("multi-group", f"feature {mid} belongs to more than one group", mid)
            grouped_members.add(mid)

    for f in m.features:
        if f.variability is Variability.GROUPED and f.id not in grouped_members:
            bad("grouped-not-in-group", f"feature {f.id} is grouped but belongs to no group", f.id)

    for c in m.cross_constraints:
        if c.a == c.b:
            label = "self-exclusion" if c.kind is ConstraintKind.EXCLUDES else "self-requirement"
            bad("self-constraint", f"{label}: {c.a}", c.a)
        for fid in (c.a, c.b):
            if fid not in m.by_id:
                bad("unknown-constraint-ref", f"{c.kind.value} references unknown feature {fid}", fid)

    facet_names: set[str] = set()
    for facet in m.facets:
        if facet.name in facet_names:
            bad("duplicate-facet", f"facet {facet.name} declared twice", facet.name)
        facet_names.add(facet.name)
        if not facet.members:
            bad("facet-empty", f"facet {facet.name} has no members", facet.name)
        for mid in facet.members:
            if mid not in m.by_id:
                bad("unknown-facet-member", f"facet {facet.name} references unknown feature {mid}", mid)

    for f in m.features:
        for a in f.attributes:
            if a.kind == "int":
                if a.lo is None or a.hi is None:
                    bad("attr-domain", f"int attribute {f.id}.{a.name} is missing bounds", f.id)
                elif a.lo > a.hi:
                    bad("attr-domain", f"attribute {f.id}.{a.name} range inverted: {a.lo} > {a.hi}", f.id)
            elif a.kind == "enum":
                if not a.values:
                    bad("attr-domain", f"enum attribute {f.id}.{a.name} has no values", f.id)
            else:
                bad("attr-domain", f"attribute {f.id}.{a.name} has unknown kind {a.kind!r}", f.id)

    return out
