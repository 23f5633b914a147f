"""Content-based recommendation over a catalog of full configurations.

Configurations are documents, feature ids are terms, term frequency is 0/1
(a configuration either contains a feature or it does not), so a weight is
Tf * ln(N / df).  Similarity is plain cosine; ranking is invariant under the
logarithm base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import Violation, check_full
from .model import FeatureModel, facet_members

__all__ = [
    "Catalog",
    "CatalogEntry",
    "CatalogError",
    "Recommendation",
    "TermVector",
    "VectorIndex",
    "build_index",
    "cosine",
    "parse_catalog",
    "rank",
    "recommend_valid",
    "tf_idf_weight",
    "vectorize",
]


class CatalogError(Exception):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    config_id: str
    features: frozenset[str]


@dataclass
class Catalog:
    """Named full configurations over one model; ids unique, features known."""

    model: FeatureModel
    entries: tuple[CatalogEntry, ...]

    def __post_init__(self) -> None:
        self.entries = tuple(self.entries)
        seen: set[str] = set()
        for e in self.entries:
            if e.config_id in seen:
                raise CatalogError(f"duplicate config id: {e.config_id}")
            seen.add(e.config_id)
            for fid in e.features:
                if fid not in self.model.by_id:
                    raise CatalogError(f"config {e.config_id} references unknown feature {fid}")

    def get(self, config_id: str) -> CatalogEntry:
        for e in self.entries:
            if e.config_id == config_id:
                return e
        raise CatalogError(f"unknown config id: {config_id}")


def parse_catalog(text: str, model: FeatureModel) -> Catalog:
    """Parse `config <id> <feature> ...` lines; `#` comments, blanks ignored."""
    entries: list[CatalogEntry] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] != "config" or len(tokens) < 3:
            raise CatalogError(f"line {lineno}: expected 'config <id> <feature> ...', got {line!r}")
        entries.append(CatalogEntry(tokens[1], frozenset(tokens[2:])))
    return Catalog(model, tuple(entries))


@dataclass(frozen=True)
class VectorIndex:
    """Document-frequency index for one facet: df(t) over n_docs entries.
    The vocabulary is already facet-restricted, so membership in `df` is the
    facet membership test for weighting purposes."""

    facet: str
    n_docs: int
    df: dict[str, int]


@dataclass(frozen=True)
class TermVector:
    """Sparse non-negative term weights; zero weights are never stored."""

    weights: dict[str, float]

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights.values()))


def build_index(cat: Catalog, facet: str) -> VectorIndex:
    """Count document frequencies over the catalog, restricted to the facet."""
    if not cat.entries:
        raise CatalogError("cannot index an empty catalog")
    members = facet_members(cat.model, facet)
    df: dict[str, int] = {}
    for e in cat.entries:
        for t in e.features & members:
            df[t] = df.get(t, 0) + 1
    return VectorIndex(facet=facet, n_docs=len(cat.entries), df=df)


def tf_idf_weight(term: str, features: frozenset[str] | set[str], idx: VectorIndex) -> float:
    """Tf * ln(N / df): Tf is 1 when the document contains the term, else 0;
    terms outside the index vocabulary weigh 0."""
    if term not in idx.df or term not in features:
        return 0.0
    return math.log(idx.n_docs / idx.df[term])


def vectorize(features: frozenset[str] | set[str], idx: VectorIndex) -> TermVector:
    """Weigh every vocabulary term the feature set contains; zeros omitted."""
    weights: dict[str, float] = {}
    for t in features:
        w = tf_idf_weight(t, features, idx)
        if w > 0.0:
            weights[t] = w
    return TermVector(weights)


def cosine(u: TermVector, v: TermVector) -> float:
    """Cosine similarity; 0 when either vector has zero norm."""
    nu, nv = u.norm(), v.norm()
    if nu == 0.0 or nv == 0.0:
        return 0.0
    dot = 0.0
    small, large = (u.weights, v.weights) if len(u.weights) <= len(v.weights) else (v.weights, u.weights)
    for t, w in small.items():
        other = large.get(t)
        if other is not None:
            dot += w * other
    return min(1.0, dot / (nu * nv))


def rank(query: frozenset[str] | set[str], cat: Catalog, facet: str) -> list[tuple[str, float]]:
    """Every catalog entry scored against the query under one shared index,
    sorted by similarity descending, ties broken by config id ascending."""
    idx = build_index(cat, facet)
    qv = vectorize(set(query), idx)
    scored = [(e.config_id, cosine(qv, vectorize(e.features, idx))) for e in cat.entries]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored


@dataclass(frozen=True)
class Recommendation:
    config_id: str
    similarity: float
    valid: bool
    violations: tuple[Violation, ...]
    features: frozenset[str]


def recommend_valid(
    query: frozenset[str] | set[str],
    cat: Catalog,
    facet: str,
    m: FeatureModel,
    k: int,
    include_invalid: bool = False,
) -> list[Recommendation]:
    """Top-k catalog entries by similarity, keeping only entries that pass
    check_full.  No valid entry is an empty result, not an error.  With
    include_invalid the failing entries are kept too (marked, with their
    violations) for diagnostics."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    entries = {e.config_id: e for e in cat.entries}
    out: list[Recommendation] = []
    kept_valid = 0
    for config_id, sim in rank(query, cat, facet):
        entry = entries[config_id]
        violations = tuple(check_full(m, entry.features))
        if not violations:
            if kept_valid < k:
                out.append(Recommendation(config_id, sim, True, (), entry.features))
                kept_valid += 1
        elif include_invalid:
            out.append(Recommendation(config_id, sim, False, violations, entry.features))
    return out
