#!/usr/bin/env python3
"""Independent re-scoring of catalog entries against a query.

Reads the model file only to resolve facet membership and the catalog file
directly; weighting and similarity are recomputed here from first
principles (binary term frequency, ln(N/df) inverse document frequency,
cosine).  Imports nothing from plconf, so its output can arbitrate the
package's ranking: agreement means both derivations reach the same numbers
by different routes.

Usage:
    rank_crosscheck.py MODEL CATALOG FACET TERM [TERM ...] [--k N]

Prints one line per entry: `<config_id>\t<similarity>` in rank order
(similarity descending, id ascending), full float precision.
"""
from __future__ import annotations

import argparse
import math
import re
import sys


def read_facet(model_path: str, facet: str) -> set[str]:
    """Facet members straight from the model text; "all" means every
    declared feature id."""
    feature_ids: set[str] = set()
    facets: dict[str, set[str]] = {}
    with open(model_path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if tokens[0] == "feature" and len(tokens) >= 2:
                feature_ids.add(tokens[1])
            elif tokens[0] == "facet" and len(tokens) >= 3:
                facets.setdefault(tokens[1], set()).update(tokens[2:])
    if facet == "all":
        return feature_ids
    if facet not in facets:
        sys.exit(f"facet {facet!r} not declared in {model_path}")
    return facets[facet]


def read_catalog(catalog_path: str) -> list[tuple[str, set[str]]]:
    entries: list[tuple[str, set[str]]] = []
    with open(catalog_path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            if tokens[0] != "config" or len(tokens) < 2:
                sys.exit(f"unrecognised catalog line: {raw.rstrip()}")
            entries.append((tokens[1], set(tokens[2:])))
    return entries


def score(
    query: set[str],
    entries: list[tuple[str, set[str]]],
    members: set[str],
) -> list[tuple[str, float]]:
    n = len(entries)
    df: dict[str, int] = {}
    for _, features in entries:
        for term in features & members:
            df[term] = df.get(term, 0) + 1

    def weight(term: str, doc: set[str]) -> float:
        if term not in df or term not in doc:
            return 0.0
        return math.log(n / df[term])

    def vector(doc: set[str]) -> dict[str, float]:
        return {t: w for t in doc & members if (w := weight(t, doc)) > 0.0}

    def cosine(u: dict[str, float], v: dict[str, float]) -> float:
        nu = math.sqrt(sum(w * w for w in u.values()))
        nv = math.sqrt(sum(w * w for w in v.values()))
        if nu == 0.0 or nv == 0.0:
            return 0.0
        dot = sum(w * v[t] for t, w in u.items() if t in v)
        return min(1.0, dot / (nu * nv))

    qv = vector(query)
    ranked = [(cid, cosine(qv, vector(features))) for cid, features in entries]
    ranked.sort(key=lambda item: (-item[1], item[0]))
    return ranked


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("model")
    ap.add_argument("catalog")
    ap.add_argument("facet")
    ap.add_argument("terms", nargs="+", help="query terms (commas allowed)")
    ap.add_argument("--k", type=int, default=None, help="print only the top k")
    args = ap.parse_args(argv)

    query = {t for chunk in args.terms for t in re.split(r"[,\s]+", chunk) if t}
    members = read_facet(args.model, args.facet)
    ranked = score(query, read_catalog(args.catalog), members)
    if args.k is not None:
        ranked = ranked[: args.k]
    for cid, sim in ranked:
        print(f"{cid}\t{sim!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
