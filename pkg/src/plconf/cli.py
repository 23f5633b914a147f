"""Command line front end.

Exit codes: 0 success, 1 invalid configuration, 2 usage or parse errors
(argparse's own convention for usage problems).
"""

from __future__ import annotations

import argparse
import os
import re
import sys

from .engine import check_full, enumerate_valid
from .model import (
    ALL_FACET,
    FeatureModel,
    ModelParseError,
    ModelValidationError,
    UnknownFacetError,
    UnknownFeatureError,
    parse_model,
)
from .recommend import Catalog, CatalogError, parse_catalog, recommend_valid

PORT_ENV_VAR = "PLCONF_PORT"

_SPLIT_RE = re.compile(r"[,\s]+")


class _UsageError(Exception):
    pass


def _load_model(path: str) -> FeatureModel:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_model(fh.read())
    except OSError as exc:
        raise _UsageError(f"cannot read model {path}: {exc}") from exc
    except (ModelParseError, ModelValidationError) as exc:
        raise _UsageError(f"model {path}: {exc}") from exc


def _load_catalog(path: str, model: FeatureModel) -> Catalog:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_catalog(fh.read(), model)
    except OSError as exc:
        raise _UsageError(f"cannot read catalog {path}: {exc}") from exc
    except CatalogError as exc:
        raise _UsageError(f"catalog {path}: {exc}") from exc


def _split_ids(literal: str) -> list[str]:
    return [t for t in _SPLIT_RE.split(literal.strip()) if t]


def _default_facet(model: FeatureModel) -> str:
    if any(f.name == "functional" for f in model.facets):
        return "functional"
    return ALL_FACET


def cmd_validate(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    selected = _split_ids(args.config)
    try:
        violations = check_full(model, selected)
    except UnknownFeatureError as exc:
        raise _UsageError(str(exc)) from exc
    if not violations:
        print("VALID")
        return 0
    print(f"INVALID: {len(violations)} violation(s)")
    for v in violations:
        print(f"  {v.describe()}")
    return 1


def cmd_enumerate(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    order = {fid: i for i, fid in enumerate(model.feature_ids())}
    for config in enumerate_valid(model, limit=args.limit):
        print(" ".join(sorted(config, key=order.__getitem__)))
    return 0


def cmd_recommend(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    catalog = _load_catalog(args.catalog, model)
    query = set(_split_ids(args.query))
    for fid in query:
        if fid not in model.by_id:
            raise _UsageError(f"unknown feature in query: {fid}")
    facet = args.facet if args.facet is not None else _default_facet(model)
    try:
        recs = recommend_valid(query, catalog, facet, model, args.top_k, include_invalid=args.show_invalid)
    except (CatalogError, UnknownFacetError, ValueError) as exc:
        raise _UsageError(str(exc)) from exc
    for r in recs:
        verdict = "valid" if r.valid else "invalid " + " ".join(v.describe() for v in r.violations)
        print(f"{r.config_id}\t{r.similarity:.6f}\t{verdict}")
    return 0


def cmd_check_catalog(args: argparse.Namespace) -> int:
    model = _load_model(args.model)
    catalog = _load_catalog(args.catalog, model)
    bad = 0
    for entry in catalog.entries:
        violations = check_full(model, entry.features)
        if violations:
            bad += 1
            print(f"invalid {entry.config_id} " + " ".join(v.describe() for v in violations))
        else:
            print(f"ok {entry.config_id}")
    return 1 if bad else 0


def resolve_port(flag_value: int | None, env: dict | None = None) -> int:
    """Flag beats environment beats default 8000."""
    if flag_value is not None:
        return flag_value
    env = os.environ if env is None else env
    raw = env.get(PORT_ENV_VAR)
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            raise _UsageError(f"{PORT_ENV_VAR} must be an integer, got {raw!r}") from None
    return 8000


def cmd_serve(args: argparse.Namespace) -> int:
    # Imported lazily: the web stack is slow to import and the other
    # subcommands should stay snappy.
    import uvicorn

    from .service import ServiceConfig, create_app

    port = resolve_port(args.port)
    config = ServiceConfig(
        model_path=args.model,
        catalog_path=args.catalog,
        host=args.host,
        port=port,
        facet=args.facet,
        default_k=args.top_k,
    )
    try:
        app = create_app(config)
    except (OSError, ModelParseError, ModelValidationError, CatalogError) as exc:
        raise _UsageError(str(exc)) from exc
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plconf", description="Product-line configurator tools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check one full configuration against a model")
    p.add_argument("--model", required=True)
    p.add_argument("--config", required=True, help="comma- or whitespace-separated selected feature ids")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("enumerate", help="list every valid full configuration")
    p.add_argument("--model", required=True)
    p.add_argument("--limit", type=int, default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("recommend", help="rank catalog entries against a query configuration")
    p.add_argument("--model", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--query", required=True, help="comma- or whitespace-separated selected feature ids")
    p.add_argument("--facet", default=None)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--show-invalid", action="store_true")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("check-catalog", help="validate every catalog entry")
    p.add_argument("--model", required=True)
    p.add_argument("--catalog", required=True)
    p.set_defaults(func=cmd_check_catalog)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--model", required=True)
    p.add_argument("--catalog", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=None, help=f"listen port (or set {PORT_ENV_VAR}; flag wins)")
    p.add_argument("--facet", default=None)
    p.add_argument("--top-k", type=int, default=5, help="default recommendation count")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
