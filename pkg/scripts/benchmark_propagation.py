#!/usr/bin/env python3
"""Propagation latency on a large synthetic model.

Builds a random feature tree with cross-tree constraints, then measures the
cost of one interactive step — add a user decision to the current fixpoint
and re-propagate — across many random decisions.  Reported numbers are
milliseconds per step.

Usage:
    benchmark_propagation.py [--features N] [--cross N] [--groups N]
                             [--trials N] [--seed N]
"""
from __future__ import annotations

import argparse
import random
import statistics
import sys
import time

from plconf.engine import DecisionState, Outcome, PartialConfiguration, propagate
from plconf.model import FeatureModel, parse_model


def synth_model(rng: random.Random, n_features: int, n_cross: int, n_groups: int) -> FeatureModel:
    """Random tree (mostly optional, some mandatory), exclusive-ish groups on
    wide parents, random requires/excludes pairs."""
    ids = [f"N{i}" for i in range(1, n_features + 1)]
    lines = ["fm 1", f"feature {ids[0]} root"]
    children: dict[str, list[str]] = {fid: [] for fid in ids}
    parents: dict[str, str] = {}
    variability: dict[str, str] = {}
    for i in range(1, n_features):
        p = ids[rng.randrange(i)]
        parents[ids[i]] = p
        children[p].append(ids[i])
        variability[ids[i]] = "mandatory" if rng.random() < 0.2 else "optional"

    group_lines = []
    wide = [fid for fid in ids if len(children[fid]) >= 3]
    rng.shuffle(wide)
    for gp in wide[:n_groups]:
        members = rng.sample(children[gp], rng.randint(2, min(5, len(children[gp]))))
        for mid in members:
            variability[mid] = "grouped"
        group_lines.append(f"group {gp} 1 1 " + " ".join(members))

    for fid in ids[1:]:
        lines.append(f"feature {fid} {parents[fid]} {variability[fid]}")
    lines.extend(group_lines)

    seen = set()
    while len(seen) < n_cross:
        a, b = rng.sample(ids, 2)
        kind = rng.choice(("requires", "excludes"))
        key = (kind, a, b)
        if key in seen:
            continue
        seen.add(key)
        lines.append(f"{kind} {a} {b}")
    return parse_model("\n".join(lines) + "\n")


def run(n_features: int, n_cross: int, n_groups: int, trials: int, seed: int) -> dict:
    rng = random.Random(seed)
    # A dense random constraint set can contradict the mandatory skeleton
    # outright; reroll until the empty configuration propagates cleanly.
    for _ in range(50):
        model = synth_model(rng, n_features, n_cross, n_groups)
        base = PartialConfiguration(model)
        if propagate(base).outcome is Outcome.CONSISTENT:
            break
    else:
        raise RuntimeError("could not synthesise a satisfiable model")

    undecided = [
        f.id for f in model.features
        if base.state(f.id) is DecisionState.UNDECIDED
    ]
    timings_ms = []
    conflicts = 0
    for _ in range(trials):
        fid = rng.choice(undecided)
        choice = rng.choice((DecisionState.SELECTED, DecisionState.REJECTED))
        config = base.clone()
        t0 = time.perf_counter()
        config.set_user(fid, choice)
        result = propagate(config)
        timings_ms.append((time.perf_counter() - t0) * 1e3)
        if result.outcome is Outcome.CONFLICT:
            conflicts += 1

    timings_ms.sort()
    return {
        "features": n_features,
        "cross": n_cross,
        "trials": trials,
        "conflicts": conflicts,
        "min_ms": timings_ms[0],
        "median_ms": statistics.median(timings_ms),
        "p90_ms": timings_ms[int(0.9 * (len(timings_ms) - 1))],
        "max_ms": timings_ms[-1],
    }


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--features", type=int, default=500)
    ap.add_argument("--cross", type=int, default=200)
    ap.add_argument("--groups", type=int, default=30)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    stats = run(args.features, args.cross, args.groups, args.trials, args.seed)
    print(
        f"{stats['features']} features, {stats['cross']} cross constraints, "
        f"{stats['trials']} decisions ({stats['conflicts']} conflicted)"
    )
    for key in ("min_ms", "median_ms", "p90_ms", "max_ms"):
        print(f"  {key.removesuffix('_ms'):>6}: {stats[key]:8.3f} ms")
    return 0


if __name__ == "__main__":
    sys.exit(main())
