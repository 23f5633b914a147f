#!/usr/bin/env python3
"""Walk the laptop configurator end to end on the bundled fixture.

Enters a wish list choice by choice, runs into the category conflict,
shows the catalog recommendations, applies the closest valid one, and
dumps the session log.
"""
from __future__ import annotations

import sys

from plconf.engine import DecisionState, Outcome
from plconf.fixtures import load_fixture
from plconf.session import (
    apply_recommendation,
    decide,
    export_log,
    new_session,
    recommendations,
    suggest_next,
)

WISH = [
    "UbuntuLinux",
    "320GB",
    "CD_DVD+RW",
    "UltraLight",
    "2GB",
    "IntelAtom",
]


def main() -> int:
    model, catalog, _ = load_fixture("dell")
    s = new_session(model, catalog)
    print(f"session {s.id} on {model.root}: {len(model.features)} features, "
          f"{len(catalog.entries)} catalog entries\n")

    for fid in WISH:
        result = decide(s, fid, DecisionState.SELECTED)
        ripple = ", ".join(f"{f}={st.value}" for f, st in result.derived) or "nothing new"
        print(f"decide {fid:<12} -> {ripple}")

    print(f"\nnext to look at: {suggest_next(s)}")
    print("\nforcing Mininotebook against the propagated rejection:")
    result = decide(s, "Mininotebook", DecisionState.SELECTED)
    assert result.outcome is Outcome.CONFLICT
    for v in result.violations:
        print(f"  conflict: {v.describe()}")
    print(f"session status: {s.status.value}")

    print("\nclosest shipping configurations:")
    for r in recommendations(s, 4):
        shared = sorted(r.features & s.config.selected())
        print(f"  {r.config_id}  similarity={r.similarity:.6f}  shares {len(shared)} features")

    apply_recommendation(s, "C1.3")
    print(f"\napplied C1.3 -> status {s.status.value}")
    chosen = sorted(s.config.selected(), key=model.position.__getitem__)
    print("final configuration:", " ".join(chosen))

    print("\nsession log:")
    print(export_log(s), end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
