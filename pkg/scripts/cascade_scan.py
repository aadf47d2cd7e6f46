#!/usr/bin/env python3
"""Scan the Zeno-cut cascade deviation versus stage count for the matched
nbar = 4 coherent-only and Fock+coherent inputs and write one CSV each to
results/ (the two series of the stage-scaling figure)."""

import json
import math
import tempfile
from pathlib import Path

from zenolab.scenario import emit, execute, parse_scenario

OUT = Path(__file__).resolve().parent.parent / "results"

BASE = {
    "schema_version": 1,
    "kind": "mz-cascade",
    "topology": "zeno-cut",
    "theta": math.pi / 2.0,
    "mode_b": {"kind": "coherent", "alpha": 2.0},
    "n_max": 36,
    "m_values": [1, 2, 4, 8, 16, 32, 64, 128, 256],
    "refine": True,
}


def run(name: str, mode_a: dict) -> None:
    scenario = dict(BASE, mode_a=mode_a, fresh_a=mode_a)
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(scenario, fh)
        path = fh.name
    table = execute(parse_scenario(path), reproducible=True)
    target = OUT / name
    emit(table, "csv", str(target))
    print(f"wrote {target} (m* = {table.metadata['m_star']})")


def main() -> None:
    OUT.mkdir(exist_ok=True)
    run("cascade_coherent.csv", {"kind": "vacuum"})
    run("cascade_fock.csv", {"kind": "fock", "n": 4})


if __name__ == "__main__":
    main()
