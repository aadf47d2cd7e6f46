#!/usr/bin/env python3
"""Recompute the Zeno-cut stage-count thresholds and rewrite the frozen
regression fixture consumed by the acceptance suite.

The thresholds are defined by the simulation itself: a power-of-two scan up
to m = 256 refined by integer bisection around the epsilon crossing, for the
matched sizes nbar = N in {2, 4, 9} at theta = pi/2, epsilon = 0.05.
"""

import json
import math
import time
from pathlib import Path

from zenolab import cascade as casc
from zenolab import fock

THETA = math.pi / 2.0
EPSILON = 0.05
CASES = [
    {"nbar": 2, "alpha": math.sqrt(2.0), "fock_n": 2, "n_max": 26},
    {"nbar": 4, "alpha": 2.0, "fock_n": 4, "n_max": 36},
    {"nbar": 9, "alpha": 3.0, "fock_n": 9, "n_max": 56},
]
OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "cascade_mstar.json"


def threshold(mode_a: fock.ModeSpec, alpha: float, n_max: int) -> int:
    config = casc.CascadeConfig(
        topology=casc.ZENO_CUT,
        total_phase=THETA,
        stages=1,
        input=fock.OpticalInputSpec(mode_a, fock.Coherent(alpha), n_max),
        fresh_a=mode_a,
        zeno_epsilon=EPSILON,
    )
    scan = casc.zeno_threshold_scan(config, casc.default_scan_grid(256), refine=True)
    if scan.m_star is None:
        raise SystemExit(f"no threshold found below m=256 for {mode_a}")
    return scan.m_star


def main() -> None:
    frozen = []
    for case in CASES:
        t0 = time.perf_counter()
        m_coh = threshold(fock.Vacuum(), case["alpha"], case["n_max"])
        m_fock = threshold(fock.Fock(case["fock_n"]), case["alpha"], case["n_max"])
        frozen.append({**case, "m_star_coherent": m_coh, "m_star_fock": m_fock})
        print(
            f"nbar={case['nbar']}: m*_coh={m_coh} m*_fock={m_fock} "
            f"ratio={m_fock / m_coh:.3f} ({time.perf_counter() - t0:.1f}s)"
        )
    OUT.write_text(
        json.dumps(
            {
                "comment": (
                    "Frozen regression values for the Zeno-cut stage-count "
                    "thresholds. Regenerate with scripts/freeze_cascade_fixtures.py; "
                    "the thresholds are defined by the simulation itself (first run "
                    "computed them by brute-force scan plus integer bisection)."
                ),
                "theta": THETA,
                "epsilon": EPSILON,
                "cases": frozen,
            },
            indent=2,
        )
        + "\n"
    )
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
