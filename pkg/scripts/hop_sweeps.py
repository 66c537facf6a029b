from __future__ import annotations

from dataclasses import replace
from pathlib import Path

from relayroute.io.config import load_config
from relayroute.io.report import write_table
from relayroute.params import Scenario, SweepSpec
from relayroute.sweep import run_sweep

# --- Sweep configuration ---
CONFIG_PATH = "configs/default.yaml"
OUT_DIR = "results"

N_FRAMES = 200
SEEDS_PER_POINT = 5
JOBS = 4

# MS-count sweeps with a fixed RS count, one per hop bound
MS_VALUES = (10, 20, 30, 40, 50, 60, 70, 80, 90, 100)
FIXED_RS = {Scenario.THREE_HOP: 10, Scenario.FOUR_HOP: 20, Scenario.FIVE_HOP: 30}

# RS-count sweeps with 100 MSs
RS_VALUES = (5, 10, 15, 20, 25, 30)
FIXED_MS = 100


def main() -> int:
    base = replace(load_config(CONFIG_PATH), n_frames=N_FRAMES)
    Path(OUT_DIR).mkdir(parents=True, exist_ok=True)

    for scenario in Scenario:
        for spec in (
            SweepSpec("ms_count", MS_VALUES, FIXED_RS[scenario], scenario, SEEDS_PER_POINT),
            SweepSpec("rs_count", RS_VALUES, FIXED_MS, scenario, SEEDS_PER_POINT),
        ):
            result = run_sweep(spec, base, jobs=JOBS, verbose=True)
            path = f"{OUT_DIR}/{scenario.label}_{spec.axis}.csv"
            write_table(result.to_frame(), path)
            print(f"[Result] {path}: {len(result.rows)} rows, {len(result.errors)} errors")

    return 0


if __name__ == "__main__":
    raise SystemExit(main())
