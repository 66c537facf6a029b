"""Station-count sweeps: one EBCD-vs-Dijkstra comparison per (axis value, seed)."""

from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import pandas as pd

from relayroute.params import SimConfig, SweepSpec
from relayroute.pipeline import compare

SWEEP_COLUMNS: tuple[str, ...] = (
    "axis_value",
    "seed",
    "ebcd_mean_mj",
    "dijkstra_mean_mj",
    "savings_percent",
    "power_capped",
    "unreachable",
)


@dataclass(frozen=True, slots=True)
class SweepRow:
    """One CSV row. `seed` is 'mean' on aggregate rows; `error` is set on failed points."""

    axis_value: int
    seed: int | str
    ebcd_mean_mj: float | None = None
    dijkstra_mean_mj: float | None = None
    savings_percent: float | None = None
    power_capped: float | None = None
    unreachable: float | None = None
    error: str | None = None

    def as_record(self) -> dict[str, object]:
        return {c: getattr(self, c) for c in SWEEP_COLUMNS}


@dataclass(frozen=True, slots=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    @property
    def errors(self) -> tuple[SweepRow, ...]:
        return tuple(r for r in self.rows if r.error is not None)

    @property
    def partial(self) -> bool:
        return bool(self.errors)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [r.as_record() for r in self.rows], columns=list(SWEEP_COLUMNS)
        )


def point_config(spec: SweepSpec, base: SimConfig, value: int, seed: int) -> SimConfig:
    if spec.axis == "ms_count":
        topology = replace(base.topology, n_ms=value, n_rs=spec.fixed)
    else:
        topology = replace(base.topology, n_rs=value, n_ms=spec.fixed)
    return replace(base, scenario=spec.scenario, seed=seed, topology=topology)


def _run_point(args: tuple[SimConfig, int, int]) -> SweepRow:
    cfg, value, seed = args
    try:
        result = compare(cfg)
    except (ValueError, KeyError) as e:
        return SweepRow(value, seed, error=f"{type(e).__name__}: {e}")
    return SweepRow(
        axis_value=value,
        seed=seed,
        ebcd_mean_mj=result.ebcd.mean_energy_per_frame_mj,
        dijkstra_mean_mj=result.baseline.mean_energy_per_frame_mj,
        savings_percent=result.savings_percent,
        power_capped=float(result.ebcd.power_capped_links),
        unreachable=float(result.ebcd.unreachable_count),
    )


def _mean(values: list[float]) -> float | None:
    return math.fsum(values) / len(values) if values else None


def _mean_row(value: int, rows: list[SweepRow]) -> SweepRow:
    ok = [r for r in rows if r.error is None]
    return SweepRow(
        axis_value=value,
        seed="mean",
        ebcd_mean_mj=_mean([r.ebcd_mean_mj for r in ok]),
        dijkstra_mean_mj=_mean([r.dijkstra_mean_mj for r in ok]),
        savings_percent=_mean([r.savings_percent for r in ok]),
        power_capped=_mean([r.power_capped for r in ok]),
        unreachable=_mean([r.unreachable for r in ok]),
    )


def run_sweep(
    spec: SweepSpec, base: SimConfig, jobs: int = 1, verbose: bool = False
) -> SweepResult:
    """Rows in specification order: the seeds of each axis value, then its mean row.

    Seeds of a point are base.seed, base.seed + 1, ... A failing point becomes
    an error row and the sweep continues.
    """
    seeds = [base.seed + i for i in range(spec.seeds_per_point)]
    points = [
        (point_config(spec, base, value, seed), value, seed)
        for value in spec.values
        for seed in seeds
    ]

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_point, points))
    else:
        results = [_run_point(p) for p in points]

    rows: list[SweepRow] = []
    for i, value in enumerate(spec.values):
        chunk = results[i * len(seeds) : (i + 1) * len(seeds)]
        for row in chunk:
            if verbose:
                status = row.error or f"savings {row.savings_percent:.3f}%"
                print(f"[Sweep] {spec.axis}={value} seed={row.seed}: {status}", file=sys.stderr)
        rows.extend(chunk)
        rows.append(_mean_row(value, chunk))
    return SweepResult(tuple(rows))
